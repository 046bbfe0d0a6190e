#pragma once

#include <cmath>
#include <vector>

#include "thorin/numkit/real.hpp"

namespace thorin::numkit {

/// Principal branch W0 of the Lambert function, w * e^w = x, w >= -1.
/// Halley iteration at ctx precision. Throws std::domain_error for x < -1/e.
Real lambert_w0(const Real& x, const PrecisionContext& ctx);
double lambert_w0(double x);

/// ln Gamma(x) for x > 0 at ctx precision. Throws std::domain_error for x <= 0.
Real log_gamma(const Real& x, const PrecisionContext& ctx);
double log_gamma(double x);

/// Pascal triangle rows 0..n in T; row r has r+1 entries.
template <class T>
std::vector<std::vector<T>> binomial_rows(int n) {
  std::vector<std::vector<T>> rows(static_cast<std::size_t>(n) + 1);
  for (int r = 0; r <= n; ++r) {
    auto& row = rows[static_cast<std::size_t>(r)];
    row.assign(static_cast<std::size_t>(r) + 1, T(1));
    for (int c = 1; c < r; ++c) {
      const auto& prev = rows[static_cast<std::size_t>(r) - 1];
      row[static_cast<std::size_t>(c)] =
          prev[static_cast<std::size_t>(c) - 1] + prev[static_cast<std::size_t>(c)];
    }
  }
  return rows;
}

/// 0!, 1!, ..., n! in T.
template <class T>
std::vector<T> factorials(int n) {
  std::vector<T> f(static_cast<std::size_t>(n) + 1, T(1));
  for (int i = 1; i <= n; ++i) f[static_cast<std::size_t>(i)] = f[static_cast<std::size_t>(i) - 1] * i;
  return f;
}

}  // namespace thorin::numkit

#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "thorin/laguerre/samples.hpp"
#include "thorin/numkit/real.hpp"
#include "thorin/numkit/special.hpp"
#include "thorin/numkit/tensor.hpp"

namespace thorin::laguerre {

/// Laguerre coefficients a_k for k <= m in native precision.
using CoeffTensor = numkit::BoxTensor<double>;
/// Same layout with extended-precision entries.
using CoeffTensorX = numkit::BoxTensor<numkit::Real>;

CoeffTensor to_double(const CoeffTensorX& a);

/// Monte-Carlo estimate (1/N) sum_i phi_k(X_i) for all k <= m.
/// Rows are summed in fixed chunks with Kahan compensation and the chunk sums
/// are merged in chunk order, so the result does not depend on `threads`.
CoeffTensor empirical_coeffs(const SampleMatrix& samples, const numkit::MultiIndex& m, unsigned threads = 0);

/// Order-sensitive FNV-1a digest of the tensor shape and entries.
std::uint64_t coeffs_hash(const CoeffTensor& a);

/// Per-axis weights W[k][l] = C(k,l) (-2)^l / l!, 0 <= l <= k <= kmax.
template <class T>
std::vector<std::vector<T>> laguerre_weights(int kmax) {
  const auto binom = numkit::binomial_rows<T>(kmax);
  const auto fact = numkit::factorials<T>(kmax);
  std::vector<std::vector<T>> w(static_cast<std::size_t>(kmax) + 1);
  for (int k = 0; k <= kmax; ++k) {
    auto& row = w[static_cast<std::size_t>(k)];
    row.reserve(static_cast<std::size_t>(k) + 1);
    T pow2(1);
    for (int l = 0; l <= k; ++l) {
      const T sign = (l % 2 == 0) ? T(1) : T(-1);
      row.push_back(binom[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)] * pow2 * sign /
                    fact[static_cast<std::size_t>(l)]);
      pow2 = pow2 * T(2);
    }
  }
  return w;
}

/// a_k = sqrt(2)^d sum_{l<=k} C(k,l) (-2)^{|l|} / l! mu_l from the -1-shifted
/// moments mu. The transform is applied one axis at a time.
template <class T>
numkit::BoxTensor<T> coeffs_from_moments(const numkit::BoxTensor<T>& mu) {
  const auto& box = mu.box();
  const std::size_t d = box.dim();
  numkit::BoxTensor<T> cur = mu;
  for (std::size_t axis = 0; axis < d; ++axis) {
    const int ma = box.upper()[axis];
    const auto w = laguerre_weights<T>(ma);
    const std::size_t stride = box.stride(axis);
    const std::size_t extent = static_cast<std::size_t>(ma) + 1;
    numkit::BoxTensor<T> next(box, T(0));
    for (std::size_t off = 0; off < box.size(); ++off) {
      const std::size_t k = (off / stride) % extent;
      const std::size_t base = off - k * stride;
      T acc(0);
      for (std::size_t l = 0; l <= k; ++l) acc += w[k][l] * cur.at_offset(base + l * stride);
      next.at_offset(off) = acc;
    }
    cur = std::move(next);
  }
  using std::sqrt;
  const T scale = d % 2 == 0 ? T(1) : sqrt(T(2));
  const T pow2 = T(static_cast<double>(1ULL << (d / 2)));
  for (auto& v : cur.values()) v = v * scale * pow2;
  return cur;
}

/// Truncated reconstruction sum_{k<=m} a_k phi_k(x); may be negative.
double density_eval(const CoeffTensor& a, std::span<const double> x);
/// max(density_eval, 0), for plotting.
double density_eval_clamped(const CoeffTensor& a, std::span<const double> x);

/// sum_{k<=m} a_k^2.
double l2_norm_sq(const CoeffTensor& a);

nlohmann::json to_json(const CoeffTensor& a);
/// Throws DataError on shape mismatch or non-finite entries.
CoeffTensor coeffs_from_json(const nlohmann::json& j);

}  // namespace thorin::laguerre

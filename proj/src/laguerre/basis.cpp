#include "thorin/laguerre/basis.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace thorin::laguerre {

std::vector<double> phi_row(int kmax, double x) {
  if (!(x >= 0.0) || !std::isfinite(x)) throw std::domain_error("phi: negative or non-finite argument");
  std::vector<double> out(static_cast<std::size_t>(kmax) + 1);
  const double y = 2.0 * x;
  const double scale = std::numbers::sqrt2 * std::exp(-x);
  double prev = 1.0;
  double cur = 1.0 - y;
  out[0] = scale;
  if (kmax >= 1) out[1] = scale * cur;
  for (int k = 1; k < kmax; ++k) {
    const double next = ((2.0 * k + 1.0 - y) * cur - k * prev) / (k + 1.0);
    prev = cur;
    cur = next;
    out[static_cast<std::size_t>(k) + 1] = scale * cur;
  }
  return out;
}

double phi1(int k, double x) { return phi_row(k, x).back(); }

double phi(const numkit::MultiIndex& k, std::span<const double> x) {
  if (k.size() != x.size()) throw std::invalid_argument("phi: dimension mismatch");
  double r = 1.0;
  for (std::size_t i = 0; i < k.size(); ++i) r *= phi1(k[i], x[i]);
  return r;
}

}  // namespace thorin::laguerre

#include "thorin/ggc/moschopoulos.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace thorin::ggc {

double moschopoulos_density(std::span<const double> alpha, std::span<const double> s, double x, int terms) {
  if (alpha.size() != s.size() || alpha.empty()) throw std::invalid_argument("moschopoulos: shape mismatch");
  if (terms < 1) throw std::invalid_argument("moschopoulos: terms must be >= 1");
  if (x < 0.0) throw std::domain_error("moschopoulos: negative argument");
  const double beta1 = *std::min_element(s.begin(), s.end());
  double rho = 0.0;
  double c = 1.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    rho += alpha[i];
    c *= std::pow(beta1 / s[i], alpha[i]);
  }
  const auto nterms = static_cast<std::size_t>(terms);
  std::vector<double> gamma(nterms + 1, 0.0);
  for (std::size_t k = 1; k <= nterms; ++k) {
    double g = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) g += alpha[i] * std::pow(1.0 - beta1 / s[i], static_cast<double>(k));
    gamma[k] = g / static_cast<double>(k);
  }
  std::vector<double> delta(nterms, 0.0);
  delta[0] = 1.0;
  for (std::size_t k = 0; k + 1 < nterms; ++k) {
    double acc = 0.0;
    for (std::size_t i = 1; i <= k + 1; ++i) acc += static_cast<double>(i) * gamma[i] * delta[k + 1 - i];
    delta[k + 1] = acc / static_cast<double>(k + 1);
  }
  double f = 0.0;
  for (std::size_t k = 0; k < nterms; ++k) {
    const double shape = rho + static_cast<double>(k);
    f += delta[k] * std::pow(x, shape - 1.0) * std::exp(-x / beta1) / (std::tgamma(shape) * std::pow(beta1, shape));
  }
  return c * f;
}

}  // namespace thorin::ggc

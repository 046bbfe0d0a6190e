#pragma once

#include <span>

namespace thorin::ggc {

/// Partial sum of the Moschopoulos gamma series for the density of
/// sum_i Gamma(alpha_i, scale s_i) at x, anchored on the smallest scale.
/// Evaluated in plain double with pow/exp/tgamma; it underflows to 0 when the
/// smallest scale is tiny relative to x.
double moschopoulos_density(std::span<const double> alpha, std::span<const double> s, double x, int terms);

}  // namespace thorin::ggc

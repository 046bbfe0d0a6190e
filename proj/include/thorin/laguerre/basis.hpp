#pragma once

#include <span>
#include <vector>

#include "thorin/numkit/multi_index.hpp"

namespace thorin::laguerre {

/// phi_0(x), ..., phi_kmax(x) where phi_k(x) = sqrt(2) e^{-x} L_k(2x).
/// Uses the three-term Laguerre recurrence. Throws std::domain_error for x < 0.
std::vector<double> phi_row(int kmax, double x);

/// Univariate phi_k(x).
double phi1(int k, double x);

/// Tensorized prod_i phi_{k_i}(x_i).
double phi(const numkit::MultiIndex& k, std::span<const double> x);

}  // namespace thorin::laguerre

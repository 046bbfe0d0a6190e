#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"
#include "thorin/laguerre/samples.hpp"

namespace thorin::ggc {

/// Finite gamma convolution: shapes alpha_i > 0 and non-negative scale rows s_i
/// (the atoms of the Thorin measure sum_i alpha_i delta_{s_i}).
class GgcModel {
 public:
  GgcModel() = default;
  /// `scales` is row-major n x d. Throws std::invalid_argument on invalid input.
  GgcModel(std::vector<double> alpha, std::vector<double> scales, std::size_t dim);
  GgcModel(std::vector<double> alpha, const std::vector<std::vector<double>>& rows);

  std::size_t n() const noexcept { return alpha_.size(); }
  std::size_t d() const noexcept { return dim_; }
  const std::vector<double>& alpha() const noexcept { return alpha_; }
  const std::vector<double>& scales() const noexcept { return scales_; }
  double alpha(std::size_t i) const noexcept { return alpha_[i]; }
  double scale(std::size_t i, std::size_t j) const noexcept { return scales_[i * dim_ + j]; }
  std::span<const double> row(std::size_t i) const noexcept { return {scales_.data() + i * dim_, dim_}; }
  /// |s_i| = sum_j s_ij.
  double row_sum(std::size_t i) const noexcept;
  /// |alpha|.
  double total_mass() const noexcept;

  friend bool operator==(const GgcModel&, const GgcModel&) = default;

 private:
  std::vector<double> alpha_;
  std::vector<double> scales_;
  std::size_t dim_ = 0;
};

nlohmann::json to_json(const GgcModel& model);
/// Throws DataError on malformed JSON or invalid parameters.
GgcModel model_from_json(const nlohmann::json& j);

/// K(t) = -sum_i alpha_i log(1 - <s_i, t>). Throws std::domain_error when some
/// 1 - <s_i, t> is real and non-positive.
std::complex<double> cgf(const GgcModel& model, std::span<const std::complex<double>> t);

/// x_i = s_i / (1 + |s_i|), row-major n x d.
std::vector<double> simplex_scales(const GgcModel& model);

/// Concatenation of the atoms of two models of equal dimension.
GgcModel concatenate(const GgcModel& a, const GgcModel& b);

/// Law of X_j: (alpha, column j) with zero-scale atoms dropped. j is 0-based.
GgcModel marginal(const GgcModel& model, std::size_t j);

/// Law of <c, X>: (alpha, s c) with zero-scale atoms dropped.
GgcModel linear_combination(const GgcModel& model, std::span<const double> c);

/// N draws of X = s^T Z with Z_i ~ Gamma(alpha_i, 1). Rows are generated in
/// fixed blocks with independent streams derived from `seed`.
laguerre::SampleMatrix sample(const GgcModel& model, std::size_t count, std::uint64_t seed,
                              unsigned threads = 0);

}  // namespace thorin::ggc

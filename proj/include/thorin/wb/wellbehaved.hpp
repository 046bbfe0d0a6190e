#pragma once

// Regularity diagnostics on the Thorin measure of a finite gamma convolution.

#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "thorin/ggc/model.hpp"
#include "thorin/laguerre/coeffs.hpp"

namespace thorin::wb {

/// h(t) = (t + 1) / (t - 1). Throws std::domain_error at the pole t = 1.
std::complex<double> mobius_h(std::complex<double> t);

/// Raised by disc_image when b = 1, where the image of D(0, 1) is the left half-plane.
class HalfPlaneImage : public std::domain_error {
 public:
  HalfPlaneImage() : std::domain_error("disc_image: h(D(0,1)) is the half-plane Re < 0") {}
};

struct Disc {
  double center;
  double radius;
};

/// (c(b), r(b)) with c = (b^2+1)/(b^2-1), r = |2b/(b^2-1)|. For b < 1 this is
/// h(D(0,b)); for b > 1 it is the complement of h(D(0,b)). Throws
/// HalfPlaneImage for b = 1 and std::invalid_argument for b <= 0.
Disc disc_image(double b);

struct WbReport {
  /// False only when the subset enumeration was skipped (too many atoms).
  bool decided = true;
  bool is_wb = false;
  /// Supremum of admissible eps; +inf when unbounded, 0 when not w.b.
  double best_eps = 0.0;
  /// Violating or binding atom subset, human readable; empty when none.
  std::string witness;
  double total_mass = 0.0;
};

/// Largest atom count for which subsets are enumerated in d > 1.
inline constexpr std::size_t kMaxSubsetAtoms = 22;

/// Greatest eps for which the model is eps-w.b. In d = 1 this is read from the
/// interval condition on each scale; in d > 1 every minimal majority subset
/// must have full rank, and eps is the minimum over full-rank d-subsets of
/// rows of the largest |h(t_j)| - 1 at the solution of s_J t = 1.
WbReport best_eps(const ggc::GgcModel& model);

/// is_wb is true iff the model is eps-w.b., i.e. eps < best_eps.
WbReport is_eps_wb(const ggc::GgcModel& model, double eps);

namespace detail {
/// The d > 1 subset machinery applied regardless of dimension.
WbReport best_eps_general(const ggc::GgcModel& model);
/// Rank of the rows of an n x d row-major matrix by pivoted Gram-Schmidt at
/// 128 bits, ignoring residuals below 1e-20 of the largest row norm.
std::size_t row_rank(const std::vector<double>& rows, std::size_t d);
}  // namespace detail

enum class Dependence { independent, comonotonic, general };

struct DependenceReport {
  Dependence kind = Dependence::general;
  /// Number of distinct rays spanned by the scale rows.
  std::size_t rays = 0;
  /// Fewer rays than dimensions: the law has no density on R_+^d.
  bool singular = false;
};

const char* to_string(Dependence kind);

/// Rows are compared after normalization to unit 1-norm, with relative
/// tolerance 1e-9.
DependenceReport classify_dependence(const ggc::GgcModel& model);

struct DecayResult {
  /// max_k |a_k| (1 + eps')^{|k|}.
  double b_fit = 0.0;
  bool ok = false;
  /// g(j) = max_{|k| = j} |a_k| (1 + eps')^j for j = 0..|m|.
  std::vector<double> profile;
};

/// Empirical check of |a_k| <= B (1 + eps')^{-|k|}: ok iff every g(j) with
/// j > 2 stays within a factor 10 of max_{j <= 2} g(j). Throws
/// std::invalid_argument for eps' <= 0 or non-finite coefficients.
DecayResult decay_check(const laguerre::CoeffTensor& coeffs, double eps_prime);

nlohmann::json to_json(const WbReport& report);
WbReport wb_report_from_json(const nlohmann::json& j);

}  // namespace thorin::wb

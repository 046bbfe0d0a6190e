#pragma once

// Truncated L2 loss between Laguerre coefficient tensors and its global
// minimization over finite gamma convolutions by particle swarm.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "json.hpp"
#include "thorin/ggc/coeffs.hpp"
#include "thorin/ggc/model.hpp"
#include "thorin/laguerre/coeffs.hpp"
#include "thorin/laguerre/samples.hpp"
#include "thorin/numkit/real.hpp"
#include "thorin/wb/wellbehaved.hpp"

namespace thorin::estimator {

struct FitConfig {
  std::size_t n = 1;
  /// Truncation; empty means default_truncation(n, d).
  numkit::MultiIndex m;
  /// 0 means 20 times the number of search parameters.
  std::size_t swarm_size = 0;
  std::size_t max_iters = 2000;
  std::uint64_t seed = 0;
  unsigned precision_bits = 256;
  std::size_t restarts = 3;
  double param_floor = 1e-12;
  /// A restart stops after this many iterations whose relative improvement
  /// of the best loss stays below stall_tol.
  std::size_t stall_iters = 200;
  double stall_tol = 1e-12;
  unsigned threads = 0;

  /// Throws ConfigError when an invariant fails for dimension d.
  void validate(std::size_t d) const;
};

/// (2n) in d = 1, (n, ..., n) otherwise.
numkit::MultiIndex default_truncation(std::size_t n, std::size_t d);

struct FitReport {
  ggc::GgcModel model;
  double loss = 0.0;
  wb::WbReport wb;
  std::uint64_t empirical_coeffs_hash = 0;
  numkit::MultiIndex m;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  /// Swarm iterations summed over restarts.
  std::size_t iters = 0;
  std::size_t restarts_used = 0;
  unsigned bits_used = 0;
  /// False when some restart ended on max_iters instead of stalling.
  bool converged = false;
};

inline constexpr int kReportSchemaVersion = 1;

nlohmann::json to_json(const FitReport& report);
/// Throws DataError on malformed input.
FitReport fit_report_from_json(const nlohmann::json& j);

/// sum_{k<=m} (target_k - a_k(model))^2 with a_k from ggc::model_coeffs at ctx.
/// Throws std::invalid_argument when the target box differs from m.
double loss_Lm(const laguerre::CoeffTensor& target, const ggc::GgcModel& model, const numkit::MultiIndex& m,
               const numkit::PrecisionContext& ctx);

/// Loss for repeated evaluation on one target: hardware arithmetic when its
/// error bound certifies the coefficients, extended precision otherwise.
class LossEvaluator {
 public:
  LossEvaluator(laguerre::CoeffTensor target, unsigned fallback_bits);
  double operator()(const ggc::GgcModel& model) const;
  const laguerre::CoeffTensor& target() const noexcept { return target_; }

 private:
  laguerre::CoeffTensor target_;
  ggc::CoeffPlan plan_;
  unsigned bits_;
};

/// Maps between unconstrained search coordinates and models. Each atom uses
/// d + 2 coordinates: log alpha, then z_0..z_d with s_j = exp(z_j - z_0),
/// i.e. log of the simplex scale x_j and of the residual 1 - |x|.
class Parameterization {
 public:
  Parameterization(std::size_t n, std::size_t d, double floor);
  std::size_t size() const noexcept { return n_ * (d_ + 2); }
  ggc::GgcModel decode(std::span<const double> theta) const;
  std::vector<double> encode(const ggc::GgcModel& model) const;
  double lower(std::size_t i) const;
  double upper(std::size_t i) const;

 private:
  std::size_t n_;
  std::size_t d_;
  double floor_;
};

/// Minimizes the loss against `target` (box m = cfg.m or its default).
/// empirical_coeffs_hash is the hash of `target`.
FitReport fit_target(const laguerre::CoeffTensor& target, std::size_t d, const FitConfig& cfg);

/// Empirical coefficients of the samples, then fit_target.
FitReport fit_empirical(const laguerre::SampleMatrix& samples, const FitConfig& cfg);

/// Target from exact shifted moments mu_{k,-1}, k <= m, then fit_target.
FitReport project_density(const numkit::BoxTensor<numkit::Real>& moments, const FitConfig& cfg);

using Density = std::function<numkit::Real(std::span<const numkit::Real>)>;

struct MomentTensor {
  numkit::BoxTensor<numkit::Real> mu;
  /// Largest relative change between the last two quadrature levels.
  double achieved_rel_tol = 0.0;
  bool converged = false;
};

/// mu_{k,-1} = int x^k e^{-|x|} f(x) dx over prod_j [lower_j, inf), k <= m, by
/// double-exponential quadrature at ctx precision with relative tolerance
/// 10^{-bits/8}. d <= 2. `lower` may be empty (all zero).
MomentTensor theoretical_moments(const Density& f, const numkit::MultiIndex& m, const numkit::PrecisionContext& ctx,
                                 std::span<const double> lower = {});

}  // namespace thorin::estimator

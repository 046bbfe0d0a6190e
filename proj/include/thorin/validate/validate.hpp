#pragma once

// Goodness-of-fit tools and the benchmark distributions: one-sample
// Kolmogorov-Smirnov tests, QQ data, resampled p-values, synthetic samplers.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "thorin/estimator/estimator.hpp"
#include "thorin/ggc/model.hpp"
#include "thorin/laguerre/coeffs.hpp"
#include "thorin/laguerre/samples.hpp"

namespace thorin::validate {

using Cdf = std::function<double(double)>;
using Quantile = std::function<double(double)>;

struct KsResult {
  double d_stat = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
};

/// Largest sample size handled by the exact null distribution.
inline constexpr std::size_t kExactKsMaxN = 10000;

/// D = sup |F_N - F| from the order statistics. The p-value uses the exact
/// distribution of D_n for n <= kExactKsMaxN and the Kolmogorov series above.
KsResult ks_exact(std::vector<double> samples, const Cdf& cdf);

/// P(D_n < d) by the Marsaglia-Tsang-Wang matrix power. Far in the right
/// tail (n d^2 > 7.24) their closed-form tail approximation is used instead.
double kolmogorov_cdf_exact(std::size_t n, double d);

/// P(sqrt(n) D > lambda) in the limit n -> inf.
double kolmogorov_q(double lambda);

struct QqPoint {
  double theoretical = 0.0;
  double empirical = 0.0;
};

/// Matched quantiles at plotting positions (i - 0.5)/count, i = 1..count,
/// with the last `drop_tail` points removed. Requires count <= samples.size().
std::vector<QqPoint> qq_points(std::vector<double> samples, const Quantile& quantile, std::size_t count,
                               std::size_t drop_tail = 0);

/// B exact KS p-values of independent size-N samples of a univariate model
/// against true_cdf. Replicate b uses seed stream b.
std::vector<double> resampled_pvalues(const ggc::GgcModel& model, const Cdf& true_cdf, std::size_t n, std::size_t b,
                                      std::uint64_t seed, unsigned threads = 0);

/// Integral over [0, x] of a univariate Laguerre series density.
double laguerre_cdf(const laguerre::CoeffTensor& a, double x);

/// A named benchmark distribution with its parameters filled in:
///   lognormal(mu=0, sigma=0.83); pareto(k=2.5, xm=1); weibull(k=1.5, lambda=1);
///   mln_gaussian(mu=0, sigma=1, rho=0.5), d = 2;
///   clayton_pareto_lognormal(theta=7, k=2.5, mu=0, sigma=0.83), d = 2, survival
///   Clayton copula with Pareto(k, 1) and LN(mu, sigma) marginals.
struct BenchDistribution {
  std::string name;
  std::vector<double> params;
  std::size_t dim = 1;
};

const std::vector<std::string>& bench_names();

/// Missing trailing parameters take their defaults. Throws ConfigError for an
/// unknown name, too many parameters or values outside the parameter domain.
BenchDistribution make_bench(const std::string& name, std::vector<double> params = {});

/// Deterministic N x d samples.
laguerre::SampleMatrix bench_sampler(const BenchDistribution& dist, std::size_t count, std::uint64_t seed);

Cdf bench_marginal_cdf(const BenchDistribution& dist, std::size_t axis);
Quantile bench_marginal_quantile(const BenchDistribution& dist, std::size_t axis);

/// Density in extended precision, for theoretical_moments.
estimator::Density bench_density(const BenchDistribution& dist);

/// Lower end of the support on each axis.
std::vector<double> bench_support_lower(const BenchDistribution& dist);

/// Empty, or a note when the density is not square integrable.
std::string bench_warning(const BenchDistribution& dist);

/// Standard normal quantile.
double normal_quantile(double p);

/// Ranks divided by N + 1 (ties broken by position).
std::vector<double> pseudo_observations(const std::vector<double>& column);

/// K(-t) = 1 - (1+t)/t ln(1+t) for the gamma convolution whose Thorin
/// measure is uniform on [0, 1]. Throws std::invalid_argument for t <= 0.
double curious_cgf(double t);

/// Cumulant at -t of the sum of n independent G(1/n, j/(n+1)), j = 1..n.
double curious_cgf_discretized(double t, std::size_t n);

/// The n-atom model behind curious_cgf_discretized.
ggc::GgcModel curious_model(std::size_t n);

}  // namespace thorin::validate

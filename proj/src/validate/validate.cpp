#include "thorin/validate/validate.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "thorin/numkit/errors.hpp"
#include "thorin/numkit/parallel.hpp"
#include "thorin/numkit/random.hpp"

namespace thorin::validate {

using numkit::Real;

namespace {

// Rescaling thresholds of the exact matrix power.
constexpr double kBig = 1e140;
constexpr int kBigExp = 140;

using Matrix = std::vector<double>;

void mat_mul(const Matrix& a, const Matrix& b, Matrix& c, int m) {
  std::fill(c.begin(), c.end(), 0.0);
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < m; ++k) {
      const double aik = a[static_cast<std::size_t>(i * m + k)];
      if (aik == 0.0) continue;
      const double* br = &b[static_cast<std::size_t>(k * m)];
      double* cr = &c[static_cast<std::size_t>(i * m)];
      for (int j = 0; j < m; ++j) cr[j] += aik * br[j];
    }
  }
}

// v = a^n with the decimal exponent of the scale kept in *ev.
void mat_pow(const Matrix& a, int ea, Matrix& v, int* ev, int m, std::size_t n) {
  if (n == 1) {
    v = a;
    *ev = ea;
    return;
  }
  mat_pow(a, ea, v, ev, m, n / 2);
  Matrix b(v.size());
  mat_mul(v, v, b, m);
  int eb = 2 * (*ev);
  if (n % 2 == 0) {
    v = std::move(b);
    *ev = eb;
  } else {
    mat_mul(a, b, v, m);
    *ev = ea + eb;
  }
  const std::size_t centre = static_cast<std::size_t>((m / 2) * m + m / 2);
  if (v[centre] > kBig) {
    for (auto& x : v) x /= kBig;
    *ev += kBigExp;
  }
}

struct Marginal {
  Cdf cdf;
  Quantile quantile;
};

Marginal lognormal_marginal(double mu, double sigma) {
  return {[=](double x) { return x <= 0.0 ? 0.0 : 0.5 * std::erfc(-(std::log(x) - mu) / (sigma * std::numbers::sqrt2)); },
          [=](double p) { return std::exp(mu + sigma * normal_quantile(p)); }};
}

Marginal pareto_marginal(double k, double xm) {
  return {[=](double x) { return x <= xm ? 0.0 : -std::expm1(k * std::log(xm / x)); },
          [=](double p) { return xm * std::exp(-std::log1p(-p) / k); }};
}

Marginal weibull_marginal(double k, double lambda) {
  return {[=](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-std::pow(x / lambda, k)); },
          [=](double p) { return lambda * std::pow(-std::log1p(-p), 1.0 / k); }};
}

Marginal marginal(const BenchDistribution& d, std::size_t axis) {
  if (axis >= d.dim) throw std::invalid_argument("bench: axis out of range");
  const auto& p = d.params;
  if (d.name == "lognormal") return lognormal_marginal(p[0], p[1]);
  if (d.name == "pareto") return pareto_marginal(p[0], p[1]);
  if (d.name == "weibull") return weibull_marginal(p[0], p[1]);
  if (d.name == "mln_gaussian") return lognormal_marginal(p[0], p[1]);
  return axis == 0 ? pareto_marginal(p[1], 1.0) : lognormal_marginal(p[2], p[3]);
}

Real lognormal_pdf(const Real& x, double mu, double sigma) {
  const Real z = (log(x) - mu) / sigma;
  return exp(-z * z / 2) / (x * sigma * sqrt(2 * Real::pi()));
}

}  // namespace

double kolmogorov_q(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  if (lambda < 1.18) {
    // Theta-function form, fast for small lambda.
    const double w = std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
    double s = 0.0;
    for (int j = 1; j <= 20; ++j) s += std::exp(-static_cast<double>((2 * j - 1) * (2 * j - 1)) * w);
    return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * s, 0.0, 1.0);
  }
  double s = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    s += (j % 2 == 1 ? term : -term);
    if (term < 1e-300) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

double kolmogorov_cdf_exact(std::size_t n, double d) {
  if (n == 0) throw std::invalid_argument("kolmogorov_cdf_exact: n must be positive");
  if (!(d > 0.0)) return 0.0;
  if (d >= 1.0) return 1.0;
  const double nd = static_cast<double>(n) * d;
  const double s = nd * d;
  if (s > 7.24 || (s > 3.76 && n > 99)) {
    const double rn = static_cast<double>(n);
    return 1.0 - 2.0 * std::exp(-(2.000071 + 0.331 / std::sqrt(rn) + 1.409 / rn) * s);
  }
  const int k = static_cast<int>(nd) + 1;
  const int m = 2 * k - 1;
  const double h = k - nd;
  Matrix hm(static_cast<std::size_t>(m * m));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) hm[static_cast<std::size_t>(i * m + j)] = (i - j + 1 < 0) ? 0.0 : 1.0;
  }
  for (int i = 0; i < m; ++i) {
    hm[static_cast<std::size_t>(i * m)] -= std::pow(h, i + 1);
    hm[static_cast<std::size_t>((m - 1) * m + i)] -= std::pow(h, m - i);
  }
  if (2.0 * h - 1.0 > 0.0) hm[static_cast<std::size_t>((m - 1) * m)] += std::pow(2.0 * h - 1.0, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i - j + 1 > 0) {
        for (int g = 1; g <= i - j + 1; ++g) hm[static_cast<std::size_t>(i * m + j)] /= g;
      }
    }
  }
  Matrix q;
  int eq = 0;
  mat_pow(hm, 0, q, &eq, m, n);
  double v = q[static_cast<std::size_t>((k - 1) * m + k - 1)];
  for (std::size_t i = 1; i <= n; ++i) {
    v = v * static_cast<double>(i) / static_cast<double>(n);
    if (v < 1.0 / kBig) {
      v *= kBig;
      eq -= kBigExp;
    }
  }
  return std::clamp(v * std::pow(10.0, eq), 0.0, 1.0);
}

KsResult ks_exact(std::vector<double> samples, const Cdf& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_exact: no samples");
  std::sort(samples.begin(), samples.end());
  const std::size_t n = samples.size();
  const double rn = static_cast<double>(n);
  double dmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = cdf(samples[i]);
    dmax = std::max({dmax, static_cast<double>(i + 1) / rn - f, f - static_cast<double>(i) / rn});
  }
  KsResult r;
  r.n = n;
  r.d_stat = std::clamp(dmax, 0.0, 1.0);
  r.p_value = n <= kExactKsMaxN ? 1.0 - kolmogorov_cdf_exact(n, r.d_stat) : kolmogorov_q(r.d_stat * std::sqrt(rn));
  r.p_value = std::clamp(r.p_value, 0.0, 1.0);
  return r;
}

std::vector<QqPoint> qq_points(std::vector<double> samples, const Quantile& quantile, std::size_t count,
                               std::size_t drop_tail) {
  if (count == 0 || count > samples.size()) throw std::invalid_argument("qq_points: need 1 <= count <= N");
  if (drop_tail >= count) throw std::invalid_argument("qq_points: drop_tail must be below count");
  std::sort(samples.begin(), samples.end());
  const double rn = static_cast<double>(samples.size());
  std::vector<QqPoint> out;
  out.reserve(count - drop_tail);
  for (std::size_t i = 1; i + drop_tail <= count; ++i) {
    const double p = (static_cast<double>(i) - 0.5) / static_cast<double>(count);
    // Order statistic at rank ceil(p N).
    const auto rank = static_cast<std::size_t>(std::ceil(p * rn));
    out.push_back({quantile(p), samples[std::clamp<std::size_t>(rank, 1, samples.size()) - 1]});
  }
  return out;
}

std::vector<double> resampled_pvalues(const ggc::GgcModel& model, const Cdf& true_cdf, std::size_t n, std::size_t b,
                                      std::uint64_t seed, unsigned threads) {
  if (model.d() != 1) throw std::invalid_argument("resampled_pvalues: model must be univariate");
  std::vector<double> out(b);
  numkit::parallel_for(b, threads, [&](std::size_t r) {
    const auto s = ggc::sample(model, n, numkit::derive_seed(seed, r), 1);
    out[r] = ks_exact(s.column(0), true_cdf).p_value;
  });
  return out;
}

double laguerre_cdf(const laguerre::CoeffTensor& a, double x) {
  if (a.dim() != 1) throw std::invalid_argument("laguerre_cdf: univariate coefficients required");
  if (!(x > 0.0)) return 0.0;
  auto f = [&](double t) { return laguerre::density_eval(a, std::span<const double>(&t, 1)); };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, x, 15, 1e-12);
}

const std::vector<std::string>& bench_names() {
  static const std::vector<std::string> names{"lognormal", "pareto", "weibull", "mln_gaussian",
                                              "clayton_pareto_lognormal"};
  return names;
}

BenchDistribution make_bench(const std::string& name, std::vector<double> params) {
  std::vector<double> defaults;
  std::size_t dim = 1;
  if (name == "lognormal") {
    defaults = {0.0, 0.83};
  } else if (name == "pareto") {
    defaults = {2.5, 1.0};
  } else if (name == "weibull") {
    defaults = {1.5, 1.0};
  } else if (name == "mln_gaussian") {
    defaults = {0.0, 1.0, 0.5};
    dim = 2;
  } else if (name == "clayton_pareto_lognormal") {
    defaults = {7.0, 2.5, 0.0, 0.83};
    dim = 2;
  } else {
    throw ConfigError("unknown distribution '" + name + "'");
  }
  if (params.size() > defaults.size()) {
    throw ConfigError(name + " takes at most " + std::to_string(defaults.size()) + " parameters");
  }
  for (std::size_t i = params.size(); i < defaults.size(); ++i) params.push_back(defaults[i]);
  for (double v : params) {
    if (!std::isfinite(v)) throw ConfigError(name + ": parameters must be finite");
  }
  auto positive = [&](std::size_t i, const char* what) {
    if (!(params[i] > 0.0)) throw ConfigError(name + ": " + what + " must be positive");
  };
  if (name == "lognormal") {
    positive(1, "sigma");
  } else if (name == "pareto") {
    positive(0, "k");
    positive(1, "xm");
  } else if (name == "weibull") {
    positive(0, "k");
    positive(1, "lambda");
  } else if (name == "mln_gaussian") {
    positive(1, "sigma");
    if (!(std::abs(params[2]) < 1.0)) throw ConfigError(name + ": rho must lie in (-1, 1)");
  } else {
    positive(0, "theta");
    positive(1, "k");
    positive(3, "sigma");
  }
  return {name, std::move(params), dim};
}

laguerre::SampleMatrix bench_sampler(const BenchDistribution& d, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw ConfigError("sample count must be positive");
  auto e = numkit::make_engine(numkit::derive_seed(seed, 0));
  const auto& p = d.params;
  std::vector<double> out(count * d.dim);
  for (std::size_t i = 0; i < count; ++i) {
    double* row = &out[i * d.dim];
    if (d.name == "lognormal") {
      row[0] = std::exp(p[0] + p[1] * numkit::standard_normal(e));
    } else if (d.name == "pareto") {
      row[0] = p[1] * std::exp(-std::log(numkit::uniform_open(e)) / p[0]);
    } else if (d.name == "weibull") {
      row[0] = p[1] * std::pow(numkit::standard_exponential(e), 1.0 / p[0]);
    } else if (d.name == "mln_gaussian") {
      const double z1 = numkit::standard_normal(e);
      const double z2 = p[2] * z1 + std::sqrt(1.0 - p[2] * p[2]) * numkit::standard_normal(e);
      row[0] = std::exp(p[0] + p[1] * z1);
      row[1] = std::exp(p[0] + p[1] * z2);
    } else {
      // Clayton pair (u, v) by conditional inversion; the survival copula is
      // (1 - u, 1 - v), so both marginals are inverted at their upper tails.
      const double theta = p[0];
      const double u = numkit::uniform_open(e);
      const double w = numkit::uniform_open(e);
      const double v = std::pow(std::pow(u, -theta) * (std::pow(w, -theta / (1.0 + theta)) - 1.0) + 1.0, -1.0 / theta);
      row[0] = std::exp(-std::log(u) / p[1]);
      row[1] = std::exp(p[2] - p[3] * normal_quantile(v));
    }
  }
  return laguerre::SampleMatrix(d.dim, std::move(out));
}

Cdf bench_marginal_cdf(const BenchDistribution& d, std::size_t axis) { return marginal(d, axis).cdf; }

Quantile bench_marginal_quantile(const BenchDistribution& d, std::size_t axis) { return marginal(d, axis).quantile; }

estimator::Density bench_density(const BenchDistribution& d) {
  const std::vector<double> p = d.params;
  if (d.name == "lognormal") {
    return [p](std::span<const Real> x) { return lognormal_pdf(x[0], p[0], p[1]); };
  }
  if (d.name == "pareto") {
    return [p](std::span<const Real> x) {
      if (x[0] < p[1]) return Real(0);
      return Real(p[0]) * pow(Real(p[1]), Real(p[0])) * pow(x[0], Real(-p[0] - 1.0));
    };
  }
  if (d.name == "weibull") {
    return [p](std::span<const Real> x) {
      const Real r = x[0] / p[1];
      return Real(p[0]) / p[1] * pow(r, Real(p[0] - 1.0)) * exp(-pow(r, Real(p[0])));
    };
  }
  if (d.name == "mln_gaussian") {
    return [p](std::span<const Real> x) {
      const double rho = p[2];
      const Real z1 = (log(x[0]) - p[0]) / p[1];
      const Real z2 = (log(x[1]) - p[0]) / p[1];
      const Real q = (z1 * z1 - 2 * rho * z1 * z2 + z2 * z2) / (2 * (1 - rho * rho));
      return exp(-q) / (2 * Real::pi() * p[1] * p[1] * std::sqrt(1 - rho * rho) * x[0] * x[1]);
    };
  }
  return [p](std::span<const Real> x) {
    if (x[0] < 1.0) return Real(0);
    const double theta = p[0];
    const double k = p[1];
    const Real f1 = Real(k) * pow(x[0], Real(-k - 1.0));
    const Real f2 = lognormal_pdf(x[1], p[2], p[3]);
    const Real a = pow(x[0], Real(-k));
    const Real b = erfc((log(x[1]) - p[2]) / (p[3] * sqrt(Real(2)))) / 2;
    const Real c = (1 + theta) * pow(a * b, Real(-theta - 1.0)) *
                   pow(pow(a, Real(-theta)) + pow(b, Real(-theta)) - 1, Real(-1.0 / theta - 2.0));
    return f1 * f2 * c;
  };
}

std::vector<double> bench_support_lower(const BenchDistribution& d) {
  if (d.name == "pareto") return {d.params[1]};
  if (d.name == "clayton_pareto_lognormal") return {1.0, 0.0};
  return std::vector<double>(d.dim, 0.0);
}

std::string bench_warning(const BenchDistribution& d) {
  double k = 1.0;
  if (d.name == "pareto") k = d.params[0];
  if (d.name == "clayton_pareto_lognormal") k = d.params[1];
  if (k <= 0.5) return "Pareto shape k <= 1/2: the density is not square integrable, so the Laguerre series need not converge";
  return {};
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p must lie in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

std::vector<double> pseudo_observations(const std::vector<double>& column) {
  std::vector<std::size_t> idx(column.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return column[a] < column[b]; });
  std::vector<double> out(column.size());
  const double denom = static_cast<double>(column.size()) + 1.0;
  for (std::size_t r = 0; r < idx.size(); ++r) out[idx[r]] = static_cast<double>(r + 1) / denom;
  return out;
}

double curious_cgf(double t) {
  if (!(t > 0.0)) throw std::invalid_argument("curious_cgf: t must be positive");
  return 1.0 - (1.0 + t) / t * std::log1p(t);
}

double curious_cgf_discretized(double t, std::size_t n) {
  if (!(t > 0.0)) throw std::invalid_argument("curious_cgf_discretized: t must be positive");
  if (n == 0) throw std::invalid_argument("curious_cgf_discretized: n must be positive");
  double s = 0.0;
  const double rn = static_cast<double>(n);
  for (std::size_t j = 1; j <= n; ++j) s -= std::log1p(t * static_cast<double>(j) / (rn + 1.0));
  return s / rn;
}

ggc::GgcModel curious_model(std::size_t n) {
  if (n == 0) throw std::invalid_argument("curious_model: n must be positive");
  std::vector<double> alpha(n, 1.0 / static_cast<double>(n));
  std::vector<double> s(n);
  for (std::size_t j = 0; j < n; ++j) s[j] = static_cast<double>(j + 1) / (static_cast<double>(n) + 1.0);
  return ggc::GgcModel(std::move(alpha), std::move(s), 1);
}

}  // namespace thorin::validate

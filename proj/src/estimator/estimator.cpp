#include "thorin/estimator/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "thorin/numkit/errors.hpp"
#include "thorin/numkit/parallel.hpp"
#include "thorin/numkit/random.hpp"

#ifndef THORIN_VERSION
#define THORIN_VERSION "0.0.0"
#endif

namespace thorin::estimator {

using ggc::GgcModel;
using numkit::MultiIndex;
using numkit::PrecisionContext;
using numkit::Real;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kInertia = 0.72;
constexpr double kCognitive = 1.49;
constexpr double kSocial = 1.49;
// Search box for log alpha and for the log simplex coordinates.
constexpr double kLogAlphaLo = -14.0;
constexpr double kLogAlphaHi = 14.0;
constexpr double kZLo = -30.0;
constexpr double kZHi = 0.0;
// Simplex scale below which a component is dropped to an exact zero.
constexpr double kSnapScale = 1e-10;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

double log_uniform(numkit::Engine& e, double lo, double hi) {
  return std::exp(std::log(lo) + numkit::uniform_open(e) * (std::log(hi) - std::log(lo)));
}

// Atoms sorted by decreasing shape, then by scale row, for a canonical report.
GgcModel canonical(const GgcModel& m) {
  std::vector<std::size_t> idx(m.n());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (m.alpha(a) != m.alpha(b)) return m.alpha(a) > m.alpha(b);
    const auto ra = m.row(a);
    const auto rb = m.row(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  });
  std::vector<double> alpha;
  std::vector<double> s;
  for (std::size_t i : idx) {
    alpha.push_back(m.alpha(i));
    const auto r = m.row(i);
    s.insert(s.end(), r.begin(), r.end());
  }
  return GgcModel(std::move(alpha), std::move(s), m.d());
}

// Drops negligible scale components to exact zeros when the loss allows it.
GgcModel snap_scales(const GgcModel& m, const LossEvaluator& loss, double best) {
  if (m.d() < 2) return m;
  std::vector<double> s = m.scales();
  bool changed = false;
  for (std::size_t i = 0; i < m.n(); ++i) {
    const double denom = 1.0 + m.row_sum(i);
    for (std::size_t j = 0; j < m.d(); ++j) {
      double& v = s[i * m.d() + j];
      if (v > 0.0 && v / denom < kSnapScale) {
        const double keep = v;
        v = 0.0;
        bool nonzero = false;
        for (std::size_t c = 0; c < m.d(); ++c) nonzero = nonzero || s[i * m.d() + c] > 0.0;
        if (nonzero) {
          changed = true;
        } else {
          v = keep;
        }
      }
    }
  }
  if (!changed) return m;
  GgcModel snapped(m.alpha(), s, m.d());
  return loss(snapped) <= best * (1.0 + 1e-9) + 1e-20 ? snapped : m;
}

}  // namespace

void FitConfig::validate(std::size_t d) const {
  if (d == 0) throw ConfigError("dimension must be at least 1");
  if (n < 1) throw ConfigError("n must be at least 1");
  if (!m.values().empty()) {
    if (m.size() != d) throw ConfigError("truncation m has " + std::to_string(m.size()) + " entries, data has d = " + std::to_string(d));
    for (std::size_t j = 0; j < d; ++j) {
      if (m[j] < 0) throw ConfigError("truncation m must be non-negative");
    }
  }
  if (swarm_size != 0 && swarm_size < 10) throw ConfigError("swarm size must be at least 10");
  if (max_iters < 1) throw ConfigError("max_iters must be at least 1");
  if (restarts < 1) throw ConfigError("restarts must be at least 1");
  if (precision_bits < PrecisionContext::kMinBits) throw ConfigError("precision must be at least 53 bits");
  if (!(param_floor > 0.0) || !std::isfinite(param_floor)) throw ConfigError("param_floor must be positive");
  if (stall_iters < 1) throw ConfigError("stall_iters must be at least 1");
  if (!(stall_tol >= 0.0)) throw ConfigError("stall_tol must be non-negative");
}

MultiIndex default_truncation(std::size_t n, std::size_t d) {
  if (d == 1) return MultiIndex{static_cast<int>(2 * n)};
  return MultiIndex::filled(d, static_cast<int>(n));
}

nlohmann::json to_json(const FitReport& r) {
  nlohmann::json j;
  j["schema_version"] = kReportSchemaVersion;
  j["tool_version"] = THORIN_VERSION;
  j["model"] = ggc::to_json(r.model);
  j["loss"] = r.loss;
  j["wb"] = wb::to_json(r.wb);
  j["m"] = std::vector<int>(r.m.values().begin(), r.m.values().end());
  j["n"] = r.n;
  j["seed"] = r.seed;
  j["bits_used"] = r.bits_used;
  j["iters"] = r.iters;
  j["restarts_used"] = r.restarts_used;
  j["converged"] = r.converged;
  j["empirical_coeffs_hash"] = hex64(r.empirical_coeffs_hash);
  return j;
}

FitReport fit_report_from_json(const nlohmann::json& j) {
  try {
    FitReport r;
    r.model = ggc::model_from_json(j.at("model"));
    r.loss = j.at("loss").get<double>();
    r.wb = wb::wb_report_from_json(j.at("wb"));
    r.m = MultiIndex(j.at("m").get<std::vector<int>>());
    r.n = j.at("n").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.bits_used = j.at("bits_used").get<unsigned>();
    r.iters = j.value("iters", std::size_t{0});
    r.restarts_used = j.value("restarts_used", std::size_t{0});
    r.converged = j.value("converged", false);
    r.empirical_coeffs_hash = std::stoull(j.at("empirical_coeffs_hash").get<std::string>(), nullptr, 16);
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("report JSON: ") + e.what());
  } catch (const std::logic_error& e) {
    throw DataError(std::string("report JSON: ") + e.what());
  }
}

double loss_Lm(const laguerre::CoeffTensor& target, const GgcModel& model, const MultiIndex& m,
               const PrecisionContext& ctx) {
  if (!(target.upper() == m)) throw std::invalid_argument("loss_Lm: target box differs from m");
  const auto a = ggc::model_coeffs(model, m, ctx).a;
  numkit::PrecisionScope scope(ctx);
  Real sum(0);
  for (std::size_t off = 0; off < target.size(); ++off) {
    const Real diff = Real(target.at_offset(off)) - a.at_offset(off);
    sum += diff * diff;
  }
  return sum.to_double();
}

LossEvaluator::LossEvaluator(laguerre::CoeffTensor target, unsigned fallback_bits)
    : target_(std::move(target)), plan_(target_.upper()), bits_(fallback_bits) {}

double LossEvaluator::operator()(const GgcModel& model) const {
  std::vector<double> a(target_.size());
  if (!plan_.coeffs(model, a)) {
    try {
      a = laguerre::to_double(ggc::model_coeffs(model, target_.upper(), PrecisionContext(bits_)).a).values();
    } catch (const NumericError&) {
      return kInf;
    }
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = target_.at_offset(i) - a[i];
    sum += diff * diff;
  }
  return std::isfinite(sum) ? sum : kInf;
}

Parameterization::Parameterization(std::size_t n, std::size_t d, double floor) : n_(n), d_(d), floor_(floor) {}

double Parameterization::lower(std::size_t i) const { return i % (d_ + 2) == 0 ? kLogAlphaLo : kZLo; }

double Parameterization::upper(std::size_t i) const { return i % (d_ + 2) == 0 ? kLogAlphaHi : kZHi; }

GgcModel Parameterization::decode(std::span<const double> theta) const {
  if (theta.size() != size()) throw std::invalid_argument("Parameterization: wrong coordinate count");
  const std::size_t w = d_ + 2;
  std::vector<double> alpha(n_);
  std::vector<double> s(n_ * d_);
  for (std::size_t i = 0; i < n_; ++i) {
    alpha[i] = std::max(std::exp(theta[i * w]), floor_);
    const double z0 = theta[i * w + 1];
    for (std::size_t j = 0; j < d_; ++j) s[i * d_ + j] = std::exp(theta[i * w + 2 + j] - z0);
  }
  return GgcModel(std::move(alpha), std::move(s), d_);
}

std::vector<double> Parameterization::encode(const GgcModel& model) const {
  if (model.n() != n_ || model.d() != d_) throw std::invalid_argument("Parameterization: model shape mismatch");
  const std::size_t w = d_ + 2;
  std::vector<double> theta(size());
  for (std::size_t i = 0; i < n_; ++i) {
    theta[i * w] = std::log(model.alpha(i));
    const double sum = model.row_sum(i);
    theta[i * w + 1] = -std::log1p(sum);
    for (std::size_t j = 0; j < d_; ++j) {
      const double s = model.scale(i, j);
      theta[i * w + 2 + j] = s > 0.0 ? std::log(s) - std::log1p(sum) : kZLo;
    }
  }
  for (std::size_t k = 0; k < theta.size(); ++k) theta[k] = std::clamp(theta[k], lower(k), upper(k));
  return theta;
}

FitReport fit_target(const laguerre::CoeffTensor& target, std::size_t d, const FitConfig& cfg_in) {
  FitConfig cfg = cfg_in;
  cfg.validate(d);
  if (cfg.m.values().empty()) cfg.m = default_truncation(cfg.n, d);
  if (!(target.upper() == cfg.m)) throw ConfigError("target coefficients do not cover the truncation box");

  const LossEvaluator loss(target, cfg.precision_bits);
  const Parameterization par(cfg.n, d, cfg.param_floor);
  const std::size_t dim = par.size();
  const std::size_t swarm = cfg.swarm_size == 0 ? std::max<std::size_t>(10, 20 * dim) : cfg.swarm_size;
  std::vector<double> lo(dim);
  std::vector<double> hi(dim);
  std::vector<double> vmax(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    lo[k] = par.lower(k);
    hi[k] = par.upper(k);
    vmax[k] = 0.5 * (hi[k] - lo[k]);
  }

  std::vector<double> best_theta;
  double best_loss = kInf;
  FitReport report;
  report.converged = true;

  for (std::size_t restart = 0; restart < cfg.restarts; ++restart) {
    std::vector<numkit::Engine> rng;
    rng.reserve(swarm);
    for (std::size_t p = 0; p < swarm; ++p) {
      rng.push_back(numkit::make_engine(numkit::derive_seed(cfg.seed, (static_cast<std::uint64_t>(restart) << 32) | p)));
    }
    std::vector<double> x(swarm * dim);
    std::vector<double> v(swarm * dim);
    for (std::size_t p = 0; p < swarm; ++p) {
      auto& e = rng[p];
      double* xp = &x[p * dim];
      for (std::size_t i = 0; i < cfg.n; ++i) {
        double* a = xp + i * (d + 2);
        a[0] = std::log(log_uniform(e, 1e-2, 1e2));
        const double mag = log_uniform(e, 1e-3, 1e3);
        std::vector<double> u(d);
        double usum = 0.0;
        for (auto& c : u) usum += (c = numkit::standard_exponential(e));
        a[1] = -std::log1p(mag);
        for (std::size_t j = 0; j < d; ++j) a[2 + j] = std::log(u[j] / usum) + std::log(mag) - std::log1p(mag);
      }
      for (std::size_t k = 0; k < dim; ++k) {
        xp[k] = std::clamp(xp[k], lo[k], hi[k]);
        v[p * dim + k] = (numkit::uniform_open(e) - 0.5) * 0.2 * (hi[k] - lo[k]);
      }
    }
    std::vector<double> f(swarm);
    auto evaluate = [&] {
      numkit::parallel_for(swarm, cfg.threads, [&](std::size_t p) {
        f[p] = loss(par.decode(std::span<const double>(&x[p * dim], dim)));
      });
    };
    evaluate();
    std::vector<double> pbest = x;
    std::vector<double> pbest_f = f;
    std::size_t g = static_cast<std::size_t>(std::min_element(f.begin(), f.end()) - f.begin());
    std::vector<double> gbest(x.begin() + static_cast<std::ptrdiff_t>(g * dim),
                              x.begin() + static_cast<std::ptrdiff_t>((g + 1) * dim));
    double gbest_f = f[g];

    std::size_t stall = 0;
    std::size_t it = 0;
    bool stalled = false;
    while (it < cfg.max_iters) {
      ++it;
      for (std::size_t p = 0; p < swarm; ++p) {
        auto& e = rng[p];
        for (std::size_t k = 0; k < dim; ++k) {
          const std::size_t idx = p * dim + k;
          const double r1 = numkit::uniform_open(e);
          const double r2 = numkit::uniform_open(e);
          double vel = kInertia * v[idx] + kCognitive * r1 * (pbest[idx] - x[idx]) + kSocial * r2 * (gbest[k] - x[idx]);
          vel = std::clamp(vel, -vmax[k], vmax[k]);
          double pos = x[idx] + vel;
          if (pos < lo[k]) {
            pos = lo[k];
            vel = 0.0;
          } else if (pos > hi[k]) {
            pos = hi[k];
            vel = 0.0;
          }
          x[idx] = pos;
          v[idx] = vel;
        }
      }
      evaluate();
      const double before = gbest_f;
      for (std::size_t p = 0; p < swarm; ++p) {
        if (f[p] < pbest_f[p]) {
          pbest_f[p] = f[p];
          std::copy_n(&x[p * dim], dim, &pbest[p * dim]);
        }
        if (f[p] < gbest_f) {
          gbest_f = f[p];
          std::copy_n(&x[p * dim], dim, gbest.begin());
        }
      }
      const bool improved = std::isinf(before) ? gbest_f < before : before - gbest_f > cfg.stall_tol * before;
      stall = improved ? 0 : stall + 1;
      if (stall >= cfg.stall_iters) {
        stalled = true;
        break;
      }
    }
    report.iters += it;
    report.converged = report.converged && stalled;
    if (gbest_f < best_loss) {
      best_loss = gbest_f;
      best_theta = gbest;
    }
  }
  report.restarts_used = cfg.restarts;

  GgcModel model = par.decode(best_theta);
  model = canonical(snap_scales(model, loss, best_loss));
  const auto coeffs = ggc::model_coeffs(model, cfg.m, PrecisionContext(cfg.precision_bits));
  {
    numkit::PrecisionScope scope(coeffs.bits_used);
    Real sum(0);
    for (std::size_t off = 0; off < target.size(); ++off) {
      const Real diff = Real(target.at_offset(off)) - coeffs.a.at_offset(off);
      sum += diff * diff;
    }
    report.loss = sum.to_double();
  }
  report.model = std::move(model);
  report.bits_used = coeffs.bits_used;
  report.wb = wb::best_eps(report.model);
  report.empirical_coeffs_hash = laguerre::coeffs_hash(target);
  report.m = cfg.m;
  report.n = cfg.n;
  report.seed = cfg.seed;
  return report;
}

FitReport fit_empirical(const laguerre::SampleMatrix& samples, const FitConfig& cfg_in) {
  FitConfig cfg = cfg_in;
  cfg.validate(samples.dim());
  if (cfg.m.values().empty()) cfg.m = default_truncation(cfg.n, samples.dim());
  const auto target = laguerre::empirical_coeffs(samples, cfg.m, cfg.threads);
  return fit_target(target, samples.dim(), cfg);
}

FitReport project_density(const numkit::BoxTensor<Real>& moments, const FitConfig& cfg_in) {
  FitConfig cfg = cfg_in;
  const std::size_t d = moments.dim();
  cfg.validate(d);
  if (cfg.m.values().empty()) cfg.m = moments.upper();
  if (!(cfg.m == moments.upper())) throw ConfigError("moment tensor box differs from the truncation m");
  unsigned prec = PrecisionContext::kMinBits;
  for (const auto& v : moments.values()) prec = std::max(prec, v.precision());
  laguerre::CoeffTensor target;
  {
    numkit::PrecisionScope scope(prec);
    target = laguerre::to_double(laguerre::coeffs_from_moments(moments));
  }
  return fit_target(target, d, cfg);
}

}  // namespace thorin::estimator

#include <cmath>
#include <stdexcept>

#include "thorin/estimator/estimator.hpp"

namespace thorin::estimator {

using numkit::PrecisionScope;
using numkit::Real;

namespace {

constexpr unsigned kGuardBits = 32;
constexpr int kMaxLevel = 12;
// Nodes closer than this to t = 0 are always kept, whatever their size.
constexpr double kMinHalfWidth = 3.0;
constexpr double kMaxHalfWidth = 12.0;

using VecFn = std::function<std::vector<Real>(const Real& x)>;

struct DeResult {
  std::vector<Real> value;
  double rel_change = 0.0;
  bool converged = false;
};

double max_rel_change(const std::vector<Real>& now, const std::vector<Real>& before) {
  double worst = 0.0;
  for (std::size_t c = 0; c < now.size(); ++c) {
    const Real diff = abs(now[c] - before[c]);
    if (diff.is_zero()) continue;
    const Real ref = abs(now[c]);
    worst = std::max(worst, ref.is_zero() ? std::numeric_limits<double>::infinity() : (diff / ref).to_double());
  }
  return worst;
}

// Exp-sinh rule on [lo, inf): x = lo + exp(pi/2 sinh t), dx = pi/2 cosh t exp(pi/2 sinh t) dt.
// The trapezoidal sum is refined by halving h and adding odd nodes only.
DeResult de_integrate(const VecFn& g, double lo, std::size_t comps, const Real& tiny, double tol) {
  const Real half_pi = Real::pi() / 2;
  const Real lo_r(lo);
  std::vector<Real> sum(comps, Real(0));

  // Adds h * w(t) g(x(t)) over t = (start + step * i) * h walking away from 0
  // on one side, until the contributions are negligible.
  auto march = [&](std::vector<Real>& acc, const Real& h, long start, long step, int sign,
                   const std::vector<Real>& reference) {
    int quiet = 0;
    for (long j = start;; j += step) {
      const Real t = h * Real(static_cast<long>(sign) * j);
      if (abs(t) > kMaxHalfWidth) break;
      const Real e = exp(half_pi * sinh(t));
      const Real w = h * half_pi * cosh(t) * e;
      const Real x = lo_r + e;
      const auto v = g(x);
      bool negligible = true;
      for (std::size_t c = 0; c < comps; ++c) {
        const Real term = w * v[c];
        acc[c] += term;
        if (abs(term) > tiny * abs(reference[c])) negligible = false;
      }
      if (abs(t) >= kMinHalfWidth && negligible) {
        if (++quiet >= 2) break;
      } else {
        quiet = 0;
      }
    }
  };

  Real h(1);
  {
    std::vector<Real> pos(comps, Real(0));
    march(pos, h, 0, 1, 1, pos);
    std::vector<Real> neg(comps, Real(0));
    march(neg, h, 1, 1, -1, pos);
    for (std::size_t c = 0; c < comps; ++c) sum[c] = pos[c] + neg[c];
  }
  DeResult res;
  res.rel_change = std::numeric_limits<double>::infinity();
  for (int level = 1; level <= kMaxLevel; ++level) {
    h /= 2;
    std::vector<Real> odd(comps, Real(0));
    march(odd, h, 1, 2, 1, sum);
    march(odd, h, 1, 2, -1, sum);
    std::vector<Real> next(comps);
    for (std::size_t c = 0; c < comps; ++c) next[c] = sum[c] / 2 + odd[c];
    res.rel_change = max_rel_change(next, sum);
    sum = std::move(next);
    if (level >= 3 && res.rel_change <= tol) {
      res.converged = true;
      break;
    }
  }
  res.value = std::move(sum);
  return res;
}

}  // namespace

MomentTensor theoretical_moments(const Density& f, const numkit::MultiIndex& m, const numkit::PrecisionContext& ctx,
                                 std::span<const double> lower) {
  const std::size_t d = m.size();
  if (d == 0 || d > 2) throw std::invalid_argument("theoretical_moments: quadrature supports d = 1 or 2");
  if (!lower.empty() && lower.size() != d) throw std::invalid_argument("theoretical_moments: lower bound size");
  std::vector<double> lo(d, 0.0);
  for (std::size_t j = 0; j < lower.size(); ++j) {
    if (!(lower[j] >= 0.0) || !std::isfinite(lower[j])) throw std::invalid_argument("theoretical_moments: bad lower bound");
    lo[j] = lower[j];
  }
  const unsigned bits = ctx.bits();
  const double tol = std::pow(10.0, -static_cast<double>(bits) / 8.0);
  MomentTensor out;
  out.mu = numkit::BoxTensor<Real>(m, Real(0));
  {
    PrecisionScope scope(bits + kGuardBits);
    const Real tiny = numkit::ldexp(Real(1), -static_cast<long>(bits + kGuardBits));
    // Powers x^0..x^k times e^{-x}.
    auto powers = [](const Real& x, int k) {
      std::vector<Real> p(static_cast<std::size_t>(k) + 1);
      p[0] = exp(-x);
      for (int i = 1; i <= k; ++i) p[static_cast<std::size_t>(i)] = p[static_cast<std::size_t>(i) - 1] * x;
      return p;
    };
    if (d == 1) {
      const auto r = de_integrate(
          [&](const Real& x) {
            const Real fx = f(std::span<const Real>(&x, 1));
            auto p = powers(x, m[0]);
            for (auto& v : p) v *= fx;
            return p;
          },
          lo[0], static_cast<std::size_t>(m[0]) + 1, tiny, tol);
      out.mu.values() = r.value;
      out.achieved_rel_tol = r.rel_change;
      out.converged = r.converged;
    } else {
      const std::size_t n1 = static_cast<std::size_t>(m[1]) + 1;
      double inner_worst = 0.0;
      bool inner_ok = true;
      const auto r = de_integrate(
          [&](const Real& x1) {
            std::vector<Real> pt(2);
            pt[0] = x1;
            const auto inner = de_integrate(
                [&](const Real& x2) {
                  pt[1] = x2;
                  const Real fx = f(pt);
                  auto p = powers(x2, m[1]);
                  for (auto& v : p) v *= fx;
                  return p;
                },
                lo[1], n1, tiny, tol);
            inner_worst = std::max(inner_worst, inner.rel_change);
            inner_ok = inner_ok && inner.converged;
            const auto p1 = powers(x1, m[0]);
            std::vector<Real> v(p1.size() * n1);
            for (std::size_t a = 0; a < p1.size(); ++a) {
              for (std::size_t b = 0; b < n1; ++b) v[a * n1 + b] = p1[a] * inner.value[b];
            }
            return v;
          },
          lo[0], (static_cast<std::size_t>(m[0]) + 1) * n1, tiny, tol);
      out.mu.values() = r.value;
      out.achieved_rel_tol = std::max(r.rel_change, inner_worst);
      out.converged = r.converged && inner_ok;
    }
  }
  for (auto& v : out.mu.values()) v.set_precision(bits);
  return out;
}

}  // namespace thorin::estimator

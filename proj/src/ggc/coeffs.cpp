#include "thorin/ggc/coeffs.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "thorin/numkit/errors.hpp"

namespace thorin::ggc {

using numkit::BoxTensor;
using numkit::IndexBox;
using numkit::MultiIndex;
using numkit::PrecisionContext;
using numkit::PrecisionScope;
using numkit::Real;

namespace detail {

std::vector<int> offset_totals(const IndexBox& box) {
  std::vector<int> t(box.size());
  for (std::size_t off = 0; off < box.size(); ++off) t[off] = box.index(off).total();
  return t;
}

}  // namespace detail

namespace {

// sqrt(2)^d in T.
template <class T>
T sqrt2_pow(std::size_t d) {
  using std::sqrt;
  T r = T(static_cast<double>(1ULL << (d / 2)));
  if (d % 2 == 1) r = r * sqrt(T(2));
  return r;
}

// One fused pass at the current working precision. Returns false when some
// intermediate magnitude exceeds 2^limit_exp.
bool fused_pass(const GgcModel& model, const MultiIndex& m, long limit_exp, BoxTensor<Real>& kappa,
                BoxTensor<Real>& mu, BoxTensor<Real>& a) {
  kappa = shifted_cumulants<Real>(model, m);
  const IndexBox& box = kappa.box();
  const std::size_t d = box.dim();
  int mmax = 0;
  for (std::size_t j = 0; j < d; ++j) mmax = std::max(mmax, m[j]);
  const auto binom = numkit::binomial_rows<Real>(mmax);
  std::vector<std::vector<std::vector<Real>>> weights(d);
  for (std::size_t j = 0; j < d; ++j) weights[j] = laguerre::laguerre_weights<Real>(m[j]);
  const Real scale = sqrt2_pow<Real>(d);

  mu = BoxTensor<Real>(box, Real(0));
  a = BoxTensor<Real>(box, Real(0));
  bool ok = true;
  for (std::size_t koff : box.graded_offsets()) {
    const MultiIndex k = box.index(koff);
    if (koff == 0) {
      mu.at_offset(0) = exp(kappa.at_offset(0));
    } else {
      MultiIndex p = k;
      p[p.first_nonzero()] -= 1;
      Real acc(0);
      detail::for_each_below(box, p, [&](std::size_t loff, const std::vector<int>& l) {
        Real term = mu.at_offset(loff) * kappa.at_offset(koff - loff);
        for (std::size_t j = 0; j < d; ++j) {
          if (l[j] != 0 && l[j] != p[j]) term *= binom[static_cast<std::size_t>(p[j])][static_cast<std::size_t>(l[j])];
        }
        acc += term;
      });
      mu.at_offset(koff) = acc;
    }
    if (detail::exceeds(mu.at_offset(koff), limit_exp)) ok = false;
    // a_k over the full box l <= k; every mu_l with l <= k is already final.
    Real acc(0);
    detail::for_each_below(box, k, [&](std::size_t loff, const std::vector<int>& l) {
      Real term = mu.at_offset(loff);
      for (std::size_t j = 0; j < d; ++j) {
        term *= weights[j][static_cast<std::size_t>(k[j])][static_cast<std::size_t>(l[j])];
      }
      if (detail::exceeds(term, limit_exp)) ok = false;
      acc += term;
    });
    a.at_offset(koff) = acc * scale;
    if (!ok) return false;
  }
  return true;
}

}  // namespace

ModelCoeffs model_coeffs(const GgcModel& model, const MultiIndex& m, const PrecisionContext& ctx) {
  if (m.size() != model.d()) throw std::invalid_argument("model_coeffs: dimension mismatch");
  // Each pass carries guard bits so the rounded results are accurate to ctx.bits().
  constexpr unsigned kGuard = 64;
  constexpr unsigned kMaxBits = 1U << 16;
  unsigned bits = ctx.bits();
  for (;;) {
    ModelCoeffs out;
    bool ok = false;
    {
      PrecisionScope scope(bits + kGuard);
      ok = fused_pass(model, m, static_cast<long>(bits / 2), out.kappa, out.mu, out.a);
    }
    if (ok) {
      for (auto* t : {&out.kappa, &out.mu, &out.a}) {
        for (auto& v : t->values()) v.set_precision(bits);
      }
      out.bits_used = bits;
      return out;
    }
    if (bits >= kMaxBits) throw NumericError("model_coeffs: magnitudes exceed the precision cap");
    bits *= 2;
  }
}

namespace {

// Two-double split so a 256-bit value reaches quad precision with ~106 bits.
CoeffPlan::quad to_quad(const Real& r) {
  const double hi = r.to_double();
  const double lo = (r - Real(hi)).to_double();
  return static_cast<CoeffPlan::quad>(hi) + static_cast<CoeffPlan::quad>(lo);
}

// Unit roundoff of binary128, 2^-112.
constexpr CoeffPlan::quad kQuadEps =
    CoeffPlan::quad(1) / (CoeffPlan::quad(1ULL << 56) * CoeffPlan::quad(1ULL << 56));

template <class T>
T abs_of(T v) {
  return v < 0 ? -v : v;
}

}  // namespace

CoeffPlan::CoeffPlan(const MultiIndex& m) : box_(m) {
  const std::size_t d = box_.dim();
  if (box_.size() > std::numeric_limits<std::uint32_t>::max()) throw std::invalid_argument("CoeffPlan: box too large");
  totals_ = detail::offset_totals(box_);
  const int top = m.total();
  fact_ = numkit::factorials<double>(top > 0 ? top - 1 : 0);
  order_ = box_.graded_offsets();
  int mmax = 0;
  for (std::size_t j = 0; j < d; ++j) mmax = std::max(mmax, m[j]);
  // Exact integer tables are built at high precision and rounded once.
  PrecisionScope scope(256);
  const auto binom = numkit::binomial_rows<Real>(mmax);
  std::vector<std::vector<std::vector<Real>>> weights(d);
  for (std::size_t j = 0; j < d; ++j) weights[j] = laguerre::laguerre_weights<Real>(m[j]);

  for (std::size_t koff : order_) {
    const MultiIndex k = box_.index(koff);
    mu_start_.push_back(mu_l_.size());
    if (koff != 0) {
      MultiIndex p = k;
      p[p.first_nonzero()] -= 1;
      detail::for_each_below(box_, p, [&](std::size_t loff, const std::vector<int>& l) {
        Real c(1);
        for (std::size_t j = 0; j < d; ++j) c *= binom[static_cast<std::size_t>(p[j])][static_cast<std::size_t>(l[j])];
        mu_l_.push_back(static_cast<std::uint32_t>(loff));
        mu_kl_.push_back(static_cast<std::uint32_t>(koff - loff));
        mu_c_.push_back(c.to_double());  // integers below 2^53 for supported boxes
      });
    }
    a_start_.push_back(a_l_.size());
    detail::for_each_below(box_, k, [&](std::size_t loff, const std::vector<int>& l) {
      Real w(1);
      for (std::size_t j = 0; j < d; ++j) {
        w *= weights[j][static_cast<std::size_t>(k[j])][static_cast<std::size_t>(l[j])];
      }
      a_l_.push_back(static_cast<std::uint32_t>(loff));
      a_w_.push_back(w.to_double());
      a_wq_.push_back(to_quad(w));
    });
  }
  mu_start_.push_back(mu_l_.size());
  a_start_.push_back(a_l_.size());
  scale_ = sqrt2_pow<Real>(d).to_double();
  scale_q_ = to_quad(sqrt2_pow<Real>(d));
  const auto fq = numkit::factorials<Real>(top > 0 ? top - 1 : 0);
  for (const auto& f : fq) fact_q_.push_back(to_quad(f));
}


template <class T>
bool CoeffPlan::eval(const GgcModel& model, std::span<double> out) const {
  const std::size_t d = box_.dim();
  const std::size_t size = box_.size();
  if (model.d() != d || out.size() != size) throw std::invalid_argument("CoeffPlan: shape mismatch");
  const MultiIndex& m = box_.upper();
  const auto& fact = [&]() -> const std::vector<T>& {
    if constexpr (std::is_same_v<T, double>) return fact_; else return fact_q_;
  }();
  const auto& weights = [&]() -> const std::vector<T>& {
    if constexpr (std::is_same_v<T, double>) return a_w_; else return a_wq_;
  }();
  const T scale = std::is_same_v<T, double> ? T(scale_) : scale_q_;
  const T eps = std::is_same_v<T, double> ? T(std::numeric_limits<double>::epsilon()) : kQuadEps;

  std::vector<T> kappa(size, T(0));
  std::vector<T> mu(size, T(0));
  std::vector<T> prod;
  std::vector<T> next;
  double k0 = 0.0;
  for (std::size_t i = 0; i < model.n(); ++i) {
    const double rowsum = model.row_sum(i);
    const T denom = T(1) + T(rowsum);
    prod.assign(1, T(model.alpha(i)));
    for (std::size_t j = 0; j < d; ++j) {
      const T x = T(model.scale(i, j)) / denom;
      next.clear();
      for (const T& p : prod) {
        T v = p;
        for (int e = 0; e <= m[j]; ++e) {
          next.push_back(v);
          v *= x;
        }
      }
      prod.swap(next);
    }
    for (std::size_t off = 0; off < size; ++off) kappa[off] += prod[off];
    k0 -= model.alpha(i) * std::log1p(rowsum);
  }
  for (std::size_t off = 1; off < size; ++off) kappa[off] *= fact[static_cast<std::size_t>(totals_[off] - 1)];
  // Moments are carried relative to mu_0 = e^{kappa_0}, which may underflow.
  // A relative error in mu_0 scales every coefficient alike, so double suffices.
  const T mu0 = T(std::exp(k0));

  for (std::size_t g = 0; g < order_.size(); ++g) {
    const std::size_t koff = order_[g];
    if (koff == 0) {
      mu[0] = T(1);
    } else {
      T acc(0);
      for (std::size_t t = mu_start_[g]; t < mu_start_[g + 1]; ++t) acc += T(mu_c_[t]) * mu[mu_l_[t]] * kappa[mu_kl_[t]];
      mu[koff] = acc;
    }
    T acc(0);
    T mag(0);
    for (std::size_t t = a_start_[g]; t < a_start_[g + 1]; ++t) {
      const T term = weights[t] * mu[a_l_[t]];
      acc += term;
      mag += abs_of(term);
    }
    const double a = static_cast<double>(acc * scale * mu0);
    if (!std::isfinite(a) || !std::isfinite(static_cast<double>(mu[koff])) || !std::isfinite(static_cast<double>(mag))) {
      return false;
    }
    // The alternating sum loses about log10(mag / |a_k|) digits, and mu_l
    // carries a relative error growing with |l|.
    if (static_cast<double>(T(totals_[koff] + 4) * eps * mag * scale * mu0) > kAbsTol) return false;
    out[koff] = a;
  }
  return true;
}

bool CoeffPlan::coeffs_double(const GgcModel& model, std::span<double> out) const { return eval<double>(model, out); }

bool CoeffPlan::coeffs_quad(const GgcModel& model, std::span<double> out) const { return eval<quad>(model, out); }

bool CoeffPlan::coeffs(const GgcModel& model, std::span<double> out) const {
  return coeffs_double(model, out) || coeffs_quad(model, out);
}

laguerre::CoeffTensor model_coeffs_double(const GgcModel& model, const MultiIndex& m) {
  const CoeffPlan plan(m);
  laguerre::CoeffTensor out(plan.box(), 0.0);
  if (plan.coeffs(model, out.values())) return out;
  return laguerre::to_double(model_coeffs(model, m, PrecisionContext(256)).a);
}

laguerre::CoeffTensorX gd1_coeffs(double alpha, std::span<const double> s, const MultiIndex& m,
                                  const PrecisionContext& ctx) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::domain_error("gd1_coeffs: alpha must be positive");
  if (s.size() != m.size()) throw std::invalid_argument("gd1_coeffs: dimension mismatch");
  bool any = false;
  for (double v : s) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::domain_error("gd1_coeffs: scales must be non-negative");
    any = any || v > 0.0;
  }
  if (!any) throw std::domain_error("gd1_coeffs: scale vector is zero");

  PrecisionScope scope(ctx);
  const IndexBox box(m);
  const std::size_t d = box.dim();
  Real ssum(0);
  for (double v : s) ssum += Real(v);
  const Real one_plus = Real(1) + ssum;
  const Real a(alpha);
  // g[t] = Gamma(alpha + t)/Gamma(alpha) (1+|s|)^{-t}; the common factor
  // (1+|s|)^{-alpha} is applied at the end.
  const int top = m.total();
  std::vector<Real> g(static_cast<std::size_t>(top) + 1);
  g[0] = Real(1);
  for (int t = 1; t <= top; ++t) g[static_cast<std::size_t>(t)] = g[static_cast<std::size_t>(t) - 1] * (a + (t - 1)) / one_plus;
  // v_j[k][l] = C(k,l) (-2 s_j)^l / l!.
  std::vector<std::vector<std::vector<Real>>> v(d);
  for (std::size_t j = 0; j < d; ++j) {
    const auto w = laguerre::laguerre_weights<Real>(m[j]);
    v[j] = w;
    const Real sj(s[j]);
    for (auto& row : v[j]) {
      Real pw(1);
      for (auto& e : row) {
        e *= pw;
        pw *= sj;
      }
    }
  }
  const Real lead = sqrt2_pow<Real>(d) * exp(-a * log(one_plus));
  laguerre::CoeffTensorX out(box, Real(0));
  for (std::size_t koff = 0; koff < box.size(); ++koff) {
    const MultiIndex k = box.index(koff);
    Real acc(0);
    detail::for_each_below(box, k, [&](std::size_t, const std::vector<int>& l) {
      Real term = g[static_cast<std::size_t>(std::accumulate(l.begin(), l.end(), 0))];
      for (std::size_t j = 0; j < d; ++j) term *= v[j][static_cast<std::size_t>(k[j])][static_cast<std::size_t>(l[j])];
      acc += term;
    });
    out.at_offset(koff) = acc * lead;
  }
  return out;
}

Gd1Params gd1_invert(const Real& a0_in, std::span<const Real> a1, const PrecisionContext& ctx) {
  const std::size_t d = a1.size();
  if (d == 0) throw std::invalid_argument("gd1_invert: need a_{1(i)} for at least one axis");
  PrecisionScope scope(ctx);
  Real a0 = a0_in;
  a0.set_precision(ctx.bits());
  if (!(a0 > 0)) throw NumericError("gd1_invert: a_0 must be positive");
  // c1 = (1 - |x|)^alpha and c2 = alpha |x| with x the simplex scales.
  const Real c1 = a0 / sqrt2_pow<Real>(d);
  Real sum_a1(0);
  for (const auto& v : a1) sum_a1 += v;
  const Real c2 = Real(static_cast<double>(d)) / 2 - sum_a1 / (2 * a0);
  if (!(c1 > 0) || !(c1 < 1) || !(c2 > 0)) throw NumericError("gd1_invert: coefficients outside the single-atom image");
  // With beta = 1/alpha and y = 1 - c2 beta: y = exp(z (1 - y)), z = ln c1 / c2,
  // so z y = W0(z e^z) on the non-trivial branch.
  const Real z = log(c1) / c2;
  Real w;
  try {
    w = numkit::lambert_w0(z * exp(z), ctx);
  } catch (const std::domain_error&) {
    throw NumericError("gd1_invert: Lambert argument below -1/e");
  }
  const Real alpha = c2 * z / (z - w);
  if (!alpha.is_finite() || !(alpha > 0)) throw NumericError("gd1_invert: non-finite shape");
  std::vector<Real> x(d);
  Real xsum(0);
  for (std::size_t i = 0; i < d; ++i) {
    x[i] = (a0 - a1[i]) / (2 * alpha * a0);
    if (x[i] < 0 && abs(x[i]) < ldexp(Real(1), -static_cast<long>(ctx.bits()) / 2)) x[i] = Real(0);
    if (x[i] < 0) throw NumericError("gd1_invert: negative scale");
    xsum += x[i];
  }
  if (!(xsum < 1)) throw NumericError("gd1_invert: simplex scales do not sum below one");
  Gd1Params out{alpha, {}};
  out.s.reserve(d);
  for (std::size_t i = 0; i < d; ++i) out.s.push_back(x[i] / (Real(1) - xsum));
  return out;
}

}  // namespace thorin::ggc

#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "thorin/ggc/model.hpp"
#include "thorin/laguerre/coeffs.hpp"
#include "thorin/numkit/multi_index.hpp"
#include "thorin/numkit/real.hpp"
#include "thorin/numkit/special.hpp"
#include "thorin/numkit/tensor.hpp"

namespace thorin::ggc {

namespace detail {

// Row-major outer product of per-axis tables: out[k] = prod_j tables[j][k_j].
template <class T>
std::vector<T> outer(const std::vector<std::vector<T>>& tables) {
  std::vector<T> out{T(1)};
  for (const auto& tab : tables) {
    std::vector<T> next;
    next.reserve(out.size() * tab.size());
    for (const T& p : out) {
      for (const T& v : tab) next.push_back(p * v);
    }
    out = std::move(next);
  }
  return out;
}

// |k| for each offset of the box.
std::vector<int> offset_totals(const numkit::IndexBox& box);

// Visits every l <= p as (offset of l in `box`, l). Offsets are linear in the
// index, so offset(k - l) = offset(k) - offset(l).
template <class F>
void for_each_below(const numkit::IndexBox& box, const numkit::MultiIndex& p, F&& f) {
  const std::size_t d = p.size();
  std::vector<int> l(d, 0);
  std::size_t off = 0;
  for (;;) {
    f(off, l);
    std::size_t i = d;
    for (;;) {
      if (i == 0) return;
      --i;
      if (l[i] < p[i]) {
        ++l[i];
        off += box.stride(i);
        break;
      }
      off -= static_cast<std::size_t>(l[i]) * box.stride(i);
      l[i] = 0;
    }
  }
}

inline bool exceeds(double v, long /*limit_exp*/) { return !std::isfinite(v); }
inline bool exceeds(const numkit::Real& v, long limit_exp) { return !v.is_finite() || v.exponent() > limit_exp; }

}  // namespace detail

/// kappa_0 = -sum_i alpha_i log1p(|s_i|) and, for k != 0,
/// kappa_k = (|k|-1)! sum_i alpha_i x_i^k with x = simplex_scales(model).
template <class T>
numkit::BoxTensor<T> shifted_cumulants(const GgcModel& model, const numkit::MultiIndex& m) {
  using std::log1p;
  if (m.size() != model.d()) throw std::invalid_argument("shifted_cumulants: dimension mismatch");
  const numkit::IndexBox box(m);
  numkit::BoxTensor<T> kappa(box, T(0));
  T k0(0);
  for (std::size_t i = 0; i < model.n(); ++i) {
    T rowsum(0);
    for (std::size_t j = 0; j < model.d(); ++j) rowsum += T(model.scale(i, j));
    const T denom = T(1) + rowsum;
    std::vector<std::vector<T>> powers(model.d());
    for (std::size_t j = 0; j < model.d(); ++j) {
      const T x = T(model.scale(i, j)) / denom;
      auto& pw = powers[j];
      pw.reserve(static_cast<std::size_t>(m[j]) + 1);
      pw.push_back(T(1));
      for (int p = 1; p <= m[j]; ++p) pw.push_back(pw.back() * x);
    }
    const auto prod = detail::outer(powers);
    const T a(model.alpha(i));
    for (std::size_t off = 0; off < prod.size(); ++off) kappa.at_offset(off) += a * prod[off];
    k0 -= a * log1p(rowsum);
  }
  const auto totals = detail::offset_totals(box);
  const int top = m.total();
  const auto fact = numkit::factorials<T>(top > 0 ? top - 1 : 0);
  for (std::size_t off = 1; off < box.size(); ++off) {
    kappa.at_offset(off) = kappa.at_offset(off) * fact[static_cast<std::size_t>(totals[off] - 1)];
  }
  kappa.at_offset(0) = k0;
  return kappa;
}

/// Taylor coefficients of exp(K) from those of K: mu_0 = e^{kappa_0} and
/// mu_k = sum_{l <= p} C(p,l) mu_l kappa_{k-l}, p = k minus one unit in its
/// first non-zero coordinate, visiting k in graded order.
template <class T>
numkit::BoxTensor<T> cumulants_to_moments(const numkit::BoxTensor<T>& kappa) {
  using std::exp;
  const auto& box = kappa.box();
  const auto& m = box.upper();
  int mmax = 0;
  for (std::size_t j = 0; j < m.size(); ++j) mmax = std::max(mmax, m[j]);
  const auto binom = numkit::binomial_rows<T>(mmax);
  numkit::BoxTensor<T> mu(box, T(0));
  mu.at_offset(0) = exp(kappa.at_offset(0));
  for (std::size_t koff : box.graded_offsets()) {
    if (koff == 0) continue;
    numkit::MultiIndex p = box.index(koff);
    const std::size_t j0 = p.first_nonzero();
    p[j0] -= 1;
    T acc(0);
    detail::for_each_below(box, p, [&](std::size_t loff, const std::vector<int>& l) {
      T c(1);
      for (std::size_t j = 0; j < l.size(); ++j) {
        if (l[j] != 0 && l[j] != p[j]) c = c * binom[static_cast<std::size_t>(p[j])][static_cast<std::size_t>(l[j])];
      }
      acc += c * mu.at_offset(loff) * kappa.at_offset(koff - loff);
    });
    mu.at_offset(koff) = acc;
  }
  return mu;
}

/// Result of the fused coefficient recursion.
struct ModelCoeffs {
  laguerre::CoeffTensorX a;
  numkit::BoxTensor<numkit::Real> kappa;
  numkit::BoxTensor<numkit::Real> mu;
  /// Precision of the accepted pass; at least ctx.bits().
  unsigned bits_used = 0;
};

/// Precomputed index tables for evaluating many models on one truncation box
/// in hardware arithmetic (the inner loop of the estimator).
class CoeffPlan {
 public:
  __extension__ typedef __float128 quad;
  /// Absolute accuracy required of every a_k on the hardware paths.
  static constexpr double kAbsTol = 1e-12;

  explicit CoeffPlan(const numkit::MultiIndex& m);
  const numkit::IndexBox& box() const noexcept { return box_; }
  /// Writes a_k for every k <= m (row-major) into `out` using double
  /// arithmetic. Returns false when an intermediate overflowed or cancellation
  /// in some a_k could exceed kAbsTol, in which case `out` is unspecified.
  bool coeffs_double(const GgcModel& model, std::span<double> out) const;
  /// Same contract with the recursion carried in binary128.
  bool coeffs_quad(const GgcModel& model, std::span<double> out) const;
  /// coeffs_double, then coeffs_quad.
  bool coeffs(const GgcModel& model, std::span<double> out) const;

 private:
  numkit::IndexBox box_;
  std::vector<int> totals_;
  std::vector<double> fact_;
  std::vector<std::size_t> order_;
  // Moment recursion terms per k in graded order: mu_k = sum c * mu[l] * kappa[k - l].
  std::vector<std::size_t> mu_start_;
  std::vector<std::uint32_t> mu_l_;
  std::vector<std::uint32_t> mu_kl_;
  std::vector<double> mu_c_;
  // Coefficient terms per k: a_k = sum w * mu[l].
  std::vector<std::size_t> a_start_;
  std::vector<std::uint32_t> a_l_;
  std::vector<double> a_w_;
  std::vector<quad> a_wq_;
  std::vector<quad> fact_q_;
  double scale_ = 1.0;
  quad scale_q_ = 1;

  template <class T>
  bool eval(const GgcModel& model, std::span<double> out) const;
};

/// Laguerre coefficients a_k, k <= m, of the model in one graded pass
/// (cumulants, then moments, then coefficients). Starts at ctx.bits() and
/// doubles the precision whenever an intermediate exceeds 2^(bits/2).
ModelCoeffs model_coeffs(const GgcModel& model, const numkit::MultiIndex& m, const numkit::PrecisionContext& ctx);

/// Same recursion in double, then binary128, then 256-bit arithmetic, taking
/// the first that guarantees CoeffPlan::kAbsTol.
laguerre::CoeffTensor model_coeffs_double(const GgcModel& model, const numkit::MultiIndex& m);

/// Closed form for a single atom:
/// a_k = sqrt(2)^d sum_{l<=k} C(k,l) (-2s)^l/l! Gamma(alpha+|l|)/Gamma(alpha) (1+|s|)^{-alpha-|l|}.
laguerre::CoeffTensorX gd1_coeffs(double alpha, std::span<const double> s, const numkit::MultiIndex& m,
                                  const numkit::PrecisionContext& ctx);

struct Gd1Params {
  numkit::Real alpha;
  std::vector<numkit::Real> s;
};

/// Recovers (alpha, s) of a single-atom model from a_0 and a_{1(i)}, i = 1..d.
/// Throws NumericError when the inputs are outside the image of gd1_coeffs.
Gd1Params gd1_invert(const numkit::Real& a0, std::span<const numkit::Real> a1, const numkit::PrecisionContext& ctx);

}  // namespace thorin::ggc

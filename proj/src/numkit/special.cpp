#include "thorin/numkit/special.hpp"

#include <limits>
#include <stdexcept>
#include <string>

namespace thorin::numkit {

namespace {

template <class T>
T w0_initial_guess(const T& x, const T& inv_e) {
  using std::log;
  using std::sqrt;
  if (x < T(-0.25)) {
    // Branch-point expansion in p = sqrt(2(e x + 1)).
    T p = sqrt(T(2) * (x / inv_e + T(1)));
    return T(-1) + p - p * p / T(3) + T(11) / T(72) * p * p * p;
  }
  if (x < T(3)) return log(T(1) + x) * (T(1) - log(T(1) + log(T(1) + x)) / (T(2) + log(T(1) + x)));
  T l1 = log(x);
  T l2 = log(l1);
  return l1 - l2 + l2 / l1;
}

// Halley iteration on f(w) = w e^w - x until the step is below `rel_tol` relative.
template <class T>
T w0_halley(const T& x, const T& inv_e, const T& rel_tol, int max_iter) {
  using std::abs;
  using std::exp;
  T w = w0_initial_guess(x, inv_e);
  if (w < T(-1)) w = T(-1);
  for (int it = 0; it < max_iter; ++it) {
    T ew = exp(w);
    T f = w * ew - x;
    T wp1 = w + T(1);
    if (wp1 == T(0)) break;
    T denom = ew * wp1 - (w + T(2)) * f / (T(2) * wp1);
    if (denom == T(0)) break;
    T step = f / denom;
    w -= step;
    if (w < T(-1)) w = T(-1);
    if (abs(step) <= rel_tol * (abs(w) + T(1e-300))) {
      // One more step squares the error again; cheap relative to the guarantee.
      T ew2 = exp(w);
      T f2 = w * ew2 - x;
      T wp = w + T(1);
      if (wp != T(0)) {
        T den2 = ew2 * wp - (w + T(2)) * f2 / (T(2) * wp);
        if (den2 != T(0)) w -= f2 / den2;
      }
      break;
    }
  }
  return w;
}

}  // namespace

Real lambert_w0(const Real& x_in, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  // Work with a few guard bits and round back to ctx precision at the end.
  const unsigned guard = ctx.bits() + 32;
  PrecisionScope inner(guard);
  Real x = x_in;
  x.set_precision(guard);
  const Real inv_e = exp(Real(-1));
  const Real gap = x + inv_e;
  if (gap < 0) {
    // Inputs that round onto the branch point from below are accepted as -1/e.
    if (abs(gap) > ldexp(Real(1), -static_cast<long>(ctx.bits()) + 4)) {
      throw std::domain_error("lambert_w0: argument below -1/e");
    }
    Real r(-1);
    r.set_precision(ctx.bits());
    return r;
  }
  if (x.is_zero()) return make_real(ctx.bits());
  const Real tol = ldexp(Real(1), -static_cast<long>(guard));
  Real w = w0_halley(x, inv_e, tol, 200);
  w.set_precision(ctx.bits());
  return w;
}

double lambert_w0(double x) {
  if (std::isnan(x)) throw std::domain_error("lambert_w0: NaN argument");
  const double inv_e = std::exp(-1.0);
  if (x < -inv_e) {
    if (-inv_e - x > 4 * std::numeric_limits<double>::epsilon()) {
      throw std::domain_error("lambert_w0: argument below -1/e");
    }
    return -1.0;
  }
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return x;
  return w0_halley(x, inv_e, std::numeric_limits<double>::epsilon(), 100);
}

Real log_gamma(const Real& x, const PrecisionContext& ctx) {
  if (!(x > 0)) throw std::domain_error("log_gamma: argument must be positive");
  PrecisionScope scope(ctx);
  Real xx = x;
  xx.set_precision(ctx.bits());
  return lgamma(xx);
}

double log_gamma(double x) {
  if (!(x > 0)) throw std::domain_error("log_gamma: argument must be positive");
  return std::lgamma(x);
}

}  // namespace thorin::numkit

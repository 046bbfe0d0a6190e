#include "thorin/numkit/real.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace thorin::numkit {

namespace {

thread_local unsigned t_working_bits = 256;

// Moved-from values have a null limb pointer; they may only be assigned or destroyed.
bool is_live(mpfr_srcptr v) noexcept { return v->_mpfr_d != nullptr; }

}  // namespace

PrecisionContext::PrecisionContext(unsigned bits) : bits_(bits) {
  if (bits < kMinBits) {
    throw std::invalid_argument("PrecisionContext: bits must be >= 53, got " +
                                std::to_string(bits));
  }
}

int PrecisionContext::digits10() const noexcept {
  return static_cast<int>(std::floor(bits_ * 0.30102999566398120));
}

unsigned working_bits() noexcept { return t_working_bits; }

PrecisionScope::PrecisionScope(const PrecisionContext& ctx) noexcept : saved_(t_working_bits) {
  t_working_bits = ctx.bits();
}

PrecisionScope::PrecisionScope(unsigned bits) : PrecisionScope(PrecisionContext(bits)) {}

PrecisionScope::~PrecisionScope() { t_working_bits = saved_; }

Real::Real(Uninit, unsigned bits) { mpfr_init2(v_, static_cast<mpfr_prec_t>(bits)); }

Real make_real(unsigned bits) {
  Real r(Real::Uninit{}, bits);
  mpfr_set_zero(r.v_, 1);
  return r;
}

Real::Real() : Real(Uninit{}, t_working_bits) { mpfr_set_zero(v_, 1); }

Real::Real(double v) : Real(Uninit{}, t_working_bits) { mpfr_set_d(v_, v, MPFR_RNDN); }

Real::Real(std::string_view text) : Real() {
  std::string s(text);
  if (mpfr_set_str(v_, s.c_str(), 10, MPFR_RNDN) != 0) {
    throw std::invalid_argument("Real: cannot parse '" + s + "'");
  }
}

Real::Real(const Real& other) : Real(Uninit{}, other.precision()) {
  mpfr_set(v_, other.v_, MPFR_RNDN);
}

Real::Real(Real&& other) noexcept {
  v_[0] = other.v_[0];
  other.v_->_mpfr_d = nullptr;
}

Real& Real::operator=(const Real& other) {
  if (this == &other) return *this;
  if (!is_live(v_)) {
    mpfr_init2(v_, mpfr_get_prec(other.v_));
  } else if (mpfr_get_prec(v_) != mpfr_get_prec(other.v_)) {
    mpfr_set_prec(v_, mpfr_get_prec(other.v_));
  }
  mpfr_set(v_, other.v_, MPFR_RNDN);
  return *this;
}

Real& Real::operator=(Real&& other) noexcept {
  if (this == &other) return *this;
  if (is_live(v_)) mpfr_clear(v_);
  v_[0] = other.v_[0];
  other.v_->_mpfr_d = nullptr;
  return *this;
}

Real::~Real() {
  if (is_live(v_)) mpfr_clear(v_);
}

void Real::set_precision(unsigned bits) {
  mpfr_prec_round(v_, static_cast<mpfr_prec_t>(bits), MPFR_RNDN);
}

long Real::exponent() const noexcept {
  if (!mpfr_regular_p(v_)) return 0;
  return static_cast<long>(mpfr_get_exp(v_));
}

std::string Real::str(int digits) const {
  if (mpfr_nan_p(v_)) return "nan";
  if (mpfr_inf_p(v_)) return mpfr_sgn(v_) > 0 ? "inf" : "-inf";
  char* buf = nullptr;
  if (digits <= 0) {
    // Enough decimal digits to round-trip the significand.
    digits = static_cast<int>(std::ceil(precision() * 0.30102999566398120)) + 1;
  }
  mpfr_asprintf(&buf, "%.*Rg", digits, v_);
  std::string out(buf);
  mpfr_free_str(buf);
  return out;
}

Real& Real::operator+=(const Real& o) { mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
Real& Real::operator-=(const Real& o) { mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
Real& Real::operator*=(const Real& o) { mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
Real& Real::operator/=(const Real& o) { mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }
Real& Real::operator+=(double o) { mpfr_add_d(v_, v_, o, MPFR_RNDN); return *this; }
Real& Real::operator-=(double o) { mpfr_sub_d(v_, v_, o, MPFR_RNDN); return *this; }
Real& Real::operator*=(double o) { mpfr_mul_d(v_, v_, o, MPFR_RNDN); return *this; }
Real& Real::operator/=(double o) { mpfr_div_d(v_, v_, o, MPFR_RNDN); return *this; }

Real Real::operator-() const {
  Real r;
  mpfr_neg(r.v_, v_, MPFR_RNDN);
  return r;
}

Real Real::pi() {
  Real r;
  mpfr_const_pi(r.v_, MPFR_RNDN);
  return r;
}

Real Real::ln2() {
  Real r;
  mpfr_const_log2(r.v_, MPFR_RNDN);
  return r;
}

#define THORIN_REAL_BINOP(op, fn)                                             \
  Real operator op(const Real& a, const Real& b) {                            \
    Real r;                                                                   \
    fn(r.raw(), a.raw(), b.raw(), MPFR_RNDN);                                 \
    return r;                                                                 \
  }
THORIN_REAL_BINOP(+, mpfr_add)
THORIN_REAL_BINOP(-, mpfr_sub)
THORIN_REAL_BINOP(*, mpfr_mul)
THORIN_REAL_BINOP(/, mpfr_div)
#undef THORIN_REAL_BINOP

Real operator+(const Real& a, double b) { Real r; mpfr_add_d(r.raw(), a.raw(), b, MPFR_RNDN); return r; }
Real operator-(const Real& a, double b) { Real r; mpfr_sub_d(r.raw(), a.raw(), b, MPFR_RNDN); return r; }
Real operator*(const Real& a, double b) { Real r; mpfr_mul_d(r.raw(), a.raw(), b, MPFR_RNDN); return r; }
Real operator/(const Real& a, double b) { Real r; mpfr_div_d(r.raw(), a.raw(), b, MPFR_RNDN); return r; }
Real operator+(double a, const Real& b) { return b + a; }
Real operator-(double a, const Real& b) { Real r; mpfr_d_sub(r.raw(), a, b.raw(), MPFR_RNDN); return r; }
Real operator*(double a, const Real& b) { return b * a; }
Real operator/(double a, const Real& b) { Real r; mpfr_d_div(r.raw(), a, b.raw(), MPFR_RNDN); return r; }

std::partial_ordering operator<=>(const Real& a, const Real& b) noexcept {
  if (mpfr_unordered_p(a.raw(), b.raw())) return std::partial_ordering::unordered;
  const int c = mpfr_cmp(a.raw(), b.raw());
  return c < 0 ? std::partial_ordering::less
               : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
}

std::partial_ordering operator<=>(const Real& a, double b) noexcept {
  if (mpfr_nan_p(a.raw()) || std::isnan(b)) return std::partial_ordering::unordered;
  const int c = mpfr_cmp_d(a.raw(), b);
  return c < 0 ? std::partial_ordering::less
               : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
}

bool operator==(const Real& a, const Real& b) noexcept { return mpfr_equal_p(a.raw(), b.raw()) != 0; }
bool operator==(const Real& a, double b) noexcept {
  return !std::isnan(b) && !mpfr_nan_p(a.raw()) && mpfr_cmp_d(a.raw(), b) == 0;
}

#define THORIN_REAL_UNARY(name, fn)      \
  Real name(const Real& x) {             \
    Real r;                              \
    fn(r.raw(), x.raw(), MPFR_RNDN);     \
    return r;                            \
  }
THORIN_REAL_UNARY(abs, mpfr_abs)
THORIN_REAL_UNARY(sqrt, mpfr_sqrt)
THORIN_REAL_UNARY(exp, mpfr_exp)
THORIN_REAL_UNARY(expm1, mpfr_expm1)
THORIN_REAL_UNARY(log, mpfr_log)
THORIN_REAL_UNARY(log1p, mpfr_log1p)
THORIN_REAL_UNARY(sin, mpfr_sin)
THORIN_REAL_UNARY(cos, mpfr_cos)
THORIN_REAL_UNARY(sinh, mpfr_sinh)
THORIN_REAL_UNARY(cosh, mpfr_cosh)
THORIN_REAL_UNARY(lgamma, mpfr_lngamma)
THORIN_REAL_UNARY(erfc, mpfr_erfc)
#undef THORIN_REAL_UNARY

Real floor(const Real& x) {
  Real r;
  mpfr_floor(r.raw(), x.raw());
  return r;
}

Real pow(const Real& x, const Real& y) {
  Real r;
  mpfr_pow(r.raw(), x.raw(), y.raw(), MPFR_RNDN);
  return r;
}

Real pow(const Real& x, long n) {
  Real r;
  mpfr_pow_si(r.raw(), x.raw(), n, MPFR_RNDN);
  return r;
}

Real ldexp(const Real& x, long e) {
  Real r;
  mpfr_mul_2si(r.raw(), x.raw(), e, MPFR_RNDN);
  return r;
}

Real max(const Real& a, const Real& b) { return a < b ? b : a; }
Real min(const Real& a, const Real& b) { return b < a ? b : a; }

bool isfinite(const Real& x) noexcept { return x.is_finite(); }
double to_double(const Real& x) noexcept { return x.to_double(); }

std::ostream& operator<<(std::ostream& os, const Real& x) {
  const auto p = os.precision();
  return os << x.str(p > 0 ? static_cast<int>(p) : 0);
}

}  // namespace thorin::numkit

#pragma once

// Runtime-precision real arithmetic on top of GNU MPFR.
//
// Every value carries its own significand precision. Values created by
// constructors and by the free binary operators take the calling thread's
// working precision, which a PrecisionScope sets for its lifetime. Copies keep
// the precision of their source. All operations round to nearest.

#include <mpfr.h>

#include <compare>
#include <concepts>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

namespace thorin::numkit {

/// Significand precision (in bits) of the working real type.
class PrecisionContext {
 public:
  static constexpr unsigned kMinBits = 53;

  explicit PrecisionContext(unsigned bits = 256);

  unsigned bits() const noexcept { return bits_; }
  /// Decimal digits faithfully represented, floor(bits * log10(2)).
  int digits10() const noexcept;

  friend bool operator==(const PrecisionContext&, const PrecisionContext&) = default;

 private:
  unsigned bits_;
};

/// Working precision of the calling thread (256 bits unless a scope is active).
unsigned working_bits() noexcept;

/// Sets the calling thread's working precision until destruction.
class PrecisionScope {
 public:
  explicit PrecisionScope(const PrecisionContext& ctx) noexcept;
  explicit PrecisionScope(unsigned bits);
  ~PrecisionScope();

  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned saved_;
};

class Real {
 public:
  Real();
  Real(double v);  // NOLINT(google-explicit-constructor)
  template <std::integral I>
  Real(I v) : Real() {  // NOLINT(google-explicit-constructor)
    if constexpr (std::is_signed_v<I>) {
      mpfr_set_si(v_, static_cast<long>(v), MPFR_RNDN);
    } else {
      mpfr_set_ui(v_, static_cast<unsigned long>(v), MPFR_RNDN);
    }
  }
  /// Parses a decimal or scientific literal at the working precision.
  explicit Real(std::string_view text);

  Real(const Real& other);
  Real(Real&& other) noexcept;
  Real& operator=(const Real& other);
  Real& operator=(Real&& other) noexcept;
  ~Real();

  unsigned precision() const noexcept { return static_cast<unsigned>(mpfr_get_prec(v_)); }
  /// Rounds this value to `bits` of precision in place.
  void set_precision(unsigned bits);

  double to_double() const noexcept { return mpfr_get_d(v_, MPFR_RNDN); }
  explicit operator double() const noexcept { return to_double(); }
  /// Base-2 exponent e with 0.5 <= |x|/2^e < 1; 0 for zero and non-finite values.
  long exponent() const noexcept;
  bool is_finite() const noexcept { return mpfr_number_p(v_) != 0; }
  bool is_nan() const noexcept { return mpfr_nan_p(v_) != 0; }
  bool is_zero() const noexcept { return mpfr_zero_p(v_) != 0; }
  int sign() const noexcept { return mpfr_sgn(v_); }
  /// Shortest round-trip text at this value's precision when digits == 0.
  std::string str(int digits = 0) const;

  Real& operator+=(const Real& o);
  Real& operator-=(const Real& o);
  Real& operator*=(const Real& o);
  Real& operator/=(const Real& o);
  Real& operator+=(double o);
  Real& operator-=(double o);
  Real& operator*=(double o);
  Real& operator/=(double o);

  Real operator-() const;

  static Real pi();
  static Real ln2();

  mpfr_ptr raw() noexcept { return v_; }
  mpfr_srcptr raw() const noexcept { return v_; }

 private:
  struct Uninit {};
  explicit Real(Uninit, unsigned bits);

  mpfr_t v_;

  friend Real make_real(unsigned bits);
};

/// A zero at exactly `bits` of precision.
Real make_real(unsigned bits);

Real operator+(const Real& a, const Real& b);
Real operator-(const Real& a, const Real& b);
Real operator*(const Real& a, const Real& b);
Real operator/(const Real& a, const Real& b);

Real operator+(const Real& a, double b);
Real operator-(const Real& a, double b);
Real operator*(const Real& a, double b);
Real operator/(const Real& a, double b);
Real operator+(double a, const Real& b);
Real operator-(double a, const Real& b);
Real operator*(double a, const Real& b);
Real operator/(double a, const Real& b);

template <std::integral I>
Real operator+(const Real& a, I b) { return a + Real(b); }
template <std::integral I>
Real operator-(const Real& a, I b) { return a - Real(b); }
template <std::integral I>
Real operator*(const Real& a, I b) { return a * Real(b); }
template <std::integral I>
Real operator/(const Real& a, I b) { return a / Real(b); }
template <std::integral I>
Real operator+(I a, const Real& b) { return Real(a) + b; }
template <std::integral I>
Real operator-(I a, const Real& b) { return Real(a) - b; }
template <std::integral I>
Real operator*(I a, const Real& b) { return Real(a) * b; }
template <std::integral I>
Real operator/(I a, const Real& b) { return Real(a) / b; }

std::partial_ordering operator<=>(const Real& a, const Real& b) noexcept;
std::partial_ordering operator<=>(const Real& a, double b) noexcept;
bool operator==(const Real& a, const Real& b) noexcept;
bool operator==(const Real& a, double b) noexcept;

Real abs(const Real& x);
Real sqrt(const Real& x);
Real exp(const Real& x);
Real expm1(const Real& x);
Real log(const Real& x);
Real log1p(const Real& x);
Real pow(const Real& x, const Real& y);
Real pow(const Real& x, long n);
Real sin(const Real& x);
Real cos(const Real& x);
Real sinh(const Real& x);
Real cosh(const Real& x);
Real lgamma(const Real& x);
Real erfc(const Real& x);
Real floor(const Real& x);
Real ldexp(const Real& x, long e);
Real max(const Real& a, const Real& b);
Real min(const Real& a, const Real& b);
bool isfinite(const Real& x) noexcept;
double to_double(const Real& x) noexcept;

std::ostream& operator<<(std::ostream& os, const Real& x);

// Overloads so that templates over {double, Real} can call to_double uniformly.
inline double to_double(double x) noexcept { return x; }

}  // namespace thorin::numkit

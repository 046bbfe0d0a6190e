#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "thorin/ggc/coeffs.hpp"
#include "thorin/laguerre/basis.hpp"
#include "thorin/laguerre/coeffs.hpp"
#include "thorin/numkit/errors.hpp"
#include "thorin/numkit/random.hpp"

using namespace thorin;
using laguerre::CoeffTensor;
using laguerre::SampleMatrix;
using numkit::MultiIndex;

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

SampleMatrix exp_samples(std::size_t n, std::uint64_t seed) {
  numkit::Engine eng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = numkit::standard_exponential(eng);
  return SampleMatrix(1, std::move(v));
}

}  // namespace

TEST(Phi, Examples) {
  const double origin[] = {0.0};
  const double one[] = {1.0};
  EXPECT_DOUBLE_EQ(laguerre::phi({0}, origin), kSqrt2);
  EXPECT_DOUBLE_EQ(laguerre::phi({7}, origin), kSqrt2);
  EXPECT_NEAR(laguerre::phi({1}, one), -kSqrt2 / std::exp(1.0), 1e-15);
  EXPECT_NEAR(laguerre::phi({1}, one), -0.52026, 1e-5);
}

TEST(Phi, NegativeArgumentIsDomainError) {
  const double bad[] = {0.5, -1e-9};
  EXPECT_THROW(laguerre::phi({1, 1}, bad), std::domain_error);
}

TEST(Phi, RecurrenceMatchesBinomialSum) {
  for (int k = 0; k <= 20; ++k) {
    for (double x : {0.0, 0.01, 0.3, 1.0, 2.5, 7.0, 15.0, 30.0}) {
      EXPECT_NEAR(laguerre::phi1(k, x), oracle::phi_binomial(k, x), 1e-13) << "k=" << k << " x=" << x;
    }
  }
}

TEST(Phi, UniformBound) {
  numkit::Engine eng(3);
  for (int rep = 0; rep < 10000; ++rep) {
    const std::size_t d = 1 + eng() % 3;
    std::vector<int> k(d);
    std::vector<double> x(d);
    int budget = 50;
    for (std::size_t j = 0; j < d; ++j) {
      k[j] = static_cast<int>(eng() % static_cast<unsigned>(budget + 1));
      budget -= k[j];
      x[j] = 60.0 * numkit::uniform_open(eng) * numkit::uniform_open(eng);
    }
    const double v = laguerre::phi(MultiIndex(k), x);
    ASSERT_LE(std::abs(v), std::pow(kSqrt2, static_cast<double>(d)) * (1.0 + 1e-12));
  }
}

TEST(Phi, Orthonormality) {
  using boost::math::quadrature::gauss_kronrod;
  for (int j = 0; j <= 10; ++j) {
    for (int k = j; k <= 10; ++k) {
      auto f = [&](double x) { return laguerre::phi1(j, x) * laguerre::phi1(k, x); };
      const double v = gauss_kronrod<double, 61>::integrate(f, 0.0, 80.0, 15, 1e-13);
      EXPECT_NEAR(v, j == k ? 1.0 : 0.0, 1e-8) << j << "," << k;
    }
  }
}

TEST(EmpiricalCoeffs, SingleSampleAtOrigin) {
  const SampleMatrix s(1, {0.0});
  const auto a = laguerre::empirical_coeffs(s, {3});
  ASSERT_EQ(a.size(), 4U);
  for (double v : a.values()) EXPECT_DOUBLE_EQ(v, kSqrt2);
}

TEST(EmpiricalCoeffs, SingleSampleEqualsPhi) {
  const SampleMatrix s(2, {0.7, 2.2});
  const MultiIndex m{3, 4};
  const auto a = laguerre::empirical_coeffs(s, m);
  for (const auto& k : numkit::iterate_box(m)) {
    EXPECT_EQ(a[k], laguerre::phi(k, s.row(0))) << k;
  }
}

TEST(EmpiricalCoeffs, ZeroBoxIsMeanOfExponential) {
  const SampleMatrix s(2, {0.5, 1.0, 2.0, 0.0, 0.25, 3.0});
  const auto a = laguerre::empirical_coeffs(s, {0, 0});
  const double expect = 2.0 * (std::exp(-1.5) + std::exp(-2.0) + std::exp(-3.25)) / 3.0;
  EXPECT_NEAR(a.values()[0], expect, 1e-15);
}

TEST(EmpiricalCoeffs, ExponentialSampleMatchesAnalytic) {
  const std::size_t n = 1000000;
  const auto s = exp_samples(n, 17);
  const auto a = laguerre::empirical_coeffs(s, {4});
  // Standard error per entry from the sample variance of phi_k(X).
  for (int k = 0; k <= 4; ++k) {
    double s1 = 0.0;
    double s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double p = laguerre::phi1(k, s(i, 0));
      s1 += p;
      s2 += p * p;
    }
    const double mean = s1 / static_cast<double>(n);
    const double se = std::sqrt((s2 / static_cast<double>(n) - mean * mean) / static_cast<double>(n));
    const double truth = k == 0 ? 1.0 / kSqrt2 : 0.0;
    EXPECT_NEAR(a[{k}], truth, 3.0 * se) << k;
  }
}

TEST(EmpiricalCoeffs, ThreadCountDoesNotChangeBits) {
  const auto s = exp_samples(50000, 5);
  const auto a1 = laguerre::empirical_coeffs(s, {6}, 1);
  const auto a4 = laguerre::empirical_coeffs(s, {6}, 4);
  EXPECT_EQ(a1.values(), a4.values());
  EXPECT_EQ(laguerre::coeffs_hash(a1), laguerre::coeffs_hash(a4));
}

TEST(EmpiricalCoeffs, BoundedBySqrt2PowD) {
  const SampleMatrix s(2, {0.0, 0.0, 1.0, 3.0, 0.2, 0.1});
  const auto a = laguerre::empirical_coeffs(s, {5, 5});
  for (double v : a.values()) EXPECT_LE(std::abs(v), 2.0 + 1e-12);
}

TEST(SampleMatrix, RejectsInvalidEntries) {
  EXPECT_THROW(SampleMatrix(1, {1.0, -0.5}), DataError);
  EXPECT_THROW(SampleMatrix(2, {1.0, NAN}), DataError);
  EXPECT_THROW(SampleMatrix(2, {1.0, 2.0, 3.0}), DataError);
  EXPECT_THROW(SampleMatrix(1, {}), DataError);
  try {
    SampleMatrix(2, {1.0, 2.0, 3.0, -4.0});
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("row 2, column 2"), std::string::npos);
  }
}

TEST(CoeffsFromMoments, Examples) {
  numkit::BoxTensor<double> mu(MultiIndex{1}, 0.0);
  mu.values() = {0.5, 0.25};
  const auto a = laguerre::coeffs_from_moments(mu);
  EXPECT_NEAR(a.values()[0], kSqrt2 / 2, 1e-15);
  EXPECT_NEAR(a.values()[1], 0.0, 1e-15);

  numkit::BoxTensor<double> zero(MultiIndex{3, 2}, 0.0);
  const auto az = laguerre::coeffs_from_moments(zero);
  for (double v : az.values()) EXPECT_EQ(v, 0.0);

  numkit::BoxTensor<double> c(MultiIndex{0, 0}, 0.3);
  EXPECT_NEAR(laguerre::coeffs_from_moments(c).values()[0], 0.6, 1e-15);
}

TEST(CoeffsFromMoments, ExponentialMomentsGiveSingleCoefficient) {
  // Exact -1-shifted moments of Exp(1): int x^l e^{-2x} dx = l!/2^{l+1}.
  numkit::PrecisionScope scope(256);
  numkit::BoxTensor<numkit::Real> mu(MultiIndex{30}, numkit::Real(0));
  numkit::Real f(1);
  for (int l = 0; l <= 30; ++l) {
    if (l > 0) f = f * l;
    mu[{l}] = f / numkit::ldexp(numkit::Real(1), l + 1);
  }
  const auto a = laguerre::coeffs_from_moments(mu);
  EXPECT_LT(abs(a[{0}] - numkit::sqrt(numkit::Real(2)) / 2).to_double(), 1e-60);
  for (int k = 1; k <= 30; ++k) EXPECT_LT(abs(a[{k}]).to_double(), 1e-60) << k;
}

TEST(DensityEval, Examples) {
  CoeffTensor a(MultiIndex{5}, 0.0);
  a[{0}] = 1.0 / kSqrt2;
  const double one[] = {1.0};
  EXPECT_NEAR(laguerre::density_eval(a, one), std::exp(-1.0), 1e-15);
  const CoeffTensor zero(MultiIndex{4, 4}, 0.0);
  const double pt[] = {0.3, 2.0};
  EXPECT_EQ(laguerre::density_eval(zero, pt), 0.0);
  const double bad[] = {-1.0};
  EXPECT_THROW(laguerre::density_eval(a, bad), std::domain_error);
}

TEST(DensityEval, GammaShapeTwo) {
  const ggc::GgcModel g({2.0}, {1.0}, 1);
  const auto a = laguerre::to_double(ggc::model_coeffs(g, {40}, numkit::PrecisionContext(256)).a);
  const double one[] = {1.0};
  EXPECT_NEAR(laguerre::density_eval(a, one), std::exp(-1.0), 1e-6);
}

TEST(DensityEval, ClampedIsNonNegative) {
  CoeffTensor a(MultiIndex{2}, 0.0);
  a.values() = {0.1, 0.0, 1.0};
  for (double x = 0.0; x < 10.0; x += 0.1) {
    const double pt[] = {x};
    EXPECT_GE(laguerre::density_eval_clamped(a, pt), 0.0);
    EXPECT_EQ(laguerre::density_eval_clamped(a, pt), std::max(0.0, laguerre::density_eval(a, pt)));
  }
}

TEST(L2NormSq, Examples) {
  CoeffTensor a(MultiIndex{3}, 0.0);
  a[{0}] = 1.0 / kSqrt2;
  EXPECT_NEAR(laguerre::l2_norm_sq(a), 0.5, 1e-15);
  EXPECT_EQ(laguerre::l2_norm_sq(CoeffTensor(MultiIndex{3}, 0.0)), 0.0);
  const ggc::GgcModel g({2.0}, {1.0}, 1);
  const auto b = laguerre::to_double(ggc::model_coeffs(g, {60}, numkit::PrecisionContext(256)).a);
  EXPECT_NEAR(laguerre::l2_norm_sq(b), 0.25, 1e-8);
}

TEST(L2NormSq, ParsevalMonotoneAndBounded) {
  // Gamma(3, scale 1/2) has density 4 x^2 e^{-2x}; its squared norm by quadrature.
  const ggc::GgcModel g({3.0}, {0.5}, 1);
  using boost::math::quadrature::gauss_kronrod;
  auto pdf = [](double x) { return x * x * std::exp(-2.0 * x) * 4.0; };
  const double norm = gauss_kronrod<double, 61>::integrate([&](double x) { return pdf(x) * pdf(x); }, 0.0, 60.0, 15, 1e-14);
  const auto full = laguerre::to_double(ggc::model_coeffs(g, {40}, numkit::PrecisionContext(256)).a);
  double prev = 0.0;
  for (int m = 0; m <= 40; ++m) {
    double s = 0.0;
    for (int k = 0; k <= m; ++k) s += full[{k}] * full[{k}];
    EXPECT_GE(s, prev);
    EXPECT_LE(s, norm * (1.0 + 1e-12));
    prev = s;
  }
  EXPECT_NEAR(prev, norm, 1e-8);
}

TEST(CoeffJson, RoundTripAndValidation) {
  CoeffTensor a(MultiIndex{1, 2}, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) a.at_offset(i) = 0.1 * static_cast<double>(i);
  const auto j = laguerre::to_json(a);
  EXPECT_EQ(j.at("d"), 2);
  const auto b = laguerre::coeffs_from_json(j);
  EXPECT_EQ(a.values(), b.values());
  EXPECT_EQ(a.box(), b.box());
  auto bad = j;
  bad["a"].push_back(1.0);
  EXPECT_THROW(laguerre::coeffs_from_json(bad), DataError);
}

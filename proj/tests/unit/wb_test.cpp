#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <random>

#include "thorin/ggc/coeffs.hpp"
#include "thorin/wb/wellbehaved.hpp"

using namespace thorin;
using ggc::GgcModel;
using numkit::MultiIndex;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double unif(std::mt19937_64& e, double a, double b) { return std::uniform_real_distribution<double>(a, b)(e); }

// Positive scales in general position and total mass in (1.2, 6).
GgcModel random_wb_model(std::mt19937_64& e, std::size_t n, std::size_t d) {
  std::vector<double> alpha(n);
  std::vector<double> s(n * d);
  double sum = 0.0;
  for (auto& a : alpha) sum += (a = unif(e, 0.2, 1.0));
  const double mass = unif(e, 1.2, 6.0);
  for (auto& a : alpha) a *= mass / sum;
  for (auto& v : s) v = unif(e, 0.1, 3.0);
  return GgcModel(alpha, s, d);
}

// Shortcut oracle: |alpha| > 1 and every s in (eps/(2+eps), (2+eps)/eps).
bool interval_wb(const GgcModel& m, double eps) {
  if (!(m.total_mass() > 1.0)) return false;
  for (std::size_t i = 0; i < m.n(); ++i) {
    const double s = m.scale(i, 0);
    if (!(s > eps / (2.0 + eps) && s < (2.0 + eps) / eps)) return false;
  }
  return true;
}

}  // namespace

TEST(Mobius, Examples) {
  EXPECT_EQ(wb::mobius_h(0.0), std::complex<double>(-1.0, 0.0));
  EXPECT_EQ(wb::mobius_h(3.0), std::complex<double>(2.0, 0.0));
  const auto hi = wb::mobius_h(std::complex<double>(0.0, 1.0));
  EXPECT_NEAR(hi.real(), 0.0, 1e-15);
  EXPECT_NEAR(hi.imag(), -1.0, 1e-15);
  EXPECT_THROW(wb::mobius_h(1.0), std::domain_error);
}

TEST(Mobius, Identities) {
  std::mt19937_64 e(1);
  for (int i = 0; i < 10000; ++i) {
    const std::complex<double> t(unif(e, -5, 5), unif(e, -5, 5));
    if (std::abs(t - 1.0) < 1e-3 || std::abs(t + 1.0) < 1e-3 || std::abs(t) < 1e-3) continue;
    const auto hh = wb::mobius_h(wb::mobius_h(t));
    EXPECT_LT(std::abs(hh - t), 1e-12 * std::max(1.0, std::abs(t)));
    const auto inv = wb::mobius_h(1.0 / t) + wb::mobius_h(t);
    EXPECT_LT(std::abs(inv), 1e-12 * std::max(1.0, std::abs(wb::mobius_h(t))));
    if (t.real() > 0) {
      EXPECT_GT(std::abs(wb::mobius_h(t)), 1.0);
    }
  }
}

TEST(DiscImage, Examples) {
  auto a = wb::disc_image(0.5);
  EXPECT_NEAR(a.center, -5.0 / 3.0, 1e-15);
  EXPECT_NEAR(a.radius, 4.0 / 3.0, 1e-15);
  EXPECT_LT(a.center + a.radius, 0.0);
  auto b = wb::disc_image(2.0);
  EXPECT_NEAR(b.center, 5.0 / 3.0, 1e-15);
  EXPECT_NEAR(b.radius, 4.0 / 3.0, 1e-15);
  EXPECT_GT(b.center - b.radius, 0.0);
  EXPECT_THROW(wb::disc_image(1.0), wb::HalfPlaneImage);
  EXPECT_THROW(wb::disc_image(0.0), std::invalid_argument);
}

TEST(DiscImage, MatchesPointImages) {
  std::mt19937_64 e(2);
  for (double b : {0.3, 0.7, 1.5, 4.0}) {
    const auto disc = wb::disc_image(b);
    for (int i = 0; i < 2000; ++i) {
      const double r = b * std::sqrt(unif(e, 0, 1)) * 0.999;
      const double th = unif(e, 0, 2 * M_PI);
      const auto t = std::polar(r, th);
      if (std::abs(t - 1.0) < 1e-6) continue;
      const bool inside = std::abs(wb::mobius_h(t) - disc.center) < disc.radius;
      EXPECT_EQ(inside, b < 1.0) << "b=" << b << " t=" << t;
    }
  }
}

TEST(IsEpsWb, Examples) {
  const GgcModel g21({2.0}, {1.0}, 1);
  for (double eps : {0.01, 1.0, 100.0, 1e8}) EXPECT_TRUE(wb::is_eps_wb(g21, eps).is_wb);
  const GgcModel g22({2.0}, {2.0}, 1);
  EXPECT_TRUE(wb::is_eps_wb(g22, 1.9).is_wb);
  EXPECT_FALSE(wb::is_eps_wb(g22, 2.1).is_wb);
  const GgcModel light({0.5}, {1.0}, 1);
  for (double eps : {0.01, 1.0}) EXPECT_FALSE(wb::is_eps_wb(light, eps).is_wb);
  EXPECT_THROW(wb::is_eps_wb(g22, 0.0), std::invalid_argument);
}

TEST(BestEps, Examples) {
  const auto r = wb::best_eps(GgcModel({2.0}, {2.0}, 1));
  EXPECT_NEAR(r.best_eps, 2.0, 1e-14);
  EXPECT_TRUE(r.is_wb);
  EXPECT_DOUBLE_EQ(r.total_mass, 2.0);

  const auto indep = wb::best_eps(GgcModel({1.0, 1.0}, {{1.0, 0.0}, {0.0, 1.0}}));
  EXPECT_TRUE(indep.is_wb);
  EXPECT_EQ(indep.best_eps, kInf);

  const auto comono = wb::best_eps(GgcModel({2.0}, {{1.0, 1.0}}));
  EXPECT_FALSE(comono.is_wb);
  EXPECT_EQ(comono.best_eps, 0.0);
  EXPECT_NE(comono.witness.find("rank 1"), std::string::npos);
}

TEST(BestEps, IndependentScalesGiveLargestComponentEps) {
  // t* = (1/2, 1/3): |h(1/2)| - 1 = 2, |h(1/3)| - 1 = 1, the larger one counts.
  const auto r = wb::best_eps(GgcModel({1.0, 1.0}, {{2.0, 0.0}, {0.0, 3.0}}));
  EXPECT_NEAR(r.best_eps, 2.0, 1e-14);
}

TEST(BestEps, RankDeficientMajorityIsNotWb) {
  // Atoms 1 and 2 share a ray and carry 3 of the 4 units of mass.
  const GgcModel m({1.5, 1.5, 1.0}, {{1.0, 2.0}, {2.0, 4.0}, {1.0, 0.0}});
  const auto r = wb::best_eps(m);
  EXPECT_FALSE(r.is_wb);
  EXPECT_NE(r.witness.find("atoms {1,2}"), std::string::npos);
  // Four equal atoms on three rays: every majority has three atoms, hence two rays.
  const GgcModel ok({1.0, 1.0, 1.0, 1.0}, {{1.0, 2.0}, {2.0, 4.0}, {1.0, 0.0}, {0.0, 1.0}});
  EXPECT_TRUE(wb::best_eps(ok).is_wb);
}

TEST(BestEps, UndecidedBeyondAtomCap) {
  std::mt19937_64 e(3);
  const auto m = random_wb_model(e, wb::kMaxSubsetAtoms + 1, 2);
  const auto r = wb::best_eps(m);
  EXPECT_FALSE(r.decided);
  EXPECT_FALSE(r.is_wb);
}

TEST(BestEps, UnivariateGeneralMachineryMatchesInterval) {
  std::mt19937_64 e(4);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 1 + e() % 5;
    std::vector<double> alpha(n);
    std::vector<double> s(n);
    for (auto& a : alpha) a = std::exp(unif(e, -2.5, 1.5));
    for (auto& v : s) v = std::exp(unif(e, -3, 3));
    const GgcModel m(alpha, s, 1);
    const auto fast = wb::best_eps(m);
    const auto general = wb::detail::best_eps_general(m);
    EXPECT_EQ(fast.is_wb, general.is_wb);
    if (fast.is_wb) {
      EXPECT_NEAR(general.best_eps, fast.best_eps, 1e-12 * fast.best_eps);
    }
    const double eps = std::exp(unif(e, -4, 3));
    const bool expected = interval_wb(m, eps);
    EXPECT_EQ(wb::is_eps_wb(m, eps).is_wb, expected) << "rep " << rep;
    // Same decision from the general best_eps.
    EXPECT_EQ(general.decided && general.is_wb && eps < general.best_eps, expected) << "rep " << rep;
  }
}

TEST(BestEps, Monotonicity) {
  std::mt19937_64 e(5);
  const std::vector<double> grid = {0.01, 0.05, 0.1, 0.3, 0.7, 1.0, 2.0, 5.0, 20.0, 100.0};
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t d = 1 + e() % 3;
    const auto m = random_wb_model(e, 1 + e() % 5, d);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (!wb::is_eps_wb(m, grid[i]).is_wb) continue;
      for (std::size_t j = 0; j < i; ++j) EXPECT_TRUE(wb::is_eps_wb(m, grid[j]).is_wb);
    }
  }
}

TEST(BestEps, ReportInvariants) {
  std::mt19937_64 e(6);
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t d = 1 + e() % 3;
    std::vector<double> alpha(1 + e() % 5);
    for (auto& a : alpha) a = unif(e, 0.05, 1.5);
    std::vector<double> s(alpha.size() * d);
    for (auto& v : s) v = e() % 4 == 0 ? 0.0 : unif(e, 0.1, 3.0);
    for (std::size_t i = 0; i < alpha.size(); ++i) s[i * d + e() % d] = unif(e, 0.1, 3.0);
    const auto r = wb::best_eps(GgcModel(alpha, s, d));
    if (r.is_wb) {
      EXPECT_GT(r.best_eps, 0.0);
      EXPECT_GT(r.total_mass, 1.0);
    }
  }
}

TEST(BestEps, ClosedUnderConvolution) {
  std::mt19937_64 e(7);
  int checked = 0;
  while (checked < 50) {
    const auto a = random_wb_model(e, 1 + e() % 4, 2);
    const auto b = random_wb_model(e, 1 + e() % 4, 2);
    if (!wb::best_eps(a).is_wb || !wb::best_eps(b).is_wb) continue;
    EXPECT_TRUE(wb::best_eps(ggc::concatenate(a, b)).is_wb);
    ++checked;
  }
}

TEST(BestEps, ClosedUnderInvertibleNonNegativeMaps) {
  std::mt19937_64 e(8);
  int checked = 0;
  while (checked < 30) {
    const std::size_t d = 2 + e() % 2;
    // Mix of w.b. and non-w.b. inputs: shared rays make some majorities singular.
    std::vector<double> alpha(2 + e() % 3);
    for (auto& a : alpha) a = unif(e, 0.3, 2.0);
    std::vector<double> s(alpha.size() * d);
    for (auto& v : s) v = unif(e, 0.1, 3.0);
    if (e() % 2 == 0) {
      for (std::size_t j = 0; j < d; ++j) s[d + j] = 2.0 * s[j];
    }
    const GgcModel m(alpha, s, d);
    std::vector<double> a(d * d);
    for (auto& v : a) v = unif(e, 0.0, 1.0);
    for (std::size_t j = 0; j < d; ++j) a[j * d + j] += 1.0;  // diagonally dominant, hence invertible
    std::vector<double> t(alpha.size() * d, 0.0);
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      for (std::size_t c = 0; c < d; ++c) {
        for (std::size_t k = 0; k < d; ++k) t[i * d + c] += s[i * d + k] * a[k * d + c];
      }
    }
    EXPECT_EQ(wb::best_eps(m).is_wb, wb::best_eps(GgcModel(alpha, t, d)).is_wb) << "rep " << checked;
    ++checked;
  }
}

TEST(RowRank, Basic) {
  EXPECT_EQ(wb::detail::row_rank({1, 2, 2, 4}, 2), 1U);
  EXPECT_EQ(wb::detail::row_rank({1, 0, 0, 1}, 2), 2U);
  EXPECT_EQ(wb::detail::row_rank({1, 1, 1, 2, 2, 2, 3, 3, 3}, 3), 1U);
  EXPECT_EQ(wb::detail::row_rank({1, 0, 0, 0, 1, 0, 1, 1, 0}, 3), 2U);
  EXPECT_EQ(wb::detail::row_rank({0, 0}, 2), 0U);
  // A 1e-12 perturbation is far above the 1e-20 tolerance.
  EXPECT_EQ(wb::detail::row_rank({1, 2, 2, 4 + 1e-12}, 2), 2U);
}

TEST(ClassifyDependence, Examples) {
  const auto a = wb::classify_dependence(GgcModel({1.0, 1.0}, {{1.0, 0.0}, {0.0, 2.0}}));
  EXPECT_EQ(a.kind, wb::Dependence::independent);
  EXPECT_EQ(a.rays, 2U);
  EXPECT_FALSE(a.singular);
  const auto b = wb::classify_dependence(GgcModel({1.0, 1.0}, {{1.0, 2.0}, {2.0, 4.0}}));
  EXPECT_EQ(b.kind, wb::Dependence::comonotonic);
  EXPECT_EQ(b.rays, 1U);
  EXPECT_TRUE(b.singular);
  const auto c = wb::classify_dependence(GgcModel({1.0, 1.0, 1.0}, {{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}}));
  EXPECT_EQ(c.kind, wb::Dependence::general);
  EXPECT_EQ(c.rays, 3U);
  EXPECT_FALSE(c.singular);
  EXPECT_STREQ(wb::to_string(c.kind), "general");
}

TEST(ClassifyDependence, NearCollinearWithinTolerance) {
  const auto r = wb::classify_dependence(GgcModel({1.0, 1.0}, {{1.0, 2.0}, {2.0, 4.0 * (1 + 1e-12)}}));
  EXPECT_EQ(r.kind, wb::Dependence::comonotonic);
  const auto g = wb::classify_dependence(GgcModel({1.0, 1.0}, {{1.0, 2.0}, {2.0, 4.0 * (1 + 1e-6)}}));
  EXPECT_EQ(g.kind, wb::Dependence::general);
}

TEST(DecayCheck, Examples) {
  laguerre::CoeffTensor exp1(MultiIndex{10}, 0.0);
  exp1.values()[0] = 1.0 / std::sqrt(2.0);
  for (double ep : {0.1, 1.0, 10.0}) {
    const auto r = wb::decay_check(exp1, ep);
    EXPECT_NEAR(r.b_fit, 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_TRUE(r.ok);
  }

  const auto a = ggc::model_coeffs_double(GgcModel({2.0}, {2.0}, 1), MultiIndex{40});
  EXPECT_TRUE(wb::decay_check(a, 1.0).ok);

  laguerre::CoeffTensor geo(MultiIndex{20}, 0.0);
  for (std::size_t k = 0; k < geo.size(); ++k) geo.values()[k] = std::pow(2.0, static_cast<double>(k));
  const auto g = wb::decay_check(geo, 1.0);
  EXPECT_FALSE(g.ok);
  EXPECT_DOUBLE_EQ(g.b_fit, std::pow(4.0, 20));
  EXPECT_THROW(wb::decay_check(geo, 0.0), std::invalid_argument);
}

TEST(DecayCheck, ProfileIsPerTotalDegreeMaximum) {
  laguerre::CoeffTensor t(MultiIndex{2, 1}, 0.0);
  t[MultiIndex{1, 0}] = 0.5;
  t[MultiIndex{0, 1}] = -0.25;
  t[MultiIndex{2, 1}] = 0.125;
  const auto r = wb::decay_check(t, 1.0);
  ASSERT_EQ(r.profile.size(), 4U);
  EXPECT_DOUBLE_EQ(r.profile[0], 0.0);
  EXPECT_DOUBLE_EQ(r.profile[1], 1.0);
  EXPECT_DOUBLE_EQ(r.profile[3], 1.0);
  EXPECT_TRUE(r.ok);
}

TEST(DecayCheck, NonIntegerMassDecaysPolynomially) {
  // Near y = 1 the coefficient generating function behaves like
  // sqrt(2) prod (2 s_i)^{-alpha_i} (1 - y)^{|alpha| - 1}, so by singularity
  // analysis a_k k^{|alpha|} -> sqrt(2) prod (2 s_i)^{-alpha_i} / Gamma(1 - |alpha|).
  struct Case {
    std::vector<double> alpha, s;
  };
  for (const auto& c : {Case{{2.5}, {1.0}}, Case{{1.2, 0.5}, {0.8, 1.6}}, Case{{3.3}, {1.3}}}) {
    const GgcModel m(c.alpha, c.s, 1);
    const int k = 400;
    const auto a = ggc::model_coeffs(m, MultiIndex{k}, numkit::PrecisionContext(256));
    double lead = std::sqrt(2.0) / std::tgamma(1.0 - m.total_mass());
    for (std::size_t i = 0; i < m.n(); ++i) lead *= std::pow(2.0 * c.s[i], -c.alpha[i]);
    const double ratio = a.a.values()[static_cast<std::size_t>(k)].to_double() * std::pow(k, m.total_mass()) / lead;
    EXPECT_NEAR(ratio, 1.0, 0.01);
  }
}

TEST(DecayCheck, IntegerMassDecaysExponentiallyInsideBestEps) {
  std::mt19937_64 e(9);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t n = 1 + e() % 3;
    const double mass = static_cast<double>(2 + e() % 5);
    std::vector<double> alpha(n);
    std::vector<double> s(n);
    double sum = 0.0;
    for (auto& a : alpha) sum += (a = unif(e, 0.2, 1.0));
    for (auto& a : alpha) a *= mass / sum;
    // Scales away from 1 keep best_eps in [0.8, 3], so a_k stays resolvable
    // at 256 bits up to the top order.
    for (auto& v : s) v = e() % 2 ? unif(e, 0.3, 0.6) : unif(e, 1.8, 3.0);
    const GgcModel m(alpha, s, 1);
    const auto wbr = wb::best_eps(m);
    ASSERT_TRUE(wbr.is_wb);
    const int top = 60;
    const auto a = laguerre::to_double(ggc::model_coeffs(m, MultiIndex{top}, numkit::PrecisionContext(256)).a);
    const auto r = wb::decay_check(a, wbr.best_eps / 2);
    // The other singularities are branch points of order alpha_i, so the
    // geometric decay carries a k^{alpha_i - 1} factor; check the trend at the top.
    EXPECT_LT(r.profile[top], r.profile[top - 10]) << "rep " << rep;
    EXPECT_LT(r.profile[top], r.b_fit) << "rep " << rep;
  }
}

TEST(WbReport, JsonRoundTrip) {
  wb::WbReport r;
  r.is_wb = true;
  r.best_eps = kInf;
  r.witness = "binding atoms {1}";
  r.total_mass = 2.5;
  const auto back = wb::wb_report_from_json(nlohmann::json::parse(wb::to_json(r).dump()));
  EXPECT_TRUE(back.is_wb);
  EXPECT_EQ(back.best_eps, kInf);
  EXPECT_EQ(back.witness, r.witness);
  EXPECT_EQ(back.total_mass, 2.5);
  r.best_eps = 0.75;
  EXPECT_EQ(wb::wb_report_from_json(wb::to_json(r)).best_eps, 0.75);
}

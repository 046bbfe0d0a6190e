#include "thorin/wb/wellbehaved.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

#include "thorin/numkit/parallel.hpp"
#include "thorin/numkit/real.hpp"

namespace thorin::wb {

using numkit::Real;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr unsigned kSolveBits = 128;
const Real& rank_tol() {
  static const Real tol = [] {
    numkit::PrecisionScope scope(kSolveBits);
    return Real("1e-20");
  }();
  return tol;
}

std::string atom_list(const std::vector<std::size_t>& idx) {
  std::ostringstream os;
  os << "atoms {";
  for (std::size_t i = 0; i < idx.size(); ++i) os << (i ? "," : "") << idx[i] + 1;
  os << "}";
  return os.str();
}

// |h(t)| - 1 for real t; +inf at the pole.
double eps_of(double s_or_t) {
  if (s_or_t == 1.0) return kInf;
  return std::abs(s_or_t + 1.0) / std::abs(s_or_t - 1.0) - 1.0;
}

Real eps_of(const Real& t) {
  const Real den = abs(t - 1);
  if (den.is_zero()) return Real(kInf);
  return abs(t + 1) / den - 1;
}

// Largest |h(t_j)| - 1 at the solution of s_J t = 1; nullopt-like NaN when
// s_J is numerically singular.
double subset_eps(const ggc::GgcModel& model, const std::vector<std::size_t>& rows) {
  numkit::PrecisionScope scope(kSolveBits);
  const std::size_t d = model.d();
  std::vector<std::vector<Real>> a(d, std::vector<Real>(d + 1));
  Real amax(0);
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      a[r][c] = Real(model.scale(rows[r], c));
      amax = max(amax, abs(a[r][c]));
    }
    a[r][d] = Real(1);
  }
  const Real tol = amax * rank_tol();
  for (std::size_t c = 0; c < d; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < d; ++r) {
      if (abs(a[r][c]) > abs(a[piv][c])) piv = r;
    }
    if (abs(a[piv][c]) <= tol) return std::nan("");
    std::swap(a[c], a[piv]);
    for (std::size_t r = c + 1; r < d; ++r) {
      const Real f = a[r][c] / a[c][c];
      for (std::size_t k = c; k <= d; ++k) a[r][k] -= f * a[c][k];
    }
  }
  std::vector<Real> t(d);
  for (std::size_t c = d; c-- > 0;) {
    Real acc = a[c][d];
    for (std::size_t k = c + 1; k < d; ++k) acc -= a[c][k] * t[k];
    t[c] = acc / a[c][c];
  }
  double best = -kInf;
  for (const auto& tj : t) best = std::max(best, eps_of(tj).to_double());
  return best;
}

std::vector<std::vector<std::size_t>> combinations(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  if (k > n) return out;
  std::vector<std::size_t> c(k);
  for (std::size_t i = 0; i < k; ++i) c[i] = i;
  while (true) {
    out.push_back(c);
    std::size_t i = k;
    while (i > 0 && c[i - 1] == n - k + i - 1) --i;
    if (i == 0) break;
    ++c[i - 1];
    for (std::size_t j = i; j < k; ++j) c[j] = c[j - 1] + 1;
  }
  return out;
}

WbReport base_report(const ggc::GgcModel& model) {
  WbReport r;
  r.total_mass = model.total_mass();
  return r;
}

}  // namespace

std::complex<double> mobius_h(std::complex<double> t) {
  if (t == std::complex<double>(1.0, 0.0)) throw std::domain_error("mobius_h: pole at t = 1");
  return (t + 1.0) / (t - 1.0);
}

Disc disc_image(double b) {
  if (!(b > 0.0) || !std::isfinite(b)) throw std::invalid_argument("disc_image: radius must be positive");
  if (b == 1.0) throw HalfPlaneImage();
  const double b2 = b * b;
  return {(b2 + 1.0) / (b2 - 1.0), std::abs(2.0 * b / (b2 - 1.0))};
}

namespace detail {

std::size_t row_rank(const std::vector<double>& rows, std::size_t d) {
  numkit::PrecisionScope scope(kSolveBits);
  const std::size_t n = d == 0 ? 0 : rows.size() / d;
  std::vector<std::vector<Real>> v(n, std::vector<Real>(d));
  Real norm0(0);
  std::vector<Real> norms(n, Real(0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      v[i][j] = Real(rows[i * d + j]);
      norms[i] += v[i][j] * v[i][j];
    }
    norm0 = max(norm0, norms[i]);
  }
  if (norm0.is_zero()) return 0;
  const Real tol = sqrt(norm0) * rank_tol();
  std::vector<bool> used(n, false);
  std::size_t rank = 0;
  while (rank < d) {
    std::size_t piv = n;
    Real best(0);
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i]) continue;
      Real s(0);
      for (std::size_t j = 0; j < d; ++j) s += v[i][j] * v[i][j];
      if (piv == n || s > best) {
        best = s;
        piv = i;
      }
    }
    if (piv == n || sqrt(best) <= tol) break;
    used[piv] = true;
    ++rank;
    const Real nrm = sqrt(best);
    std::vector<Real> q(d);
    for (std::size_t j = 0; j < d; ++j) q[j] = v[piv][j] / nrm;
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i]) continue;
      Real dot(0);
      for (std::size_t j = 0; j < d; ++j) dot += v[i][j] * q[j];
      for (std::size_t j = 0; j < d; ++j) v[i][j] -= dot * q[j];
    }
  }
  return rank;
}

WbReport best_eps_general(const ggc::GgcModel& model) {
  WbReport r = base_report(model);
  const std::size_t n = model.n();
  const std::size_t d = model.d();
  if (!(r.total_mass > 1.0)) {
    r.witness = "total mass <= 1";
    return r;
  }
  if (n > kMaxSubsetAtoms) {
    r.decided = false;
    r.witness = "undecided: too many atoms for subset enumeration";
    return r;
  }

  // Minimal majority subsets: a superset of a full-rank subset is full rank.
  const double total = r.total_mass;
  std::vector<std::uint32_t> minimal;
  for (std::uint32_t mask = 1; mask < (1U << n); ++mask) {
    double sum = 0.0;
    double smallest = kInf;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1U << i)) {
        sum += model.alpha(i);
        smallest = std::min(smallest, model.alpha(i));
      }
    }
    if (2.0 * sum > total && !(2.0 * (sum - smallest) > total)) minimal.push_back(mask);
  }
  std::vector<std::size_t> ranks(minimal.size());
  numkit::parallel_for(minimal.size(), 0, [&](std::size_t k) {
    std::vector<double> rows;
    for (std::size_t i = 0; i < n; ++i) {
      if (minimal[k] & (1U << i)) rows.insert(rows.end(), model.row(i).begin(), model.row(i).end());
    }
    ranks[k] = row_rank(rows, d);
  });
  for (std::size_t k = 0; k < minimal.size(); ++k) {
    if (ranks[k] < d) {
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < n; ++i) {
        if (minimal[k] & (1U << i)) idx.push_back(i);
      }
      r.witness = atom_list(idx) + " carry the majority of the mass but span rank " + std::to_string(ranks[k]) +
                  " < " + std::to_string(d);
      return r;
    }
  }

  const auto subsets = combinations(n, d);
  std::vector<double> eps(subsets.size());
  numkit::parallel_for(subsets.size(), 0, [&](std::size_t k) { eps[k] = subset_eps(model, subsets[k]); });
  double best = kInf;
  std::size_t arg = subsets.size();
  for (std::size_t k = 0; k < subsets.size(); ++k) {
    if (std::isnan(eps[k])) continue;
    if (eps[k] < best) {
      best = eps[k];
      arg = k;
    }
  }
  r.best_eps = std::max(best, 0.0);
  r.is_wb = r.best_eps > 0.0;
  if (arg < subsets.size()) r.witness = "binding " + atom_list(subsets[arg]);
  return r;
}

}  // namespace detail

WbReport best_eps(const ggc::GgcModel& model) {
  if (model.d() != 1) return detail::best_eps_general(model);
  WbReport r = base_report(model);
  if (!(r.total_mass > 1.0)) {
    r.witness = "total mass <= 1";
    return r;
  }
  double best = kInf;
  std::size_t arg = model.n();
  for (std::size_t i = 0; i < model.n(); ++i) {
    const double e = eps_of(model.scale(i, 0));
    if (e < best) {
      best = e;
      arg = i;
    }
  }
  r.best_eps = best;
  r.is_wb = best > 0.0;
  if (arg < model.n()) r.witness = "binding " + atom_list({arg});
  return r;
}

WbReport is_eps_wb(const ggc::GgcModel& model, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("is_eps_wb: eps must be positive");
  WbReport r = best_eps(model);
  r.is_wb = r.decided && r.is_wb && eps < r.best_eps;
  return r;
}

const char* to_string(Dependence kind) {
  switch (kind) {
    case Dependence::independent:
      return "independent";
    case Dependence::comonotonic:
      return "comonotonic";
    case Dependence::general:
      return "general";
  }
  return "general";
}

DependenceReport classify_dependence(const ggc::GgcModel& model) {
  const std::size_t n = model.n();
  const std::size_t d = model.d();
  std::vector<std::vector<double>> rays;
  bool single_axis = true;
  for (std::size_t i = 0; i < n; ++i) {
    const double norm = model.row_sum(i);
    std::vector<double> u(d);
    std::size_t nonzero = 0;
    for (std::size_t j = 0; j < d; ++j) {
      u[j] = model.scale(i, j) / norm;
      if (model.scale(i, j) != 0.0) ++nonzero;
    }
    if (nonzero != 1) single_axis = false;
    const bool seen = std::any_of(rays.begin(), rays.end(), [&](const std::vector<double>& v) {
      for (std::size_t j = 0; j < d; ++j) {
        if (std::abs(v[j] - u[j]) > 1e-9 * std::max(std::abs(v[j]), std::abs(u[j]))) return false;
      }
      return true;
    });
    if (!seen) rays.push_back(std::move(u));
  }
  DependenceReport rep;
  rep.rays = rays.size();
  rep.singular = rep.rays < d;
  if (single_axis) {
    rep.kind = Dependence::independent;
  } else if (rep.rays == 1) {
    rep.kind = Dependence::comonotonic;
  } else {
    rep.kind = Dependence::general;
  }
  return rep;
}

DecayResult decay_check(const laguerre::CoeffTensor& coeffs, double eps_prime) {
  if (!(eps_prime > 0.0) || !std::isfinite(eps_prime)) {
    throw std::invalid_argument("decay_check: eps' must be positive and finite");
  }
  const auto& box = coeffs.box();
  const int top = box.upper().total();
  DecayResult res;
  res.profile.assign(static_cast<std::size_t>(top) + 1, 0.0);
  const double lg = std::log1p(eps_prime);
  for (std::size_t off = 0; off < box.size(); ++off) {
    const double a = coeffs.at_offset(off);
    if (!std::isfinite(a)) throw std::invalid_argument("decay_check: non-finite coefficient");
    const int j = box.index(off).total();
    const double g = a == 0.0 ? 0.0 : std::exp(std::log(std::abs(a)) + lg * j);
    auto& slot = res.profile[static_cast<std::size_t>(j)];
    slot = std::max(slot, g);
  }
  double head = 0.0;
  for (int j = 0; j <= std::min(top, 2); ++j) head = std::max(head, res.profile[static_cast<std::size_t>(j)]);
  res.b_fit = *std::max_element(res.profile.begin(), res.profile.end());
  res.ok = std::isfinite(res.b_fit);
  for (int j = 3; j <= top; ++j) {
    if (res.profile[static_cast<std::size_t>(j)] > 10.0 * head) res.ok = false;
  }
  return res;
}

nlohmann::json to_json(const WbReport& report) {
  nlohmann::json j;
  j["decided"] = report.decided;
  j["is_wb"] = report.is_wb;
  if (std::isinf(report.best_eps)) {
    j["best_eps"] = "inf";
  } else {
    j["best_eps"] = report.best_eps;
  }
  j["witness"] = report.witness;
  j["total_mass"] = report.total_mass;
  return j;
}

WbReport wb_report_from_json(const nlohmann::json& j) {
  WbReport r;
  r.decided = j.value("decided", true);
  r.is_wb = j.at("is_wb").get<bool>();
  const auto& e = j.at("best_eps");
  r.best_eps = e.is_string() ? kInf : e.get<double>();
  r.witness = j.value("witness", std::string());
  r.total_mass = j.value("total_mass", 0.0);
  return r;
}

}  // namespace thorin::wb

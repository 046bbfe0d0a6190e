#include "thorin/ggc/model.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "thorin/numkit/errors.hpp"
#include "thorin/numkit/parallel.hpp"
#include "thorin/numkit/random.hpp"

namespace thorin::ggc {

namespace {

std::vector<double> flatten(const std::vector<std::vector<double>>& rows) {
  const std::size_t dim = rows.empty() ? 0 : rows.front().size();
  std::vector<double> flat;
  flat.reserve(rows.size() * dim);
  for (const auto& r : rows) {
    if (r.size() != dim) throw std::invalid_argument("GgcModel: ragged scale matrix");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return flat;
}

// Keeps atoms with a strictly positive projected scale.
GgcModel project_1d(const GgcModel& model, const std::vector<double>& proj) {
  std::vector<double> alpha;
  std::vector<double> s;
  for (std::size_t i = 0; i < model.n(); ++i) {
    if (proj[i] > 0.0) {
      alpha.push_back(model.alpha(i));
      s.push_back(proj[i]);
    }
  }
  if (alpha.empty()) throw std::invalid_argument("projection is degenerate: every atom has zero scale");
  return GgcModel(std::move(alpha), std::move(s), 1);
}

constexpr std::size_t kSampleBlock = 8192;

}  // namespace

GgcModel::GgcModel(std::vector<double> alpha, std::vector<double> scales, std::size_t dim)
    : alpha_(std::move(alpha)), scales_(std::move(scales)), dim_(dim) {
  if (alpha_.empty()) throw std::invalid_argument("GgcModel: need at least one atom");
  if (dim_ == 0) throw std::invalid_argument("GgcModel: dimension must be positive");
  if (scales_.size() != alpha_.size() * dim_) throw std::invalid_argument("GgcModel: scale matrix is not n x d");
  for (std::size_t i = 0; i < alpha_.size(); ++i) {
    if (!(alpha_[i] > 0.0) || !std::isfinite(alpha_[i])) {
      throw std::invalid_argument("GgcModel: shape " + std::to_string(i + 1) + " must be positive and finite");
    }
    bool positive = false;
    for (std::size_t j = 0; j < dim_; ++j) {
      const double v = scales_[i * dim_ + j];
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument("GgcModel: scale (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                    ") must be non-negative and finite");
      }
      positive = positive || v > 0.0;
    }
    if (!positive) throw std::invalid_argument("GgcModel: scale row " + std::to_string(i + 1) + " is zero");
  }
}

GgcModel::GgcModel(std::vector<double> alpha, const std::vector<std::vector<double>>& rows)
    : GgcModel(std::move(alpha), flatten(rows), rows.empty() ? 0 : rows.front().size()) {}

double GgcModel::row_sum(std::size_t i) const noexcept {
  const auto r = row(i);
  return std::accumulate(r.begin(), r.end(), 0.0);
}

double GgcModel::total_mass() const noexcept { return std::accumulate(alpha_.begin(), alpha_.end(), 0.0); }

nlohmann::json to_json(const GgcModel& model) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < model.n(); ++i) {
    const auto r = model.row(i);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return {{"alpha", model.alpha()}, {"scales", rows}};
}

GgcModel model_from_json(const nlohmann::json& j) {
  try {
    auto alpha = j.at("alpha").get<std::vector<double>>();
    const auto rows = j.at("scales").get<std::vector<std::vector<double>>>();
    if (rows.size() != alpha.size()) throw DataError("model JSON: alpha and scales differ in length");
    return GgcModel(std::move(alpha), rows);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("model JSON: ") + e.what());
  }
}

std::complex<double> cgf(const GgcModel& model, std::span<const std::complex<double>> t) {
  if (t.size() != model.d()) throw std::invalid_argument("cgf: dimension mismatch");
  std::complex<double> k(0.0, 0.0);
  for (std::size_t i = 0; i < model.n(); ++i) {
    std::complex<double> dot(0.0, 0.0);
    for (std::size_t j = 0; j < model.d(); ++j) dot += model.scale(i, j) * t[j];
    const std::complex<double> arg = 1.0 - dot;
    if (arg.imag() == 0.0 && arg.real() <= 0.0) throw std::domain_error("cgf: argument outside the domain");
    k -= model.alpha(i) * std::log(arg);
  }
  return k;
}

std::vector<double> simplex_scales(const GgcModel& model) {
  std::vector<double> x(model.scales());
  for (std::size_t i = 0; i < model.n(); ++i) {
    const double denom = 1.0 + model.row_sum(i);
    for (std::size_t j = 0; j < model.d(); ++j) x[i * model.d() + j] /= denom;
  }
  return x;
}

GgcModel concatenate(const GgcModel& a, const GgcModel& b) {
  if (a.d() != b.d()) throw std::invalid_argument("concatenate: dimension mismatch");
  auto alpha = a.alpha();
  alpha.insert(alpha.end(), b.alpha().begin(), b.alpha().end());
  auto s = a.scales();
  s.insert(s.end(), b.scales().begin(), b.scales().end());
  return GgcModel(std::move(alpha), std::move(s), a.d());
}

GgcModel marginal(const GgcModel& model, std::size_t j) {
  if (j >= model.d()) throw std::out_of_range("marginal: index out of range");
  std::vector<double> col(model.n());
  for (std::size_t i = 0; i < model.n(); ++i) col[i] = model.scale(i, j);
  return project_1d(model, col);
}

GgcModel linear_combination(const GgcModel& model, std::span<const double> c) {
  if (c.size() != model.d()) throw std::invalid_argument("linear_combination: dimension mismatch");
  bool any = false;
  for (double v : c) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("linear_combination: weights must be >= 0");
    any = any || v > 0.0;
  }
  if (!any) throw std::invalid_argument("linear_combination: weights are all zero");
  std::vector<double> proj(model.n(), 0.0);
  for (std::size_t i = 0; i < model.n(); ++i) {
    for (std::size_t j = 0; j < model.d(); ++j) proj[i] += model.scale(i, j) * c[j];
  }
  return project_1d(model, proj);
}

laguerre::SampleMatrix sample(const GgcModel& model, std::size_t count, std::uint64_t seed, unsigned threads) {
  if (count == 0) throw std::invalid_argument("sample: count must be positive");
  const std::size_t d = model.d();
  std::vector<double> out(count * d, 0.0);
  const std::size_t blocks = (count + kSampleBlock - 1) / kSampleBlock;
  numkit::parallel_for(blocks, threads, [&](std::size_t b) {
    numkit::Engine eng(numkit::derive_seed(seed, b));
    const std::size_t end = std::min(count, (b + 1) * kSampleBlock);
    for (std::size_t r = b * kSampleBlock; r < end; ++r) {
      double* row = out.data() + r * d;
      for (std::size_t i = 0; i < model.n(); ++i) {
        const double z = numkit::standard_gamma(eng, model.alpha(i));
        for (std::size_t j = 0; j < d; ++j) row[j] += z * model.scale(i, j);
      }
    }
  });
  return laguerre::SampleMatrix(d, std::move(out));
}

}  // namespace thorin::ggc

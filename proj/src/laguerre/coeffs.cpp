#include "thorin/laguerre/coeffs.hpp"

#include <cstring>
#include <numbers>
#include <stdexcept>
#include <string>

#include "thorin/laguerre/basis.hpp"
#include "thorin/numkit/errors.hpp"
#include "thorin/numkit/parallel.hpp"

namespace thorin::laguerre {

using numkit::IndexBox;
using numkit::MultiIndex;

namespace {

constexpr std::size_t kChunkRows = 4096;

struct Kahan {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    const double y = v - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

// prod_j phi_{k_j}(x_j) for every k in the box, row-major, written into `out`.
void basis_products(const IndexBox& box, std::span<const double> x, std::vector<double>& out,
                    std::vector<double>& scratch) {
  const std::size_t d = box.dim();
  out.assign(1, 1.0);
  for (std::size_t j = 0; j < d; ++j) {
    const auto row = phi_row(box.upper()[j], x[j]);
    scratch.resize(out.size() * row.size());
    std::size_t o = 0;
    for (double p : out) {
      for (double r : row) scratch[o++] = p * r;
    }
    out.swap(scratch);
  }
}

}  // namespace

CoeffTensor to_double(const CoeffTensorX& a) {
  return a.map<double>([](const numkit::Real& v) { return v.to_double(); });
}

CoeffTensor empirical_coeffs(const SampleMatrix& samples, const MultiIndex& m, unsigned threads) {
  if (samples.rows() == 0) throw DataError("empirical_coeffs: empty sample");
  if (samples.dim() != m.size()) throw std::invalid_argument("empirical_coeffs: dimension mismatch");
  const IndexBox box(m);
  const std::size_t n = samples.rows();
  const std::size_t chunks = (n + kChunkRows - 1) / kChunkRows;
  std::vector<std::vector<Kahan>> partial(chunks);
  numkit::parallel_for(chunks, threads, [&](std::size_t c) {
    std::vector<Kahan> acc(box.size());
    std::vector<double> prod;
    std::vector<double> scratch;
    const std::size_t end = std::min(n, (c + 1) * kChunkRows);
    for (std::size_t i = c * kChunkRows; i < end; ++i) {
      basis_products(box, samples.row(i), prod, scratch);
      for (std::size_t off = 0; off < prod.size(); ++off) acc[off].add(prod[off]);
    }
    partial[c] = std::move(acc);
  });
  CoeffTensor out(box, 0.0);
  for (std::size_t off = 0; off < box.size(); ++off) {
    Kahan total;
    for (std::size_t c = 0; c < chunks; ++c) {
      total.add(partial[c][off].sum);
      total.add(-partial[c][off].comp);
    }
    out.at_offset(off) = total.sum / static_cast<double>(n);
  }
  return out;
}

std::uint64_t coeffs_hash(const CoeffTensor& a) {
  std::uint64_t h = 14695981039346656037ULL;
  auto mix = [&h](const void* p, std::size_t len) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= b[i];
      h *= 1099511628211ULL;
    }
  };
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const std::int64_t v = a.upper()[i];
    mix(&v, sizeof v);
  }
  for (double v : a.values()) mix(&v, sizeof v);
  return h;
}

double density_eval(const CoeffTensor& a, std::span<const double> x) {
  if (x.size() != a.dim()) throw std::invalid_argument("density_eval: dimension mismatch");
  std::vector<double> prod;
  std::vector<double> scratch;
  basis_products(a.box(), x, prod, scratch);
  double s = 0.0;
  for (std::size_t off = 0; off < prod.size(); ++off) s += a.at_offset(off) * prod[off];
  return s;
}

double density_eval_clamped(const CoeffTensor& a, std::span<const double> x) {
  return std::max(density_eval(a, x), 0.0);
}

double l2_norm_sq(const CoeffTensor& a) {
  double s = 0.0;
  for (double v : a.values()) s += v * v;
  return s;
}

nlohmann::json to_json(const CoeffTensor& a) {
  nlohmann::json j;
  j["d"] = a.dim();
  j["m"] = std::vector<int>(a.upper().values().begin(), a.upper().values().end());
  j["a"] = a.values();
  return j;
}

CoeffTensor coeffs_from_json(const nlohmann::json& j) {
  try {
    const auto d = j.at("d").get<std::size_t>();
    const auto m = j.at("m").get<std::vector<int>>();
    auto values = j.at("a").get<std::vector<double>>();
    if (m.size() != d) throw DataError("coefficient JSON: length of m differs from d");
    for (double v : values) {
      if (!std::isfinite(v)) throw DataError("coefficient JSON: non-finite entry");
    }
    IndexBox box{MultiIndex(m)};
    if (values.size() != box.size()) throw DataError("coefficient JSON: entry count does not match m");
    return CoeffTensor(std::move(box), std::move(values));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("coefficient JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("coefficient JSON: ") + e.what());
  }
}

}  // namespace thorin::laguerre

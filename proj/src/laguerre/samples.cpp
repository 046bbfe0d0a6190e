#include "thorin/laguerre/samples.hpp"

#include <cmath>
#include <string>

#include "thorin/numkit/errors.hpp"

namespace thorin::laguerre {

SampleMatrix::SampleMatrix(std::size_t dim, std::vector<double> values) : dim_(dim), data_(std::move(values)) {
  if (dim_ == 0) throw DataError("sample matrix: dimension must be positive");
  if (data_.empty()) throw DataError("sample matrix: no observations");
  if (data_.size() % dim_ != 0) throw DataError("sample matrix: ragged rows");
  for (std::size_t i = 0; i < data_.size(); ++i) {
    const double v = data_[i];
    if (!std::isfinite(v) || v < 0.0) {
      throw DataError("sample matrix: invalid entry " + std::to_string(v) + " at row " +
                      std::to_string(i / dim_ + 1) + ", column " + std::to_string(i % dim_ + 1));
    }
  }
}

std::vector<double> SampleMatrix::column(std::size_t j) const {
  std::vector<double> c(rows());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = data_[i * dim_ + j];
  return c;
}

}  // namespace thorin::laguerre

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace thorin::laguerre {

/// N observations in R_+^d stored row-major.
class SampleMatrix {
 public:
  SampleMatrix() = default;
  /// Throws DataError naming the first offending row/column when an entry is
  /// negative or non-finite, or when the shape is inconsistent.
  SampleMatrix(std::size_t dim, std::vector<double> values);

  std::size_t rows() const noexcept { return dim_ == 0 ? 0 : data_.size() / dim_; }
  std::size_t dim() const noexcept { return dim_; }
  std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * dim_, dim_}; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * dim_ + j]; }
  const std::vector<double>& values() const noexcept { return data_; }

  /// Column j as a vector.
  std::vector<double> column(std::size_t j) const;

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

}  // namespace thorin::laguerre

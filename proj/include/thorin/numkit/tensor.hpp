#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "thorin/numkit/multi_index.hpp"

namespace thorin::numkit {

/// Dense array indexed by the multi-indices of an IndexBox.
template <class T>
class BoxTensor {
 public:
  BoxTensor() = default;
  explicit BoxTensor(IndexBox box, const T& fill = T(0))
      : box_(std::move(box)), data_(box_.size(), fill) {}
  explicit BoxTensor(const MultiIndex& m, const T& fill = T(0)) : BoxTensor(IndexBox(m), fill) {}
  BoxTensor(IndexBox box, std::vector<T> values) : box_(std::move(box)), data_(std::move(values)) {
    if (data_.size() != box_.size()) {
      throw std::invalid_argument("BoxTensor: value count does not match box cardinality");
    }
  }

  const IndexBox& box() const noexcept { return box_; }
  const MultiIndex& upper() const noexcept { return box_.upper(); }
  std::size_t dim() const noexcept { return box_.dim(); }
  std::size_t size() const noexcept { return data_.size(); }

  T& operator[](const MultiIndex& k) { return data_[box_.offset(k)]; }
  const T& operator[](const MultiIndex& k) const { return data_[box_.offset(k)]; }
  T& at_offset(std::size_t off) { return data_[off]; }
  const T& at_offset(std::size_t off) const { return data_[off]; }

  /// Row-major values (last coordinate fastest).
  const std::vector<T>& values() const noexcept { return data_; }
  std::vector<T>& values() noexcept { return data_; }

  template <class U, class F>
  BoxTensor<U> map(F&& f) const {
    std::vector<U> out;
    out.reserve(data_.size());
    for (const T& v : data_) out.push_back(f(v));
    return BoxTensor<U>(box_, std::move(out));
  }

 private:
  IndexBox box_;
  std::vector<T> data_;
};

}  // namespace thorin::numkit

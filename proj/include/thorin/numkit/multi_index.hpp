#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <span>
#include <vector>

namespace thorin::numkit {

/// A d-vector of non-negative integers.
class MultiIndex {
 public:
  MultiIndex() = default;
  MultiIndex(std::initializer_list<int> k);
  explicit MultiIndex(std::vector<int> k);
  /// All-zero index of dimension d.
  static MultiIndex zeros(std::size_t d);
  /// Every component equal to v.
  static MultiIndex filled(std::size_t d, int v);

  std::size_t size() const noexcept { return k_.size(); }
  int operator[](std::size_t i) const noexcept { return k_[i]; }
  int& operator[](std::size_t i) noexcept { return k_[i]; }
  std::span<const int> values() const noexcept { return k_; }

  /// |k| = k_1 + ... + k_d.
  int total() const noexcept;
  bool is_zero() const noexcept;
  /// Componentwise k <= other; dimensions must agree.
  bool leq(const MultiIndex& other) const noexcept;
  /// Position of the first non-zero component, or size() for the zero index.
  std::size_t first_nonzero() const noexcept;

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<int> k_;
};

std::ostream& operator<<(std::ostream& os, const MultiIndex& k);

/// Every k <= m exactly once, in graded colexicographic order on (|k|, k).
std::vector<MultiIndex> iterate_box(const MultiIndex& m);

/// Product of binomial coefficients prod_i C(x_i, y_i); zero when some y_i > x_i.
/// Throws std::overflow_error if the product does not fit in 64 bits.
std::uint64_t binom_prod(const MultiIndex& x, const MultiIndex& y);

/// The index box {k : 0 <= k <= m} with a dense row-major layout
/// (last coordinate fastest).
class IndexBox {
 public:
  IndexBox() = default;
  explicit IndexBox(MultiIndex m);

  const MultiIndex& upper() const noexcept { return m_; }
  std::size_t dim() const noexcept { return m_.size(); }
  /// prod_i (m_i + 1).
  std::size_t size() const noexcept { return size_; }

  std::size_t offset(const MultiIndex& k) const noexcept;
  MultiIndex index(std::size_t offset) const;
  bool contains(const MultiIndex& k) const noexcept;

  /// Offsets of all entries in graded colex order (a linear extension of <=).
  const std::vector<std::size_t>& graded_offsets() const noexcept { return graded_; }
  std::size_t stride(std::size_t axis) const noexcept { return strides_[axis]; }

  friend bool operator==(const IndexBox& a, const IndexBox& b) { return a.m_ == b.m_; }

 private:
  MultiIndex m_;
  std::vector<std::size_t> strides_;
  std::vector<std::size_t> graded_;
  std::size_t size_ = 0;
};

}  // namespace thorin::numkit

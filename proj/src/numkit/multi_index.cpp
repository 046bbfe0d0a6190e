#include "thorin/numkit/multi_index.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace thorin::numkit {

MultiIndex::MultiIndex(std::initializer_list<int> k) : MultiIndex(std::vector<int>(k)) {}

MultiIndex::MultiIndex(std::vector<int> k) : k_(std::move(k)) {
  for (int v : k_) {
    if (v < 0) throw std::invalid_argument("MultiIndex: negative component " + std::to_string(v));
  }
}

MultiIndex MultiIndex::zeros(std::size_t d) { return MultiIndex(std::vector<int>(d, 0)); }

MultiIndex MultiIndex::filled(std::size_t d, int v) { return MultiIndex(std::vector<int>(d, v)); }

int MultiIndex::total() const noexcept { return std::accumulate(k_.begin(), k_.end(), 0); }

bool MultiIndex::is_zero() const noexcept {
  return std::all_of(k_.begin(), k_.end(), [](int v) { return v == 0; });
}

bool MultiIndex::leq(const MultiIndex& other) const noexcept {
  for (std::size_t i = 0; i < k_.size(); ++i) {
    if (k_[i] > other.k_[i]) return false;
  }
  return true;
}

std::size_t MultiIndex::first_nonzero() const noexcept {
  for (std::size_t i = 0; i < k_.size(); ++i) {
    if (k_[i] != 0) return i;
  }
  return k_.size();
}

std::ostream& operator<<(std::ostream& os, const MultiIndex& k) {
  os << '(';
  for (std::size_t i = 0; i < k.size(); ++i) os << (i ? "," : "") << k[i];
  return os << ')';
}

namespace {

// Graded colex: smaller |k| first; ties broken by comparing from the last coordinate.
bool graded_colex_less(const MultiIndex& a, const MultiIndex& b) {
  const int ta = a.total();
  const int tb = b.total();
  if (ta != tb) return ta < tb;
  for (std::size_t i = a.size(); i-- > 0;) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

}  // namespace

std::vector<MultiIndex> iterate_box(const MultiIndex& m) {
  IndexBox box(m);
  std::vector<MultiIndex> out;
  out.reserve(box.size());
  for (std::size_t off : box.graded_offsets()) out.push_back(box.index(off));
  return out;
}

__extension__ using u128 = unsigned __int128;

std::uint64_t binom_prod(const MultiIndex& x, const MultiIndex& y) {
  if (x.size() != y.size()) throw std::invalid_argument("binom_prod: dimension mismatch");
  u128 acc = 1;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const int n = x[i];
    const int k = y[i];
    if (k > n) return 0;
    // C(n, k) built incrementally; each partial product is an exact binomial.
    u128 c = 1;
    const int kk = std::min(k, n - k);
    for (int j = 1; j <= kk; ++j) {
      c = c * static_cast<unsigned>(n - kk + j) / static_cast<unsigned>(j);
      if (c > UINT64_MAX) throw std::overflow_error("binom_prod: overflow");
    }
    acc *= c;
    if (acc > UINT64_MAX) throw std::overflow_error("binom_prod: overflow");
  }
  return static_cast<std::uint64_t>(acc);
}

IndexBox::IndexBox(MultiIndex m) : m_(std::move(m)) {
  const std::size_t d = m_.size();
  strides_.assign(d, 1);
  size_ = 1;
  for (std::size_t i = d; i-- > 0;) {
    strides_[i] = size_;
    size_ *= static_cast<std::size_t>(m_[i]) + 1;
  }
  std::vector<MultiIndex> all;
  all.reserve(size_);
  for (std::size_t off = 0; off < size_; ++off) all.push_back(index(off));
  std::vector<std::size_t> order(size_);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return graded_colex_less(all[a], all[b]);
  });
  graded_ = std::move(order);
}

std::size_t IndexBox::offset(const MultiIndex& k) const noexcept {
  std::size_t off = 0;
  for (std::size_t i = 0; i < k.size(); ++i) off += strides_[i] * static_cast<std::size_t>(k[i]);
  return off;
}

MultiIndex IndexBox::index(std::size_t offset) const {
  std::vector<int> k(m_.size());
  for (std::size_t i = 0; i < m_.size(); ++i) {
    k[i] = static_cast<int>(offset / strides_[i]);
    offset %= strides_[i];
  }
  return MultiIndex(std::move(k));
}

bool IndexBox::contains(const MultiIndex& k) const noexcept {
  return k.size() == m_.size() && k.leq(m_);
}

}  // namespace thorin::numkit

#ifndef CGTREE_ROW_SET_HPP
#define CGTREE_ROW_SET_HPP

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace cgtree {

/// Fixed-width bit-set over row indices. All binary operations require
/// operands of the same width.
class RowSet {
 public:
  RowSet() = default;
  explicit RowSet(std::size_t width, bool filled = false)
      : width_(width), words_((width + 63) / 64, filled ? ~std::uint64_t{0} : 0) {
    trim();
  }

  static RowSet all(std::size_t width) { return RowSet(width, true); }

  std::size_t width() const { return width_; }

  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
  void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(std::size_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }

  std::size_t count() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }
  bool empty() const {
    for (auto w : words_)
      if (w) return false;
    return true;
  }

  RowSet& operator&=(const RowSet& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }
  RowSet& operator|=(const RowSet& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  /// this &= ~o
  RowSet& subtract(const RowSet& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
    return *this;
  }

  friend RowSet operator&(RowSet a, const RowSet& b) { return a &= b; }
  friend RowSet operator|(RowSet a, const RowSet& b) { return a |= b; }
  friend RowSet difference(RowSet a, const RowSet& b) { return a.subtract(b); }

  /// |a & b| without materializing the intersection.
  friend std::size_t intersection_count(const RowSet& a, const RowSet& b) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < a.words_.size(); ++i)
      n += static_cast<std::size_t>(std::popcount(a.words_[i] & b.words_[i]));
    return n;
  }

  bool operator==(const RowSet&) const = default;

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      auto bits = words_[w];
      while (bits) {
        const int b = std::countr_zero(bits);
        f(w * 64 + static_cast<std::size_t>(b));
        bits &= bits - 1;
      }
    }
  }

  std::vector<std::size_t> indices() const {
    std::vector<std::size_t> out;
    out.reserve(count());
    for_each([&](std::size_t i) { out.push_back(i); });
    return out;
  }

  const std::vector<std::uint64_t>& words() const { return words_; }

 private:
  void trim() {
    if (width_ % 64 != 0 && !words_.empty())
      words_.back() &= (std::uint64_t{1} << (width_ % 64)) - 1;
  }

  std::size_t width_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace cgtree

#endif  // CGTREE_ROW_SET_HPP

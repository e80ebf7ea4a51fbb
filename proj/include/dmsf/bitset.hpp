#pragma once

#include <cstdint>
#include <vector>

namespace dmsf {

// Fixed-width bitset sized at runtime; used for chunk-id membership masks.
class SmallBitset {
 public:
  SmallBitset() = default;
  explicit SmallBitset(std::uint32_t bits) { resize(bits); }

  void resize(std::uint32_t bits) {
    bits_ = bits;
    words_.assign((bits + 63) / 64, 0);
  }

  void set(std::uint32_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(std::uint32_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
  bool test(std::uint32_t i) const {
    return (words_[i >> 6] >> (i & 63)) & 1;
  }
  void clear() { words_.assign(words_.size(), 0); }

  SmallBitset& operator|=(const SmallBitset& o) {
    if (words_.size() < o.words_.size()) words_.resize(o.words_.size(), 0);
    for (std::size_t w = 0; w < o.words_.size(); ++w) words_[w] |= o.words_[w];
    return *this;
  }

  friend bool operator==(const SmallBitset& a, const SmallBitset& b) {
    return a.bits_ == b.bits_ && a.words_ == b.words_;
  }

  bool any() const {
    for (std::uint64_t w : words_) {
      if (w) return true;
    }
    return false;
  }

  std::uint32_t count() const {
    std::uint32_t k = 0;
    for (std::uint64_t w : words_) k += static_cast<std::uint32_t>(__builtin_popcountll(w));
    return k;
  }

  template <class F>
  void for_each_set(F&& f) const {
    for (std::size_t wi = 0; wi < words_.size(); ++wi) {
      std::uint64_t w = words_[wi];
      while (w) {
        std::uint32_t bit = static_cast<std::uint32_t>(__builtin_ctzll(w));
        f(static_cast<std::uint32_t>(wi * 64 + bit));
        w &= w - 1;
      }
    }
  }

  std::uint32_t size() const { return bits_; }

 private:
  std::uint32_t bits_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace dmsf

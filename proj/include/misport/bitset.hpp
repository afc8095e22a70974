#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace misport {

using Word = std::uint64_t;
inline constexpr std::size_t kWordBits = 64;

constexpr std::size_t words_for(std::size_t bits) noexcept {
  return (bits + kWordBits - 1) / kWordBits;
}

// Free helpers over word spans. Callers guarantee equal lengths.

inline bool test_bit(std::span<const Word> w, std::size_t i) noexcept {
  return (w[i / kWordBits] >> (i % kWordBits)) & 1U;
}

inline void set_bit(std::span<Word> w, std::size_t i) noexcept {
  w[i / kWordBits] |= Word{1} << (i % kWordBits);
}

inline void reset_bit(std::span<Word> w, std::size_t i) noexcept {
  w[i / kWordBits] &= ~(Word{1} << (i % kWordBits));
}

inline std::size_t popcount(std::span<const Word> w) noexcept {
  std::size_t n = 0;
  for (Word x : w) n += static_cast<std::size_t>(std::popcount(x));
  return n;
}

inline std::size_t popcount_and(std::span<const Word> a, std::span<const Word> b) noexcept {
  std::size_t n = 0;
  for (std::size_t k = 0; k < a.size(); ++k) n += static_cast<std::size_t>(std::popcount(a[k] & b[k]));
  return n;
}

inline bool intersects(std::span<const Word> a, std::span<const Word> b) noexcept {
  for (std::size_t k = 0; k < a.size(); ++k)
    if (a[k] & b[k]) return true;
  return false;
}

/// Calls f(index) for every set bit in ascending order.
template <typename F>
void for_each_bit(std::span<const Word> w, F&& f) {
  for (std::size_t k = 0; k < w.size(); ++k) {
    Word x = w[k];
    while (x) {
      const auto b = static_cast<std::size_t>(std::countr_zero(x));
      f(k * kWordBits + b);
      x &= x - 1;
    }
  }
}

/// Growable-at-construction bit vector.
class DynamicBitset {
public:
  DynamicBitset() = default;
  explicit DynamicBitset(std::size_t bits) : bits_(bits), words_(words_for(bits), 0) {}

  std::size_t size() const noexcept { return bits_; }
  bool test(std::size_t i) const noexcept { return test_bit(words_, i); }
  void set(std::size_t i) noexcept { set_bit(words_, i); }
  void reset(std::size_t i) noexcept { reset_bit(words_, i); }
  void clear() noexcept { std::fill(words_.begin(), words_.end(), Word{0}); }
  void set_all() noexcept {
    std::fill(words_.begin(), words_.end(), ~Word{0});
    trim();
  }
  std::size_t count() const noexcept { return popcount(words_); }
  bool none() const noexcept {
    for (Word x : words_)
      if (x) return false;
    return true;
  }

  std::span<const Word> words() const noexcept { return words_; }
  std::span<Word> words() noexcept { return words_; }

  friend bool operator==(const DynamicBitset&, const DynamicBitset&) = default;

private:
  void trim() noexcept {
    if (const auto tail = bits_ % kWordBits; tail != 0 && !words_.empty())
      words_.back() &= (Word{1} << tail) - 1;
  }

  std::size_t bits_ = 0;
  std::vector<Word> words_;
};

/// Square bit matrix stored row-major, one padded word row per node.
class BitMatrix {
public:
  BitMatrix() = default;
  explicit BitMatrix(std::size_t n) : n_(n), stride_(words_for(n)), words_(n * stride_, 0) {}

  std::size_t size() const noexcept { return n_; }
  std::size_t stride() const noexcept { return stride_; }

  std::span<const Word> row(std::size_t i) const noexcept {
    return {words_.data() + i * stride_, stride_};
  }
  std::span<Word> row(std::size_t i) noexcept { return {words_.data() + i * stride_, stride_}; }

  bool test(std::size_t i, std::size_t j) const noexcept { return test_bit(row(i), j); }
  void set(std::size_t i, std::size_t j) noexcept { set_bit(row(i), j); }
  std::size_t count() const noexcept { return popcount(words_); }

  friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

private:
  std::size_t n_ = 0;
  std::size_t stride_ = 0;
  std::vector<Word> words_;
};

}  // namespace misport

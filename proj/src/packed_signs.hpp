#pragma once

// Bit-packed sign vectors: bit i is set when entry i is -1, so the Hadamard
// product of two vectors is the XOR of their masks and a vector sums to zero
// exactly when half of its bits are set.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "phasecycle/hadamard.hpp"

namespace phasecycle::detail {

class PackedSigns {
 public:
  PackedSigns() = default;
  explicit PackedSigns(std::size_t dimension)
      : dimension_(dimension), words_((dimension + 63) / 64, 0) {}

  static PackedSigns from(std::span<const std::int8_t> v) {
    PackedSigns p(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] < 0) p.words_[i / 64] |= std::uint64_t{1} << (i % 64);
    return p;
  }

  std::size_t dimension() const noexcept { return dimension_; }
  std::span<const std::uint64_t> words() const noexcept { return words_; }

  PackedSigns& operator^=(const PackedSigns& o) {
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= o.words_[w];
    return *this;
  }

  std::size_t negatives() const noexcept {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  // Sum of the +1/-1 entries.
  std::int64_t sum() const noexcept {
    return static_cast<std::int64_t>(dimension_) - 2 * static_cast<std::int64_t>(negatives());
  }

  bool test(std::size_t i) const noexcept { return (words_[i / 64] >> (i % 64)) & 1u; }
  void flip(std::size_t i) noexcept { words_[i / 64] ^= std::uint64_t{1} << (i % 64); }

  // Index of the lowest set bit, or dimension() when none is set.
  std::size_t lowest_set() const noexcept {
    for (std::size_t w = 0; w < words_.size(); ++w)
      if (words_[w] != 0) return w * 64 + static_cast<std::size_t>(std::countr_zero(words_[w]));
    return dimension_;
  }

  bool is_identity() const noexcept {
    for (auto w : words_)
      if (w != 0) return false;
    return true;
  }

  bool operator==(const PackedSigns&) const = default;

 private:
  std::size_t dimension_ = 0;
  std::vector<std::uint64_t> words_;
};

inline std::vector<PackedSigns> pack_all(const std::vector<SignVector>& cols) {
  std::vector<PackedSigns> out;
  out.reserve(cols.size());
  for (const auto& c : cols) out.push_back(PackedSigns::from(c));
  return out;
}

}  // namespace phasecycle::detail

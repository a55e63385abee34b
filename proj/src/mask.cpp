#include "cosz/mask.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace cosz {

CoeffMask CoeffMask::zeros(int m) {
  if (m < 0) throw std::invalid_argument("mask degree must be nonnegative");
  CoeffMask mask;
  mask.size_ = m + 1;
  mask.words_.assign(static_cast<std::size_t>(m / 64 + 1), 0);
  mask.finish();
  return mask;
}

CoeffMask CoeffMask::from_bits(std::span<const std::uint8_t> bits) {
  CoeffMask mask;
  mask.size_ = static_cast<int>(bits.size());
  mask.words_.assign((bits.size() + 63) / 64, 0);
  for (std::size_t k = 0; k < bits.size(); ++k) {
    if (bits[k] > 1) throw std::invalid_argument("mask bits must be 0 or 1");
    if (bits[k]) mask.words_[k / 64] |= std::uint64_t{1} << (k % 64);
  }
  mask.finish();
  return mask;
}

CoeffMask CoeffMask::from_string(std::string_view bits) {
  std::vector<std::uint8_t> v;
  v.reserve(bits.size());
  for (char c : bits) {
    if (c != '0' && c != '1') {
      throw std::invalid_argument("mask string may only contain '0' and '1'");
    }
    v.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return from_bits(v);
}

CoeffMask CoeffMask::from_indices(std::span<const int> indices) {
  int top = -1;
  for (int k : indices) {
    if (k < 0) throw std::invalid_argument("mask index must be nonnegative");
    top = std::max(top, k);
  }
  if (top < 0) return CoeffMask{};
  CoeffMask mask;
  mask.size_ = top + 1;
  mask.words_.assign(static_cast<std::size_t>(top / 64 + 1), 0);
  for (int k : indices) mask.words_[k / 64] |= std::uint64_t{1} << (k % 64);
  mask.finish();
  return mask;
}

CoeffMask CoeffMask::from_words(std::vector<std::uint64_t> words, int size) {
  if (size < 0) throw std::invalid_argument("mask size must be nonnegative");
  CoeffMask mask;
  mask.size_ = size;
  words.resize(static_cast<std::size_t>((size + 63) / 64), 0);
  if (size % 64 != 0) words.back() &= (std::uint64_t{1} << (size % 64)) - 1;
  mask.words_ = std::move(words);
  mask.finish();
  return mask;
}

bool CoeffMask::bit(int k) const {
  if (k < 0 || k >= size_) return false;
  return (words_[k / 64] >> (k % 64)) & 1u;
}

std::string CoeffMask::to_string() const {
  std::string s(static_cast<std::size_t>(size_), '0');
  for (int k : indices_) s[static_cast<std::size_t>(k)] = '1';
  return s;
}

void CoeffMask::finish() {
  indices_.clear();
  for (std::size_t w = 0; w < words_.size(); ++w) {
    std::uint64_t word = words_[w];
    while (word) {
      indices_.push_back(static_cast<int>(w * 64) + std::countr_zero(word));
      word &= word - 1;
    }
  }
}

}  // namespace cosz

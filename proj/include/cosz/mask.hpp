#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cosz {

/// Bernoulli coefficient vector eps_0..eps_m of a {0,1}-cosine polynomial
///   g(x) = sum_k eps_k cos(kx).
///
/// An empty mask (no bits at all) represents g == 0. Immutable after
/// construction.
class CoeffMask {
 public:
  CoeffMask() = default;

  /// All-zero mask of degree bound m.
  static CoeffMask zeros(int m);
  static CoeffMask from_bits(std::span<const std::uint8_t> bits);
  /// Parses a string of '0'/'1' characters, eps_0 first.
  static CoeffMask from_string(std::string_view bits);
  /// Mask with exactly the given indices set; degree bound is max index.
  static CoeffMask from_indices(std::span<const int> indices);
  /// Takes ownership of packed 64-bit words (bit k of word k/64 is eps_k).
  /// Bits above `size` are cleared.
  static CoeffMask from_words(std::vector<std::uint64_t> words, int size);

  /// Number of coefficients m + 1 (0 for the empty mask).
  int size() const { return size_; }
  /// Degree bound m; 0 for the empty mask.
  int degree() const { return size_ > 0 ? size_ - 1 : 0; }
  bool empty() const { return size_ == 0; }
  /// Number of set bits t.
  int ones() const { return static_cast<int>(indices_.size()); }

  bool bit(int k) const;
  std::span<const std::uint64_t> words() const { return words_; }
  /// Indices k with eps_k = 1, increasing.
  std::span<const int> indices() const { return indices_; }

  std::string to_string() const;

  bool operator==(const CoeffMask& other) const {
    return size_ == other.size_ && words_ == other.words_;
  }

 private:
  void finish();

  int size_ = 0;
  std::vector<std::uint64_t> words_;
  std::vector<int> indices_;
};

}  // namespace cosz

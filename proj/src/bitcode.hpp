#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace thash {

// Relaxed real-valued code u; quantized to a BitCode by sign_quantize.
using RealCode = std::vector<double>;

inline constexpr uint32_t kMaxCodeBits = 4096;

inline std::size_t words_for_bits(uint32_t bits) { return (bits + 63) / 64; }

// An L-bit code over {+1,-1} packed into 64-bit words. Bit k of the word
// concatenation is set iff dimension k is +1. Bits at positions >= L are
// kept zero, so word-wise XOR/popcount needs no masking.
class BitCode {
 public:
  BitCode() = default;

  // Takes ownership of pre-packed words; padding bits must already be zero.
  BitCode(uint32_t length, std::vector<uint64_t> words);

  static BitCode zeros(uint32_t length);

  uint32_t length() const { return length_; }
  std::span<const uint64_t> words() const { return words_; }

  bool bit(uint32_t k) const { return (words_[k >> 6] >> (k & 63)) & 1u; }
  void set_bit(uint32_t k) { words_[k >> 6] |= uint64_t{1} << (k & 63); }

  friend bool operator==(const BitCode&, const BitCode&) = default;

 private:
  uint32_t length_ = 0;
  std::vector<uint64_t> words_;
};

// signs entries must be +1 or -1
BitCode pack(std::span<const int> signs);

// exact inverse of pack
std::vector<int> unpack(const BitCode& code);

// b = sgn(u), with sgn(x) = +1 iff x > 0 and -1 otherwise (zero maps to -1)
BitCode sign_quantize(const RealCode& u);

// number of differing bits; word-wise XOR + popcount
uint32_t hamming(const BitCode& a, const BitCode& b);

// half the inner product of the two sign vectors, derived from the Hamming
// distance via theta = (L - 2*dist) / 2; integer-exact
double theta_binary(const BitCode& a, const BitCode& b);

}  // namespace thash

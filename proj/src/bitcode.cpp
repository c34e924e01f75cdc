#include "bitcode.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "error.hpp"

namespace thash {

namespace {

void check_length(uint32_t length) {
  if (length < 1 || length > kMaxCodeBits) {
    throw_error(ErrorKind::invalid_argument,
                "code length " + std::to_string(length) + " outside [1, " +
                    std::to_string(kMaxCodeBits) + "]");
  }
}

void check_same_length(const BitCode& a, const BitCode& b) {
  if (a.length() != b.length()) {
    throw_error(ErrorKind::dimension_mismatch,
                "code length mismatch: " + std::to_string(a.length()) +
                    " vs " + std::to_string(b.length()));
  }
}

}  // namespace

BitCode BitCode::zeros(uint32_t length) {
  check_length(length);
  BitCode code;
  code.length_ = length;
  code.words_.assign(words_for_bits(length), 0);
  return code;
}

BitCode::BitCode(uint32_t length, std::vector<uint64_t> words) {
  check_length(length);
  if (words.size() != words_for_bits(length)) {
    throw_error(ErrorKind::invalid_argument,
                "word count " + std::to_string(words.size()) +
                    " does not match length " + std::to_string(length));
  }
  const uint32_t tail = length & 63;
  if (tail != 0 && (words.back() >> tail) != 0) {
    throw_error(ErrorKind::data, "padding bits beyond code length are set");
  }
  length_ = length;
  words_ = std::move(words);
}

BitCode pack(std::span<const int> signs) {
  if (signs.empty()) {
    throw_error(ErrorKind::invalid_argument, "pack: empty sign sequence");
  }
  BitCode code = BitCode::zeros(static_cast<uint32_t>(signs.size()));
  for (std::size_t k = 0; k < signs.size(); ++k) {
    if (signs[k] == 1) {
      code.set_bit(static_cast<uint32_t>(k));
    } else if (signs[k] != -1) {
      throw_error(ErrorKind::invalid_argument,
                  "pack: entry " + std::to_string(k) + " is " +
                      std::to_string(signs[k]) + ", expected +1 or -1");
    }
  }
  return code;
}

std::vector<int> unpack(const BitCode& code) {
  std::vector<int> signs(code.length());
  for (uint32_t k = 0; k < code.length(); ++k) {
    signs[k] = code.bit(k) ? 1 : -1;
  }
  return signs;
}

BitCode sign_quantize(const RealCode& u) {
  if (u.empty()) {
    throw_error(ErrorKind::invalid_argument, "sign_quantize: empty code");
  }
  BitCode code = BitCode::zeros(static_cast<uint32_t>(u.size()));
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (!std::isfinite(u[k])) {
      throw_error(ErrorKind::invalid_argument,
                  "sign_quantize: non-finite entry at dimension " +
                      std::to_string(k));
    }
    if (u[k] > 0.0) {
      code.set_bit(static_cast<uint32_t>(k));
    }
  }
  return code;
}

uint32_t hamming(const BitCode& a, const BitCode& b) {
  check_same_length(a, b);
  const auto wa = a.words();
  const auto wb = b.words();
  uint32_t dist = 0;
  for (std::size_t i = 0; i < wa.size(); ++i) {
    dist += static_cast<uint32_t>(std::popcount(wa[i] ^ wb[i]));
  }
  return dist;
}

double theta_binary(const BitCode& a, const BitCode& b) {
  const uint32_t dist = hamming(a, b);
  return (static_cast<double>(a.length()) - 2.0 * dist) * 0.5;
}

}  // namespace thash

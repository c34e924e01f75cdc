#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bitcode.hpp"
#include "matrix.hpp"

namespace thash {

enum class EncoderArch : uint8_t { linear = 0, mlp1 = 1 };

// Trainable feature -> relaxed-code map. linear: u = W1 x + b1.
// mlp1: u = W2 tanh(W1 x + b1) + b2. The output layer has a bias and no
// activation; quantization happens in encode().
struct EncoderParams {
  EncoderArch arch = EncoderArch::linear;
  uint32_t input_dim = 0;
  uint32_t hidden_dim = 0;  // 0 for linear
  uint32_t code_length = 0;
  Matrix w1;                // linear: L x D, mlp1: H x D
  std::vector<double> b1;   // linear: L,     mlp1: H
  Matrix w2;                // mlp1: L x H, empty otherwise
  std::vector<double> b2;   // mlp1: L, empty otherwise

  friend bool operator==(const EncoderParams&, const EncoderParams&) = default;
};

struct EncoderGrads {
  Matrix w1;
  std::vector<double> b1;
  Matrix w2;
  std::vector<double> b2;
};

// Weights i.i.d. Gaussian(0, 0.01^2), biases zero; deterministic per seed.
EncoderParams init_encoder(EncoderArch arch, uint32_t input_dim,
                           uint32_t hidden_dim, uint32_t code_length,
                           uint64_t seed);

RealCode forward(const EncoderParams& params, std::span<const double> x);

EncoderGrads zero_grads(const EncoderParams& params);

// Adds d(loss)/d(params) for one input to acc, given upstream grad_u.
void backward_accumulate(const EncoderParams& params, std::span<const double> x,
                         const RealCode& grad_u, EncoderGrads& acc);

EncoderGrads backward(const EncoderParams& params, std::span<const double> x,
                      const RealCode& grad_u);

// params -= scale * grads
void apply_step(EncoderParams& params, const EncoderGrads& grads, double scale);

// sign_quantize(forward(params, x))
BitCode encode(const EncoderParams& params, std::span<const double> x);

}  // namespace thash

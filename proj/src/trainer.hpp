#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "encoder.hpp"
#include "loss.hpp"
#include "matrix.hpp"
#include "sampler.hpp"

namespace thash {

struct TrainConfig {
  uint32_t epochs = 100;
  uint32_t triplets_per_epoch = 0;  // required; no default
  uint32_t batch_size = 128;
  double learning_rate = 0.01;
  double lr_decay_factor = 0.1;  // in (0, 1]
  uint32_t lr_decay_every = 40;  // epochs
  double alpha = 0.0;
  double lambda = 100.0;
  uint64_t seed = 0;
  QuantSum quant_sum = QuantSum::referenced;
};

// conventional margin default: half the code length
inline double default_alpha(uint32_t code_length) {
  return 0.5 * static_cast<double>(code_length);
}

struct EpochStats {
  double nll_mean = 0.0;   // mean per triplet
  double qerr_mean = 0.0;  // mean per referenced image occurrence
  double lr = 0.0;
  double seconds = 0.0;
  double slack_mean = 0.0;  // mean of (1 - sigma(x_m)) over the epoch
};

struct TrainReport {
  std::vector<EpochStats> epochs;
};

using EpochCallback =
    std::function<void(uint32_t epoch, const EncoderParams&, const EpochStats&)>;

// Minibatch SGD on the encoder parameters. Each epoch resamples
// triplets_per_epoch triplets with seed cfg.seed + epoch; each step forwards
// the batch's unique images, accumulates code gradients, backpropagates and
// applies params -= lr * grad / (triplets in batch). Deterministic for a
// fixed seed. Throws ErrorKind::divergence if the loss goes non-finite.
std::pair<EncoderParams, TrainReport> train(const Matrix& features,
                                            const LabelStore& store,
                                            const TrainConfig& cfg,
                                            const EncoderParams& init,
                                            const EpochCallback& on_epoch = {});

// Both loss components at the given parameters, without updating anything.
// total_loss == nll + lambda * quant_error.
struct LossProbe {
  double nll = 0.0;
  double quant_error = 0.0;
};

LossProbe loss_probe(const Matrix& features, std::span<const Triplet> triplets,
                     const EncoderParams& params, const LossConfig& cfg);

}  // namespace thash

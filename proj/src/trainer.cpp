#include "trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "error.hpp"

namespace thash {

namespace {

void check_config(const TrainConfig& cfg) {
  if (cfg.epochs < 1) {
    throw_error(ErrorKind::invalid_argument, "epochs must be >= 1");
  }
  if (cfg.triplets_per_epoch < 1) {
    throw_error(ErrorKind::invalid_argument,
                "triplets_per_epoch must be >= 1");
  }
  if (cfg.batch_size < 1) {
    throw_error(ErrorKind::invalid_argument, "batch_size must be >= 1");
  }
  if (!std::isfinite(cfg.learning_rate) || cfg.learning_rate < 0.0) {
    throw_error(ErrorKind::invalid_argument,
                "learning_rate must be finite and >= 0");
  }
  if (!(cfg.lr_decay_factor > 0.0) || cfg.lr_decay_factor > 1.0) {
    throw_error(ErrorKind::invalid_argument,
                "lr_decay_factor must be in (0, 1]");
  }
  if (cfg.lr_decay_every < 1) {
    throw_error(ErrorKind::invalid_argument, "lr_decay_every must be >= 1");
  }
  if (!std::isfinite(cfg.alpha) || cfg.alpha < 0.0) {
    throw_error(ErrorKind::invalid_argument, "alpha must be finite and >= 0");
  }
  if (!std::isfinite(cfg.lambda) || cfg.lambda < 0.0) {
    throw_error(ErrorKind::invalid_argument, "lambda must be finite and >= 0");
  }
}

std::vector<uint32_t> unique_images(std::span<const Triplet> batch) {
  std::vector<uint32_t> images;
  images.reserve(batch.size() * 3);
  for (const Triplet& t : batch) {
    images.push_back(t.query);
    images.push_back(t.positive);
    images.push_back(t.negative);
  }
  std::sort(images.begin(), images.end());
  images.erase(std::unique(images.begin(), images.end()), images.end());
  return images;
}

}  // namespace

std::pair<EncoderParams, TrainReport> train(const Matrix& features,
                                            const LabelStore& store,
                                            const TrainConfig& cfg,
                                            const EncoderParams& init,
                                            const EpochCallback& on_epoch) {
  check_config(cfg);
  if (features.rows != store.size()) {
    throw_error(ErrorKind::dimension_mismatch,
                "feature rows (" + std::to_string(features.rows) +
                    ") and label entries (" + std::to_string(store.size()) +
                    ") differ");
  }
  if (features.cols != init.input_dim) {
    throw_error(ErrorKind::dimension_mismatch,
                "feature dim " + std::to_string(features.cols) +
                    " does not match encoder input_dim " +
                    std::to_string(init.input_dim));
  }

  const TripletSampler sampler(store);
  const LossConfig loss_cfg{cfg.alpha, cfg.lambda, cfg.quant_sum};

  EncoderParams params = init;
  TrainReport report;
  report.epochs.reserve(cfg.epochs);
  double lr = cfg.learning_rate;

  std::vector<uint32_t> local_of(store.size());
  for (uint32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<Triplet> triplets =
        sampler.sample(cfg.triplets_per_epoch, cfg.seed + epoch);

    double nll_sum = 0.0;
    double qerr_sum = 0.0;
    double slack_sum = 0.0;
    std::size_t qerr_images = 0;

    uint32_t step = 0;
    for (std::size_t begin = 0; begin < triplets.size();
         begin += cfg.batch_size, ++step) {
      const std::size_t end =
          std::min(begin + cfg.batch_size, triplets.size());
      const std::span<const Triplet> batch{triplets.data() + begin,
                                           end - begin};
      const std::vector<uint32_t> images = unique_images(batch);
      for (std::size_t i = 0; i < images.size(); ++i) {
        local_of[images[i]] = static_cast<uint32_t>(i);
      }
      std::vector<Triplet> local(batch.begin(), batch.end());
      for (Triplet& t : local) {
        t.query = local_of[t.query];
        t.positive = local_of[t.positive];
        t.negative = local_of[t.negative];
      }
      std::vector<RealCode> codes(images.size());
      for (std::size_t i = 0; i < images.size(); ++i) {
        codes[i] = forward(params, features.row(images[i]));
      }

      const LossComponents comp = loss_components(local, codes, loss_cfg);
      if (!std::isfinite(comp.nll) || !std::isfinite(comp.quant_error)) {
        throw_error(ErrorKind::divergence,
                    "loss diverged at epoch " + std::to_string(epoch) +
                        ", step " + std::to_string(step));
      }
      nll_sum += comp.nll;
      qerr_sum += comp.quant_error;
      slack_sum += comp.slack_sum;
      qerr_images += images.size();

      const std::vector<RealCode> grad_u = grad_codes(local, codes, loss_cfg);
      EncoderGrads grads = zero_grads(params);
      for (std::size_t i = 0; i < images.size(); ++i) {
        backward_accumulate(params, features.row(images[i]), grad_u[i], grads);
      }
      apply_step(params, grads, lr / static_cast<double>(batch.size()));
    }

    const auto t1 = std::chrono::steady_clock::now();
    EpochStats stats;
    stats.nll_mean = nll_sum / static_cast<double>(triplets.size());
    stats.qerr_mean = qerr_sum / static_cast<double>(qerr_images);
    stats.slack_mean = slack_sum / static_cast<double>(triplets.size());
    stats.lr = lr;
    stats.seconds = std::chrono::duration<double>(t1 - t0).count();
    report.epochs.push_back(stats);
    if (on_epoch) {
      on_epoch(epoch, params, stats);
    }
    if ((epoch + 1) % cfg.lr_decay_every == 0) {
      lr *= cfg.lr_decay_factor;
    }
  }
  return {std::move(params), std::move(report)};
}

LossProbe loss_probe(const Matrix& features, std::span<const Triplet> triplets,
                     const EncoderParams& params, const LossConfig& cfg) {
  if (features.cols != params.input_dim) {
    throw_error(ErrorKind::dimension_mismatch,
                "feature dim " + std::to_string(features.cols) +
                    " does not match encoder input_dim " +
                    std::to_string(params.input_dim));
  }
  std::vector<RealCode> codes(features.rows);
  for (std::size_t i = 0; i < features.rows; ++i) {
    codes[i] = forward(params, features.row(i));
  }
  const LossComponents comp = loss_components(triplets, codes, cfg);
  return {comp.nll, comp.quant_error};
}

}  // namespace thash

#include "loss.hpp"

#include <cmath>
#include <string>

#include "error.hpp"

namespace thash {

namespace {

void check_config(const LossConfig& cfg) {
  if (!std::isfinite(cfg.alpha) || cfg.alpha < 0.0) {
    throw_error(ErrorKind::invalid_argument, "alpha must be finite and >= 0");
  }
  if (!std::isfinite(cfg.lambda) || cfg.lambda < 0.0) {
    throw_error(ErrorKind::invalid_argument, "lambda must be finite and >= 0");
  }
}

void check_instance(std::span<const Triplet> triplets,
                    std::span<const RealCode> codes) {
  if (codes.empty()) {
    throw_error(ErrorKind::invalid_argument, "no codes given");
  }
  const std::size_t dim = codes.front().size();
  for (std::size_t i = 0; i < codes.size(); ++i) {
    if (codes[i].size() != dim) {
      throw_error(ErrorKind::dimension_mismatch,
                  "code " + std::to_string(i) + " has length " +
                      std::to_string(codes[i].size()) + ", expected " +
                      std::to_string(dim));
    }
  }
  const std::size_t n = codes.size();
  for (std::size_t m = 0; m < triplets.size(); ++m) {
    const Triplet& t = triplets[m];
    if (t.query >= n || t.positive >= n || t.negative >= n) {
      throw_error(ErrorKind::invalid_argument,
                  "triplet " + std::to_string(m) + " references an image out "
                  "of range (n=" + std::to_string(n) + ")");
    }
  }
}

double check_finite_dim(const RealCode& a, const RealCode& b) {
  if (a.size() != b.size()) {
    throw_error(ErrorKind::dimension_mismatch,
                "code length mismatch: " + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()));
  }
  return 0.0;
}

double margin_argument(std::span<const RealCode> codes, const Triplet& t,
                       double alpha) {
  return theta_relaxed(codes[t.query], codes[t.positive]) -
         theta_relaxed(codes[t.query], codes[t.negative]) - alpha;
}

// ||sgn(u) - u||^2 with the sgn(0) = -1 convention
double quantization_error(const RealCode& u) {
  double sum = 0.0;
  for (double v : u) {
    const double b = v > 0.0 ? 1.0 : -1.0;
    const double d = b - v;
    sum += d * d;
  }
  return sum;
}

std::vector<char> referenced_mask(std::span<const Triplet> triplets,
                                  std::size_t n) {
  std::vector<char> mask(n, 0);
  for (const Triplet& t : triplets) {
    mask[t.query] = 1;
    mask[t.positive] = 1;
    mask[t.negative] = 1;
  }
  return mask;
}

}  // namespace

double softplus(double x) {
  if (x > 0.0) {
    return x + std::log1p(std::exp(-x));
  }
  return std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double theta_relaxed(const RealCode& a, const RealCode& b) {
  check_finite_dim(a, b);
  double dot = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    dot += a[k] * b[k];
  }
  return 0.5 * dot;
}

double triplet_log_prob(const RealCode& q, const RealCode& p,
                        const RealCode& n, double alpha) {
  for (const RealCode* code : {&q, &p, &n}) {
    for (double v : *code) {
      if (!std::isfinite(v)) {
        throw_error(ErrorKind::invalid_argument,
                    "triplet_log_prob: non-finite code entry");
      }
    }
  }
  if (!std::isfinite(alpha)) {
    throw_error(ErrorKind::invalid_argument,
                "triplet_log_prob: alpha must be finite");
  }
  const double x = theta_relaxed(q, p) - theta_relaxed(q, n) - alpha;
  return -softplus(-x);
}

LossComponents loss_components(std::span<const Triplet> triplets,
                               std::span<const RealCode> codes,
                               const LossConfig& cfg) {
  check_config(cfg);
  check_instance(triplets, codes);
  LossComponents out;
  for (const Triplet& t : triplets) {
    const double x = margin_argument(codes, t, cfg.alpha);
    out.nll += softplus(-x);
    out.slack_sum += 1.0 - sigmoid(x);
  }
  if (cfg.quant_sum == QuantSum::full) {
    for (const RealCode& u : codes) {
      out.quant_error += quantization_error(u);
    }
  } else {
    const std::vector<char> mask = referenced_mask(triplets, codes.size());
    for (std::size_t i = 0; i < codes.size(); ++i) {
      if (mask[i]) {
        out.quant_error += quantization_error(codes[i]);
      }
    }
  }
  return out;
}

double total_loss(std::span<const Triplet> triplets,
                  std::span<const RealCode> codes, const LossConfig& cfg) {
  const LossComponents c = loss_components(triplets, codes, cfg);
  return c.nll + cfg.lambda * c.quant_error;
}

std::vector<RealCode> grad_codes(std::span<const Triplet> triplets,
                                 std::span<const RealCode> codes,
                                 const LossConfig& cfg) {
  check_config(cfg);
  check_instance(triplets, codes);
  const std::size_t dim = codes.front().size();
  std::vector<RealCode> grad(codes.size(), RealCode(dim, 0.0));

  for (const Triplet& t : triplets) {
    const double x = margin_argument(codes, t, cfg.alpha);
    const double s = 1.0 - sigmoid(x);
    const RealCode& uq = codes[t.query];
    const RealCode& up = codes[t.positive];
    const RealCode& un = codes[t.negative];
    RealCode& gq = grad[t.query];
    RealCode& gp = grad[t.positive];
    RealCode& gn = grad[t.negative];
    for (std::size_t k = 0; k < dim; ++k) {
      gq[k] -= 0.5 * s * (up[k] - un[k]);
      gp[k] -= 0.5 * s * uq[k];
      gn[k] += 0.5 * s * uq[k];
    }
  }

  if (cfg.lambda != 0.0) {
    const std::vector<char> mask =
        cfg.quant_sum == QuantSum::full
            ? std::vector<char>(codes.size(), 1)
            : referenced_mask(triplets, codes.size());
    for (std::size_t i = 0; i < codes.size(); ++i) {
      if (!mask[i]) continue;
      const RealCode& u = codes[i];
      RealCode& g = grad[i];
      for (std::size_t k = 0; k < dim; ++k) {
        const double b = u[k] > 0.0 ? 1.0 : -1.0;
        g[k] += 2.0 * cfg.lambda * (u[k] - b);
      }
    }
  }
  return grad;
}

}  // namespace thash

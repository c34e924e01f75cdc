#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bitcode.hpp"

namespace thash {

// (q, p, n): query q is more similar to positive p than to negative n.
struct Triplet {
  uint32_t query = 0;
  uint32_t positive = 0;
  uint32_t negative = 0;

  friend bool operator==(const Triplet&, const Triplet&) = default;
};

// Domain of the quantization-error sum. `referenced` restricts it to images
// referenced by at least one triplet, which is what the per-image gradient
// term acts on during minibatch training; `full` sums over every code.
enum class QuantSum { referenced, full };

struct LossConfig {
  double alpha = 0.0;   // margin, in theta units
  double lambda = 0.0;  // quantization-error weight
  QuantSum quant_sum = QuantSum::referenced;
};

// log(1 + e^x), two-branch form; finite for any finite x
double softplus(double x);
double sigmoid(double x);

// half the inner product of two relaxed codes
double theta_relaxed(const RealCode& a, const RealCode& b);

// log sigma(theta_qp - theta_qn - alpha), computed as -softplus(-x);
// always <= 0 and never overflows
double triplet_log_prob(const RealCode& q, const RealCode& p,
                        const RealCode& n, double alpha);

struct LossComponents {
  double nll = 0.0;          // sum over triplets of -log sigma(x_m)
  double quant_error = 0.0;  // sum over images of ||sgn(u_n) - u_n||^2
  double slack_sum = 0.0;    // sum over triplets of (1 - sigma(x_m))
};

LossComponents loss_components(std::span<const Triplet> triplets,
                               std::span<const RealCode> codes,
                               const LossConfig& cfg);

// nll + lambda * quant_error
double total_loss(std::span<const Triplet> triplets,
                  std::span<const RealCode> codes, const LossConfig& cfg);

// d(total_loss)/d(u_n) for every code, with b_n = sgn(u_n) held constant.
// Per triplet with slack s = 1 - sigma(x_m):
//   u_q += -s/2 * (u_p - u_n),  u_p += -s/2 * u_q,  u_n += +s/2 * u_q
// plus 2*lambda*(u_n - b_n) once per image in the quantization domain.
std::vector<RealCode> grad_codes(std::span<const Triplet> triplets,
                                 std::span<const RealCode> codes,
                                 const LossConfig& cfg);

}  // namespace thash

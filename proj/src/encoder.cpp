#include "encoder.hpp"

#include <cmath>
#include <string>

#include "error.hpp"
#include "rng.hpp"

namespace thash {

namespace {

constexpr double kInitStddev = 0.01;

void check_dims(EncoderArch arch, uint32_t input_dim, uint32_t hidden_dim,
                uint32_t code_length) {
  if (input_dim < 1) {
    throw_error(ErrorKind::invalid_argument, "input_dim must be >= 1");
  }
  if (code_length < 1 || code_length > kMaxCodeBits) {
    throw_error(ErrorKind::invalid_argument,
                "code_length " + std::to_string(code_length) +
                    " outside [1, " + std::to_string(kMaxCodeBits) + "]");
  }
  if (arch == EncoderArch::mlp1 && hidden_dim < 1) {
    throw_error(ErrorKind::invalid_argument,
                "hidden_dim must be >= 1 for mlp1");
  }
}

void check_input(const EncoderParams& params, std::span<const double> x) {
  if (x.size() != params.input_dim) {
    throw_error(ErrorKind::dimension_mismatch,
                "input length " + std::to_string(x.size()) + ", expected " +
                    std::to_string(params.input_dim));
  }
  for (double v : x) {
    if (!std::isfinite(v)) {
      throw_error(ErrorKind::invalid_argument, "non-finite feature entry");
    }
  }
}

void fill_gaussian(Matrix& m, Rng& rng) {
  for (double& v : m.data) {
    v = kInitStddev * rng.normal();
  }
}

// pre-activation of the hidden layer for mlp1
std::vector<double> hidden_activation(const EncoderParams& p,
                                      std::span<const double> x) {
  std::vector<double> h(p.hidden_dim);
  for (uint32_t j = 0; j < p.hidden_dim; ++j) {
    double acc = p.b1[j];
    const auto row = p.w1.row(j);
    for (uint32_t d = 0; d < p.input_dim; ++d) {
      acc += row[d] * x[d];
    }
    h[j] = std::tanh(acc);
  }
  return h;
}

}  // namespace

EncoderParams init_encoder(EncoderArch arch, uint32_t input_dim,
                           uint32_t hidden_dim, uint32_t code_length,
                           uint64_t seed) {
  check_dims(arch, input_dim, hidden_dim, code_length);
  EncoderParams p;
  p.arch = arch;
  p.input_dim = input_dim;
  p.code_length = code_length;
  Rng rng(seed);
  if (arch == EncoderArch::linear) {
    p.hidden_dim = 0;
    p.w1 = Matrix(code_length, input_dim);
    p.b1.assign(code_length, 0.0);
    fill_gaussian(p.w1, rng);
  } else {
    p.hidden_dim = hidden_dim;
    p.w1 = Matrix(hidden_dim, input_dim);
    p.b1.assign(hidden_dim, 0.0);
    p.w2 = Matrix(code_length, hidden_dim);
    p.b2.assign(code_length, 0.0);
    fill_gaussian(p.w1, rng);
    fill_gaussian(p.w2, rng);
  }
  return p;
}

RealCode forward(const EncoderParams& params, std::span<const double> x) {
  check_input(params, x);
  RealCode u(params.code_length);
  if (params.arch == EncoderArch::linear) {
    for (uint32_t k = 0; k < params.code_length; ++k) {
      double acc = params.b1[k];
      const auto row = params.w1.row(k);
      for (uint32_t d = 0; d < params.input_dim; ++d) {
        acc += row[d] * x[d];
      }
      u[k] = acc;
    }
    return u;
  }
  const std::vector<double> h = hidden_activation(params, x);
  for (uint32_t k = 0; k < params.code_length; ++k) {
    double acc = params.b2[k];
    const auto row = params.w2.row(k);
    for (uint32_t j = 0; j < params.hidden_dim; ++j) {
      acc += row[j] * h[j];
    }
    u[k] = acc;
  }
  return u;
}

EncoderGrads zero_grads(const EncoderParams& params) {
  EncoderGrads g;
  g.w1 = Matrix(params.w1.rows, params.w1.cols);
  g.b1.assign(params.b1.size(), 0.0);
  g.w2 = Matrix(params.w2.rows, params.w2.cols);
  g.b2.assign(params.b2.size(), 0.0);
  return g;
}

void backward_accumulate(const EncoderParams& params, std::span<const double> x,
                         const RealCode& grad_u, EncoderGrads& acc) {
  check_input(params, x);
  if (grad_u.size() != params.code_length) {
    throw_error(ErrorKind::dimension_mismatch,
                "grad_u length " + std::to_string(grad_u.size()) +
                    ", expected " + std::to_string(params.code_length));
  }
  if (params.arch == EncoderArch::linear) {
    for (uint32_t k = 0; k < params.code_length; ++k) {
      const double g = grad_u[k];
      acc.b1[k] += g;
      auto row = acc.w1.row(k);
      for (uint32_t d = 0; d < params.input_dim; ++d) {
        row[d] += g * x[d];
      }
    }
    return;
  }
  const std::vector<double> h = hidden_activation(params, x);
  std::vector<double> grad_h(params.hidden_dim, 0.0);
  for (uint32_t k = 0; k < params.code_length; ++k) {
    const double g = grad_u[k];
    acc.b2[k] += g;
    auto row = acc.w2.row(k);
    const auto w2row = params.w2.row(k);
    for (uint32_t j = 0; j < params.hidden_dim; ++j) {
      row[j] += g * h[j];
      grad_h[j] += g * w2row[j];
    }
  }
  for (uint32_t j = 0; j < params.hidden_dim; ++j) {
    const double gpre = grad_h[j] * (1.0 - h[j] * h[j]);
    acc.b1[j] += gpre;
    auto row = acc.w1.row(j);
    for (uint32_t d = 0; d < params.input_dim; ++d) {
      row[d] += gpre * x[d];
    }
  }
}

EncoderGrads backward(const EncoderParams& params, std::span<const double> x,
                      const RealCode& grad_u) {
  EncoderGrads g = zero_grads(params);
  backward_accumulate(params, x, grad_u, g);
  return g;
}

void apply_step(EncoderParams& params, const EncoderGrads& grads,
                double scale) {
  for (std::size_t i = 0; i < params.w1.data.size(); ++i) {
    params.w1.data[i] -= scale * grads.w1.data[i];
  }
  for (std::size_t i = 0; i < params.b1.size(); ++i) {
    params.b1[i] -= scale * grads.b1[i];
  }
  for (std::size_t i = 0; i < params.w2.data.size(); ++i) {
    params.w2.data[i] -= scale * grads.w2.data[i];
  }
  for (std::size_t i = 0; i < params.b2.size(); ++i) {
    params.b2[i] -= scale * grads.b2[i];
  }
}

BitCode encode(const EncoderParams& params, std::span<const double> x) {
  return sign_quantize(forward(params, x));
}

}  // namespace thash

#include "chaoswave/layers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "chaoswave/errors.hpp"

namespace chaoswave {

namespace {

struct Dims4 {
  std::size_t n, c, h, w;
};

Dims4 dims4(const Tensor& t, const char* who) {
  if (t.rank() != 4) throw InvalidInput(std::string(who) + ": expected an N x C x H x W tensor");
  return {t.dim(0), t.dim(1), t.dim(2), t.dim(3)};
}

// Valid output range [lo, hi) for a tap offset d in {-1, 0, 1} over extent n.
inline std::size_t range_lo(int d) { return d < 0 ? 1 : 0; }
inline std::size_t range_hi(int d, std::size_t n) { return d > 0 ? n - 1 : n; }

}  // namespace

// ---- convolution ------------------------------------------------------------

Tensor conv2d_forward(const Tensor& input, const Tensor& weights, const Tensor& bias) {
  const auto [n_batch, channels, height, width] = dims4(input, "conv2d_forward");
  if (weights.rank() != 4 || weights.dim(1) != channels || weights.dim(2) != 3 || weights.dim(3) != 3) {
    throw InvalidInput("conv2d_forward: weights must be out x " + std::to_string(channels) + " x 3 x 3, got " +
                       shape_string(weights.shape()));
  }
  const std::size_t out_ch = weights.dim(0);
  if (bias.rank() != 1 || bias.dim(0) != out_ch) throw InvalidInput("conv2d_forward: bias length mismatch");

  Tensor out({n_batch, out_ch, height, width});
  const std::size_t plane = height * width;
  for (std::size_t n = 0; n < n_batch; ++n) {
    for (std::size_t o = 0; o < out_ch; ++o) {
      double* dst = out.data() + (n * out_ch + o) * plane;
      std::fill_n(dst, plane, bias[o]);
      for (std::size_t c = 0; c < channels; ++c) {
        const double* src = input.data() + (n * channels + c) * plane;
        const double* w = weights.data() + (o * channels + c) * 9;
        for (std::size_t y = 0; y < height; ++y) {
          double* orow = dst + y * width;
          for (int dy = -1; dy <= 1; ++dy) {
            if ((dy < 0 && y == 0) || (dy > 0 && y + 1 == height)) continue;
            const double* irow = src + (y + dy) * width;
            for (int dx = -1; dx <= 1; ++dx) {
              const double wv = w[(dy + 1) * 3 + (dx + 1)];
              const std::size_t x0 = range_lo(dx), x1 = range_hi(dx, width);
              const double* in_shift = irow + dx;
              for (std::size_t x = x0; x < x1; ++x) orow[x] += wv * in_shift[x];
            }
          }
        }
      }
    }
  }
  return out;
}

Conv2dGrads conv2d_backward(const Tensor& input, const Tensor& weights, const Tensor& grad_output,
                            bool need_input_grad) {
  const auto [n_batch, channels, height, width] = dims4(input, "conv2d_backward");
  const std::size_t out_ch = weights.dim(0);
  if (grad_output.shape() != Shape{n_batch, out_ch, height, width}) {
    throw InvalidInput("conv2d_backward: grad_output shape mismatch");
  }
  const std::size_t plane = height * width;
  Conv2dGrads g;
  g.weights = Tensor(weights.shape());
  g.bias = Tensor({out_ch});

  for (std::size_t o = 0; o < out_ch; ++o) {
    double bsum = 0.0;
    for (std::size_t n = 0; n < n_batch; ++n) {
      const double* go = grad_output.data() + (n * out_ch + o) * plane;
      for (std::size_t i = 0; i < plane; ++i) bsum += go[i];
    }
    g.bias[o] = bsum;
    for (std::size_t c = 0; c < channels; ++c) {
      double acc[9] = {};
      for (std::size_t n = 0; n < n_batch; ++n) {
        const double* go = grad_output.data() + (n * out_ch + o) * plane;
        const double* src = input.data() + (n * channels + c) * plane;
        for (std::size_t y = 0; y < height; ++y) {
          const double* grow = go + y * width;
          for (int dy = -1; dy <= 1; ++dy) {
            if ((dy < 0 && y == 0) || (dy > 0 && y + 1 == height)) continue;
            const double* irow = src + (y + dy) * width;
            for (int dx = -1; dx <= 1; ++dx) {
              const std::size_t x0 = range_lo(dx), x1 = range_hi(dx, width);
              const double* in_shift = irow + dx;
              double s0 = 0.0, s1 = 0.0;
              std::size_t x = x0;
              for (; x + 1 < x1; x += 2) {
                s0 += grow[x] * in_shift[x];
                s1 += grow[x + 1] * in_shift[x + 1];
              }
              if (x < x1) s0 += grow[x] * in_shift[x];
              acc[(dy + 1) * 3 + (dx + 1)] += s0 + s1;
            }
          }
        }
      }
      std::copy_n(acc, 9, g.weights.data() + (o * channels + c) * 9);
    }
  }

  if (need_input_grad) {
    g.input = Tensor(input.shape());
    for (std::size_t n = 0; n < n_batch; ++n) {
      for (std::size_t c = 0; c < channels; ++c) {
        double* gi = g.input.data() + (n * channels + c) * plane;
        for (std::size_t o = 0; o < out_ch; ++o) {
          const double* go = grad_output.data() + (n * out_ch + o) * plane;
          const double* w = weights.data() + (o * channels + c) * 9;
          for (std::size_t y = 0; y < height; ++y) {
            const double* grow = go + y * width;
            for (int dy = -1; dy <= 1; ++dy) {
              if ((dy < 0 && y == 0) || (dy > 0 && y + 1 == height)) continue;
              double* irow = gi + (y + dy) * width;
              for (int dx = -1; dx <= 1; ++dx) {
                const double wv = w[(dy + 1) * 3 + (dx + 1)];
                const std::size_t x0 = range_lo(dx), x1 = range_hi(dx, width);
                double* in_shift = irow + dx;
                for (std::size_t x = x0; x < x1; ++x) in_shift[x] += wv * grow[x];
              }
            }
          }
        }
      }
    }
  }
  return g;
}

// ---- batch normalization ------------------------------------------------------

Tensor batchnorm_forward(const Tensor& input, const Tensor& gamma, const Tensor& beta, BatchNormState& state,
                         Mode mode, BatchNormCache* cache) {
  const auto [n_batch, channels, height, width] = dims4(input, "batchnorm_forward");
  if (n_batch == 0 || height * width == 0) throw InvalidInput("batchnorm_forward: empty batch");
  if (gamma.size() != channels || beta.size() != channels || state.running_mean.size() != channels ||
      state.running_var.size() != channels) {
    throw InvalidInput("batchnorm_forward: per-channel parameter length mismatch");
  }
  const std::size_t plane = height * width;
  const double count = static_cast<double>(n_batch * plane);
  Tensor out(input.shape());
  if (cache) {
    cache->normalized = Tensor(input.shape());
    cache->inv_std.assign(channels, 0.0);
    cache->mode = mode;
  }
  for (std::size_t c = 0; c < channels; ++c) {
    double mean = 0.0, var = 0.0;
    if (mode == Mode::Train) {
      for (std::size_t n = 0; n < n_batch; ++n) {
        const double* x = input.data() + (n * channels + c) * plane;
        for (std::size_t i = 0; i < plane; ++i) mean += x[i];
      }
      mean /= count;
      for (std::size_t n = 0; n < n_batch; ++n) {
        const double* x = input.data() + (n * channels + c) * plane;
        for (std::size_t i = 0; i < plane; ++i) var += (x[i] - mean) * (x[i] - mean);
      }
      var /= count;
      state.running_mean[c] = state.decay * state.running_mean[c] + (1.0 - state.decay) * mean;
      state.running_var[c] = state.decay * state.running_var[c] + (1.0 - state.decay) * var;
    } else {
      mean = state.running_mean[c];
      var = state.running_var[c];
    }
    const double inv_std = 1.0 / std::sqrt(var + state.epsilon);
    if (cache) cache->inv_std[c] = inv_std;
    for (std::size_t n = 0; n < n_batch; ++n) {
      const std::size_t off = (n * channels + c) * plane;
      const double* x = input.data() + off;
      double* y = out.data() + off;
      double* xh = cache ? cache->normalized.data() + off : nullptr;
      for (std::size_t i = 0; i < plane; ++i) {
        const double v = (x[i] - mean) * inv_std;
        if (xh) xh[i] = v;
        y[i] = gamma[c] * v + beta[c];
      }
    }
  }
  return out;
}

BatchNormGrads batchnorm_backward(const Tensor& grad_output, const Tensor& gamma, const BatchNormCache& cache) {
  const auto [n_batch, channels, height, width] = dims4(grad_output, "batchnorm_backward");
  if (cache.normalized.shape() != grad_output.shape()) throw InvalidInput("batchnorm_backward: stale cache");
  const std::size_t plane = height * width;
  const double count = static_cast<double>(n_batch * plane);
  BatchNormGrads g{Tensor(grad_output.shape()), Tensor({channels}), Tensor({channels})};
  for (std::size_t c = 0; c < channels; ++c) {
    double dgamma = 0.0, dbeta = 0.0;
    for (std::size_t n = 0; n < n_batch; ++n) {
      const std::size_t off = (n * channels + c) * plane;
      const double* dy = grad_output.data() + off;
      const double* xh = cache.normalized.data() + off;
      for (std::size_t i = 0; i < plane; ++i) {
        dgamma += dy[i] * xh[i];
        dbeta += dy[i];
      }
    }
    g.gamma[c] = dgamma;
    g.beta[c] = dbeta;
    const double scale = gamma[c] * cache.inv_std[c];
    for (std::size_t n = 0; n < n_batch; ++n) {
      const std::size_t off = (n * channels + c) * plane;
      const double* dy = grad_output.data() + off;
      const double* xh = cache.normalized.data() + off;
      double* dx = g.input.data() + off;
      if (cache.mode == Mode::Train) {
        for (std::size_t i = 0; i < plane; ++i) dx[i] = scale * (dy[i] - (dbeta + xh[i] * dgamma) / count);
      } else {
        for (std::size_t i = 0; i < plane; ++i) dx[i] = scale * dy[i];
      }
    }
  }
  return g;
}

// ---- relu / pooling / dense ------------------------------------------------------

Tensor relu(const Tensor& input) {
  Tensor out = input;
  for (double& v : out.values()) v = v < 0.0 ? 0.0 : v;  // NaN passes through so divergence stays visible
  return out;
}

Tensor relu_backward(const Tensor& input, const Tensor& grad_output) {
  if (input.shape() != grad_output.shape()) throw InvalidInput("relu_backward: shape mismatch");
  Tensor g(input.shape());
  for (std::size_t i = 0; i < input.size(); ++i) g[i] = input[i] > 0.0 ? grad_output[i] : 0.0;
  return g;
}

PoolResult maxpool2x2(const Tensor& input) {
  const auto [n_batch, channels, height, width] = dims4(input, "maxpool2x2");
  if (height % 2 != 0 || width % 2 != 0) {
    throw InvalidInput("maxpool2x2: spatial dims must be even, got " + std::to_string(height) + "x" +
                       std::to_string(width));
  }
  const std::size_t oh = height / 2, ow = width / 2;
  PoolResult r{Tensor({n_batch, channels, oh, ow}), {}};
  r.argmax.resize(r.output.size());
  std::size_t k = 0;
  for (std::size_t nc = 0; nc < n_batch * channels; ++nc) {
    const std::size_t base = nc * height * width;
    for (std::size_t y = 0; y < oh; ++y) {
      for (std::size_t x = 0; x < ow; ++x, ++k) {
        std::size_t best = base + 2 * y * width + 2 * x;
        for (std::size_t cand : {best + 1, best + width, best + width + 1}) {
          if (input[cand] > input[best]) best = cand;
        }
        r.output[k] = input[best];
        r.argmax[k] = best;
      }
    }
  }
  return r;
}

Tensor maxpool2x2_backward(const Shape& input_shape, const std::vector<std::size_t>& argmax,
                           const Tensor& grad_output) {
  if (argmax.size() != grad_output.size()) throw InvalidInput("maxpool2x2_backward: argmax size mismatch");
  Tensor g(input_shape);
  for (std::size_t k = 0; k < argmax.size(); ++k) g[argmax[k]] += grad_output[k];
  return g;
}

Tensor dense_forward(const Tensor& input, const Tensor& weights, const Tensor& bias) {
  if (input.rank() < 2) throw InvalidInput("dense_forward: input must be N x features");
  const std::size_t n_batch = input.dim(0);
  const std::size_t in = input.size() / n_batch;
  if (weights.rank() != 2 || weights.dim(1) != in) {
    throw InvalidInput("dense_forward: weights must be out x " + std::to_string(in) + ", got " +
                       shape_string(weights.shape()));
  }
  const std::size_t out_n = weights.dim(0);
  if (bias.size() != out_n) throw InvalidInput("dense_forward: bias length mismatch");
  Tensor out({n_batch, out_n});
  for (std::size_t n = 0; n < n_batch; ++n) {
    const double* x = input.data() + n * in;
    for (std::size_t o = 0; o < out_n; ++o) {
      const double* w = weights.data() + o * in;
      double acc = 0.0;
      for (std::size_t i = 0; i < in; ++i) acc += w[i] * x[i];
      out[n * out_n + o] = acc + bias[o];
    }
  }
  return out;
}

DenseGrads dense_backward(const Tensor& input, const Tensor& weights, const Tensor& grad_output) {
  const std::size_t n_batch = input.dim(0);
  const std::size_t in = input.size() / n_batch;
  const std::size_t out_n = weights.dim(0);
  if (grad_output.size() != n_batch * out_n) throw InvalidInput("dense_backward: grad_output shape mismatch");
  DenseGrads g{Tensor(input.shape()), Tensor(weights.shape()), Tensor({out_n})};
  for (std::size_t n = 0; n < n_batch; ++n) {
    const double* x = input.data() + n * in;
    double* gx = g.input.data() + n * in;
    for (std::size_t o = 0; o < out_n; ++o) {
      const double go = grad_output[n * out_n + o];
      const double* w = weights.data() + o * in;
      double* gw = g.weights.data() + o * in;
      for (std::size_t i = 0; i < in; ++i) {
        gw[i] += go * x[i];
        gx[i] += go * w[i];
      }
      g.bias[o] += go;
    }
  }
  return g;
}

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) throw InvalidInput("softmax: empty logits");
  const double peak = *std::ranges::max_element(logits);
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) sum += p[i] = std::exp(logits[i] - peak);
  for (double& v : p) v /= sum;
  return p;
}

LossResult softmax_cross_entropy(std::span<const double> logits, std::size_t label,
                                 std::span<const double> class_weights) {
  if (logits.size() < 2) throw InvalidInput("softmax_cross_entropy: need at least two logits");
  if (label >= logits.size()) throw InvalidInput("softmax_cross_entropy: label index out of range");
  if (class_weights.size() != logits.size()) throw InvalidInput("softmax_cross_entropy: class weight count mismatch");
  const double peak = *std::ranges::max_element(logits);
  double sum = 0.0;
  for (double z : logits) sum += std::exp(z - peak);
  const double log_prob = logits[label] - peak - std::log(sum);
  const double w = class_weights[label];
  LossResult r{-w * log_prob, std::vector<double>(logits.size())};
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double p = std::exp(logits[i] - peak) / sum;
    r.gradient[i] = w * (p - (i == label ? 1.0 : 0.0));
  }
  return r;
}

std::vector<double> class_weights_from_frequencies(std::span<const std::size_t> counts) {
  if (counts.empty()) throw InvalidInput("class_weights_from_frequencies: no classes");
  const std::size_t total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  std::vector<double> w;
  for (std::size_t c : counts) {
    if (c == 0) throw InvalidInput("class_weights_from_frequencies: every class needs a nonzero count");
    w.push_back(1.0 / (static_cast<double>(c) / static_cast<double>(total)));
  }
  return w;
}

// ---- layer objects -------------------------------------------------------------

Conv2dLayer::Conv2dLayer(std::size_t in_channels, std::size_t out_channels)
    : in_channels_(in_channels),
      out_channels_(out_channels),
      weights_({out_channels, in_channels, 3, 3}),
      bias_({out_channels}),
      grad_weights_({out_channels, in_channels, 3, 3}),
      grad_bias_({out_channels}) {}

Shape Conv2dLayer::output_shape(const Shape& input) const {
  if (input.size() != 3 || input[0] != in_channels_) {
    throw InvalidInput("Convolution expects " + std::to_string(in_channels_) + " input channels, got " +
                       shape_string(input));
  }
  return {out_channels_, input[1], input[2]};
}

Tensor Conv2dLayer::forward(const Tensor& input, Mode) {
  input_ = input;
  return conv2d_forward(input, weights_, bias_);
}

Tensor Conv2dLayer::backward(const Tensor& grad_output, bool need_input_grad) {
  auto g = conv2d_backward(input_, weights_, grad_output, need_input_grad);
  grad_weights_ = std::move(g.weights);
  grad_bias_ = std::move(g.bias);
  return std::move(g.input);
}

std::vector<std::string> Conv2dLayer::parameter_notes() const {
  return {"Weights: 3 x 3 x " + std::to_string(in_channels_) + " x " + std::to_string(out_channels_),
          "Bias: 1 x 1 x " + std::to_string(out_channels_)};
}

BatchNormLayer::BatchNormLayer(std::size_t channels, double epsilon, double decay)
    : channels_(channels),
      gamma_({channels}, 1.0),
      beta_({channels}, 0.0),
      grad_gamma_({channels}),
      grad_beta_({channels}),
      state_{Tensor({channels}, 0.0), Tensor({channels}, 1.0), epsilon, decay} {}

Tensor BatchNormLayer::forward(const Tensor& input, Mode mode) {
  return batchnorm_forward(input, gamma_, beta_, state_, mode, &cache_);
}

Tensor BatchNormLayer::backward(const Tensor& grad_output, bool) {
  auto g = batchnorm_backward(grad_output, gamma_, cache_);
  grad_gamma_ = std::move(g.gamma);
  grad_beta_ = std::move(g.beta);
  return std::move(g.input);
}

std::vector<std::string> BatchNormLayer::parameter_notes() const {
  return {"Offset: 1 x 1 x " + std::to_string(channels_), "Scale: 1 x 1 x " + std::to_string(channels_)};
}

Tensor ReluLayer::forward(const Tensor& input, Mode) {
  input_ = input;
  return relu(input);
}

Tensor ReluLayer::backward(const Tensor& grad_output, bool) { return relu_backward(input_, grad_output); }

Shape MaxPoolLayer::output_shape(const Shape& input) const {
  if (input.size() != 3 || input[1] % 2 != 0 || input[2] % 2 != 0) {
    throw InvalidInput("Max Pooling needs even spatial dims, got " + shape_string(input));
  }
  return {input[0], input[1] / 2, input[2] / 2};
}

Tensor MaxPoolLayer::forward(const Tensor& input, Mode) {
  auto r = maxpool2x2(input);
  input_shape_ = input.shape();
  argmax_ = std::move(r.argmax);
  return std::move(r.output);
}

Tensor MaxPoolLayer::backward(const Tensor& grad_output, bool) {
  return maxpool2x2_backward(input_shape_, argmax_, grad_output);
}

DenseLayer::DenseLayer(std::size_t inputs, std::size_t outputs)
    : inputs_(inputs),
      outputs_(outputs),
      weights_({outputs, inputs}),
      bias_({outputs}),
      grad_weights_({outputs, inputs}),
      grad_bias_({outputs}) {}

Shape DenseLayer::output_shape(const Shape& input) const {
  if (shape_size(input) != inputs_) {
    throw InvalidInput("Fully Connected expects " + std::to_string(inputs_) + " inputs, got " + shape_string(input));
  }
  return {outputs_};
}

Tensor DenseLayer::forward(const Tensor& input, Mode) {
  input_ = input;
  return dense_forward(input, weights_, bias_);
}

Tensor DenseLayer::backward(const Tensor& grad_output, bool) {
  auto g = dense_backward(input_, weights_, grad_output);
  grad_weights_ = std::move(g.weights);
  grad_bias_ = std::move(g.bias);
  return std::move(g.input);
}

std::vector<std::string> DenseLayer::parameter_notes() const {
  return {"Weights: " + std::to_string(outputs_) + " x " + std::to_string(inputs_),
          "Bias: " + std::to_string(outputs_) + " x 1"};
}

}  // namespace chaoswave

#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "chaoswave/tensor.hpp"

namespace chaoswave {

enum class Mode { Train, Infer };

// ---- Stateless kernels -----------------------------------------------------
//
// Activations are N x C x H x W. Convolution weights are
// out_channels x in_channels x 3 x 3 and the operation is a stride-1
// cross-correlation with one pixel of zero padding ("same").

Tensor conv2d_forward(const Tensor& input, const Tensor& weights, const Tensor& bias);

struct Conv2dGrads {
  Tensor input;  // empty when not requested
  Tensor weights;
  Tensor bias;
};
Conv2dGrads conv2d_backward(const Tensor& input, const Tensor& weights, const Tensor& grad_output,
                            bool need_input_grad = true);

struct BatchNormState {
  Tensor running_mean;  // C
  Tensor running_var;   // C
  double epsilon = 1e-5;
  double decay = 0.9;  // running <- decay*running + (1-decay)*batch
};

/// Per-channel statistics cached by a training-mode forward pass.
struct BatchNormCache {
  Tensor normalized;            // x_hat, same shape as input
  std::vector<double> inv_std;  // per channel
  Mode mode = Mode::Train;
};

/// Train mode normalizes by batch statistics (biased variance over N*H*W) and
/// updates the running statistics; infer mode uses the running statistics.
Tensor batchnorm_forward(const Tensor& input, const Tensor& gamma, const Tensor& beta, BatchNormState& state,
                         Mode mode, BatchNormCache* cache = nullptr);

struct BatchNormGrads {
  Tensor input;
  Tensor gamma;
  Tensor beta;
};
BatchNormGrads batchnorm_backward(const Tensor& grad_output, const Tensor& gamma, const BatchNormCache& cache);

Tensor relu(const Tensor& input);
Tensor relu_backward(const Tensor& input, const Tensor& grad_output);

struct PoolResult {
  Tensor output;
  std::vector<std::size_t> argmax;  // flat input index per output element
};
/// Non-overlapping 2x2 windows; ties resolve to the first maximum in
/// row-major window order.
PoolResult maxpool2x2(const Tensor& input);
Tensor maxpool2x2_backward(const Shape& input_shape, const std::vector<std::size_t>& argmax,
                           const Tensor& grad_output);

/// Input is N x (anything); it is flattened per sample. Weights are out x in.
Tensor dense_forward(const Tensor& input, const Tensor& weights, const Tensor& bias);
struct DenseGrads {
  Tensor input;
  Tensor weights;
  Tensor bias;
};
DenseGrads dense_backward(const Tensor& input, const Tensor& weights, const Tensor& grad_output);

std::vector<double> softmax(std::span<const double> logits);

struct LossResult {
  double loss = 0.0;
  std::vector<double> gradient;  // d loss / d logits
};
/// loss = -w[label] * log softmax(logits)[label];
/// gradient = w[label] * (softmax(logits) - onehot(label)).
LossResult softmax_cross_entropy(std::span<const double> logits, std::size_t label,
                                 std::span<const double> class_weights);

/// f_i = count_i / total, w_i = 1 / f_i.
std::vector<double> class_weights_from_frequencies(std::span<const std::size_t> counts);

// ---- Layer objects ---------------------------------------------------------

class Layer {
 public:
  virtual ~Layer() = default;

  virtual std::string kind() const = 0;
  /// Per-sample output shape (C x H x W, or units) for a per-sample input shape.
  virtual Shape output_shape(const Shape& input) const = 0;
  virtual Tensor forward(const Tensor& input, Mode mode) = 0;
  /// Uses state cached by the last forward. Overwrites parameter gradients.
  virtual Tensor backward(const Tensor& grad_output, bool need_input_grad) = 0;

  virtual std::vector<Tensor*> parameters() { return {}; }
  virtual std::vector<Tensor*> gradients() { return {}; }
  // Non-trainable state that must survive a checkpoint (running statistics).
  virtual std::vector<Tensor*> buffers() { return {}; }
  // Human-readable parameter shapes, e.g. "Weights: 3 x 3 x 1 x 8".
  virtual std::vector<std::string> parameter_notes() const { return {}; }
};

class Conv2dLayer final : public Layer {
 public:
  Conv2dLayer(std::size_t in_channels, std::size_t out_channels);
  std::string kind() const override { return "Convolution"; }
  Shape output_shape(const Shape& input) const override;
  Tensor forward(const Tensor& input, Mode mode) override;
  Tensor backward(const Tensor& grad_output, bool need_input_grad) override;
  std::vector<Tensor*> parameters() override { return {&weights_, &bias_}; }
  std::vector<Tensor*> gradients() override { return {&grad_weights_, &grad_bias_}; }
  std::vector<std::string> parameter_notes() const override;

 private:
  std::size_t in_channels_, out_channels_;
  Tensor weights_, bias_, grad_weights_, grad_bias_;
  Tensor input_;
};

class BatchNormLayer final : public Layer {
 public:
  explicit BatchNormLayer(std::size_t channels, double epsilon = 1e-5, double decay = 0.9);
  std::string kind() const override { return "Batch Normalization"; }
  Shape output_shape(const Shape& input) const override { return input; }
  Tensor forward(const Tensor& input, Mode mode) override;
  Tensor backward(const Tensor& grad_output, bool need_input_grad) override;
  std::vector<Tensor*> parameters() override { return {&gamma_, &beta_}; }
  std::vector<Tensor*> gradients() override { return {&grad_gamma_, &grad_beta_}; }
  std::vector<Tensor*> buffers() override { return {&state_.running_mean, &state_.running_var}; }
  std::vector<std::string> parameter_notes() const override;

 private:
  std::size_t channels_;
  Tensor gamma_, beta_, grad_gamma_, grad_beta_;
  BatchNormState state_;
  BatchNormCache cache_;
};

class ReluLayer final : public Layer {
 public:
  std::string kind() const override { return "ReLU"; }
  Shape output_shape(const Shape& input) const override { return input; }
  Tensor forward(const Tensor& input, Mode mode) override;
  Tensor backward(const Tensor& grad_output, bool need_input_grad) override;

 private:
  Tensor input_;
};

class MaxPoolLayer final : public Layer {
 public:
  std::string kind() const override { return "Max Pooling"; }
  Shape output_shape(const Shape& input) const override;
  Tensor forward(const Tensor& input, Mode mode) override;
  Tensor backward(const Tensor& grad_output, bool need_input_grad) override;

 private:
  Shape input_shape_;
  std::vector<std::size_t> argmax_;
};

class DenseLayer final : public Layer {
 public:
  DenseLayer(std::size_t inputs, std::size_t outputs);
  std::string kind() const override { return "Fully Connected"; }
  Shape output_shape(const Shape& input) const override;
  Tensor forward(const Tensor& input, Mode mode) override;
  Tensor backward(const Tensor& grad_output, bool need_input_grad) override;
  std::vector<Tensor*> parameters() override { return {&weights_, &bias_}; }
  std::vector<Tensor*> gradients() override { return {&grad_weights_, &grad_bias_}; }
  std::vector<std::string> parameter_notes() const override;

 private:
  std::size_t inputs_, outputs_;
  Tensor weights_, bias_, grad_weights_, grad_bias_;
  Tensor input_;
};

}  // namespace chaoswave

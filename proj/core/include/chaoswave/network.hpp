#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "chaoswave/layers.hpp"
#include "chaoswave/tensor.hpp"

namespace chaoswave {

enum class LayerKind { Conv3x3, BatchNorm, Relu, MaxPool2x2, Dense };

struct LayerSpec {
  LayerKind kind;
  std::size_t units = 0;  // output channels (conv) or output features (dense)
};

/// Ordered layer list plus the per-sample input shape.
struct NetworkSpec {
  std::size_t input_channels = 1;
  std::size_t input_height = 512;
  std::size_t input_width = 512;
  std::vector<LayerSpec> layers;

  /// `channels.size()` blocks of [conv 3x3, batch-norm, ReLU, max-pool 2x2],
  /// then a fully-connected layer onto `classes` outputs.
  static NetworkSpec conv_blocks(std::size_t height, std::size_t width, const std::vector<std::size_t>& channels,
                                 std::size_t classes = 2);
  /// 512x512x1 input, blocks of 8/16/32 channels, FC 131072 -> 2.
  static NetworkSpec full_size();

  /// Per-sample output shape after every layer. Throws InvalidInput when
  /// consecutive layers are incompatible.
  std::vector<Shape> output_shapes() const;
  std::size_t num_classes() const;
  std::string describe() const;
  std::uint64_t hash() const;
};

struct ShapeLedgerRow {
  std::string layer;  // e.g. "Convolution1"
  Shape output;       // H x W x C, or 1 x 1 x classes for the FC layer
  std::vector<std::string> notes;
};

class Network {
 public:
  explicit Network(NetworkSpec spec);
  Network(Network&&) noexcept = default;
  Network& operator=(Network&&) noexcept = default;

  const NetworkSpec& spec() const noexcept { return spec_; }

  /// Weights ~ normal(0, weight_std); biases 0; batch-norm scale 1, offset 0.
  void initialize(std::uint64_t seed, double weight_std = 0.01);
  bool initialized() const noexcept { return initialized_; }

  /// batch: N x C x H x W. Returns logits N x classes. `trace`, if given,
  /// receives the per-sample output shape of every layer.
  Tensor forward(const Tensor& batch, Mode mode, std::vector<Shape>* trace = nullptr);
  /// Propagates d loss / d logits back through the last forward pass and
  /// overwrites every parameter gradient.
  void backward(const Tensor& grad_logits);

  std::vector<Tensor*> parameters();
  std::vector<Tensor*> gradients();
  std::vector<Tensor*> buffers();
  std::vector<const Tensor*> parameters() const;
  std::vector<const Tensor*> buffers() const;

  /// Input row, one row per layer and a final classification-output row, in
  /// H x W x C order.
  std::vector<ShapeLedgerRow> shape_ledger() const;

 private:
  NetworkSpec spec_;
  std::vector<std::unique_ptr<Layer>> layers_;
  bool initialized_ = false;
};

struct BatchGradient {
  double loss = 0.0;  // mean weighted loss over the batch
  Tensor logits;
};

/// Train-mode forward, mean-reduced weighted cross-entropy, full backward.
/// Gradients are left in network.gradients(). Throws InvalidState for an
/// uninitialized network.
BatchGradient compute_gradients(Network& network, const Tensor& batch, const std::vector<std::size_t>& labels,
                                const std::vector<double>& class_weights);

}  // namespace chaoswave

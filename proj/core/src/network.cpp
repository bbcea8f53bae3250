#include "chaoswave/network.hpp"

#include <random>

#include "chaoswave/errors.hpp"
#include "chaoswave/seed.hpp"

namespace chaoswave {

NetworkSpec NetworkSpec::conv_blocks(std::size_t height, std::size_t width, const std::vector<std::size_t>& channels,
                                     std::size_t classes) {
  NetworkSpec spec;
  spec.input_channels = 1;
  spec.input_height = height;
  spec.input_width = width;
  for (std::size_t ch : channels) {
    spec.layers.push_back({LayerKind::Conv3x3, ch});
    spec.layers.push_back({LayerKind::BatchNorm, 0});
    spec.layers.push_back({LayerKind::Relu, 0});
    spec.layers.push_back({LayerKind::MaxPool2x2, 0});
  }
  spec.layers.push_back({LayerKind::Dense, classes});
  return spec;
}

NetworkSpec NetworkSpec::full_size() { return conv_blocks(512, 512, {8, 16, 32}, 2); }

std::vector<Shape> NetworkSpec::output_shapes() const {
  if (input_channels == 0 || input_height == 0 || input_width == 0) throw InvalidInput("NetworkSpec: empty input");
  if (layers.empty() || layers.back().kind != LayerKind::Dense) {
    throw InvalidInput("NetworkSpec: last layer must be fully connected");
  }
  std::vector<Shape> shapes;
  Shape cur{input_channels, input_height, input_width};
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    const bool spatial = cur.size() == 3;
    switch (l.kind) {
      case LayerKind::Conv3x3:
        if (!spatial || l.units == 0) throw InvalidInput("NetworkSpec: bad convolution at layer " + std::to_string(i));
        cur = {l.units, cur[1], cur[2]};
        break;
      case LayerKind::BatchNorm:
      case LayerKind::Relu:
        if (!spatial && l.kind == LayerKind::BatchNorm) {
          throw InvalidInput("NetworkSpec: batch-norm needs a spatial input at layer " + std::to_string(i));
        }
        break;
      case LayerKind::MaxPool2x2:
        if (!spatial || cur[1] % 2 || cur[2] % 2) {
          throw InvalidInput("NetworkSpec: max-pool needs even spatial dims at layer " + std::to_string(i));
        }
        cur = {cur[0], cur[1] / 2, cur[2] / 2};
        break;
      case LayerKind::Dense:
        if (l.units == 0) throw InvalidInput("NetworkSpec: dense layer with zero outputs");
        cur = {l.units};
        break;
    }
    shapes.push_back(cur);
  }
  return shapes;
}

std::size_t NetworkSpec::num_classes() const { return output_shapes().back()[0]; }

std::string NetworkSpec::describe() const {
  std::string s = "input:" + std::to_string(input_channels) + "x" + std::to_string(input_height) + "x" +
                  std::to_string(input_width);
  for (const auto& l : layers) {
    switch (l.kind) {
      case LayerKind::Conv3x3: s += ";conv3x3:" + std::to_string(l.units); break;
      case LayerKind::BatchNorm: s += ";batchnorm"; break;
      case LayerKind::Relu: s += ";relu"; break;
      case LayerKind::MaxPool2x2: s += ";maxpool2x2"; break;
      case LayerKind::Dense: s += ";dense:" + std::to_string(l.units); break;
    }
  }
  return s;
}

std::uint64_t NetworkSpec::hash() const { return fnv1a64(describe()); }

Network::Network(NetworkSpec spec) : spec_(std::move(spec)) {
  const auto shapes = spec_.output_shapes();
  Shape cur{spec_.input_channels, spec_.input_height, spec_.input_width};
  for (std::size_t i = 0; i < spec_.layers.size(); ++i) {
    const auto& l = spec_.layers[i];
    switch (l.kind) {
      case LayerKind::Conv3x3: layers_.push_back(std::make_unique<Conv2dLayer>(cur[0], l.units)); break;
      case LayerKind::BatchNorm: layers_.push_back(std::make_unique<BatchNormLayer>(cur[0])); break;
      case LayerKind::Relu: layers_.push_back(std::make_unique<ReluLayer>()); break;
      case LayerKind::MaxPool2x2: layers_.push_back(std::make_unique<MaxPoolLayer>()); break;
      case LayerKind::Dense: layers_.push_back(std::make_unique<DenseLayer>(shape_size(cur), l.units)); break;
    }
    cur = shapes[i];
  }
}

void Network::initialize(std::uint64_t seed, double weight_std) {
  if (!(weight_std >= 0.0)) throw InvalidInput("Network::initialize: weight_std must be non-negative");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, weight_std);
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    auto params = layers_[i]->parameters();
    if (params.empty()) continue;
    if (spec_.layers[i].kind == LayerKind::BatchNorm) {
      params[0]->fill(1.0);
      params[1]->fill(0.0);
      auto bufs = layers_[i]->buffers();
      bufs[0]->fill(0.0);
      bufs[1]->fill(1.0);
    } else {
      for (double& w : params[0]->values()) w = weight_std > 0.0 ? normal(rng) : 0.0;
      params[1]->fill(0.0);
    }
  }
  initialized_ = true;
}

Tensor Network::forward(const Tensor& batch, Mode mode, std::vector<Shape>* trace) {
  if (!initialized_) throw InvalidState("Network::forward: network is not initialized");
  if (batch.rank() != 4 || batch.dim(1) != spec_.input_channels || batch.dim(2) != spec_.input_height ||
      batch.dim(3) != spec_.input_width) {
    throw InvalidInput("Network::forward: batch shape " + shape_string(batch.shape()) + " does not match the network spec");
  }
  const auto record = [&](const Tensor& t) {
    if (trace) trace->emplace_back(t.shape().begin() + 1, t.shape().end());
  };
  if (trace) trace->clear();
  Tensor x = layers_.front()->forward(batch, mode);
  record(x);
  for (std::size_t i = 1; i < layers_.size(); ++i) {
    x = layers_[i]->forward(x, mode);
    record(x);
  }
  return x;
}

void Network::backward(const Tensor& grad_logits) {
  if (!initialized_) throw InvalidState("Network::backward: network is not initialized");
  Tensor g = grad_logits;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    const bool need_input = i > 0;
    Tensor next = layers_[i]->backward(g, need_input);
    if (need_input) g = std::move(next);
  }
}

std::vector<Tensor*> Network::parameters() {
  std::vector<Tensor*> out;
  for (auto& l : layers_) {
    for (Tensor* t : l->parameters()) out.push_back(t);
  }
  return out;
}

std::vector<Tensor*> Network::gradients() {
  std::vector<Tensor*> out;
  for (auto& l : layers_) {
    for (Tensor* t : l->gradients()) out.push_back(t);
  }
  return out;
}

std::vector<Tensor*> Network::buffers() {
  std::vector<Tensor*> out;
  for (auto& l : layers_) {
    for (Tensor* t : l->buffers()) out.push_back(t);
  }
  return out;
}

std::vector<const Tensor*> Network::parameters() const {
  std::vector<const Tensor*> out;
  for (const auto& l : layers_) {
    for (Tensor* t : l->parameters()) out.push_back(t);
  }
  return out;
}

std::vector<const Tensor*> Network::buffers() const {
  std::vector<const Tensor*> out;
  for (const auto& l : layers_) {
    for (Tensor* t : l->buffers()) out.push_back(t);
  }
  return out;
}

std::vector<ShapeLedgerRow> Network::shape_ledger() const {
  const auto shapes = spec_.output_shapes();
  std::vector<ShapeLedgerRow> rows;
  rows.push_back({"Input Image", {spec_.input_height, spec_.input_width, spec_.input_channels}, {}});
  std::size_t counters[5] = {};
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto kind = static_cast<std::size_t>(spec_.layers[i].kind);
    const std::string name = layers_[i]->kind() + std::to_string(++counters[kind]);
    const Shape& s = shapes[i];
    Shape hwc = s.size() == 3 ? Shape{s[1], s[2], s[0]} : Shape{1, 1, s[0]};
    rows.push_back({name, hwc, layers_[i]->parameter_notes()});
  }
  rows.push_back({"Classification Output", {1, 1, spec_.num_classes()}, {"Softmax over classes"}});
  return rows;
}

BatchGradient compute_gradients(Network& network, const Tensor& batch, const std::vector<std::size_t>& labels,
                                const std::vector<double>& class_weights) {
  if (!network.initialized()) throw InvalidState("compute_gradients: network is not initialized");
  if (batch.rank() != 4 || labels.size() != batch.dim(0)) {
    throw InvalidInput("compute_gradients: label count does not match batch size");
  }
  BatchGradient out;
  out.logits = network.forward(batch, Mode::Train);
  const std::size_t n = labels.size();
  const std::size_t classes = out.logits.dim(1);
  Tensor grad({n, classes});
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = softmax_cross_entropy({out.logits.data() + i * classes, classes}, labels[i], class_weights);
    total += r.loss;
    for (std::size_t k = 0; k < classes; ++k) grad[i * classes + k] = r.gradient[k] / static_cast<double>(n);
  }
  out.loss = total / static_cast<double>(n);
  network.backward(grad);
  return out;
}

}  // namespace chaoswave

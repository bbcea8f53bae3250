#include "chaoswave/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "chaoswave/errors.hpp"
#include "chaoswave/seed.hpp"

namespace chaoswave {

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw InvalidInput("TrainConfig: learning_rate must be non-negative");
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) throw InvalidInput("TrainConfig: momentum must lie in [0, 1)");
  if (batch_size == 0) throw InvalidInput("TrainConfig: batch_size must be >= 1");
  if (validation_frequency == 0) throw InvalidInput("TrainConfig: validation_frequency must be >= 1");
  for (double w : class_weights) {
    if (!(w >= 0.0)) throw InvalidInput("TrainConfig: class weights must be non-negative");
  }
}

void sgdm_step(const std::vector<Tensor*>& params, std::vector<Tensor>& velocities,
               const std::vector<Tensor*>& gradients, double learning_rate, double momentum) {
  if (params.size() != velocities.size() || params.size() != gradients.size()) {
    throw InvalidInput("sgdm_step: parameter/velocity/gradient counts differ");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = *params[i];
    Tensor& v = velocities[i];
    const Tensor& g = *gradients[i];
    if (p.shape() != v.shape() || p.shape() != g.shape()) {
      throw InvalidInput("sgdm_step: shape mismatch for tensor " + std::to_string(i));
    }
    for (std::size_t k = 0; k < p.size(); ++k) {
      v[k] = momentum * v[k] + g[k];
      p[k] -= learning_rate * v[k];
    }
  }
}

Tensor make_batch(const LabeledDataset& dataset, const std::vector<std::size_t>& indices) {
  if (indices.empty()) throw InvalidInput("make_batch: no indices");
  const auto& first = dataset.items.at(indices.front()).image;
  const std::size_t h = first.height(), w = first.width();
  Tensor batch({indices.size(), 1, h, w});
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto& img = dataset.items.at(indices[i]).image;
    if (img.height() != h || img.width() != w) throw InvalidInput("make_batch: images differ in shape");
    std::ranges::copy(img.pixels.data(), batch.data() + i * h * w);
  }
  return batch;
}

namespace {

std::vector<double> resolve_class_weights(const LabeledDataset& dataset, const TrainConfig& config,
                                          std::size_t classes) {
  if (!config.class_weights.empty()) {
    if (config.class_weights.size() != classes) throw InvalidInput("TrainConfig: class_weights length mismatch");
    return config.class_weights;
  }
  const auto [benign, malignant] = dataset.class_counts();
  const std::size_t counts[2] = {benign, malignant};
  return class_weights_from_frequencies(counts);
}

struct EvalSummary {
  double loss = 0.0;
  double accuracy = 0.0;
};

EvalSummary evaluate_split(Network& net, const LabeledDataset& data, const std::vector<double>& weights,
                           std::size_t batch_size) {
  const auto probs = predict_proba(net, data, batch_size);
  EvalSummary s;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const auto label = static_cast<std::size_t>(data.items[i].label);
    s.loss += -weights[label] * std::log(std::max(probs[i][label], 1e-300));
    const auto pred = static_cast<std::size_t>(std::ranges::max_element(probs[i]) - probs[i].begin());
    correct += pred == label ? 1 : 0;
  }
  s.loss /= static_cast<double>(probs.size());
  s.accuracy = static_cast<double>(correct) / static_cast<double>(probs.size());
  return s;
}

}  // namespace

TrainResult train(const LabeledDataset& dataset, const NetworkSpec& spec, const TrainConfig& config,
                  const LabeledDataset* validation) {
  config.validate();
  if (dataset.items.empty()) throw InvalidInput("train: dataset is empty");
  const std::size_t classes = spec.num_classes();
  const std::vector<double> weights = resolve_class_weights(dataset, config, classes);

  Network net(spec);
  net.initialize(stage_seed(config.seed, "init"), config.init_std);
  std::vector<Tensor> velocities;
  for (const Tensor* p : net.parameters()) velocities.emplace_back(p->shape());

  std::mt19937_64 shuffle_rng(stage_seed(config.seed, "shuffle"));
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  std::vector<CurvePoint> curves;
  std::vector<double> epoch_losses;
  std::size_t iteration = 0;
  for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const std::vector<std::size_t> idx(order.begin() + static_cast<long>(start),
                                         order.begin() + static_cast<long>(end));
      std::vector<std::size_t> labels;
      for (std::size_t i : idx) labels.push_back(static_cast<std::size_t>(dataset.items[i].label));

      const auto step = compute_gradients(net, make_batch(dataset, idx), labels, weights);
      ++iteration;
      if (!std::isfinite(step.loss)) throw NumericalDivergence("training loss is not finite", iteration);
      sgdm_step(net.parameters(), velocities, net.gradients(), config.learning_rate, config.momentum);

      std::size_t correct = 0;
      for (std::size_t i = 0; i < labels.size(); ++i) {
        const double* z = step.logits.data() + i * classes;
        const auto pred = static_cast<std::size_t>(std::max_element(z, z + classes) - z);
        correct += pred == labels[i] ? 1 : 0;
      }
      curves.push_back({iteration, step.loss, static_cast<double>(correct) / static_cast<double>(labels.size()),
                        "train"});
      epoch_loss += step.loss;
      ++batches;

      if (validation && !validation->items.empty() && iteration % config.validation_frequency == 0) {
        const auto v = evaluate_split(net, *validation, weights, config.batch_size);
        curves.push_back({iteration, v.loss, v.accuracy, "validation"});
      }
    }
    epoch_losses.push_back(epoch_loss / static_cast<double>(batches));
  }
  if (validation && !validation->items.empty() &&
      (curves.empty() || curves.back().split != "validation")) {
    const auto v = evaluate_split(net, *validation, weights, config.batch_size);
    curves.push_back({iteration, v.loss, v.accuracy, "validation"});
  }

  Checkpoint ckpt = make_checkpoint(net, velocities, config.seed, config.max_epochs);
  return {std::move(net), std::move(ckpt), std::move(curves), std::move(epoch_losses)};
}

std::vector<std::vector<double>> predict_proba(Network& network, const LabeledDataset& dataset,
                                               std::size_t batch_size) {
  if (batch_size == 0) throw InvalidInput("predict_proba: batch_size must be >= 1");
  std::vector<std::vector<double>> out;
  out.reserve(dataset.size());
  for (std::size_t start = 0; start < dataset.size(); start += batch_size) {
    std::vector<std::size_t> idx(std::min(batch_size, dataset.size() - start));
    std::iota(idx.begin(), idx.end(), start);
    const Tensor logits = network.forward(make_batch(dataset, idx), Mode::Infer);
    const std::size_t classes = logits.dim(1);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      out.push_back(softmax({logits.data() + i * classes, classes}));
    }
  }
  return out;
}

void write_curves_csv(const std::filesystem::path& path, const std::vector<CurvePoint>& curves) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out.precision(17);
  out << "iteration,loss,accuracy,split\n";
  for (const auto& c : curves) out << c.iteration << ',' << c.loss << ',' << c.accuracy << ',' << c.split << '\n';
}

}  // namespace chaoswave

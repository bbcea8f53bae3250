#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "chaoswave/imageio.hpp"
#include "chaoswave/network.hpp"
#include "chaoswave/tensor.hpp"

namespace chaoswave {

struct TrainConfig {
  double learning_rate = 0.01;
  double momentum = 0.9;
  std::size_t batch_size = 64;
  std::size_t max_epochs = 30;
  std::uint64_t seed = 0;
  // Empty: derive inverse-frequency weights from the training set.
  std::vector<double> class_weights;
  std::size_t validation_frequency = 50;  // iterations
  double lr_drop_factor = 0.0;            // accepted for completeness; no schedule is applied
  double init_std = 0.01;

  void validate() const;
};

/// v <- momentum*v + g; p <- p - learning_rate*v.
void sgdm_step(const std::vector<Tensor*>& params, std::vector<Tensor>& velocities,
               const std::vector<Tensor*>& gradients, double learning_rate, double momentum);

struct Checkpoint {
  std::uint64_t spec_hash = 0;
  std::uint64_t seed = 0;
  std::uint64_t epoch = 0;
  std::vector<Tensor> parameters;
  std::vector<Tensor> buffers;
  std::vector<Tensor> velocities;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

Checkpoint make_checkpoint(const Network& network, const std::vector<Tensor>& velocities, std::uint64_t seed,
                           std::uint64_t epoch);
/// Builds a network from `spec` and loads the checkpoint tensors into it.
/// Throws InvalidInput on a spec-hash or tensor-shape mismatch.
Network restore_network(const NetworkSpec& spec, const Checkpoint& checkpoint);

/// Little-endian binary: "CHWVCKPT", u32 version, u64 spec hash, u64 seed,
/// u64 epoch, u32 counts for parameters/buffers/velocities, then one record
/// per tensor: u32 rank, u64 dims[rank], f64 data[prod(dims)].
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);
std::string encode_checkpoint(const Checkpoint& checkpoint);
Checkpoint decode_checkpoint(std::string_view bytes);

struct CurvePoint {
  std::size_t iteration = 0;
  double loss = 0.0;
  double accuracy = 0.0;  // fraction in [0,1]
  std::string split;      // "train" or "validation"
};

void write_curves_csv(const std::filesystem::path& path, const std::vector<CurvePoint>& curves);

struct TrainResult {
  Network network;
  Checkpoint checkpoint;
  std::vector<CurvePoint> curves;
  std::vector<double> epoch_losses;  // mean batch loss per epoch
};

/// N x 1 x H x W tensor from the given items (Unit-domain images).
Tensor make_batch(const LabeledDataset& dataset, const std::vector<std::size_t>& indices);

/// Seeded per-epoch shuffle, mini-batch SGDM on weighted cross-entropy.
/// Serial and deterministic. Throws NumericalDivergence on a non-finite loss.
TrainResult train(const LabeledDataset& dataset, const NetworkSpec& spec, const TrainConfig& config,
                  const LabeledDataset* validation = nullptr);

/// Softmax probabilities N x classes in inference mode.
std::vector<std::vector<double>> predict_proba(Network& network, const LabeledDataset& dataset,
                                               std::size_t batch_size = 64);

}  // namespace chaoswave

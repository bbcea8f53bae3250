#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "chaoswave/augment.hpp"
#include "chaoswave/chaos.hpp"
#include "chaoswave/modulate.hpp"
#include "chaoswave/network.hpp"
#include "chaoswave/train.hpp"

namespace chaoswave::cli {

// Versioned work-dir layout; each stage reads the previous stage's manifest.
struct WorkLayout {
  std::filesystem::path root;  // <work>/v1
  std::filesystem::path preprocessed() const { return root / "preprocessed"; }
  std::filesystem::path enhanced() const { return root / "enhanced"; }
  std::filesystem::path models() const { return root / "models"; }
  std::filesystem::path reports() const { return root / "reports"; }
};

struct ChaosSimSettings {
  double duration = 100.0;  // time units after burn-in
  std::string output;       // empty: <reports>/chaos_trajectory.csv
};

struct PipelineConfig {
  std::uint64_t seed = 0;

  std::filesystem::path input_dir;
  std::filesystem::path work_dir = "work";
  std::filesystem::path output_dir;  // empty: <work>/v1/reports

  std::size_t image_size = 512;
  AugmentationPlan augmentation;  // augmentation.seed is derived from `seed`

  std::size_t levels = 6;
  ModulationConfig modulation;
  ChuaParams chua;
  bool difference_maps = false;
  ChaosSimSettings chaos_sim;

  std::vector<std::size_t> channels{8, 16, 32};
  TrainConfig train;  // train.seed is derived from `seed`
  std::string train_input = "enhanced";  // or "preprocessed"
  std::size_t folds = 5;
  bool evaluate_augmented = false;

  static PipelineConfig defaults() { return {}; }
  static PipelineConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  // Pure checks; never touches the filesystem.
  void validate() const;

  WorkLayout layout() const { return {work_dir / "v1"}; }
  std::filesystem::path reports_dir() const { return output_dir.empty() ? layout().reports() : output_dir; }
  NetworkSpec network_spec() const;
  AugmentationPlan augmentation_plan() const;
  TrainConfig train_config() const;
};

/// Sets a dotted key (e.g. "train.epochs") in a config document. The value is
/// parsed as JSON when possible and taken as a string otherwise.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// File (may be empty) < CHAOSWAVE_WORK_DIR < overrides.
PipelineConfig load_config(const std::filesystem::path& file, const std::vector<std::string>& overrides);

}  // namespace chaoswave::cli

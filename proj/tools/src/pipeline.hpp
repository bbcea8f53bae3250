#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "chaoswave/cross_validation.hpp"
#include "config.hpp"

namespace chaoswave::cli {

// Several per-file failures collected before giving up.
class BatchError : public std::runtime_error {
 public:
  BatchError(const std::string& what, std::vector<std::string> items)
      : std::runtime_error(what), items_(std::move(items)) {}
  const std::vector<std::string>& items() const noexcept { return items_; }

 private:
  std::vector<std::string> items_;
};

/// Reads <input_dir>/labels.csv (`file,label[,source_id]`), resizes every
/// listed PGM to image_size, normalizes, augments to target_count and writes
/// <work>/v1/preprocessed/{images/,manifest.csv}. Returns the manifest path.
std::filesystem::path cmd_preprocess(const PipelineConfig& config, std::ostream& log);

/// Integrates the configured system for chaos_sim.duration time units after
/// burn-in and writes `t,z1,z2,z3`. Returns the CSV path.
std::filesystem::path cmd_chaos_sim(const PipelineConfig& config, std::ostream& log);

/// Enhances every preprocessed image; writes <work>/v1/enhanced/{images/,
/// manifest.csv} and, if enabled, scaled absolute difference maps in diff/.
std::filesystem::path cmd_enhance(const PipelineConfig& config, std::ostream& log);

/// k-fold cross-validation on the train.input stage (or `manifest`); writes
/// one checkpoint per fold, curves, and cv.{json,csv} reports. The enhanced
/// stage is recomputed from the preprocessed images, unclamped.
CrossValidationResult cmd_train(const PipelineConfig& config, std::ostream& log,
                                const std::filesystem::path& manifest = {});

/// Without `checkpoint`: rescores each fold's validation items with the saved
/// fold checkpoints. With it: scores the whole manifest with one model.
/// Writes evaluation.{json,csv}.
CrossValidationResult cmd_evaluate(const PipelineConfig& config, std::ostream& log,
                                   const std::filesystem::path& checkpoint = {},
                                   const std::filesystem::path& manifest = {});

/// With/without modulation on the preprocessed stage; writes ablation.json,
/// per-arm CSVs and a text summary.
AblationReport cmd_ablate(const PipelineConfig& config, std::ostream& log);

}  // namespace chaoswave::cli

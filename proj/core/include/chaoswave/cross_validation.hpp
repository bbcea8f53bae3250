#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "chaoswave/folds.hpp"
#include "chaoswave/imageio.hpp"
#include "chaoswave/metrics.hpp"
#include "chaoswave/modulate.hpp"
#include "chaoswave/network.hpp"
#include "chaoswave/stats.hpp"
#include "chaoswave/train.hpp"

namespace chaoswave {

struct FoldResult {
  std::size_t fold = 0;
  ConfusionMatrix confusion;
  MetricReport metrics;
  RocResult roc;  // empty when the validation fold holds a single class
  std::vector<std::size_t> validation_indices;
  std::vector<int> predictions;
  std::vector<int> labels;
  std::vector<double> scores;  // positive-class probability
  std::vector<CurvePoint> curves;
  Checkpoint checkpoint;
};

struct MetricSummary {
  std::optional<double> mean;
  std::optional<double> sd;  // sample (n-1) standard deviation
};

struct AggregateReport {
  MetricSummary acc, sen, spe, precision, fpr, f1, auc, mse_loss;
};

struct CrossValidationResult {
  std::vector<FoldResult> folds;  // sorted by fold index
  AggregateReport aggregate;
  ConfusionMatrix pooled;

  // Predictions, labels and accuracies concatenated over folds in fold order.
  std::vector<int> all_predictions() const;
  std::vector<int> all_labels() const;
  std::vector<double> fold_accuracies() const;
};

struct CrossValidationOptions {
  bool evaluate_augmented = false;  // default: validate on originals only
};

/// Mean and sample SD over folds for each metric; folds where a metric is
/// undefined are skipped for that metric.
AggregateReport aggregate_folds(const std::vector<MetricReport>& reports);

/// Scores `validation` in inference mode and fills predictions, labels,
/// scores, confusion, metrics and (when both classes occur) ROC.
FoldResult score_fold(Network& network, const LabeledDataset& validation, std::size_t fold,
                      std::size_t batch_size = 64);

/// Sorts folds by index, pools confusion counts and aggregates metrics.
CrossValidationResult collect_folds(std::vector<FoldResult> folds);

/// Fold f trains on every item outside fold f with seed item_seed(seed, f),
/// then scores fold f's validation items in inference mode.
CrossValidationResult cross_validate(const LabeledDataset& dataset, const NetworkSpec& spec,
                                     const TrainConfig& config, const FoldPlan& plan,
                                     const CrossValidationOptions& options = {});

/// Applies enhance_image to every item. Items of equal shape share one
/// precomputed modulation sequence, which is identical to what a fresh
/// per-image trajectory would produce.
LabeledDataset enhance_dataset(const LabeledDataset& dataset, const FilterBank& bank, std::size_t levels,
                               const ModulationConfig& config, const ChuaParams& params);

struct AblationReport {
  CrossValidationResult without_chaos;  // wavelet round trip, scale 0
  CrossValidationResult with_chaos;
  McNemarResult mcnemar;           // A = without chaos, B = with chaos
  PairedTestResult paired_t;       // fold accuracies, with - without
  PairedTestResult wilcoxon;       // fold accuracies, with - without
};

/// Two arms sharing seeds and fold plan; they differ only in modulation scale.
AblationReport run_ablation(const LabeledDataset& dataset, const NetworkSpec& spec, const TrainConfig& config,
                            const FoldPlan& plan, const ModulationConfig& modulation, std::size_t levels,
                            const ChuaParams& params, const CrossValidationOptions& options = {});

// Reports. Undefined values serialize as JSON null / empty CSV cells.
std::string cross_validation_json(const CrossValidationResult& result, int indent = 2);
std::string ablation_json(const AblationReport& report, int indent = 2);
void write_cross_validation_csv(const std::filesystem::path& path, const CrossValidationResult& result);
void write_text(const std::filesystem::path& path, const std::string& text);
void print_summary(std::ostream& os, const CrossValidationResult& result, const std::string& title);
void print_ablation_summary(std::ostream& os, const AblationReport& report);

}  // namespace chaoswave

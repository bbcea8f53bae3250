#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace chaoswave {

/// Binary confusion counts with malignant (class 1) as the positive class.
struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const noexcept { return tp + fp + tn + fn; }
  ConfusionMatrix& operator+=(const ConfusionMatrix& o) noexcept;
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

ConfusionMatrix confusion_from_predictions(const std::vector<int>& predictions, const std::vector<int>& labels);

/// Percentages except auc (in [0,1]) and mse_loss. nullopt marks a metric
/// whose denominator is zero.
struct MetricReport {
  std::optional<double> acc;
  std::optional<double> sen;
  std::optional<double> spe;
  std::optional<double> precision;
  std::optional<double> fpr;
  std::optional<double> f1;
  std::optional<double> auc;
  std::optional<double> mse_loss;
};

/// ACC, SEN, SPE, precision, FPR and F1 from counts. Throws InvalidInput on
/// an empty matrix.
MetricReport compute_metrics(const ConfusionMatrix& cm);

/// Mean of (y - p)^2 with y in {0,1} and p the positive-class probability.
double mse_loss(const std::vector<double>& positive_scores, const std::vector<int>& labels);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;
};

struct RocResult {
  std::vector<RocPoint> points;  // starts at (0,0), ends at (1,1)
  double auc = 0.0;
};

/// Threshold sweep over unique scores (descending, ties grouped) and
/// trapezoid AUC. Throws InvalidInput unless both classes are present.
RocResult roc_auc(const std::vector<double>& scores, const std::vector<int>& labels);

}  // namespace chaoswave

#include "chaoswave/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "chaoswave/errors.hpp"

namespace chaoswave {

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& o) noexcept {
  tp += o.tp;
  fp += o.fp;
  tn += o.tn;
  fn += o.fn;
  return *this;
}

ConfusionMatrix confusion_from_predictions(const std::vector<int>& predictions, const std::vector<int>& labels) {
  if (predictions.size() != labels.size()) throw InvalidInput("confusion_from_predictions: length mismatch");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool pos = labels[i] == 1;
    const bool pred_pos = predictions[i] == 1;
    if (pos && pred_pos) ++cm.tp;
    else if (pos) ++cm.fn;
    else if (pred_pos) ++cm.fp;
    else ++cm.tn;
  }
  return cm;
}

namespace {

std::optional<double> percent(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

MetricReport compute_metrics(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw InvalidInput("compute_metrics: empty confusion matrix");
  MetricReport r;
  r.acc = percent(cm.tp + cm.tn, cm.total());
  r.sen = percent(cm.tp, cm.tp + cm.fn);
  r.spe = percent(cm.tn, cm.tn + cm.fp);
  r.precision = percent(cm.tp, cm.tp + cm.fp);
  r.fpr = percent(cm.fp, cm.fp + cm.tn);
  if (r.precision && r.sen && *r.precision + *r.sen > 0.0) {
    r.f1 = 2.0 * *r.precision * *r.sen / (*r.precision + *r.sen);
  }
  return r;
}

double mse_loss(const std::vector<double>& positive_scores, const std::vector<int>& labels) {
  if (positive_scores.size() != labels.size() || labels.empty()) throw InvalidInput("mse_loss: bad lengths");
  double s = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double e = (labels[i] == 1 ? 1.0 : 0.0) - positive_scores[i];
    s += e * e;
  }
  return s / static_cast<double>(labels.size());
}

RocResult roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) throw InvalidInput("roc_auc: length mismatch");
  const auto positives = static_cast<std::size_t>(std::ranges::count(labels, 1));
  const std::size_t negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0) throw InvalidInput("roc_auc: both classes must be present");
  if (!std::ranges::all_of(scores, [](double s) { return std::isfinite(s); })) {
    throw InvalidInput("roc_auc: scores must be finite");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocResult r;
  r.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double threshold = scores[order[i]];
    while (i < order.size() && scores[order[i]] == threshold) {
      (labels[order[i]] == 1 ? tp : fp) += 1;
      ++i;
    }
    RocPoint p{static_cast<double>(fp) / static_cast<double>(negatives),
               static_cast<double>(tp) / static_cast<double>(positives), threshold};
    const RocPoint& prev = r.points.back();
    r.auc += (p.fpr - prev.fpr) * (p.tpr + prev.tpr) / 2.0;
    r.points.push_back(p);
  }
  return r;
}

}  // namespace chaoswave

#include "chaoswave/cross_validation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "chaoswave/errors.hpp"
#include "chaoswave/seed.hpp"

namespace chaoswave {

using nlohmann::json;

std::vector<int> CrossValidationResult::all_predictions() const {
  std::vector<int> out;
  for (const auto& f : folds) out.insert(out.end(), f.predictions.begin(), f.predictions.end());
  return out;
}

std::vector<int> CrossValidationResult::all_labels() const {
  std::vector<int> out;
  for (const auto& f : folds) out.insert(out.end(), f.labels.begin(), f.labels.end());
  return out;
}

std::vector<double> CrossValidationResult::fold_accuracies() const {
  std::vector<double> out;
  for (const auto& f : folds) out.push_back(f.metrics.acc.value_or(0.0));
  return out;
}

namespace {

MetricSummary summarize(const std::vector<MetricReport>& reports, std::optional<double> MetricReport::*field) {
  std::vector<double> values;
  for (const auto& r : reports) {
    if (r.*field) values.push_back(*(r.*field));
  }
  MetricSummary s;
  if (values.empty()) return s;
  const MeanSd ms = mean_sd(values);
  s.mean = ms.mean;
  s.sd = ms.sd;
  return s;
}

LabeledDataset subset(const LabeledDataset& ds, const std::vector<std::size_t>& indices) {
  LabeledDataset out;
  out.items.reserve(indices.size());
  for (std::size_t i : indices) out.items.push_back(ds.items[i]);
  return out;
}

}  // namespace

AggregateReport aggregate_folds(const std::vector<MetricReport>& reports) {
  AggregateReport a;
  a.acc = summarize(reports, &MetricReport::acc);
  a.sen = summarize(reports, &MetricReport::sen);
  a.spe = summarize(reports, &MetricReport::spe);
  a.precision = summarize(reports, &MetricReport::precision);
  a.fpr = summarize(reports, &MetricReport::fpr);
  a.f1 = summarize(reports, &MetricReport::f1);
  a.auc = summarize(reports, &MetricReport::auc);
  a.mse_loss = summarize(reports, &MetricReport::mse_loss);
  return a;
}

FoldResult score_fold(Network& network, const LabeledDataset& validation, std::size_t fold,
                      std::size_t batch_size) {
  FoldResult fr;
  fr.fold = fold;
  const auto probs = predict_proba(network, validation, batch_size);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!std::isfinite(probs[i][1])) {
      throw NumericalDivergence("fold " + std::to_string(fold) + ": non-finite score for validation item",
                                i);
    }
    fr.scores.push_back(probs[i][1]);
    fr.predictions.push_back(probs[i][1] > probs[i][0] ? 1 : 0);
    fr.labels.push_back(static_cast<int>(validation.items[i].label));
  }
  fr.confusion = confusion_from_predictions(fr.predictions, fr.labels);
  fr.metrics = compute_metrics(fr.confusion);
  fr.metrics.mse_loss = mse_loss(fr.scores, fr.labels);
  if (std::ranges::count(fr.labels, 1) > 0 && std::ranges::count(fr.labels, 0) > 0) {
    fr.roc = roc_auc(fr.scores, fr.labels);
    fr.metrics.auc = fr.roc.auc;
  }
  return fr;
}

CrossValidationResult collect_folds(std::vector<FoldResult> folds) {
  std::ranges::sort(folds, {}, &FoldResult::fold);
  CrossValidationResult result;
  std::vector<MetricReport> reports;
  for (auto& f : folds) {
    result.pooled += f.confusion;
    reports.push_back(f.metrics);
    result.folds.push_back(std::move(f));
  }
  result.aggregate = aggregate_folds(reports);
  return result;
}

CrossValidationResult cross_validate(const LabeledDataset& dataset, const NetworkSpec& spec,
                                     const TrainConfig& config, const FoldPlan& plan,
                                     const CrossValidationOptions& options) {
  config.validate();
  for (const auto& item : dataset.items) plan.fold_of(item.source_id);

  std::vector<FoldResult> folds;
  for (std::size_t fold = 0; fold < plan.k; ++fold) {
    const FoldSplit split = split_fold(dataset, plan, fold, options.evaluate_augmented);
    if (split.train.empty() || split.validation.empty()) {
      throw InvalidInput("cross_validate: fold " + std::to_string(fold) + " has an empty train or validation split");
    }
    TrainConfig fold_config = config;
    fold_config.seed = item_seed(config.seed, fold);
    const LabeledDataset train_set = subset(dataset, split.train);
    const LabeledDataset val_set = subset(dataset, split.validation);

    auto run = [&]() {
      try {
        return train(train_set, spec, fold_config, &val_set);
      } catch (const NumericalDivergence& e) {
        throw NumericalDivergence(std::string("fold ") + std::to_string(fold) + ": " + e.what(), e.step());
      } catch (const std::exception& e) {
        throw std::runtime_error("fold " + std::to_string(fold) + ": " + e.what());
      }
    };
    TrainResult trained = run();

    FoldResult fr = score_fold(trained.network, val_set, fold, config.batch_size);
    fr.validation_indices = split.validation;
    fr.curves = std::move(trained.curves);
    fr.checkpoint = std::move(trained.checkpoint);
    folds.push_back(std::move(fr));
  }
  return collect_folds(std::move(folds));
}

LabeledDataset enhance_dataset(const LabeledDataset& dataset, const FilterBank& bank, std::size_t levels,
                               const ModulationConfig& config, const ChuaParams& params) {
  config.validate(levels);
  std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> sequences;
  LabeledDataset out;
  out.items.reserve(dataset.size());
  for (const auto& item : dataset.items) {
    const Matrix& img = item.image.pixels;
    WaveletPyramid pyramid = dwt2d_forward(img, bank, levels);
    const std::size_t needed = selected_detail_count(pyramid, config);
    auto [it, inserted] = sequences.try_emplace({img.rows(), img.cols()});
    if (inserted && needed > 0) {
      const auto traj = integrate(config.chaos_initial, params, config.chaos_step, config.chaos_burn_in, needed,
                                  config.chaos_stride);
      it->second = modulation_sequence(traj, needed, config.normalize_sequence);
    }
    if (needed > 0) pyramid = modulate_pyramid(pyramid, it->second, config);
    out.items.push_back({GrayImage{dwt2d_inverse(pyramid, bank), item.image.domain}, item.label, item.source_id,
                         item.augmented});
  }
  return out;
}

AblationReport run_ablation(const LabeledDataset& dataset, const NetworkSpec& spec, const TrainConfig& config,
                            const FoldPlan& plan, const ModulationConfig& modulation, std::size_t levels,
                            const ChuaParams& params, const CrossValidationOptions& options) {
  const FilterBank bank = default_cdf97();
  ModulationConfig baseline = modulation;
  baseline.scale = 0.0;

  AblationReport report;
  report.without_chaos =
      cross_validate(enhance_dataset(dataset, bank, levels, baseline, params), spec, config, plan, options);
  report.with_chaos =
      cross_validate(enhance_dataset(dataset, bank, levels, modulation, params), spec, config, plan, options);
  report.mcnemar = mcnemar_test(report.without_chaos.all_predictions(), report.with_chaos.all_predictions(),
                                report.with_chaos.all_labels());
  const auto acc_with = report.with_chaos.fold_accuracies();
  const auto acc_without = report.without_chaos.fold_accuracies();
  report.paired_t = paired_t_test(acc_with, acc_without);
  report.wilcoxon = wilcoxon_signed_rank(acc_with, acc_without);
  return report;
}

// ---- reporting -------------------------------------------------------------------

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json confusion_json(const ConfusionMatrix& cm) {
  return {{"tp", cm.tp}, {"fp", cm.fp}, {"tn", cm.tn}, {"fn", cm.fn}};
}

json metrics_json(const MetricReport& m) {
  return {{"acc", opt(m.acc)},   {"sen", opt(m.sen)}, {"spe", opt(m.spe)}, {"precision", opt(m.precision)},
          {"fpr", opt(m.fpr)},   {"f1", opt(m.f1)},   {"auc", opt(m.auc)}, {"mse_loss", opt(m.mse_loss)}};
}

json summary_json(const AggregateReport& a, std::optional<double> MetricSummary::*field) {
  return {{"acc", opt(a.acc.*field)},     {"sen", opt(a.sen.*field)},
          {"spe", opt(a.spe.*field)},     {"precision", opt(a.precision.*field)},
          {"fpr", opt(a.fpr.*field)},     {"f1", opt(a.f1.*field)},
          {"auc", opt(a.auc.*field)},     {"mse_loss", opt(a.mse_loss.*field)}};
}

json cv_json(const CrossValidationResult& r) {
  json folds = json::array();
  for (const auto& f : r.folds) {
    json roc = json::array();
    for (const auto& p : f.roc.points) roc.push_back({p.fpr, p.tpr});
    folds.push_back({{"fold", f.fold},
                     {"n_validation", f.labels.size()},
                     {"confusion", confusion_json(f.confusion)},
                     {"metrics", metrics_json(f.metrics)},
                     {"roc", roc}});
  }
  return {{"folds", folds},
          {"mean", summary_json(r.aggregate, &MetricSummary::mean)},
          {"sd", summary_json(r.aggregate, &MetricSummary::sd)},
          {"pooled_confusion", confusion_json(r.pooled)},
          {"pooled_metrics", r.pooled.total() ? metrics_json(compute_metrics(r.pooled)) : json(nullptr)}};
}

json paired_json(const PairedTestResult& t) {
  return {{"statistic", opt(t.statistic)},
          {"p_value", opt(t.p_value)},
          {"significant", t.significant()},
          {"note", t.note}};
}

std::string fmt(const std::optional<double>& v, int precision = 2) {
  if (!v) return "undefined";
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << *v;
  return os.str();
}

}  // namespace

std::string cross_validation_json(const CrossValidationResult& result, int indent) {
  return cv_json(result).dump(indent);
}

std::string ablation_json(const AblationReport& report, int indent) {
  json j;
  j["arms"] = {{"without_chaos", cv_json(report.without_chaos)}, {"with_chaos", cv_json(report.with_chaos)}};
  j["mcnemar"] = {{"b", report.mcnemar.b},
                  {"c", report.mcnemar.c},
                  {"statistic", opt(report.mcnemar.statistic)},
                  {"p_value", opt(report.mcnemar.p_value)},
                  {"method", report.mcnemar.exact ? "exact_binomial" : "chi_square_continuity"},
                  {"significant", report.mcnemar.significant()}};
  j["paired_t_test"] = paired_json(report.paired_t);
  j["wilcoxon"] = paired_json(report.wilcoxon);
  return j.dump(indent);
}

void write_cross_validation_csv(const std::filesystem::path& path, const CrossValidationResult& result) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out.precision(17);
  const auto cell = [](const std::optional<double>& v) {
    std::ostringstream os;
    os.precision(17);
    if (v) os << *v;
    return os.str();
  };
  out << "fold,tp,fp,tn,fn,acc,sen,spe,precision,fpr,f1,auc,mse_loss\n";
  const auto row = [&](const std::string& name, const ConfusionMatrix& cm, const MetricReport& m) {
    out << name << ',' << cm.tp << ',' << cm.fp << ',' << cm.tn << ',' << cm.fn << ',' << cell(m.acc) << ','
        << cell(m.sen) << ',' << cell(m.spe) << ',' << cell(m.precision) << ',' << cell(m.fpr) << ','
        << cell(m.f1) << ',' << cell(m.auc) << ',' << cell(m.mse_loss) << '\n';
  };
  for (const auto& f : result.folds) row(std::to_string(f.fold), f.confusion, f.metrics);
  const auto& a = result.aggregate;
  out << "mean,,,,," << cell(a.acc.mean) << ',' << cell(a.sen.mean) << ',' << cell(a.spe.mean) << ','
      << cell(a.precision.mean) << ',' << cell(a.fpr.mean) << ',' << cell(a.f1.mean) << ',' << cell(a.auc.mean)
      << ',' << cell(a.mse_loss.mean) << '\n';
  out << "sd,,,,," << cell(a.acc.sd) << ',' << cell(a.sen.sd) << ',' << cell(a.spe.sd) << ','
      << cell(a.precision.sd) << ',' << cell(a.fpr.sd) << ',' << cell(a.f1.sd) << ',' << cell(a.auc.sd) << ','
      << cell(a.mse_loss.sd) << '\n';
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out << text;
  if (text.empty() || text.back() != '\n') out << '\n';
}

void print_summary(std::ostream& os, const CrossValidationResult& result, const std::string& title) {
  os << title << '\n';
  os << "  fold     ACC     SEN     SPE       P     FPR      F1     AUC\n";
  for (const auto& f : result.folds) {
    const auto& m = f.metrics;
    os << "  " << std::setw(4) << f.fold << std::setw(8) << fmt(m.acc) << std::setw(8) << fmt(m.sen)
       << std::setw(8) << fmt(m.spe) << std::setw(8) << fmt(m.precision) << std::setw(8) << fmt(m.fpr)
       << std::setw(8) << fmt(m.f1) << std::setw(8) << fmt(m.auc, 4) << '\n';
  }
  const auto& a = result.aggregate;
  os << "  mean" << std::setw(8) << fmt(a.acc.mean) << std::setw(8) << fmt(a.sen.mean) << std::setw(8)
     << fmt(a.spe.mean) << std::setw(8) << fmt(a.precision.mean) << std::setw(8) << fmt(a.fpr.mean) << std::setw(8)
     << fmt(a.f1.mean) << std::setw(8) << fmt(a.auc.mean, 4) << '\n';
  os << "    sd" << std::setw(8) << fmt(a.acc.sd) << std::setw(8) << fmt(a.sen.sd) << std::setw(8) << fmt(a.spe.sd)
     << std::setw(8) << fmt(a.precision.sd) << std::setw(8) << fmt(a.fpr.sd) << std::setw(8) << fmt(a.f1.sd)
     << std::setw(8) << fmt(a.auc.sd, 4) << '\n';
}

void print_ablation_summary(std::ostream& os, const AblationReport& report) {
  print_summary(os, report.without_chaos, "CNN + CDF9/7 (no chaotic modulation)");
  print_summary(os, report.with_chaos, "CNN + CDF9/7 + chaotic modulation");
  os << "McNemar: b=" << report.mcnemar.b << " c=" << report.mcnemar.c
     << " statistic=" << fmt(report.mcnemar.statistic, 4) << " p=" << fmt(report.mcnemar.p_value, 4)
     << (report.mcnemar.exact ? " (exact)" : " (chi-square)") << '\n';
  os << "Paired t-test (fold accuracy): t=" << fmt(report.paired_t.statistic, 4)
     << " p=" << fmt(report.paired_t.p_value, 4)
     << (report.paired_t.note.empty() ? "" : " [" + report.paired_t.note + "]") << '\n';
  os << "Wilcoxon signed-rank (fold accuracy): W=" << fmt(report.wilcoxon.statistic, 1)
     << " p=" << fmt(report.wilcoxon.p_value, 4)
     << (report.wilcoxon.note.empty() ? "" : " [" + report.wilcoxon.note + "]") << '\n';
}

}  // namespace chaoswave

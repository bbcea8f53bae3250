#include "pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "chaoswave/augment.hpp"
#include "chaoswave/errors.hpp"
#include "chaoswave/folds.hpp"
#include "chaoswave/imageio.hpp"
#include "chaoswave/wavelet.hpp"

namespace chaoswave::cli {

namespace fs = std::filesystem;

namespace {

std::string image_name(std::size_t index, const char* ext) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%05zu.%s", index, ext);
  return buf;
}

// Stage outputs are rewritten from scratch so reruns are idempotent.
void reset_stage_dir(const fs::path& dir) {
  fs::remove_all(dir);
  fs::create_directories(dir / "images");
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char ch) { return !std::isspace(ch); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

fs::path stage_manifest(const PipelineConfig& config, const std::string& stage) {
  const WorkLayout layout = config.layout();
  const fs::path dir = stage == "enhanced" ? layout.enhanced() : layout.preprocessed();
  return dir / "manifest.csv";
}

LabeledDataset load_stage(const PipelineConfig& config, const fs::path& manifest) {
  if (!fs::exists(manifest)) {
    throw InvalidInput("manifest " + manifest.string() + " not found; run the previous stage first");
  }
  LabeledDataset ds = load_manifest_dataset(manifest);
  if (ds.items.empty()) throw InvalidInput("manifest " + manifest.string() + " is empty");
  std::vector<std::string> errors;
  const auto entries = read_manifest(manifest);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& img = ds.items[i].image;
    if (img.height() != config.image_size || img.width() != config.image_size) {
      errors.push_back(entries[i].path + ": shape " + std::to_string(img.height()) + "x" +
                       std::to_string(img.width()) + " differs from image_size " +
                       std::to_string(config.image_size));
    }
  }
  if (!errors.empty()) throw BatchError(std::to_string(errors.size()) + " image(s) have the wrong shape", errors);
  return ds;
}

// Training input. The enhanced stage is recomputed in memory from the
// preprocessed images so the network sees unclamped real-valued pixels; the
// exported enhanced PGMs are 8-bit artifacts.
LabeledDataset training_dataset(const PipelineConfig& config, const fs::path& manifest) {
  if (!manifest.empty()) return load_stage(config, manifest);
  const LabeledDataset pre = load_stage(config, stage_manifest(config, "preprocessed"));
  if (config.train_input == "preprocessed") return pre;
  return enhance_dataset(pre, default_cdf97(), config.levels, config.modulation, config.chua);
}

std::string dataset_label(const PipelineConfig& config, const fs::path& manifest) {
  return manifest.empty() ? config.train_input : manifest.string();
}

void write_dataset(const fs::path& dir, const LabeledDataset& ds) {
  std::vector<ManifestEntry> entries;
  entries.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& item = ds.items[i];
    const std::string rel = "images/" + image_name(i, "pgm");
    save_pgm(dir / rel, item.image);
    entries.push_back({rel, item.label, item.source_id, item.augmented});
  }
  write_manifest(dir / "manifest.csv", entries);
}

void write_report_files(const fs::path& dir, const std::string& stem, const CrossValidationResult& r,
                        const std::string& title) {
  fs::create_directories(dir);
  write_text(dir / (stem + ".json"), cross_validation_json(r));
  write_cross_validation_csv(dir / (stem + ".csv"), r);
  std::ostringstream summary;
  print_summary(summary, r, title);
  write_text(dir / (stem + "_summary.txt"), summary.str());
}

fs::path fold_checkpoint(const PipelineConfig& config, std::size_t fold) {
  return config.layout().models() / ("fold" + std::to_string(fold) + ".ckpt");
}

}  // namespace

fs::path cmd_preprocess(const PipelineConfig& config, std::ostream& log) {
  config.validate();
  if (config.input_dir.empty()) throw InvalidInput("paths.input_dir is required for preprocess");

  const fs::path labels_path = config.input_dir / "labels.csv";
  if (!fs::is_directory(config.input_dir)) throw InvalidInput("input dir " + config.input_dir.string() + " not found");
  if (!fs::exists(labels_path)) throw InvalidInput("missing labels file " + labels_path.string());

  std::ifstream in(labels_path);
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("labels file " + labels_path.string() + " is empty");
  const auto header = split_csv(line);
  if (header.size() < 2 || header[0] != "file" || header[1] != "label") {
    throw InvalidInput("labels file header must be 'file,label[,source_id]'");
  }

  std::vector<std::string> errors;
  std::vector<std::string> listed;
  LabeledDataset sources;
  for (std::size_t row = 2; std::getline(in, line); ++row) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    const std::string where = labels_path.filename().string() + ":" + std::to_string(row);
    if (cells.size() < 2 || cells.size() > 3 || cells[0].empty()) {
      errors.push_back(where + ": expected file,label[,source_id]");
      continue;
    }
    listed.push_back(cells[0]);
    try {
      const Label label = parse_label(cells[1]);
      const fs::path file = config.input_dir / cells[0];
      GrayImage img = load_pgm(file);
      img = normalize(resize_nearest(img, config.image_size, config.image_size));
      const std::string source = cells.size() == 3 && !cells[2].empty() ? cells[2] : fs::path(cells[0]).stem().string();
      sources.items.push_back({std::move(img), label, source, false});
    } catch (const FormatError& e) {
      errors.push_back(cells[0] + ": " + e.what() + " (byte " + std::to_string(e.offset()) + ")");
    } catch (const std::exception& e) {
      errors.push_back(cells[0] + ": " + e.what());
    }
  }
  for (const auto& entry : fs::directory_iterator(config.input_dir)) {
    if (entry.path().extension() != ".pgm") continue;
    const std::string name = entry.path().filename().string();
    if (std::find(listed.begin(), listed.end(), name) == listed.end()) errors.push_back(name + ": no label");
  }
  std::sort(errors.begin(), errors.end());
  if (!errors.empty()) throw BatchError(std::to_string(errors.size()) + " input file(s) failed", errors);
  if (sources.items.empty()) throw InvalidInput("no labelled images in " + config.input_dir.string());

  const LabeledDataset augmented = augment(sources, config.augmentation_plan());
  const fs::path dir = config.layout().preprocessed();
  reset_stage_dir(dir);
  write_dataset(dir, augmented);
  const auto [benign, malignant] = augmented.class_counts();
  log << "preprocess: " << sources.size() << " sources -> " << augmented.size() << " items (" << benign
      << " benign, " << malignant << " malignant)\n";
  return dir / "manifest.csv";
}

fs::path cmd_chaos_sim(const PipelineConfig& config, std::ostream& log) {
  config.validate();
  const auto& m = config.modulation;
  const double per_sample = m.chaos_step * static_cast<double>(m.chaos_stride);
  const auto n = static_cast<std::size_t>(std::llround(config.chaos_sim.duration / per_sample));
  if (n == 0) throw InvalidInput("chaos_sim.duration is shorter than one sample");
  const fs::path out = config.chaos_sim.output.empty() ? config.reports_dir() / "chaos_trajectory.csv"
                                                      : fs::path(config.chaos_sim.output);

  const ChaosTrajectory traj = integrate(m.chaos_initial, config.chua, m.chaos_step, m.chaos_burn_in, n, m.chaos_stride);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  std::ofstream os(out, std::ios::binary);
  if (!os) throw InvalidInput("cannot write " + out.string());
  os.precision(17);
  os << "t,z1,z2,z3\n";
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    const auto& s = traj.samples[i];
    os << traj.time_of(i) << ',' << s.z1 << ',' << s.z2 << ',' << s.z3 << '\n';
  }
  log << "chaos-sim: " << traj.samples.size() << " samples -> " << out.string() << '\n';
  return out;
}

fs::path cmd_enhance(const PipelineConfig& config, std::ostream& log) {
  config.validate();
  const LabeledDataset input = load_stage(config, stage_manifest(config, "preprocessed"));
  const LabeledDataset enhanced =
      enhance_dataset(input, default_cdf97(), config.levels, config.modulation, config.chua);

  const fs::path dir = config.layout().enhanced();
  reset_stage_dir(dir);
  write_dataset(dir, enhanced);
  if (config.difference_maps) {
    fs::create_directories(dir / "diff");
    for (std::size_t i = 0; i < input.size(); ++i) {
      Matrix d = difference_map(input.items[i].image.pixels, enhanced.items[i].image.pixels);
      double peak = 0.0;
      for (double& v : d.data()) {
        v = std::abs(v);
        peak = std::max(peak, v);
      }
      if (peak > 0.0) {
        for (double& v : d.data()) v /= peak;
      }
      save_pgm(dir / "diff" / image_name(i, "pgm"), GrayImage{std::move(d), PixelDomain::Unit});
    }
  }
  log << "enhance: " << enhanced.size() << " images (levels " << config.levels << ", scale " << config.modulation.scale
      << ")\n";
  return dir / "manifest.csv";
}

CrossValidationResult cmd_train(const PipelineConfig& config, std::ostream& log, const fs::path& manifest) {
  config.validate();
  const LabeledDataset ds = training_dataset(config, manifest);
  const NetworkSpec spec = config.network_spec();
  const FoldPlan plan = make_folds(dataset_sources(ds), config.folds, config.seed);

  CrossValidationResult result =
      cross_validate(ds, spec, config.train_config(), plan, {.evaluate_augmented = config.evaluate_augmented});

  fs::create_directories(config.layout().models());
  const fs::path reports = config.reports_dir();
  fs::create_directories(reports);
  for (const auto& f : result.folds) {
    save_checkpoint(fold_checkpoint(config, f.fold), f.checkpoint);
    write_curves_csv(reports / ("curves_fold" + std::to_string(f.fold) + ".csv"), f.curves);
  }
  write_report_files(reports, "cv", result, "Cross-validation (" + dataset_label(config, manifest) + ")");
  print_summary(log, result, "Cross-validation");
  return result;
}

CrossValidationResult cmd_evaluate(const PipelineConfig& config, std::ostream& log, const fs::path& checkpoint,
                                   const fs::path& manifest) {
  config.validate();
  const NetworkSpec spec = config.network_spec();
  if (!checkpoint.empty() && !fs::exists(checkpoint)) {
    throw InvalidInput("checkpoint " + checkpoint.string() + " not found");
  }
  if (checkpoint.empty()) {
    for (std::size_t f = 0; f < config.folds; ++f) {
      if (!fs::exists(fold_checkpoint(config, f))) {
        throw InvalidInput("checkpoint " + fold_checkpoint(config, f).string() + " not found; run train first");
      }
    }
  }
  const LabeledDataset ds = training_dataset(config, manifest);

  std::vector<FoldResult> folds;
  if (!checkpoint.empty()) {
    LabeledDataset eval_set;
    for (const auto& item : ds.items) {
      if (config.evaluate_augmented || !item.augmented) eval_set.items.push_back(item);
    }
    Network net = restore_network(spec, load_checkpoint(checkpoint));
    folds.push_back(score_fold(net, eval_set, 0, config.train.batch_size));
  } else {
    const FoldPlan plan = make_folds(dataset_sources(ds), config.folds, config.seed);
    for (std::size_t f = 0; f < config.folds; ++f) {
      const FoldSplit split = split_fold(ds, plan, f, config.evaluate_augmented);
      LabeledDataset val;
      for (std::size_t i : split.validation) val.items.push_back(ds.items[i]);
      Network net = restore_network(spec, load_checkpoint(fold_checkpoint(config, f)));
      FoldResult fr = score_fold(net, val, f, config.train.batch_size);
      fr.validation_indices = split.validation;
      folds.push_back(std::move(fr));
    }
  }
  CrossValidationResult result = collect_folds(std::move(folds));
  write_report_files(config.reports_dir(), "evaluation", result, "Evaluation");
  print_summary(log, result, "Evaluation");
  return result;
}

AblationReport cmd_ablate(const PipelineConfig& config, std::ostream& log) {
  config.validate();
  const LabeledDataset ds = load_stage(config, stage_manifest(config, "preprocessed"));
  const FoldPlan plan = make_folds(dataset_sources(ds), config.folds, config.seed);
  AblationReport report = run_ablation(ds, config.network_spec(), config.train_config(), plan, config.modulation,
                                       config.levels, config.chua, {.evaluate_augmented = config.evaluate_augmented});

  const fs::path reports = config.reports_dir();
  fs::create_directories(reports);
  write_text(reports / "ablation.json", ablation_json(report));
  write_cross_validation_csv(reports / "ablation_without_chaos.csv", report.without_chaos);
  write_cross_validation_csv(reports / "ablation_with_chaos.csv", report.with_chaos);
  std::ostringstream summary;
  print_ablation_summary(summary, report);
  write_text(reports / "ablation_summary.txt", summary.str());
  log << summary.str();
  return report;
}

}  // namespace chaoswave::cli

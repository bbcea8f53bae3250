#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "chaoswave/errors.hpp"
#include "chaoswave/imageio.hpp"
#include "cli.hpp"
#include "config.hpp"
#include "json.hpp"
#include "synthetic.hpp"
#include "../unit/test_util.hpp"

namespace chaoswave::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> csv_lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

struct Outcome {
  int code;
  std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

// Small but complete pipeline: 32x32 images, 2 wavelet levels, 2 folds.
class Pipeline : public ::testing::Test {
 protected:
  void SetUp() override {
    input_ = dir_.path() / "input";
    work_ = dir_.path() / "work";
    testing::write_texture_input_dir(input_, 6, 48, 5);
    config_ = dir_.path() / "config.json";
    json cfg = {{"seed", 7},
                {"paths", {{"input_dir", input_.string()}, {"work_dir", work_.string()}}},
                {"preprocess", {{"image_size", 32}}},
                {"augment", {{"target_count", 48}}},
                {"wavelet", {{"levels", 2}}},
                {"network", {{"channels", {2, 4}}}},
                {"train", {{"epochs", 2}, {"batch_size", 16}, {"init_std", 0.1}}},
                {"folds", {{"k", 2}}}};
    std::ofstream(config_) << cfg.dump(2);
  }

  Outcome cmd(std::vector<std::string> args) {
    args.insert(args.begin(), {"-c", config_.string()});
    return invoke(args);
  }

  fs::path v1() const { return work_ / "v1"; }

  testing::TempDir dir_{"cli"};
  fs::path input_, work_, config_;
};

TEST(Config, DefaultsRoundTripThroughJson) {
  const PipelineConfig d = PipelineConfig::defaults();
  const PipelineConfig back = PipelineConfig::from_json(d.to_json());
  EXPECT_EQ(back.to_json(), d.to_json());
  EXPECT_EQ(d.levels, 6u);
  EXPECT_EQ(d.image_size, 512u);
  EXPECT_NO_THROW(d.validate());
}

TEST(Config, OverridesAndUnknownKeys) {
  json doc = PipelineConfig::defaults().to_json();
  apply_override(doc, "train.epochs=3");
  apply_override(doc, "train.input=preprocessed");
  apply_override(doc, "modulation.levels=[1,2]");
  const PipelineConfig c = PipelineConfig::from_json(doc);
  EXPECT_EQ(c.train.max_epochs, 3u);
  EXPECT_EQ(c.train_input, "preprocessed");
  EXPECT_EQ(c.modulation.level_mask, (std::set<std::size_t>{1, 2}));

  EXPECT_THROW(apply_override(doc, "novalue"), InvalidInput);
  json bad = PipelineConfig::defaults().to_json();
  bad["train"]["epoch"] = 3;
  EXPECT_THROW(PipelineConfig::from_json(bad), InvalidInput);
  bad = PipelineConfig::defaults().to_json();
  bad["train"]["epochs"] = "three";
  EXPECT_THROW(PipelineConfig::from_json(bad), InvalidInput);
}

TEST(Config, ValidationHappensBeforeFilesystem) {
  testing::TempDir dir("cfg");
  const fs::path work = dir.path() / "never";
  const Outcome r = invoke({"-w", work.string(), "--set", "wavelet.levels=10", "--set", "preprocess.image_size=100",
                        "preprocess", "-i", dir.path().string()});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("divisible"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(work));
}

TEST(Config, FileEnvAndFlagPrecedence) {
  testing::TempDir dir("prec");
  const fs::path file = dir.path() / "c.json";
  std::ofstream(file) << R"({"paths": {"work_dir": "from_file"}, "seed": 3})";
  EXPECT_EQ(load_config(file, {}).work_dir, "from_file");
  ::setenv("CHAOSWAVE_WORK_DIR", "from_env", 1);
  EXPECT_EQ(load_config(file, {}).work_dir, "from_env");
  EXPECT_EQ(load_config(file, {"paths.work_dir=from_flag"}).work_dir, "from_flag");
  ::unsetenv("CHAOSWAVE_WORK_DIR");
  EXPECT_EQ(load_config(file, {}).seed, 3u);
  EXPECT_THROW(load_config(dir.path() / "missing.json", {}), InvalidInput);
}

TEST(Cli, UnknownSubcommandFails) {
  EXPECT_NE(invoke({"frobnicate"}).code, 0);
  EXPECT_NE(invoke({}).code, 0);
}

TEST_F(Pipeline, PreprocessCountsAndIdempotence) {
  const Outcome r = cmd({"--set", "augment.target_count=2048", "preprocess"});
  ASSERT_EQ(r.code, 0) << r.err;
  const fs::path manifest = v1() / "preprocessed" / "manifest.csv";
  const auto entries = read_manifest(manifest);
  ASSERT_EQ(entries.size(), 2048u);
  std::size_t malignant = 0;
  std::set<std::string> sources;
  for (const auto& e : entries) {
    malignant += e.label == Label::Malignant;
    sources.insert(e.source_id);
  }
  EXPECT_EQ(malignant, 1024u);
  EXPECT_EQ(sources.size(), 12u);
  const GrayImage first = load_pgm(v1() / "preprocessed" / entries.front().path);
  EXPECT_EQ(first.height(), 32u);

  const std::string bytes = slurp(manifest);
  ASSERT_EQ(cmd({"--set", "augment.target_count=2048", "preprocess"}).code, 0);
  EXPECT_EQ(slurp(manifest), bytes);
}

TEST_F(Pipeline, PreprocessReportsBadInputs) {
  const fs::path empty = dir_.path() / "empty";
  fs::create_directories(empty);
  Outcome r = cmd({"preprocess", "-i", empty.string()});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("error"), std::string::npos);

  std::ofstream(input_ / "broken.pgm") << "P2\n1 1\n255\n0\n";
  std::ofstream(input_ / "labels.csv", std::ios::app) << "broken.pgm,benign\n";
  std::ofstream(input_ / "labels.csv", std::ios::app) << "absent.pgm,malignant\n";
  r = cmd({"preprocess"});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("broken.pgm"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("absent.pgm"), std::string::npos) << r.err;
}

TEST_F(Pipeline, ChaosSim) {
  const fs::path csv = dir_.path() / "traj.csv";
  Outcome r = cmd({"chaos-sim", "-o", csv.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto lines = csv_lines(csv);
  ASSERT_EQ(lines.front(), "t,z1,z2,z3");
  EXPECT_EQ(lines.size(), 1u + 20000u);  // 100 time units at h = 0.005
  const ChuaParams p;
  std::set<long> wells;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::istringstream row(lines[i]);
    std::string t, z1;
    std::getline(row, t, ',');
    std::getline(row, z1, ',');
    const double z = std::stod(z1);
    if (std::abs(z) < p.breakpoint()) wells.insert(static_cast<long>(std::floor(z / (2 * p.a))));
  }
  EXPECT_GE(wells.size(), 6u);

  r = cmd({"--set", "chaos.initial=[0,0,0]", "chaos-sim", "--duration", "5", "-o", csv.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  lines = csv_lines(csv);
  for (std::size_t i = 1; i < lines.size(); ++i) EXPECT_EQ(lines[i].substr(lines[i].find(',')), ",0,0,0");

  r = cmd({"chaos-sim", "--step", "0.2", "-o", csv.string()});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("step"), std::string::npos) << r.err;
}

TEST_F(Pipeline, EnhanceConservesAndIsDeterministic) {
  ASSERT_EQ(cmd({"preprocess"}).code, 0);
  ASSERT_EQ(cmd({"enhance", "--difference-maps"}).code, 0);
  const auto pre = read_manifest(v1() / "preprocessed" / "manifest.csv");
  const auto enh = read_manifest(v1() / "enhanced" / "manifest.csv");
  ASSERT_EQ(enh.size(), pre.size());
  for (std::size_t i = 0; i < pre.size(); ++i) {
    EXPECT_EQ(enh[i].label, pre[i].label);
    EXPECT_EQ(enh[i].source_id, pre[i].source_id);
  }
  EXPECT_TRUE(fs::exists(v1() / "enhanced" / "diff"));

  std::vector<std::string> first;
  for (const auto& e : enh) first.push_back(slurp(v1() / "enhanced" / e.path));
  ASSERT_EQ(cmd({"enhance"}).code, 0);
  for (std::size_t i = 0; i < enh.size(); ++i) EXPECT_EQ(slurp(v1() / "enhanced" / enh[i].path), first[i]);

  ASSERT_EQ(cmd({"--set", "modulation.scale=0", "enhance"}).code, 0);
  for (std::size_t i = 0; i < pre.size(); ++i) {
    const GrayImage a = load_pgm(v1() / "preprocessed" / pre[i].path);
    const GrayImage b = load_pgm(v1() / "enhanced" / enh[i].path);
    ASSERT_EQ(a.pixels.rows(), b.pixels.rows());
    for (std::size_t k = 0; k < a.pixels.data().size(); ++k) {
      EXPECT_LE(std::abs(a.pixels.data()[k] - b.pixels.data()[k]), 1.0);
    }
  }
}

TEST_F(Pipeline, TrainEvaluateAblate) {
  ASSERT_EQ(cmd({"preprocess"}).code, 0);
  Outcome r = cmd({"train"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (int f = 0; f < 2; ++f) {
    EXPECT_TRUE(fs::exists(v1() / "models" / ("fold" + std::to_string(f) + ".ckpt")));
    const auto curve = csv_lines(v1() / "reports" / ("curves_fold" + std::to_string(f) + ".csv"));
    EXPECT_GT(curve.size(), 1u);
  }
  for (const char* name : {"cv.json", "cv.csv", "cv_summary.txt"}) EXPECT_TRUE(fs::exists(v1() / "reports" / name));

  r = cmd({"evaluate"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json eval = json::parse(slurp(v1() / "reports" / "evaluation.json"));
  const json cv = json::parse(slurp(v1() / "reports" / "cv.json"));
  EXPECT_EQ(eval["pooled_confusion"], cv["pooled_confusion"]);

  r = cmd({"evaluate", "--checkpoint", (v1() / "models" / "fold0.ckpt").string()});
  EXPECT_EQ(r.code, 0) << r.err;

  r = cmd({"evaluate", "--checkpoint", (v1() / "models" / "missing.ckpt").string()});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("missing.ckpt"), std::string::npos) << r.err;

  r = cmd({"ablate"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json ab = json::parse(slurp(v1() / "reports" / "ablation.json"));
  EXPECT_EQ(ab["arms"]["without_chaos"]["folds"].size(), 2u);
  EXPECT_EQ(ab["arms"]["with_chaos"]["folds"].size(), 2u);
  for (const char* key : {"b", "c", "statistic", "p_value", "method", "significant"}) {
    EXPECT_TRUE(ab["mcnemar"].contains(key)) << key;
  }
  EXPECT_TRUE(ab.contains("paired_t_test"));
  EXPECT_TRUE(ab.contains("wilcoxon"));
}

TEST_F(Pipeline, EvaluateWithoutTrainingFails) {
  ASSERT_EQ(cmd({"preprocess"}).code, 0);
  const Outcome r = cmd({"evaluate"});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("not found"), std::string::npos) << r.err;
}

}  // namespace
}  // namespace chaoswave::cli

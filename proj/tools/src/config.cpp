#include "config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "chaoswave/errors.hpp"
#include "chaoswave/seed.hpp"

namespace chaoswave::cli {

using nlohmann::json;

namespace {

constexpr std::pair<AugOp, const char*> kOpNames[] = {
    {AugOp::HorizontalFlip, "hflip"},
    {AugOp::VerticalFlip, "vflip"},
    {AugOp::Rotate90, "rotate90"},
    {AugOp::Brightness, "brightness"},
    {AugOp::VerticalScale, "vertical_scale"},
};

std::string op_name(AugOp op) {
  for (const auto& [o, name] : kOpNames) {
    if (o == op) return name;
  }
  return "?";
}

AugOp parse_op(const std::string& name) {
  for (const auto& [o, n] : kOpNames) {
    if (name == n) return o;
  }
  throw InvalidInput("unknown augmentation op '" + name + "'");
}

// Rejects keys the default document does not know, so typos fail loudly.
void check_keys(const json& given, const json& known, const std::string& prefix) {
  for (auto it = given.begin(); it != given.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!known.contains(it.key())) throw InvalidInput("unknown config key '" + key + "'");
    const json& k = known.at(it.key());
    if (k.is_object()) {
      if (!it->is_object()) throw InvalidInput("config key '" + key + "' must be an object");
      check_keys(*it, k, key);
    }
  }
}

std::uint64_t as_uint(const json& v, const char* key) {
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    throw InvalidInput(std::string("config key '") + key + "' must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

double as_double(const json& v, const char* key) {
  if (!v.is_number()) throw InvalidInput(std::string("config key '") + key + "' must be a number");
  return v.get<double>();
}

bool as_bool(const json& v, const char* key) {
  if (!v.is_boolean()) throw InvalidInput(std::string("config key '") + key + "' must be true or false");
  return v.get<bool>();
}

std::string as_string(const json& v, const char* key) {
  if (!v.is_string()) throw InvalidInput(std::string("config key '") + key + "' must be a string");
  return v.get<std::string>();
}

template <class F>
void read(const json& doc, const char* section, const char* key, F&& assign) {
  if (!doc.contains(section)) return;
  const json& s = doc.at(section);
  if (!s.contains(key)) return;
  const std::string full = std::string(section) + "." + key;
  assign(s.at(key), full.c_str());
}

}  // namespace

json PipelineConfig::to_json() const {
  json ops = json::array();
  for (AugOp op : augmentation.ops) ops.push_back(op_name(op));
  json mask = json::array();
  for (std::size_t l : modulation.level_mask) mask.push_back(l);
  return {
      {"seed", seed},
      {"paths", {{"input_dir", input_dir.string()}, {"work_dir", work_dir.string()}, {"output_dir", output_dir.string()}}},
      {"preprocess", {{"image_size", image_size}}},
      {"augment",
       {{"target_count", augmentation.target_count},
        {"ops", ops},
        {"brightness_min", augmentation.brightness_min},
        {"brightness_max", augmentation.brightness_max},
        {"vertical_scale_factor", augmentation.vertical_scale_factor}}},
      {"wavelet", {{"levels", levels}}},
      {"modulation",
       {{"scale", modulation.scale},
        {"levels", mask},
        {"normalize", modulation.normalize_sequence},
        {"difference_maps", difference_maps}}},
      {"chaos",
       {{"alpha", chua.alpha},
        {"beta", chua.beta},
        {"a", chua.a},
        {"b", chua.b},
        {"c", chua.c},
        {"d", chua.d},
        {"step", modulation.chaos_step},
        {"burn_in", modulation.chaos_burn_in},
        {"stride", modulation.chaos_stride},
        {"initial", {modulation.chaos_initial.z1, modulation.chaos_initial.z2, modulation.chaos_initial.z3}}}},
      {"chaos_sim", {{"duration", chaos_sim.duration}, {"output", chaos_sim.output}}},
      {"network", {{"channels", channels}}},
      {"train",
       {{"learning_rate", train.learning_rate},
        {"momentum", train.momentum},
        {"batch_size", train.batch_size},
        {"epochs", train.max_epochs},
        {"class_weights", train.class_weights},
        {"validation_frequency", train.validation_frequency},
        {"lr_drop_factor", train.lr_drop_factor},
        {"init_std", train.init_std},
        {"input", train_input}}},
      {"folds", {{"k", folds}, {"evaluate_augmented", evaluate_augmented}}},
  };
}

PipelineConfig PipelineConfig::from_json(const json& doc) {
  if (!doc.is_object()) throw InvalidInput("config must be a JSON object");
  PipelineConfig c;
  check_keys(doc, c.to_json(), "");

  if (doc.contains("seed")) c.seed = as_uint(doc.at("seed"), "seed");
  read(doc, "paths", "input_dir", [&](const json& v, const char* k) { c.input_dir = as_string(v, k); });
  read(doc, "paths", "work_dir", [&](const json& v, const char* k) { c.work_dir = as_string(v, k); });
  read(doc, "paths", "output_dir", [&](const json& v, const char* k) { c.output_dir = as_string(v, k); });
  read(doc, "preprocess", "image_size", [&](const json& v, const char* k) { c.image_size = as_uint(v, k); });

  read(doc, "augment", "target_count", [&](const json& v, const char* k) { c.augmentation.target_count = as_uint(v, k); });
  read(doc, "augment", "ops", [&](const json& v, const char* k) {
    if (!v.is_array()) throw InvalidInput(std::string("config key '") + k + "' must be an array");
    c.augmentation.ops.clear();
    for (const auto& e : v) c.augmentation.ops.push_back(parse_op(as_string(e, k)));
  });
  read(doc, "augment", "brightness_min", [&](const json& v, const char* k) { c.augmentation.brightness_min = as_double(v, k); });
  read(doc, "augment", "brightness_max", [&](const json& v, const char* k) { c.augmentation.brightness_max = as_double(v, k); });
  read(doc, "augment", "vertical_scale_factor",
       [&](const json& v, const char* k) { c.augmentation.vertical_scale_factor = as_double(v, k); });

  read(doc, "wavelet", "levels", [&](const json& v, const char* k) { c.levels = as_uint(v, k); });
  read(doc, "modulation", "scale", [&](const json& v, const char* k) { c.modulation.scale = as_double(v, k); });
  read(doc, "modulation", "levels", [&](const json& v, const char* k) {
    if (!v.is_array()) throw InvalidInput(std::string("config key '") + k + "' must be an array");
    c.modulation.level_mask.clear();
    for (const auto& e : v) c.modulation.level_mask.insert(as_uint(e, k));
  });
  read(doc, "modulation", "normalize", [&](const json& v, const char* k) { c.modulation.normalize_sequence = as_bool(v, k); });
  read(doc, "modulation", "difference_maps", [&](const json& v, const char* k) { c.difference_maps = as_bool(v, k); });

  read(doc, "chaos", "alpha", [&](const json& v, const char* k) { c.chua.alpha = as_double(v, k); });
  read(doc, "chaos", "beta", [&](const json& v, const char* k) { c.chua.beta = as_double(v, k); });
  read(doc, "chaos", "a", [&](const json& v, const char* k) { c.chua.a = as_double(v, k); });
  read(doc, "chaos", "b", [&](const json& v, const char* k) { c.chua.b = as_double(v, k); });
  read(doc, "chaos", "c", [&](const json& v, const char* k) { c.chua.c = as_double(v, k); });
  read(doc, "chaos", "d", [&](const json& v, const char* k) { c.chua.d = as_double(v, k); });
  read(doc, "chaos", "step", [&](const json& v, const char* k) { c.modulation.chaos_step = as_double(v, k); });
  read(doc, "chaos", "burn_in", [&](const json& v, const char* k) { c.modulation.chaos_burn_in = as_uint(v, k); });
  read(doc, "chaos", "stride", [&](const json& v, const char* k) { c.modulation.chaos_stride = as_uint(v, k); });
  read(doc, "chaos", "initial", [&](const json& v, const char* k) {
    if (!v.is_array() || v.size() != 3) throw InvalidInput(std::string("config key '") + k + "' must hold 3 numbers");
    c.modulation.chaos_initial = {as_double(v[0], k), as_double(v[1], k), as_double(v[2], k)};
  });
  read(doc, "chaos_sim", "duration", [&](const json& v, const char* k) { c.chaos_sim.duration = as_double(v, k); });
  read(doc, "chaos_sim", "output", [&](const json& v, const char* k) { c.chaos_sim.output = as_string(v, k); });

  read(doc, "network", "channels", [&](const json& v, const char* k) {
    if (!v.is_array()) throw InvalidInput(std::string("config key '") + k + "' must be an array");
    c.channels.clear();
    for (const auto& e : v) c.channels.push_back(as_uint(e, k));
  });

  read(doc, "train", "learning_rate", [&](const json& v, const char* k) { c.train.learning_rate = as_double(v, k); });
  read(doc, "train", "momentum", [&](const json& v, const char* k) { c.train.momentum = as_double(v, k); });
  read(doc, "train", "batch_size", [&](const json& v, const char* k) { c.train.batch_size = as_uint(v, k); });
  read(doc, "train", "epochs", [&](const json& v, const char* k) { c.train.max_epochs = as_uint(v, k); });
  read(doc, "train", "class_weights", [&](const json& v, const char* k) {
    if (!v.is_array()) throw InvalidInput(std::string("config key '") + k + "' must be an array");
    c.train.class_weights.clear();
    for (const auto& e : v) c.train.class_weights.push_back(as_double(e, k));
  });
  read(doc, "train", "validation_frequency",
       [&](const json& v, const char* k) { c.train.validation_frequency = as_uint(v, k); });
  read(doc, "train", "lr_drop_factor", [&](const json& v, const char* k) { c.train.lr_drop_factor = as_double(v, k); });
  read(doc, "train", "init_std", [&](const json& v, const char* k) { c.train.init_std = as_double(v, k); });
  read(doc, "train", "input", [&](const json& v, const char* k) { c.train_input = as_string(v, k); });

  read(doc, "folds", "k", [&](const json& v, const char* k) { c.folds = as_uint(v, k); });
  read(doc, "folds", "evaluate_augmented", [&](const json& v, const char* k) { c.evaluate_augmented = as_bool(v, k); });
  return c;
}

void PipelineConfig::validate() const {
  if (work_dir.empty()) throw InvalidInput("paths.work_dir must not be empty");
  if (image_size == 0) throw InvalidInput("preprocess.image_size must be positive");
  if (levels == 0 || levels > 16) throw InvalidInput("wavelet.levels must lie in [1, 16]");
  if (image_size % (std::size_t{1} << levels) != 0) {
    throw InvalidInput("preprocess.image_size " + std::to_string(image_size) + " is not divisible by 2^" +
                       std::to_string(levels) + " (wavelet.levels)");
  }
  modulation.validate(levels);
  chua.validate();
  augmentation.validate();
  train.validate();
  if (channels.empty()) throw InvalidInput("network.channels must not be empty");
  for (std::size_t ch : channels) {
    if (ch == 0) throw InvalidInput("network.channels entries must be positive");
  }
  if (channels.size() >= 32 || image_size % (std::size_t{1} << channels.size()) != 0) {
    throw InvalidInput("preprocess.image_size must be divisible by 2^(number of conv blocks)");
  }
  if (train_input != "enhanced" && train_input != "preprocessed") {
    throw InvalidInput("train.input must be 'enhanced' or 'preprocessed'");
  }
  if (folds < 2) throw InvalidInput("folds.k must be at least 2");
  if (!(chaos_sim.duration > 0.0) || !std::isfinite(chaos_sim.duration)) {
    throw InvalidInput("chaos_sim.duration must be positive");
  }
}

NetworkSpec PipelineConfig::network_spec() const { return NetworkSpec::conv_blocks(image_size, image_size, channels); }

AugmentationPlan PipelineConfig::augmentation_plan() const {
  AugmentationPlan plan = augmentation;
  plan.seed = stage_seed(seed, "augment");
  return plan;
}

TrainConfig PipelineConfig::train_config() const {
  TrainConfig t = train;
  t.seed = stage_seed(seed, "train");
  return t;
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw InvalidInput("override '" + assignment + "' is not key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  std::string pointer;
  std::stringstream parts(key);
  for (std::string part; std::getline(parts, part, '.');) {
    if (part.empty()) throw InvalidInput("override key '" + key + "' has an empty component");
    pointer += "/" + part;
  }
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  try {
    doc[json::json_pointer(pointer)] = value;
  } catch (const json::exception& e) {
    throw InvalidInput("cannot apply override '" + assignment + "': " + e.what());
  }
}

PipelineConfig load_config(const std::filesystem::path& file, const std::vector<std::string>& overrides) {
  json doc = json::object();
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw InvalidInput("cannot open config file " + file.string());
    doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw InvalidInput("config file " + file.string() + " is not valid JSON");
  }
  if (const char* env = std::getenv("CHAOSWAVE_WORK_DIR"); env && *env) {
    doc["paths"]["work_dir"] = env;
  }
  for (const auto& o : overrides) apply_override(doc, o);
  return PipelineConfig::from_json(doc);
}

}  // namespace chaoswave::cli

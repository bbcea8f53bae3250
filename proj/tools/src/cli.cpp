#include "cli.hpp"

#include <optional>
#include <ostream>

#include "CLI11.hpp"

#include "chaoswave/errors.hpp"
#include "pipeline.hpp"

namespace chaoswave::cli {

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Wavelet and chaotic-modulation image classification pipeline", "chaoswave"};
  app.require_subcommand(1);

  std::string config_file;
  std::vector<std::string> overrides;
  std::optional<std::string> work_dir;
  std::optional<std::uint64_t> seed;
  app.add_option("-c,--config", config_file, "JSON config file");
  app.add_option("-s,--set", overrides, "Override a config key, e.g. --set train.epochs=5")->take_all();
  app.add_option("-w,--work-dir", work_dir, "Work directory (overrides config and CHAOSWAVE_WORK_DIR)");
  app.add_option("--seed", seed, "Global seed");

  auto* preprocess = app.add_subcommand("preprocess", "Resize, normalize and augment labelled PGM images");
  std::optional<std::string> input_dir;
  preprocess->add_option("-i,--input-dir", input_dir, "Directory holding PGM files and labels.csv");

  auto* chaos_sim = app.add_subcommand("chaos-sim", "Export a chaotic trajectory as CSV");
  std::optional<double> sim_step, sim_duration;
  std::optional<std::uint64_t> sim_burn_in;
  std::optional<std::string> sim_output;
  chaos_sim->add_option("--step", sim_step, "Integration step size");
  chaos_sim->add_option("--burn-in", sim_burn_in, "Discarded steps");
  chaos_sim->add_option("--duration", sim_duration, "Exported time span");
  chaos_sim->add_option("-o,--output", sim_output, "Output CSV path");

  auto* enhance = app.add_subcommand("enhance", "Apply wavelet chaotic modulation to the preprocessed images");
  bool diff_maps = false;
  enhance->add_flag("--difference-maps", diff_maps, "Also write absolute difference maps");

  auto* train = app.add_subcommand("train", "Cross-validated training; writes fold checkpoints and reports");
  std::string train_manifest;
  train->add_option("-m,--manifest", train_manifest, "Manifest to train on (default: train.input stage)");

  auto* evaluate = app.add_subcommand("evaluate", "Score saved checkpoints");
  std::string eval_checkpoint, eval_manifest;
  evaluate->add_option("--checkpoint", eval_checkpoint, "Single checkpoint to score on the whole manifest");
  evaluate->add_option("-m,--manifest", eval_manifest, "Manifest to score (default: train.input stage)");

  auto* ablate = app.add_subcommand("ablate", "Compare training with and without chaotic modulation");

  std::vector<std::string> argv_storage{"chaoswave"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    // Flags are folded in as overrides so they win over the file and env.
    if (work_dir) overrides.push_back("paths.work_dir=" + nlohmann::json(*work_dir).dump());
    if (seed) overrides.push_back("seed=" + std::to_string(*seed));
    if (input_dir) overrides.push_back("paths.input_dir=" + nlohmann::json(*input_dir).dump());
    if (sim_step) overrides.push_back("chaos.step=" + nlohmann::json(*sim_step).dump());
    if (sim_burn_in) overrides.push_back("chaos.burn_in=" + std::to_string(*sim_burn_in));
    if (sim_duration) overrides.push_back("chaos_sim.duration=" + nlohmann::json(*sim_duration).dump());
    if (sim_output) overrides.push_back("chaos_sim.output=" + nlohmann::json(*sim_output).dump());
    if (diff_maps) overrides.push_back("modulation.difference_maps=true");
    const PipelineConfig config = load_config(config_file, overrides);

    if (preprocess->parsed()) {
      const auto manifest = cmd_preprocess(config, out);
      out << "manifest: " << manifest.string() << '\n';
    } else if (chaos_sim->parsed()) {
      cmd_chaos_sim(config, out);
    } else if (enhance->parsed()) {
      const auto manifest = cmd_enhance(config, out);
      out << "manifest: " << manifest.string() << '\n';
    } else if (train->parsed()) {
      cmd_train(config, out, train_manifest);
    } else if (evaluate->parsed()) {
      cmd_evaluate(config, out, eval_checkpoint, eval_manifest);
    } else if (ablate->parsed()) {
      cmd_ablate(config, out);
    }
  } catch (const BatchError& e) {
    err << "error: " << e.what() << '\n';
    for (const auto& item : e.items()) err << "  " << item << '\n';
    return 1;
  } catch (const NumericalDivergence& e) {
    err << "error: " << e.what() << " (step " << e.step() << ")\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace chaoswave::cli

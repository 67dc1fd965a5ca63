#include "cmosb_cli/app.hpp"

#include <CLI11.hpp>

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cmosb/error.hpp"
#include "cmosb_cli/commands.hpp"
#include "cmosb_cli/config.hpp"

namespace cmosb::cli {

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Constrained multi-objective search over vertical federated boosting"};
  app.name("cmosb");
  app.require_subcommand(0, 1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string output;
  std::optional<std::size_t> workers;
  std::vector<std::string> overrides;
  bool print_defaults = false;
  app.add_option("--config", config_path, "INI experiment config");
  app.add_option("--seed", seed, "Campaign seed (experiment.seed)");
  app.add_option("--out", output, "Output directory (experiment.output)");
  app.add_option("--workers", workers, "Evaluation threads; 0 uses every core");
  app.add_option("--set", overrides, "section.key=value override, repeatable");
  app.add_flag("--print-defaults", print_defaults, "Print every config key with its default");

  auto* gen = app.add_subcommand("gen-data", "Write the configured dataset as CSV plus a JSON sidecar");
  auto* train = app.add_subcommand("train", "Run one federated training and report its objectives");
  auto* atk = app.add_subcommand("attack", "Run the instance clustering attack on a leaf log");
  std::string log_path;
  std::string forest_path;
  atk->add_option("--log", log_path, "leaf_log.json from train")->required();
  atk->add_option("--forest", forest_path, "forest.json from train");
  auto* opt = app.add_subcommand("optimize", "Run the constrained NSGA-II campaign");
  auto* plot = app.add_subcommand("plot", "Render SVG plots of a front and its hypervolume trace");
  std::string front_path;
  std::string trace_path;
  plot->add_option("--front", front_path, "front.json from optimize")->required();
  plot->add_option("--trace", trace_path, "hv_trace.csv from optimize");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "cmosb: " << e.what() << '\n';
    return kExitConfig;
  }

  if (print_defaults) {
    print_config(ExperimentConfig{}, out);
    return kExitOk;
  }
  if (app.get_subcommands().empty()) {
    err << app.help();
    return kExitConfig;
  }

  ExperimentConfig config;
  try {
    if (!config_path.empty()) config = load_config(config_path);
    for (const auto& o : overrides) apply_override(config, o);
    if (seed) config.seed = *seed;
    if (!output.empty()) config.output = output;
    if (workers) config.workers = *workers;
    config.validate();
  } catch (const ConfigError& e) {
    err << "cmosb: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    Paths written;
    if (gen->parsed()) written = cmd_gen_data(config);
    else if (train->parsed()) written = cmd_train(config);
    else if (atk->parsed())
      written = cmd_attack(config, log_path,
                           forest_path.empty() ? std::nullopt : std::optional<std::filesystem::path>(forest_path));
    else if (opt->parsed()) written = cmd_optimize(config);
    else if (plot->parsed())
      written = cmd_plot(front_path,
                         trace_path.empty() ? std::nullopt : std::optional<std::filesystem::path>(trace_path),
                         config.output);
    for (const auto& p : written) out << p.string() << '\n';
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "cmosb: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParameterError& e) {
    err << "cmosb: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "cmosb: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace cmosb::cli

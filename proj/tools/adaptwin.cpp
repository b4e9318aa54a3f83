// Command-line runner for adaptive-window experiments.
//
//   adaptwin run <config> [--seed N] [--out PATH] [--quiet]
//   adaptwin trace <config> --trial K
//   adaptwin sweep <config> --param KEY --values V1,V2,...

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "adaptwin/experiment.hpp"

namespace {

using namespace adaptwin;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool quiet = false;
  std::size_t trial = 0;
  std::string param;
  std::vector<std::string> values;
};

ConfigFields load_fields(const Options& opt) {
  ConfigFields fields = parse_config_fields(read_text_file(opt.config_path));
  if (opt.seed) fields["scenario.seed"] = std::to_string(*opt.seed);
  if (!opt.out.empty()) fields["output_path"] = opt.out;
  return fields;
}

void emit(const std::string& path, const std::string& content, const Options& opt, const std::string& what) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  write_report(path, content);
  if (!opt.quiet) std::cerr << "wrote " << what << " to " << path << '\n';
}

int cmd_run(const Options& opt) {
  const ExperimentConfig cfg = config_from_fields(load_fields(opt));
  const std::string csv = run_experiment(cfg, opt.quiet ? nullptr : &std::cout);
  emit(cfg.output_path, csv, opt, std::to_string(cfg.trials) + " trials");
  return 0;
}

int cmd_trace(const Options& opt) {
  const Experiment exp(config_from_fields(load_fields(opt)));
  if (opt.trial >= exp.config().trials) throw std::invalid_argument("--trial must be < trials");
  std::cout << trace_command(exp, opt.trial);
  return 0;
}

int cmd_sweep(const Options& opt) {
  const ConfigFields fields = load_fields(opt);
  const std::string csv = run_sweep(fields, opt.param, opt.values);
  const auto it = fields.find("output_path");
  emit(it == fields.end() ? "" : it->second, csv, opt, std::to_string(opt.values.size()) + " sweep points");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive window selection experiments on drifting streams"};
  app.require_subcommand(1);
  app.fallthrough();

  Options opt;
  app.add_option("--seed", opt.seed, "Override scenario.seed");
  app.add_option("--out", opt.out, "Override output_path");
  app.add_flag("--quiet", opt.quiet, "Suppress traces and status messages");

  auto* run = app.add_subcommand("run", "Run every trial and write the CSV report");
  run->add_option("config", opt.config_path, "Config file")->required()->check(CLI::ExistingFile);

  auto* trace = app.add_subcommand("trace", "Print the selection trace of one trial and the bound profile");
  trace->add_option("config", opt.config_path, "Config file")->required()->check(CLI::ExistingFile);
  trace->add_option("--trial", opt.trial, "Trial id")->required();

  auto* sweep = app.add_subcommand("sweep", "Vary one config key and summarize each setting");
  sweep->add_option("config", opt.config_path, "Config file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--param", opt.param, "Config key to vary, e.g. scenario.step")->required();
  sweep->add_option("--values", opt.values, "Comma-separated values")->required()->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(opt);
    if (*trace) return cmd_trace(opt);
    return cmd_sweep(opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

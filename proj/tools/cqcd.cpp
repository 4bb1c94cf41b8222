// cqcd: closed-form predictions and Monte Carlo validation runs for CuSum
// detection of collapsing changes.
//
//   cqcd predict   --config exp.json [--out dir]
//   cqcd validate  --config exp.json [--out dir] [--seed n] [--workers n] [--progress]
//   cqcd overshoot --config exp.json [--out dir] [--seed n] [--workers n]
//
// Exit status: 0 all checks passed, 1 a tolerance check failed, 2 usage or
// configuration error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "cqcd/commands.hpp"
#include "cqcd/errors.hpp"

namespace {

constexpr int kPass = 0;
constexpr int kToleranceFailure = 1;
constexpr int kUsageError = 2;

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::string trace;
  bool progress = false;
};

int run(const std::string& command, const Options& opt) {
  cqcd::ExperimentSpec spec = cqcd::load_experiment(opt.config);
  if (opt.seed) spec.mc.seed = *opt.seed;
  if (opt.workers) spec.mc.workers = *opt.workers;
  spec.mc.progress = opt.progress;
  const std::filesystem::path out_dir = opt.out.empty() ? std::filesystem::path(spec.outputs) : std::filesystem::path(opt.out);

  cqcd::CommandResult result;
  if (command == "predict") {
    result = cqcd::cmd_predict(spec);
  } else if (command == "validate") {
    result = cqcd::cmd_validate(spec);
  } else {
    result = cqcd::cmd_overshoot(spec);
  }

  std::filesystem::create_directories(out_dir);
  const auto csv_path = out_dir / (spec.name + "_" + command + ".csv");
  std::ofstream csv(csv_path);
  if (!csv) throw cqcd::ConfigError("cannot write " + csv_path.string());
  result.table.write(csv);
  std::cout << csv_path.string() << '\n';

  if (!opt.trace.empty()) {
    std::ofstream trace(opt.trace);
    if (!trace) throw cqcd::ConfigError("cannot write " + opt.trace);
    cqcd::write_trace(spec, trace);
  }
  if (!result.passed) std::cerr << command << ": tolerance check failed, see " << csv_path.string() << '\n';
  return result.passed ? kPass : kToleranceFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Covert change detection: asymptotic predictions and Monte Carlo validation"};
  app.require_subcommand(1);
  Options opt;

  for (const char* name : {"predict", "validate", "overshoot"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", opt.config, "experiment JSON file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output directory (default: the config's outputs)");
    sub->add_option("--seed", opt.seed, "override the config seed");
    sub->add_option("--workers", opt.workers, "worker threads")->check(CLI::Range(1u, 1024u));
    sub->add_option("--trace", opt.trace, "write one CuSum trajectory as CSV to this file");
    sub->add_flag("--progress", opt.progress, "report replication progress on stderr");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, opt);
  } catch (const cqcd::CalibrationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kToleranceFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  }
}

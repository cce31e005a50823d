#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <ctime>
#include <fstream>
#include <iostream>

#include "vortexlab/report.hpp"
#include "vortexlab/snapshot.hpp"

namespace fs = std::filesystem;
using namespace vortexlab;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
}

std::string flat_csv(const Json& report) {
  std::string out = "key,value\n";
  const Json flat = report.flatten();
  for (const auto& [key, value] : flat.items()) out += key + "," + value.dump() + "\n";
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%FT%TZ", &utc);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vortex equations on flat bundles over affine tori"};
  app.require_subcommand(0, 1);

  std::string config_path, out_dir, format;
  std::optional<std::uint64_t> seed;
  std::optional<int> max_iters;
  std::optional<double> tol;
  app.add_option("--config", config_path, "experiment config file")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--format", format, "report format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--seed", seed, "seed for randomized checks");
  app.add_option("--max-iters", max_iters, "flow iteration cap");
  app.add_option("--tol", tol, "flow residual target");

  const std::vector<std::string> commands = {"degree", "stability", "solve-vortex", "solve-he", "verify-reduction",
                                             "selftest"};
  for (const auto& c : commands) app.add_subcommand(c, "run " + c)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    std::string command = cfg.command;
    if (!app.get_subcommands().empty()) command = app.get_subcommands().front()->get_name();
    if (command.empty()) throw Error(ErrorCode::ConfigError, "no command given (subcommand or [run] command)");
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (!format.empty()) cfg.format = format;
    if (seed) cfg.seed = *seed;
    if (max_iters) cfg.solver.max_iters = *max_iters;
    if (tol) cfg.solver.tol = *tol;
    cfg.solver.validate();

    const fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    const std::string stem = cfg.prefix + "_" + command;

    CheckpointFn checkpoint;
    if (cfg.solver.checkpoint_every > 0)
      checkpoint = [&](int it, const MetricField& h) {
        write_snapshot((dir / (stem + "_checkpoint_" + std::to_string(it) + ".bin")).string(), h);
      };

    const CommandOutcome outcome = run_command(command, cfg, checkpoint);

    if (cfg.format == "json")
      write_text(dir / (stem + ".json"), dump_report(outcome.report));
    else
      write_text(dir / (stem + ".csv"), flat_csv(outcome.report));
    write_text(dir / (stem + "_meta.json"),
               dump_report(Json{{"timestamp", utc_timestamp()}, {"config", config_path}, {"command", command}}));
    if (outcome.diagnostics) write_text(dir / (stem + "_trace.csv"), trace_csv(*outcome.diagnostics));
    if (outcome.metric) write_snapshot((dir / (stem + "_metric.bin")).string(), *outcome.metric);

    std::cout << dump_report(outcome.report);
    if (outcome.exit_code == 2) std::cerr << "vortexlab: flow did not converge\n";
    return outcome.exit_code;
  } catch (const Error& e) {
    std::cerr << "vortexlab: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "vortexlab: " << e.what() << "\n";
    return 1;
  }
}

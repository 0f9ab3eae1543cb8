#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "svplab/config.hpp"
#include "svplab/experiments.hpp"
#include "svplab/output.hpp"
#include "svplab/svg.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  bool seed_given = false;
  int workers = 0;
  bool workers_given = false;
  std::vector<std::string> formats;
};

void add_common_options(CLI::App* command, CommonArgs& args) {
  command->add_option("--config", args.config_path,
                      "Configuration file (key = value with [sections])");
  command->add_option("--out", args.out_dir, "Output directory");
  command
      ->add_option("--seed", args.seed, "Master seed (overrides config)")
      ->each([&args](const std::string&) { args.seed_given = true; });
  command
      ->add_option("--workers", args.workers,
                   "Worker threads (overrides SVPLAB_WORKERS and config)")
      ->each([&args](const std::string&) { args.workers_given = true; });
  command
      ->add_option("--format", args.formats,
                   "Artifact formats to emit (default: all)")
      ->check(CLI::IsMember({"csv", "json", "svg"}))
      ->delimiter(',');
}

bool wants(const CommonArgs& args, const std::string& format) {
  if (args.formats.empty()) return true;
  for (const auto& f : args.formats)
    if (f == format) return true;
  return false;
}

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm parts{};
  gmtime_r(&now, &parts);
  char buffer[80];
  std::snprintf(buffer, sizeof(buffer), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                parts.tm_year + 1900, parts.tm_mon + 1, parts.tm_mday,
                parts.tm_hour, parts.tm_min, parts.tm_sec);
  return buffer;
}

/// Collects rendered artifacts and writes them in one pass, so a failed run
/// leaves no partial result files behind.
class OutputSet {
 public:
  explicit OutputSet(std::string dir) : dir_(std::move(dir)) {}

  void add(const std::string& name, std::string content) {
    files_.emplace_back(name, std::move(content));
  }

  void commit() {
    std::filesystem::create_directories(dir_);
    std::vector<std::string> written;
    try {
      for (const auto& [name, content] : files_) {
        const std::string path = dir_ + "/" + name;
        svplab::write_text_file(path, content);
        written.push_back(path);
      }
    } catch (...) {
      std::error_code ignore;
      for (const auto& path : written)
        std::filesystem::remove(path, ignore);
      throw;
    }
  }

  const std::string& dir() const { return dir_; }

 private:
  std::string dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

void write_failure_summary(const std::string& dir, const std::string& command,
                           const std::string& message) {
  std::error_code ignore;
  std::filesystem::create_directories(dir, ignore);
  try {
    svplab::write_text_file(
        dir + "/failure.json",
        std::string("{\n  \"command\": \"") + command +
            "\",\n  \"error\": \"" + message + "\"\n}\n");
  } catch (...) {
    // The failure itself is already reported on stderr.
  }
}

int resolve_workers(const CommonArgs& args, const svplab::TrialConfig& trial) {
  if (args.workers_given) return std::max(1, args.workers);
  if (const char* env = std::getenv("SVPLAB_WORKERS")) {
    char* end = nullptr;
    const long parsed = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && parsed >= 1)
      return static_cast<int>(parsed);
  }
  return std::max(1, trial.workers);
}

std::vector<int> parse_n_list(const std::string& text) {
  std::vector<int> values;
  std::string token;
  std::istringstream input(text);
  while (std::getline(input, token, ',')) {
    if (token.empty()) continue;
    values.push_back(std::stoi(token));
  }
  if (values.empty())
    throw svplab::ConfigError("risk: empty n_list");
  return values;
}

int run_command(const std::string& command, const CommonArgs& args) {
  using namespace svplab;

  Config config = args.config_path.empty()
                      ? Config{}
                      : Config::parse_file(args.config_path);
  TrialConfig trial = trial_config_from(config, command);
  if (args.seed_given) trial.master_seed = args.seed;
  trial.workers = resolve_workers(args, trial);

  const std::string started = utc_timestamp();
  OutputSet outputs(args.out_dir);

  if (command == "solve" || command == "diagnostics") {
    if (command == "diagnostics") {
      trial.with_diagnostics = true;
      trial.with_abc = config.get_bool(command, "with_abc", true);
    }
    const TrialResult result = run_trial(trial, 0);
    if (!result.error.empty()) {
      std::cerr << "trial failed: " << result.error << "\n";
      write_failure_summary(args.out_dir, command, result.error);
      return 1;
    }
    if (wants(args, "json"))
      outputs.add(command == "solve" ? "trial.json" : "diagnostics.json",
                  render_trial_json(trial, result));
    if (wants(args, "csv")) outputs.add("beta.csv", render_beta_csv(result));
  } else if (command == "figure1") {
    const std::vector<Figure1Panel> panels = figure1(trial);
    if (wants(args, "csv"))
      outputs.add("overlay.csv", render_overlay_csv(panels));
    if (wants(args, "svg"))
      outputs.add("figure1.svg", render_figure1_svg(panels));
  } else if (command == "heatmap") {
    const std::vector<double> r_grid = arithmetic_grid(
        config.get_real(command, "r_start", 0.05),
        config.get_real(command, "r_stop", 0.95),
        config.get_real(command, "r_step", 0.05));
    const std::vector<double> q_grid = arithmetic_grid(
        config.get_real(command, "q_start", -0.5),
        config.get_real(command, "q_stop", 1.5),
        config.get_real(command, "q_step", 0.05));
    const HeatmapResult result = heatmap(trial, r_grid, q_grid);
    if (wants(args, "csv"))
      outputs.add("heatmap.csv", render_heatmap_csv(result));
    if (wants(args, "svg"))
      outputs.add("heatmap.svg", render_heatmap_svg(result));
  } else if (command == "risk") {
    const std::vector<int> n_list =
        parse_n_list(config.get_string(command, "n_list", "50,100,200,400"));
    trial.with_risk = true;
    const RiskSweepResult result = risk_sweep(trial, n_list);
    if (wants(args, "csv")) outputs.add("risk.csv", render_risk_csv(result));
  } else {
    std::cerr << "unknown command: " << command << "\n";
    return 2;
  }

  outputs.add("manifest.json",
              render_manifest_json(config, command, trial.master_seed,
                                   started, utc_timestamp()));
  outputs.commit();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "svplab: minimum-norm interpolation, hard-margin SVM, and "
      "support-vector proliferation experiments"};
  app.require_subcommand(1);

  CommonArgs args;
  const char* commands[] = {"solve", "figure1", "heatmap", "risk",
                            "diagnostics"};
  const char* descriptions[] = {
      "Run a single trial and write the verdict and coefficients",
      "Three-panel estimate overlays at q in {-0.4, 0.4, 0.8}",
      "SVP proportion over an (r, q) grid",
      "Excess-risk sweep over sample sizes",
      "Single trial with the full diagnostic measurements"};
  for (int i = 0; i < 5; ++i)
    add_common_options(app.add_subcommand(commands[i], descriptions[i]), args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& error) {
    return app.exit(error);
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run_command(command, args);
  } catch (const svplab::ConfigError& error) {
    std::cerr << "config error: " << error.what() << "\n";
    return 2;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    write_failure_summary(args.out_dir, command, error.what());
    return 1;
  }
}

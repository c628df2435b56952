#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "spiralctl/config.hpp"
#include "spiralctl/errors.hpp"
#include "spiralctl/presets.hpp"
#include "spiralctl/runner.hpp"
#include "spiralctl/stability_report.hpp"

namespace {

using namespace spiralctl;

constexpr int kConfigExit = 2;
constexpr int kNumericalExit = 3;

std::vector<std::pair<std::string, std::string>> collect_overrides(const std::string& config_file,
                                                                   const std::vector<std::string>& sets) {
  std::vector<std::pair<std::string, std::string>> out;
  if (!config_file.empty()) {
    std::ifstream in(config_file);
    if (!in) throw ConfigError("cannot read config file '" + config_file + "'");
    std::stringstream text;
    text << in.rdbuf();
    for (const auto& [k, v] : config::parse(text.str()).entries()) out.emplace_back(k, v);
  }
  for (const auto& s : sets) out.push_back(config::split_assignment(s));
  return out;
}

int cmd_run(const std::string& name, const std::vector<std::pair<std::string, std::string>>& overrides,
            const std::string& out_dir, bool no_timestamp, bool quiet) {
  const auto preset = experiment::make_preset(name, overrides);
  experiment::RunOptions opts;
  opts.out_root = out_dir;
  opts.timestamped_dir = !no_timestamp;
  opts.progress = quiet ? nullptr : &std::cerr;
  const auto report = experiment::run_experiment(preset, opts);
  std::cout << "run directory: " << report.run_dir.string() << "\n";
  std::cout << "final classification: " << front::to_string(report.final_classification) << "\n";
  std::cout << "time to planar: "
            << (report.time_to_planar ? config::format_number(*report.time_to_planar) : "none") << "\n";
  return 0;
}

int cmd_info(const std::string& name, const std::vector<std::pair<std::string, std::string>>& overrides) {
  const auto preset = experiment::make_preset(name, overrides);
  std::cout << "# " << preset.name << ": " << preset.title << "\n";
  std::cout << preset.settings.dump();
  std::cout << "\n# reference values\n";
  bool all_ok = true;
  for (const auto& c : experiment::reference_checks(preset)) {
    all_ok = all_ok && c.ok();
    std::cout << (c.ok() ? "ok      " : "DIFFERS ") << c.item << ": reference "
              << config::format_number(c.literal) << ", resolved " << config::format_number(c.resolved)
              << "\n";
  }
  std::cout << (all_ok ? "# all reference values match\n" : "# some values differ from the reference\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FitzHugh-Nagumo spiral-wave control experiments"};
  app.require_subcommand(1);

  std::string preset_name;
  std::vector<std::string> sets;
  std::string config_file;
  std::string out_dir = ".";
  bool no_timestamp = false;
  bool quiet = false;

  auto* run = app.add_subcommand("run", "run a figure preset and write frames, metrics and events");
  run->add_option("preset", preset_name, "fig1, fig2, fig3, fig4, fig5, fig7 or fig8")->required();
  run->add_option("--set", sets, "override a setting, key=value (repeatable)");
  run->add_option("--config", config_file, "file of key = value overrides");
  run->add_option("--out", out_dir, "directory that receives the run directory");
  run->add_flag("--no-timestamp", no_timestamp, "name the run directory after the preset only");
  run->add_flag("--quiet", quiet, "no progress output");

  auto* info = app.add_subcommand("info", "print the resolved settings of a preset");
  info->add_option("preset", preset_name)->required();
  info->add_option("--set", sets, "override a setting, key=value (repeatable)");
  info->add_option("--config", config_file, "file of key = value overrides");

  experiment::StabilityOptions st;
  std::string chi_mode = "numeric";
  std::string convention = "cosine";
  std::optional<double> chi;
  std::optional<double> sensor_x;
  auto* stab = app.add_subcommand("stability", "linear front stability and gain analysis");
  stab->add_option("--layout", st.layout, "uniform, idealized, fig3, fig4, fig5, fig8 or custom")
      ->capture_default_str();
  stab->add_option("--chi-mode", chi_mode, "numeric or analytic")->capture_default_str();
  stab->add_option("--chi", chi, "use this growth constant instead of estimating it");
  stab->add_option("--slope-w", st.slope_w, "inhibitor slope at the front (numeric mode)")
      ->capture_default_str();
  stab->add_option("--N", st.modes, "truncation order")->capture_default_str();
  stab->add_option("--convention", convention, "cosine or shifted")->capture_default_str();
  stab->add_option("--lx", st.lx, "transverse length")->capture_default_str();
  stab->add_option("--ly", st.ly, "propagation length")->capture_default_str();
  stab->add_option("--monitor", st.monitor, "1-based monitored sensor")->capture_default_str();
  stab->add_option("--sensor-x", sensor_x, "sensor position (custom layout)");
  stab->add_option("--actuators", st.actuator_xs, "actuator positions (custom layout)")->delimiter(',');
  stab->add_option("--k-min", st.k_lo, "smallest gain in the sweep")->capture_default_str();
  stab->add_option("--k-max", st.k_hi, "largest gain in the sweep")->capture_default_str();
  stab->add_option("--k-steps", st.k_steps, "sweep points")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigExit;
  }

  try {
    if (*run) return cmd_run(preset_name, collect_overrides(config_file, sets), out_dir, no_timestamp, quiet);
    if (*info) return cmd_info(preset_name, collect_overrides(config_file, sets));
    if (*stab) {
      if (chi_mode == "numeric") st.chi_mode = stability::ChiMode::numeric_slope;
      else if (chi_mode == "analytic") st.chi_mode = stability::ChiMode::analytic;
      else throw ConfigError("--chi-mode must be numeric or analytic");
      st.convention = stability::parse_convention(convention);
      st.chi = chi;
      st.sensor_x = sensor_x;
      std::cout << experiment::stability_report(st);
      return 0;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigExit;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kNumericalExit;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

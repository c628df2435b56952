#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spiralctl/feedback_control.hpp"
#include "spiralctl/front_track.hpp"
#include "spiralctl/output.hpp"
#include "spiralctl/presets.hpp"

namespace spiralctl::experiment {

struct RunOptions {
  std::filesystem::path out_root = ".";
  bool timestamped_dir = true;  ///< <name>-<UTC timestamp>; otherwise <name>
  bool write_files = true;
  std::ostream* progress = nullptr;
};

struct RunReport {
  std::string preset;
  front::WaveState final_classification = front::WaveState::broken;
  std::optional<double> time_to_planar;
  double torus_time = 0.0;  ///< simulated time spent building the torus (clock reset afterwards)
  std::vector<output::MetricsRow> samples;
  std::vector<front::WaveState> sample_states;  ///< per-sample classification of the trailing window
  std::vector<control::ControlEvent> events;
  std::size_t missing_polls = 0;
  std::filesystem::path run_dir;
  std::filesystem::path metrics_csv;
  std::filesystem::path events_csv;
  std::filesystem::path report_txt;
  std::vector<std::filesystem::path> frames;
};

/// Seed, torus, optional break, optional control and classification for one preset.
[[nodiscard]] RunReport run_experiment(const ExperimentPreset& preset, const RunOptions& opts = {});

[[nodiscard]] RunReport run_preset(std::string_view name,
                                   std::span<const std::pair<std::string, std::string>> overrides,
                                   const RunOptions& opts = {});

/// Plain-text summary written to report.txt.
[[nodiscard]] std::string format_report(const RunReport& r, const ExperimentPreset& p);

}  // namespace spiralctl::experiment

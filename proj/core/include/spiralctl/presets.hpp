#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spiralctl/config.hpp"
#include "spiralctl/feedback_control.hpp"
#include "spiralctl/fhn_model.hpp"
#include "spiralctl/front_track.hpp"
#include "spiralctl/grid.hpp"

namespace spiralctl::experiment {

/// Fully resolved experiment. `settings` is the flat config it was built from.
struct ExperimentPreset {
  std::string name;
  std::string title;
  config::Config settings;

  std::size_t nx = 200;
  std::size_t ny = 400;
  double dx = 1.0;
  double dy = 1.0;
  model::ModelParams model;
  grid::SimConfig sim;
  grid::TorusOptions torus;
  double quoted_dt = 0.5;  ///< step quoted with the figures; not used for integration

  std::optional<double> break_at;
  model::Interval break_x{0.05, 0.5};
  double theta = 0.5;

  bool controlled = false;
  std::string layout_name;
  control::Layout layout;
  control::ControllerConfig controller;

  std::vector<model::HeterogeneityPatch> patches;

  double sample_every = 10.0;
  double snapshot_every = 100.0;
  std::vector<double> snapshot_times;
  bool write_frames = true;

  std::size_t classify_window = 10;
  front::ClassifierThresholds thresholds;

  [[nodiscard]] double lx() const { return static_cast<double>(nx) * dx; }
  [[nodiscard]] double ly() const { return static_cast<double>(ny) * dy; }
};

[[nodiscard]] std::vector<std::string> preset_names();

/// Default settings of a named preset. Throws ConfigError for unknown names.
[[nodiscard]] config::Config preset_settings(std::string_view name);

/// Builds and validates the typed preset from settings.
[[nodiscard]] ExperimentPreset resolve(std::string_view name, const config::Config& settings);

/// preset_settings + overrides (existing keys only) + resolve.
[[nodiscard]] ExperimentPreset make_preset(
    std::string_view name, std::span<const std::pair<std::string, std::string>> overrides = {});

/// One literal value quoted with a figure, compared against what the preset resolves to.
struct ReferenceCheck {
  std::string item;
  double literal = 0.0;
  double resolved = 0.0;
  [[nodiscard]] bool ok() const;
};

[[nodiscard]] std::vector<ReferenceCheck> reference_checks(const ExperimentPreset& p);

}  // namespace spiralctl::experiment

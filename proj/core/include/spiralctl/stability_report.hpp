#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "spiralctl/fhn_model.hpp"
#include "spiralctl/stability.hpp"

namespace spiralctl::experiment {

struct StabilityOptions {
  /// idealized | uniform (distributed feedback), fig3, fig4, fig5, fig8, or custom.
  std::string layout = "fig4";
  double lx = 200.0;
  double ly = 400.0;
  model::ModelParams model;
  stability::ChiMode chi_mode = stability::ChiMode::numeric_slope;
  double slope_w = 0.15;          ///< measured inhibitor slope for numeric_slope
  std::optional<double> chi;      ///< bypasses the estimate when set
  double slope_f = stability::front_slope_analytic(0.5);
  std::size_t modes = 32;
  stability::ModeConvention convention = stability::ModeConvention::cosine_with_constant;
  std::size_t monitor = 1;        ///< 1-based sensor index for the point layouts
  std::optional<double> sensor_x;          ///< custom layout
  std::vector<double> actuator_xs;         ///< custom layout
  double k_lo = 1e-3;
  double k_hi = 1e3;
  std::size_t k_steps = 25;
  double c_set = 0.5;             ///< sets the sampling interval ly / c_set
};

/// Structured `key: value` text covering the whole analysis chain.
[[nodiscard]] std::string stability_report(const StabilityOptions& opts);

}  // namespace spiralctl::experiment

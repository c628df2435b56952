#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "spiralctl/front_track.hpp"
#include "spiralctl/grid.hpp"

namespace spiralctl::control {

/// Sensor columns and the ordered trigger lines they watch. Positions are in length units.
struct SensorLayout {
  std::vector<double> x_sensors;
  std::vector<double> y_lines;
  std::size_t monitor = 0;  ///< zero-based index into x_sensors of the column that drives control

  void validate(double lx, double ly) const;
};

/// Actuator grid: every (x, y) pair of the two lists is one point electrode.
struct ActuatorLayout {
  std::vector<double> xs;
  std::vector<double> ys;

  [[nodiscard]] std::size_t count() const { return xs.size() * ys.size(); }
  void validate(double lx, double ly) const;
};

struct ControllerConfig {
  double k = 0.001;
  double c_set = 0.5;
  double slope_f = 0.35355339059327373;  ///< (1 - beta) / sqrt(2) at beta = 0.5
  double t_start = 10.0;
  /// A monitored-front displacement larger than this between polls is a re-acquisition, not
  /// motion, and never counts as a line crossing.
  double max_jump = 5.0;

  void validate() const;
};

struct ControllerState {
  std::optional<double> last_crossing_time;
  std::optional<std::size_t> last_line;
  std::optional<double> prev_z;
  double prev_t = 0.0;
  double c_bar = 0.0;
  std::size_t triggered = 0;
  bool front_missing = false;

  bool operator==(const ControllerState&) const = default;
};

struct ControlEvent {
  double t = 0.0;
  std::size_t line = 0;
  double d = 0.0;
  double d_set = 0.0;
  double c_bar = 0.0;
  double current_per_cell = 0.0;
};

struct PollResult {
  ControllerState state;
  std::optional<ControlEvent> event;
};

/// Compares the monitored column's front position with the previous poll. A crossing of a
/// trigger line fixes t_j; from the second crossing on c_bar = d_j - c_set (t_j - t_{j-1}).
[[nodiscard]] PollResult poll(const ControllerState& state, std::optional<double> z,
                              const ControllerConfig& cfg, const SensorLayout& sensors, double t,
                              double ly, bool periodic, front::Travel travel = front::Travel::plus_y);

/// Same, reading the monitored column from a full front line.
[[nodiscard]] PollResult poll(const ControllerState& state, const front::FrontLine& f,
                              std::size_t column, const ControllerConfig& cfg,
                              const SensorLayout& sensors, double t,
                              front::Travel travel = front::Travel::plus_y);

/// Current injected at each actuator cell: -k slope_f c_bar / (dx dy).
[[nodiscard]] double actuator_current(double c_bar, const ControllerConfig& cfg, double dx,
                                      double dy);

/// Dense current field: zero before t_start and away from actuators.
[[nodiscard]] grid::Field2D control_field(const ControllerState& state, const ControllerConfig& cfg,
                                          const ActuatorLayout& layout, const grid::Grid2D& geometry,
                                          double t);

struct Layout {
  SensorLayout sensors;
  ActuatorLayout actuators;
};

/// Dense actuation: half the cells in x and y, seven equally spaced sensors at y = 0.735 Ly.
[[nodiscard]] Layout idealized_layout(double lx, double ly);
/// Two sensors at Lx/3, 2Lx/3 (y = 0.735 Ly); 25 x 6 actuators at x = 1, 5, ..., 97 and
/// y = 110, 140, ..., 260 on the 200 x 400 reference lattice, scaled to (lx, ly).
[[nodiscard]] Layout sparse_layout_fig4(double lx, double ly);
/// As fig4 with 50 actuator columns at x = 1, 3, ..., 99.
[[nodiscard]] Layout sparse_layout_fig5(double lx, double ly);
/// As fig5 with five equally spaced sensors.
[[nodiscard]] Layout sparse_layout_fig8(double lx, double ly);

/// Event-driven sampled controller plugged into grid::run.
class FeedbackController : public grid::ControlSource {
 public:
  FeedbackController(ControllerConfig cfg, Layout layout, const grid::Grid2D& geometry,
                     grid::BoundarySpec boundary, double theta = 0.5,
                     front::Travel travel = front::Travel::plus_y);

  const grid::Field2D* update(const grid::Grid2D& g) override;

  [[nodiscard]] const ControllerState& state() const { return state_; }
  [[nodiscard]] std::span<const ControlEvent> events() const { return events_; }
  [[nodiscard]] std::size_t missing_polls() const { return missing_polls_; }
  [[nodiscard]] std::size_t monitored_column() const { return column_; }
  /// Current injected per actuator cell at the last update (0 when inactive).
  [[nodiscard]] double current_per_cell() const { return active_current_; }
  [[nodiscard]] double total_current() const {
    return active_current_ * static_cast<double>(layout_.actuators.count()) * dx_ * dy_;
  }
  void set_boundary(grid::BoundarySpec b) { boundary_ = b; }

 private:
  void rebuild(double current);

  ControllerConfig cfg_;
  Layout layout_;
  grid::BoundarySpec boundary_;
  double theta_;
  front::Travel travel_;
  double dx_;
  double dy_;
  double ly_;
  std::size_t column_;
  std::vector<std::size_t> cells_;
  ControllerState state_;
  std::vector<ControlEvent> events_;
  std::size_t missing_polls_ = 0;
  grid::Field2D field_;
  double active_current_ = 0.0;
};

}  // namespace spiralctl::control

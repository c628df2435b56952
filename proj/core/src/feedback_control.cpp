#include "spiralctl/feedback_control.hpp"

#include <algorithm>
#include <cmath>

#include "spiralctl/errors.hpp"

namespace spiralctl::control {

namespace {

bool inside(double v, double len) { return v >= 0.0 && v <= len; }

double wrap_positive(double z, double period) {
  z = std::fmod(z, period);
  if (z < 0.0) z += period;
  return z;
}

std::vector<double> arithmetic(double first, double stride, std::size_t count, double scale) {
  std::vector<double> out(count);
  for (std::size_t m = 0; m < count; ++m) out[m] = (first + stride * static_cast<double>(m)) * scale;
  return out;
}

std::vector<double> equally_spaced_sensors(std::size_t count, double lx) {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = lx * static_cast<double>(i + 1) / static_cast<double>(count + 1);
  return out;
}

}  // namespace

void SensorLayout::validate(double lx, double ly) const {
  if (x_sensors.empty()) throw ConfigError("sensor layout needs at least one sensor column");
  if (y_lines.empty()) throw ConfigError("sensor layout needs at least one trigger line");
  if (monitor >= x_sensors.size()) throw ConfigError("monitored sensor index out of range");
  for (double x : x_sensors)
    if (!inside(x, lx)) throw ConfigError("sensor x position outside the domain");
  for (std::size_t e = 0; e < y_lines.size(); ++e) {
    if (!inside(y_lines[e], ly)) throw ConfigError("sensor y line outside the domain");
    if (e > 0 && !(y_lines[e] > y_lines[e - 1]))
      throw ConfigError("sensor y lines must be strictly increasing");
  }
}

void ActuatorLayout::validate(double lx, double ly) const {
  if (xs.empty() || ys.empty()) throw ConfigError("actuator layout needs at least one row and column");
  for (double x : xs)
    if (!inside(x, lx)) throw ConfigError("actuator x position outside the domain");
  for (double y : ys)
    if (!inside(y, ly)) throw ConfigError("actuator y position outside the domain");
}

void ControllerConfig::validate() const {
  if (!(k > 0.0)) throw ConfigError("control.k must be > 0");
  if (!(c_set > 0.0)) throw ConfigError("control.c_set must be > 0");
  if (!(slope_f > 0.0)) throw ConfigError("control.slope_f must be > 0");
  if (!(max_jump > 0.0)) throw ConfigError("control.max_jump must be > 0");
}

PollResult poll(const ControllerState& state, std::optional<double> z, const ControllerConfig& cfg,
                const SensorLayout& sensors, double t, double ly, bool periodic,
                front::Travel travel) {
  PollResult out{state, std::nullopt};
  ControllerState& s = out.state;
  if (!z) {
    s.front_missing = true;
    s.prev_z.reset();
    s.prev_t = t;
    return out;
  }
  s.front_missing = false;

  // Progress coordinate: increases along the travel direction.
  const auto progress = [&](double y) { return travel == front::Travel::plus_y ? y : ly - y; };
  const double u = progress(*z);
  const std::optional<double> u_prev = state.prev_z ? std::optional(progress(*state.prev_z)) : std::nullopt;
  const double t_prev = state.prev_t;
  s.prev_z = z;
  s.prev_t = t;
  if (!u_prev) return out;

  double du = u - *u_prev;
  if (periodic) {
    du = std::fmod(du, ly);
    if (du >= 0.5 * ly) du -= ly;
    if (du < -0.5 * ly) du += ly;
  }
  if (!(du > 0.0) || du > cfg.max_jump) return out;

  // Most recently passed trigger line, if any.
  std::optional<std::size_t> crossed;
  double crossed_offset = 0.0;
  for (std::size_t e = 0; e < sensors.y_lines.size(); ++e) {
    double offset = progress(sensors.y_lines[e]) - *u_prev;
    if (periodic) offset = wrap_positive(offset, ly);
    if (offset > 0.0 && offset <= du && offset >= crossed_offset) {
      crossed = e;
      crossed_offset = offset;
    }
  }
  if (!crossed) return out;

  const double t_j = t_prev + (t - t_prev) * (crossed_offset / du);
  if (s.last_crossing_time && s.last_line && t_j > *s.last_crossing_time) {
    double d = progress(sensors.y_lines[*crossed]) - progress(sensors.y_lines[*s.last_line]);
    if (d <= 0.0) d += ly;
    const double d_set = cfg.c_set * (t_j - *s.last_crossing_time);
    s.c_bar = d - d_set;
    out.event = ControlEvent{t_j, *crossed, d, d_set, s.c_bar, 0.0};
  }
  s.last_crossing_time = t_j;
  s.last_line = crossed;
  ++s.triggered;
  return out;
}

PollResult poll(const ControllerState& state, const front::FrontLine& f, std::size_t column,
                const ControllerConfig& cfg, const SensorLayout& sensors, double t,
                front::Travel travel) {
  if (column >= f.z.size()) throw ConfigError("poll: monitored column outside the front line");
  const std::optional<double> z = f.valid[column] ? std::optional(f.z[column]) : std::nullopt;
  return poll(state, z, cfg, sensors, t, f.ly, f.periodic, travel);
}

double actuator_current(double c_bar, const ControllerConfig& cfg, double dx, double dy) {
  return -cfg.k * cfg.slope_f * c_bar / (dx * dy);
}

grid::Field2D control_field(const ControllerState& state, const ControllerConfig& cfg,
                            const ActuatorLayout& layout, const grid::Grid2D& geometry, double t) {
  grid::Field2D out(geometry.nx(), geometry.ny());
  if (t < cfg.t_start) return out;
  const double current = actuator_current(state.c_bar, cfg, geometry.dx, geometry.dy);
  for (double x : layout.xs)
    for (double y : layout.ys) out(geometry.cell_x(x), geometry.cell_y(y)) += current;
  return out;
}

Layout idealized_layout(double lx, double ly) {
  Layout l;
  l.sensors.x_sensors = equally_spaced_sensors(7, lx);
  l.sensors.y_lines = {0.735 * ly};
  l.sensors.monitor = 3;
  l.actuators.xs = arithmetic(0.5, 1.0, 100, lx / 100.0);
  l.actuators.ys = arithmetic(0.5, 1.0, 200, ly / 200.0);
  return l;
}

namespace {

Layout sparse_layout(double lx, double ly, std::size_t sensors, std::size_t columns,
                     double column_stride) {
  Layout l;
  l.sensors.x_sensors = equally_spaced_sensors(sensors, lx);
  l.sensors.y_lines = {0.735 * ly};
  l.sensors.monitor = 0;
  l.actuators.xs = arithmetic(1.0, column_stride, columns, lx / 200.0);
  l.actuators.ys = arithmetic(110.0, 30.0, 6, ly / 400.0);
  return l;
}

}  // namespace

Layout sparse_layout_fig4(double lx, double ly) { return sparse_layout(lx, ly, 2, 25, 4.0); }
Layout sparse_layout_fig5(double lx, double ly) { return sparse_layout(lx, ly, 2, 50, 2.0); }
Layout sparse_layout_fig8(double lx, double ly) { return sparse_layout(lx, ly, 5, 50, 2.0); }

FeedbackController::FeedbackController(ControllerConfig cfg, Layout layout,
                                       const grid::Grid2D& geometry, grid::BoundarySpec boundary,
                                       double theta, front::Travel travel)
    : cfg_(cfg),
      layout_(std::move(layout)),
      boundary_(boundary),
      theta_(theta),
      travel_(travel),
      dx_(geometry.dx),
      dy_(geometry.dy),
      ly_(geometry.ly()),
      field_(geometry.nx(), geometry.ny()) {
  cfg_.validate();
  layout_.sensors.validate(geometry.lx(), geometry.ly());
  layout_.actuators.validate(geometry.lx(), geometry.ly());
  if (!(theta_ > 0.0 && theta_ < 1.0)) throw ConfigError("front threshold must lie in (0, 1)");
  column_ = geometry.cell_x(layout_.sensors.x_sensors[layout_.sensors.monitor]);
  for (double x : layout_.actuators.xs)
    for (double y : layout_.actuators.ys)
      cells_.push_back(geometry.cell_x(x) * geometry.ny() + geometry.cell_y(y));
}

void FeedbackController::rebuild(double current) {
  if (current == active_current_) return;
  auto data = field_.data();
  for (std::size_t c : cells_) data[c] = 0.0;
  for (std::size_t c : cells_) data[c] += current;
  active_current_ = current;
}

const grid::Field2D* FeedbackController::update(const grid::Grid2D& g) {
  const auto z = front::detect_front_column(g, column_, theta_, travel_, boundary_);
  auto result = poll(state_, z, cfg_, layout_.sensors, g.t, ly_, boundary_.periodic(), travel_);
  if (result.state.front_missing) ++missing_polls_;
  state_ = result.state;
  if (result.event) {
    result.event->current_per_cell =
        g.t < cfg_.t_start ? 0.0 : actuator_current(result.event->c_bar, cfg_, dx_, dy_);
    events_.push_back(*result.event);
  }
  const double current = g.t < cfg_.t_start ? 0.0 : actuator_current(state_.c_bar, cfg_, dx_, dy_);
  rebuild(current);
  return current == 0.0 ? nullptr : &field_;
}

}  // namespace spiralctl::control

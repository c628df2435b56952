#include "spiralctl/presets.hpp"

#include <algorithm>
#include <cmath>

#include "spiralctl/errors.hpp"

namespace spiralctl::experiment {

namespace {

using config::Config;

const std::vector<std::string>& names() {
  static const std::vector<std::string> n{"fig1", "fig2", "fig3", "fig4", "fig5", "fig7", "fig8"};
  return n;
}

Config base_settings() {
  Config c;
  const auto set = [&c](const char* k, const char* v) { c.set(k, v); };
  set("title", "");
  set("grid.nx", "200");
  set("grid.ny", "400");
  set("grid.dx", "1");
  set("grid.dy", "1");
  set("model.D", "1");
  set("model.eps", "0.01");
  set("model.alpha", "0.1");
  set("model.beta", "0.5");
  set("model.gamma", "1");
  set("model.delta", "0");
  set("sim.dt", "0.2");
  set("sim.quoted_dt", "0.5");
  set("sim.t_end", "1000");
  set("sim.cfl_policy", "reject");
  set("sim.threads", "1");
  set("torus.lower_fraction", "0.1");
  set("torus.exit_level", "0.1");
  set("torus.quiet_time", "50");
  set("torus.timeout", "3000");
  set("wave.break", "false");
  set("wave.break_at", "7");
  set("wave.break_x0", "0.05");
  set("wave.break_x1", "0.5");
  set("wave.theta", "0.5");
  set("control.enabled", "false");
  set("control.layout", "fig4");
  set("control.k", "0.001");
  set("control.c_set", "0.5");
  set("control.slope_f", "0.35355339059327373");
  set("control.t_start", "10");
  set("control.monitor", "1");
  set("control.sensor_row", "0.735");
  set("control.max_jump", "5");
  set("patch.enabled", "false");
  set("patch.alpha", "0.21");
  set("patch.x0", "0.01");
  set("patch.x1", "0.5");
  set("patch.y0", "0.275");
  set("patch.y1", "0.775");
  set("patch.t_start", "1");
  set("patch.duration", "199");
  set("output.sample_every", "10");
  set("output.snapshot_every", "100");
  set("output.frames", "true");
  set("classify.window", "10");
  set("classify.min_coverage", "0.95");
  set("classify.max_planarity", "2");
  set("classify.spiral_fraction", "0.1");
  return c;
}

control::Layout layout_by_name(std::string_view name, double lx, double ly) {
  if (name == "idealized") return control::idealized_layout(lx, ly);
  if (name == "fig4") return control::sparse_layout_fig4(lx, ly);
  if (name == "fig5") return control::sparse_layout_fig5(lx, ly);
  if (name == "fig8") return control::sparse_layout_fig8(lx, ly);
  throw ConfigError("control.layout: unknown layout '" + std::string(name) +
                    "' (expected idealized, fig4, fig5 or fig8)");
}

grid::CflPolicy cfl_policy(std::string_view s) {
  if (s == "reject") return grid::CflPolicy::reject;
  if (s == "warn") return grid::CflPolicy::warn;
  throw ConfigError("sim.cfl_policy: expected reject or warn, got '" + std::string(s) + "'");
}

}  // namespace

std::vector<std::string> preset_names() { return names(); }

Config preset_settings(std::string_view name) {
  Config c = base_settings();
  const auto set = [&c](const char* k, const char* v) { c.set(k, v); };
  if (name == "fig1") {
    set("title", "plane wave on the torus (reference run)");
  } else if (name == "fig2") {
    set("title", "uncontrolled plane wave broken at t = 7");
    set("wave.break", "true");
  } else if (name == "fig3" || name == "fig4" || name == "fig5") {
    set("wave.break", "true");
    set("control.enabled", "true");
    set("sim.t_end", "4000");
    if (name == "fig3") {
      set("title", "idealized dense controller");
      set("control.layout", "idealized");
      set("control.monitor", "4");
      set("output.snapshot_every", "200");
    } else if (name == "fig4") {
      set("title", "2 sensors, 25 x 6 actuators");
      set("output.snapshot_every", "400");
    } else {
      set("title", "2 sensors, 50 x 6 actuators");
      set("control.layout", "fig5");
      set("output.snapshot_every", "400");
    }
  } else if (name == "fig7") {
    set("title", "heterogeneous patch, uncontrolled");
    set("patch.enabled", "true");
  } else if (name == "fig8") {
    set("title", "heterogeneous patch with 5 sensors, 50 x 6 actuators");
    set("patch.enabled", "true");
    set("control.enabled", "true");
    set("control.layout", "fig8");
    set("sim.t_end", "4000");
    set("output.snapshot_every", "200");
  } else {
    std::string known;
    for (const auto& n : names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown preset '" + std::string(name) + "' (known: " + known + ")");
  }
  return c;
}

ExperimentPreset resolve(std::string_view name, const Config& c) {
  ExperimentPreset p;
  p.name = std::string(name);
  p.title = c.raw("title");
  p.settings = c;

  p.nx = c.count("grid.nx");
  p.ny = c.count("grid.ny");
  p.dx = c.number("grid.dx");
  p.dy = c.number("grid.dy");
  grid::Grid2D(p.nx, p.ny, p.dx, p.dy).validate();

  p.model.D = c.number("model.D");
  p.model.eps = c.number("model.eps");
  p.model.alpha = c.number("model.alpha");
  p.model.beta = c.number("model.beta");
  p.model.gamma = c.number("model.gamma");
  p.model.delta = c.number("model.delta");
  p.model.validate();

  p.sim.dt = c.number("sim.dt");
  p.sim.t_end = c.number("sim.t_end");
  p.sim.cfl_policy = cfl_policy(c.raw("sim.cfl_policy"));
  p.sim.threads = static_cast<int>(c.count("sim.threads"));
  p.sim.snapshot_stride = 1;
  p.sim.validate();
  p.quoted_dt = c.number("sim.quoted_dt");
  try {
    grid::check_cfl(p.model, p.sim.dt, p.dx, p.dy, p.sim.cfl_policy);
  } catch (const NumericalError& e) {
    throw ConfigError(e.what());
  }

  p.torus.lower_fraction = c.number("torus.lower_fraction");
  p.torus.exit_level = c.number("torus.exit_level");
  p.torus.quiet_time = c.number("torus.quiet_time");
  p.torus.timeout = c.number("torus.timeout");
  if (!(p.torus.lower_fraction > 0.0 && p.torus.lower_fraction < 0.245) || !(p.torus.quiet_time >= 0.0) ||
      !(p.torus.timeout > 0.0))
    throw ConfigError("torus: need 0 < lower_fraction < 0.245, quiet_time >= 0, timeout > 0");

  if (c.flag("wave.break")) p.break_at = c.number("wave.break_at");
  p.break_x = {c.number("wave.break_x0"), c.number("wave.break_x1")};
  if (p.break_at && (*p.break_at < 0.0 || p.break_x.empty() || p.break_x.lo < 0.0 || p.break_x.hi > 1.0))
    throw ConfigError("wave: break_at must be >= 0 and 0 <= break_x0 <= break_x1 <= 1");
  p.theta = c.number("wave.theta");
  if (!(p.theta > 0.0 && p.theta < 1.0)) throw ConfigError("wave.theta must lie in (0, 1)");

  p.controlled = c.flag("control.enabled");
  p.layout_name = c.raw("control.layout");
  p.layout = layout_by_name(p.layout_name, p.lx(), p.ly());
  const std::size_t monitor = c.count("control.monitor");
  if (monitor < 1 || monitor > p.layout.sensors.x_sensors.size())
    throw ConfigError("control.monitor must be between 1 and the number of sensors (" +
                      std::to_string(p.layout.sensors.x_sensors.size()) + ")");
  p.layout.sensors.monitor = monitor - 1;
  p.layout.sensors.y_lines = {c.number("control.sensor_row") * p.ly()};
  p.layout.sensors.validate(p.lx(), p.ly());
  p.layout.actuators.validate(p.lx(), p.ly());
  p.controller.k = c.number("control.k");
  p.controller.c_set = c.number("control.c_set");
  p.controller.slope_f = c.number("control.slope_f");
  p.controller.t_start = c.number("control.t_start");
  p.controller.max_jump = c.number("control.max_jump");
  p.controller.validate();

  if (c.flag("patch.enabled")) {
    model::HeterogeneityPatch h;
    h.alpha_override = c.number("patch.alpha");
    h.x_frac = {c.number("patch.x0"), c.number("patch.x1")};
    h.y_frac = {c.number("patch.y0"), c.number("patch.y1")};
    const double start = c.number("patch.t_start");
    h.t_range = {start, start + c.number("patch.duration")};
    h.validate();
    p.patches.push_back(h);
  }

  p.sample_every = c.number("output.sample_every");
  p.snapshot_every = c.number("output.snapshot_every");
  p.write_frames = c.flag("output.frames");
  if (!(p.sample_every >= p.sim.dt) || !(p.snapshot_every >= p.sim.dt))
    throw ConfigError("output.sample_every and output.snapshot_every must be at least sim.dt");
  for (double t = p.snapshot_every; t <= p.sim.t_end + 1e-9; t += p.snapshot_every)
    p.snapshot_times.push_back(t);

  p.classify_window = c.count("classify.window");
  if (p.classify_window < 2) throw ConfigError("classify.window must be >= 2");
  p.thresholds.min_coverage = c.number("classify.min_coverage");
  p.thresholds.max_planarity_cells = c.number("classify.max_planarity");
  p.thresholds.spiral_column_fraction = c.number("classify.spiral_fraction");
  return p;
}

ExperimentPreset make_preset(std::string_view name,
                             std::span<const std::pair<std::string, std::string>> overrides) {
  Config c = preset_settings(name);
  for (const auto& [k, v] : overrides) c.override_existing(k, v);
  return resolve(name, c);
}

bool ReferenceCheck::ok() const {
  return std::abs(literal - resolved) <= 1e-9 * std::max(1.0, std::abs(literal));
}

std::vector<ReferenceCheck> reference_checks(const ExperimentPreset& p) {
  std::vector<ReferenceCheck> out;
  const auto add = [&out](std::string item, double literal, double resolved) {
    out.push_back({std::move(item), literal, resolved});
  };
  // Kinetics and rest state shared by every figure.
  add("epsilon", 0.01, p.model.eps);
  add("alpha (outside any patch)", 0.1, p.model.alpha);
  add("beta", 0.5, p.model.beta);
  add("gamma", 1.0, p.model.gamma);
  add("delta", 0.0, p.model.delta);
  const model::RestState rest = model::steady_state(p.model);
  add("rest V", 0.0, rest.v);
  add("rest W", 0.0, rest.w);
  if (p.name == "fig1") return out;

  add("Nx", 200, static_cast<double>(p.nx));
  add("Ny", 400, static_cast<double>(p.ny));
  add("dx", 1.0, p.dx);
  add("dy", 1.0, p.dy);
  add("quoted dt", 0.5, p.quoted_dt);
  const bool broken = p.name == "fig2" || p.name == "fig3" || p.name == "fig4" || p.name == "fig5";
  if (broken) {
    add("break time", 7.0, p.break_at.value_or(-1.0));
    add("break x from (fraction of Lx)", 0.05, p.break_x.lo);
    add("break x to (fraction of Lx)", 0.5, p.break_x.hi);
  }
  const bool patched = p.name == "fig7" || p.name == "fig8";
  if (patched) {
    const model::HeterogeneityPatch none{};
    const auto& h = p.patches.empty() ? none : p.patches.front();
    add("patch count", 1.0, static_cast<double>(p.patches.size()));
    add("patch alpha", 0.21, h.alpha_override);
    add("patch x from", 0.01, h.x_frac.lo);
    add("patch x to", 0.5, h.x_frac.hi);
    add("patch y from", 0.275, h.y_frac.lo);
    add("patch y to", 0.775, h.y_frac.hi);
    add("patch active from", 1.0, h.t_range.lo);
    add("patch active to", 200.0, h.t_range.hi);
  }
  if (p.controlled) {
    const auto& s = p.layout.sensors;
    const auto& a = p.layout.actuators;
    add("k", 0.001, p.controller.k);
    add("c_set", 0.5, p.controller.c_set);
    add("control start", 10.0, p.controller.t_start);
    add("sensor row (fraction of Ly)", 0.735, s.y_lines.front() / p.ly());
    const double cell_x = p.lx() / 200.0;
    const double cell_y = p.ly() / 400.0;
    if (p.name == "fig3") {
      add("sensors", 7, static_cast<double>(s.x_sensors.size()));
      add("actuator columns", 100, static_cast<double>(a.xs.size()));
      add("actuator rows", 200, static_cast<double>(a.ys.size()));
    } else {
      const double columns = p.name == "fig4" ? 25 : 50;
      const double stride = p.name == "fig4" ? 4 : 2;
      add("sensors", p.name == "fig8" ? 5 : 2, static_cast<double>(s.x_sensors.size()));
      if (p.name != "fig8") {
        add("first sensor (fraction of Lx)", 1.0 / 3.0, s.x_sensors.front() / p.lx());
        add("second sensor (fraction of Lx)", 2.0 / 3.0, s.x_sensors.back() / p.lx());
      }
      add("actuator columns", columns, static_cast<double>(a.xs.size()));
      add("first actuator column (point)", 1, a.xs.front() / cell_x);
      add("actuator column spacing (points)", stride, (a.xs[1] - a.xs[0]) / cell_x);
      add("actuator rows", 6, static_cast<double>(a.ys.size()));
      add("first actuator row (point)", 110, a.ys.front() / cell_y);
      add("last actuator row (point)", 260, a.ys.back() / cell_y);
    }
  }
  const double snap = p.name == "fig3" || p.name == "fig8"   ? 200.0
                      : p.name == "fig4" || p.name == "fig5" ? 400.0
                                                             : 100.0;
  add("snapshot interval", snap, p.snapshot_every);
  return out;
}

}  // namespace spiralctl::experiment

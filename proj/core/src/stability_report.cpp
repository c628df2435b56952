#include "spiralctl/stability_report.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "spiralctl/config.hpp"
#include "spiralctl/errors.hpp"
#include "spiralctl/feedback_control.hpp"

namespace spiralctl::experiment {

namespace {

using config::format_number;

std::string num(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string complex_list(const std::vector<std::complex<double>>& zs) {
  std::string out;
  for (const auto& z : zs) {
    if (!out.empty()) out += ", ";
    out += num(z.real());
    if (z.imag() != 0.0) out += (z.imag() > 0 ? "+" : "-") + num(std::abs(z.imag())) + "i";
  }
  return out.empty() ? "none" : out;
}

bool distributed(const std::string& layout) { return layout == "uniform" || layout == "idealized"; }

}  // namespace

std::string stability_report(const StabilityOptions& opts) {
  using namespace stability;
  if (opts.modes < 2 || opts.modes > 200) throw ConfigError("--N must lie in [2, 200]");
  if (!(opts.lx > 0.0) || !(opts.ly > 0.0)) throw ConfigError("domain lengths must be positive");

  FrontLinearization lin;
  if (opts.chi) {
    lin.chi = *opts.chi;
    lin.slope_f = opts.slope_f;
  } else {
    lin = chi_estimate(opts.chi_mode, opts.model,
                       opts.chi_mode == ChiMode::numeric_slope ? std::optional(opts.slope_w)
                                                               : std::nullopt);
    lin.slope_f = opts.slope_f;
  }

  double sensor_x = 0.0;
  std::vector<double> actuators;
  if (opts.layout == "custom") {
    if (!opts.sensor_x || opts.actuator_xs.empty())
      throw ConfigError("custom layout needs --sensor-x and --actuators");
    sensor_x = *opts.sensor_x;
    actuators = opts.actuator_xs;
  } else if (!distributed(opts.layout)) {
    control::Layout l;
    if (opts.layout == "fig3") l = control::idealized_layout(opts.lx, opts.ly);
    else if (opts.layout == "fig4") l = control::sparse_layout_fig4(opts.lx, opts.ly);
    else if (opts.layout == "fig5") l = control::sparse_layout_fig5(opts.lx, opts.ly);
    else if (opts.layout == "fig8") l = control::sparse_layout_fig8(opts.lx, opts.ly);
    else
      throw ConfigError("unknown layout '" + opts.layout +
                        "' (expected uniform, idealized, fig3, fig4, fig5, fig8 or custom)");
    if (opts.monitor < 1 || opts.monitor > l.sensors.x_sensors.size())
      throw ConfigError("--monitor must be between 1 and " + std::to_string(l.sensors.x_sensors.size()));
    sensor_x = l.sensors.x_sensors[opts.monitor - 1];
    actuators = l.actuators.xs;
  }

  const GalerkinSystem sys =
      build_modal_system(lin.chi, opts.lx, opts.modes, actuators, sensor_x, opts.convention);

  std::ostringstream o;
  o << "layout: " << opts.layout << "\n";
  o << "lx: " << num(opts.lx) << "\n";
  o << "chi_mode: " << (opts.chi ? "given" : opts.chi_mode == ChiMode::numeric_slope ? "numeric-slope" : "analytic")
    << "\n";
  o << "chi: " << num(lin.chi) << "\n";
  if (!opts.chi) {
    o << "dc_dw: " << num(lin.dcdw) << "\n";
    o << "inhibitor_slope: " << num(lin.slope_w) << "\n";
  }
  o << "front_slope: " << num(lin.slope_f) << "\n";
  o << "modes: " << opts.modes << "\n";
  o << "convention: " << to_string(opts.convention) << "\n";

  const auto open = spectrum(sys.a_matrix());
  const auto unstable = std::count_if(sys.a.begin(), sys.a.end(), [](double a) { return a > 0.0; });
  o << "open_loop_spectrum: ";
  for (std::size_t n = 0; n < sys.n; ++n) o << (n ? ", " : "") << num(sys.a[n]);
  o << "\n";
  o << "open_loop_abscissa: " << num(open.spectral_abscissa) << "\n";
  o << "unstable_open_loop_modes: " << unstable << "\n";
  const auto crossover = static_cast<long long>(std::ceil(opts.lx * std::sqrt(std::max(lin.chi, 0.0)) / std::numbers::pi));
  o << "first_stable_mode_index: " << crossover << "\n";
  o << "uniform_threshold_chi_over_slope: " << num(lin.chi / lin.slope_f) << "\n";

  std::function<Matrix(double)> closed;
  if (distributed(opts.layout)) {
    o << "feedback: distributed (sensing and actuation along the whole front)\n";
    o << "solvability: not applicable\n";
    closed = [&](double k) { return uniform_closed_loop_matrix(sys, k, lin.slope_f); };
  } else {
    o << "feedback: point (sensor x " << num(sensor_x) << ", " << actuators.size()
      << " actuator columns)\n";
    try {
      const Solvability sol = solvability_check(sys);
      o << "hb: " << num(sol.hb) << "\n";
      o << "hb_nonzero: " << (sol.hb_nonzero ? "true" : "false") << "\n";
      o << "zeros: " << complex_list(sol.zeros) << "\n";
      o << "zeros_all_negative: " << (sol.zeros_all_negative ? "true" : "false") << "\n";
      o << "solvable: " << (sol.hb_nonzero && sol.zeros_all_negative ? "true" : "false") << "\n";
    } catch (const NumericalError&) {
      // Sensor sits on a node of every mode the actuators excite.
      o << "hb: 0\nhb_nonzero: false\nzeros: none\nzeros_all_negative: false\n";
      o << "solvable: false (degenerate transfer function)\n";
    }
    closed = [&](double k) { return closed_loop_matrix(sys, k, lin.slope_f); };
  }

  const GainSearch search = minimal_stabilizing_gain(closed, opts.k_lo, opts.k_hi, opts.k_steps);
  o << "gain_sweep:\n";
  for (const auto& pt : search.sweep)
    o << "  k " << num(pt.k) << " abscissa " << num(pt.spectral_abscissa) << "\n";
  o << "minimal_stabilizing_k: "
    << (search.minimal_stabilizing_k ? num(*search.minimal_stabilizing_k) : "none") << "\n";
  if (search.minimal_stabilizing_k) {
    const double k = *search.minimal_stabilizing_k * 1.01;
    const double interval = opts.ly / opts.c_set;
    const auto sampled = sampled_stability(closed(k), interval);
    o << "sampled_interval: " << num(interval) << "\n";
    o << "sampled_stable_at_1.01k: " << (sampled.stable ? "true" : "false") << "\n";
    o << "sampled_max_radius: " << num(*std::max_element(sampled.radii.begin(), sampled.radii.end()))
      << "\n";
  }
  return o.str();
}

}  // namespace spiralctl::experiment

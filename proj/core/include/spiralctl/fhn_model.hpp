#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace spiralctl::model {

/// FitzHugh-Nagumo constants. Defaults are the excitable parameter set used by every preset.
struct ModelParams {
  double D = 1.0;
  double eps = 0.01;
  double alpha = 0.1;
  double beta = 0.5;
  double gamma = 1.0;
  double delta = 0.0;

  /// Throws ConfigError unless eps > 0, gamma > 0, 0 < alpha < 1, D > 0.
  void validate() const;
};

/// Closed interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  [[nodiscard]] bool contains(double v) const { return v >= lo && v <= hi; }
  [[nodiscard]] bool empty() const { return !(hi > lo); }
};

/// A rectangle of the domain (given as fractions of Lx, Ly) where alpha is replaced
/// while t lies in t_range.
struct HeterogeneityPatch {
  double alpha_override = 0.1;
  Interval x_frac;
  Interval y_frac;
  Interval t_range;

  void validate() const;
};

struct RestState {
  double v = 0.0;
  double w = 0.0;
};

struct Nullclines {
  std::vector<double> v;
  std::vector<double> w_fast;  ///< f(V) - W = 0
  std::vector<double> w_slow;  ///< beta V - gamma W + delta = 0
};

/// Cubic kinetics V (alpha - V)(V - 1).
[[nodiscard]] inline double reaction_f(double v, double alpha) {
  return v * (alpha - v) * (v - 1.0);
}

/// Recovery rate eps (beta V - gamma W + delta).
[[nodiscard]] inline double reaction_g(double v, double w, const ModelParams& p) {
  return p.eps * (p.beta * v - p.gamma * w + p.delta);
}

/// Rest state closest to the origin. Damped Newton on f(V) = (beta V + delta) / gamma,
/// 64 iterations, residual tolerance 1e-12. Throws NumericalError on non-convergence.
[[nodiscard]] RestState steady_state(const ModelParams& p);

/// Samples both nullclines at `samples` evenly spaced V values on [v_lo, v_hi].
[[nodiscard]] Nullclines nullclines(const ModelParams& p, double v_lo, double v_hi,
                                    std::size_t samples);

/// Threshold at (x, y, t). The last active patch containing the point wins.
[[nodiscard]] double alpha_at(double x, double y, double t, double lx, double ly,
                              const ModelParams& p,
                              std::span<const HeterogeneityPatch> patches);

}  // namespace spiralctl::model

#include "spiralctl/fhn_model.hpp"

#include <cmath>
#include <string>

#include "spiralctl/errors.hpp"

namespace spiralctl::model {

void ModelParams::validate() const {
  if (!(eps > 0.0)) throw ConfigError("model.eps must be > 0");
  if (!(gamma > 0.0)) throw ConfigError("model.gamma must be > 0");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("model.alpha must lie in (0, 1)");
  if (!(D > 0.0)) throw ConfigError("model.D must be > 0");
}

void HeterogeneityPatch::validate() const {
  if (x_frac.empty() || y_frac.empty() || t_range.empty())
    throw ConfigError("heterogeneity patch ranges must be non-empty intervals");
  if (x_frac.lo < 0.0 || x_frac.hi > 1.0 || y_frac.lo < 0.0 || y_frac.hi > 1.0)
    throw ConfigError("heterogeneity patch fractions must lie in [0, 1]");
  if (!(alpha_override > 0.0 && alpha_override < 1.0))
    throw ConfigError("heterogeneity alpha must lie in (0, 1)");
}

RestState steady_state(const ModelParams& p) {
  // On the slow nullcline W = (beta V + delta) / gamma, so the rest state is a root of
  // h(V) = f(V) - (beta V + delta) / gamma.
  const auto h = [&](double v) { return reaction_f(v, p.alpha) - (p.beta * v + p.delta) / p.gamma; };
  const auto dh = [&](double v) {
    return -3.0 * v * v + 2.0 * v * (p.alpha + 1.0) - p.alpha - p.beta / p.gamma;
  };

  constexpr int kMaxIterations = 64;
  constexpr double kTolerance = 1e-12;
  double v = 0.0;
  double r = h(v);
  for (int it = 0; it < kMaxIterations && std::abs(r) > kTolerance; ++it) {
    const double d = dh(v);
    if (d == 0.0) break;
    double step = -r / d;
    double v_next = v + step;
    double r_next = h(v_next);
    int halvings = 0;
    while (std::abs(r_next) >= std::abs(r) && halvings < 30) {
      step *= 0.5;
      v_next = v + step;
      r_next = h(v_next);
      ++halvings;
    }
    v = v_next;
    r = r_next;
  }
  if (!(std::abs(r) <= kTolerance))
    throw NumericalError("steady_state: Newton iteration did not converge (residual " +
                         std::to_string(r) + ")");
  return {v, (p.beta * v + p.delta) / p.gamma};
}

Nullclines nullclines(const ModelParams& p, double v_lo, double v_hi, std::size_t samples) {
  if (samples < 2) throw ConfigError("nullclines: need at least 2 samples");
  Nullclines out;
  out.v.resize(samples);
  out.w_fast.resize(samples);
  out.w_slow.resize(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(samples - 1);
    const double v = (i + 1 == samples) ? v_hi : v_lo + s * (v_hi - v_lo);
    out.v[i] = v;
    out.w_fast[i] = reaction_f(v, p.alpha);
    out.w_slow[i] = (p.beta * v + p.delta) / p.gamma;
  }
  return out;
}

double alpha_at(double x, double y, double t, double lx, double ly, const ModelParams& p,
                std::span<const HeterogeneityPatch> patches) {
  double a = p.alpha;
  for (const auto& patch : patches) {
    if (patch.t_range.contains(t) && patch.x_frac.contains(x / lx) &&
        patch.y_frac.contains(y / ly))
      a = patch.alpha_override;
  }
  return a;
}

}  // namespace spiralctl::model

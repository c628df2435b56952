#include "spiralctl/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spiralctl/errors.hpp"

namespace spiralctl::stability {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;

void require_modes(std::size_t n) {
  if (n < 1) throw ConfigError("number of modes must be at least 1");
}

void require_length(double lx) {
  if (!(lx > 0.0) || !std::isfinite(lx)) throw ConfigError("transverse length must be positive");
}

}  // namespace

double c_inf_kinematic(double v_plus, double v_minus, double v_mid) {
  return (v_plus + v_minus - 2.0 * v_mid) / kSqrt2;
}

double root_shift_denominator(double v_star, double alpha) {
  return -3.0 * v_star * v_star + 2.0 * v_star * (alpha + 1.0) - alpha;
}

double perturbed_root(double v_star, double w0, double alpha) {
  const double den = root_shift_denominator(v_star, alpha);
  if (std::abs(den) < 1e-12) throw NumericalError("perturbed_root: degenerate (double) root");
  return w0 / den;
}

double dc_inf_dW(double alpha) {
  const double up = perturbed_root(1.0, 1.0, alpha);
  const double rest = perturbed_root(0.0, 1.0, alpha);
  const double mid = perturbed_root(alpha, 1.0, alpha);
  return c_inf_kinematic(up, rest, mid);
}

double front_slope_analytic(double beta) {
  if (!(beta >= 0.0 && beta < 1.0)) throw ConfigError("front slope needs 0 <= beta < 1");
  return (1.0 - beta) / kSqrt2;
}

FrontLinearization chi_estimate(ChiMode mode, const model::ModelParams& p,
                                std::optional<double> slope_w_numeric) {
  FrontLinearization f;
  f.dcdw = dc_inf_dW(p.alpha);
  f.slope_f = front_slope_analytic(p.beta);
  if (mode == ChiMode::numeric_slope) {
    if (!slope_w_numeric) throw ConfigError("numeric chi needs a measured inhibitor slope");
    f.slope_w = *slope_w_numeric;
  } else {
    if (p.gamma == 0.0) throw ConfigError("analytic chi needs gamma != 0");
    f.slope_w = p.beta / p.gamma * f.slope_f;
  }
  f.chi = -f.dcdw * f.slope_w;
  return f;
}

std::vector<double> open_loop_eigs(double chi, double lx, std::size_t n_modes) {
  return uniform_closed_loop_eigs(chi, lx, 0.0, 1.0, n_modes);
}

std::vector<double> uniform_closed_loop_eigs(double chi, double lx, double k, double slope_f,
                                             std::size_t n_modes) {
  require_modes(n_modes);
  require_length(lx);
  if (!(slope_f > 0.0)) throw ConfigError("front slope must be positive");
  std::vector<double> rho(n_modes);
  for (std::size_t n = 1; n <= n_modes; ++n) {
    const double q = static_cast<double>(n) * kPi / lx;
    rho[n - 1] = chi - q * q - k * slope_f;
  }
  return rho;
}

std::string_view to_string(ModeConvention c) {
  return c == ModeConvention::shifted_cosine ? "shifted" : "cosine-with-constant";
}

ModeConvention parse_convention(std::string_view s) {
  if (s == "shifted" || s == "shifted-cosine") return ModeConvention::shifted_cosine;
  if (s == "cosine-with-constant" || s == "cosine-with-constant-mode" || s == "cosine") return ModeConvention::cosine_with_constant;
  throw ConfigError("unknown mode convention '" + std::string(s) + "'");
}

double mode_shape(std::size_t n, double x, double lx) {
  if (n == 0) throw ConfigError("mode index is 1-based");
  if (n == 1) return 1.0 / std::sqrt(lx);
  return kSqrt2 / std::sqrt(lx) * std::cos(static_cast<double>(n - 1) * kPi * x / lx);
}

Matrix GalerkinSystem::a_matrix() const { return Matrix::diagonal(a); }

double GalerkinSystem::basis(std::size_t idx, double x) const {
  if (convention == ModeConvention::cosine_with_constant) return mode_shape(idx, x, lx);
  return kSqrt2 / std::sqrt(lx) * std::cos(static_cast<double>(idx) * kPi * x / lx);
}

GalerkinSystem build_modal_system(double chi, double lx, std::size_t n_modes,
                                  std::span<const double> actuator_xs, double sensor_x,
                                  ModeConvention convention) {
  require_modes(n_modes);
  require_length(lx);
  const auto in_range = [lx](double x) { return x >= 0.0 && x <= lx; };
  if (!in_range(sensor_x)) throw ConfigError("sensor position outside [0, lx]");
  for (double x : actuator_xs)
    if (!in_range(x)) throw ConfigError("actuator position outside [0, lx]");

  GalerkinSystem s;
  s.n = n_modes;
  s.lx = lx;
  s.chi = chi;
  s.convention = convention;
  s.a.resize(n_modes);
  s.b.assign(n_modes, 0.0);
  s.h.resize(n_modes);
  const double inv_root = 1.0 / std::sqrt(lx);
  for (std::size_t n = 1; n <= n_modes; ++n) {
    const double wave = convention == ModeConvention::shifted_cosine ? static_cast<double>(n)
                                                                 : static_cast<double>(n - 1);
    const double q = wave * kPi / lx;
    s.a[n - 1] = chi - q * q;
    s.h[n - 1] = mode_shape(n, sensor_x, lx);
    for (double x : actuator_xs) {
      // The literal actuator weights use cos(n pi x / lx) from the second entry on.
      s.b[n - 1] += n == 1 ? inv_root : kSqrt2 * inv_root * std::cos(q * x);
    }
  }
  return s;
}

Matrix closed_loop_matrix(const GalerkinSystem& sys, double k, double slope_f) {
  if (k < 0.0) throw ConfigError("gain must be non-negative");
  Matrix m = sys.a_matrix();
  const double g = k * slope_f;
  for (std::size_t i = 0; i < sys.n; ++i)
    for (std::size_t j = 0; j < sys.n; ++j) m(i, j) -= g * sys.b[i] * sys.h[j];
  return m;
}

Matrix uniform_closed_loop_matrix(const GalerkinSystem& sys, double k, double slope_f) {
  if (k < 0.0) throw ConfigError("gain must be non-negative");
  Matrix m = sys.a_matrix();
  for (std::size_t i = 0; i < sys.n; ++i) m(i, i) -= k * slope_f;
  return m;
}

SpectrumReport spectrum(const Matrix& m) {
  if (!m.square()) throw ConfigError("spectrum: matrix must be square");
  if (m.rows() > 200) throw ConfigError("spectrum: matrix larger than 200x200");
  SpectrumReport r;
  r.eigenvalues = linalg::eigenvalues(m);
  std::sort(r.eigenvalues.begin(), r.eigenvalues.end(), [](auto x, auto y) {
    return x.real() != y.real() ? x.real() > y.real() : x.imag() > y.imag();
  });
  r.spectral_abscissa = r.eigenvalues.empty() ? -INFINITY : r.eigenvalues.front().real();
  r.stable = r.spectral_abscissa < 0.0;
  return r;
}

Solvability solvability_check(const GalerkinSystem& sys) {
  if (sys.n < 2) throw ConfigError("solvability check needs at least 2 modes");
  const std::size_t n = sys.n;
  std::vector<double> g(n);
  double g_abs = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    g[j] = sys.h[j] * sys.b[j];
    g_abs += std::abs(g[j]);
  }
  if (g_abs == 0.0) throw NumericalError("degenerate transfer function: every H_j B_j is zero");

  Solvability out;
  for (double v : g) out.hb += v;
  out.hb_nonzero = std::abs(out.hb) > 1e-12 * g_abs;

  // Expand the numerator in a shifted and scaled variable u = (s - centre) / scale.
  double lo = sys.a[0], hi = sys.a[0];
  for (double v : sys.a) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double centre = 0.5 * (lo + hi);
  const double scale = hi > lo ? 0.5 * (hi - lo) : 1.0;
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = (sys.a[i] - centre) / scale;

  std::vector<double> coeffs(n, 0.0);  // highest power first, degree n - 1
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> poly{1.0};
    for (std::size_t i = 0; i < n; ++i) {
      if (i == j) continue;
      std::vector<double> next(poly.size() + 1, 0.0);
      for (std::size_t c = 0; c < poly.size(); ++c) {
        next[c] += poly[c];
        next[c + 1] -= poly[c] * u[i];
      }
      poly = std::move(next);
    }
    for (std::size_t c = 0; c < n; ++c) coeffs[c] += g[j] * poly[c];
  }
  double cmax = 0.0;
  for (double c : coeffs) cmax = std::max(cmax, std::abs(c));
  std::size_t lead = 0;
  while (lead < coeffs.size() && std::abs(coeffs[lead]) <= 1e-13 * cmax) ++lead;
  const std::vector<double> trimmed(coeffs.begin() + static_cast<std::ptrdiff_t>(lead), coeffs.end());
  std::vector<std::complex<double>> roots =
      trimmed.size() > 1 ? linalg::polynomial_roots(trimmed) : std::vector<std::complex<double>>{};

  // Newton polish on the rational form sum_j g_j / (u - u_j), which stays well conditioned.
  for (std::size_t r = 0; r < roots.size(); ++r) {
    double gap = INFINITY;
    for (std::size_t q = 0; q < roots.size(); ++q)
      if (q != r) gap = std::min(gap, std::abs(roots[q] - roots[r]));
    std::complex<double> z = roots[r];
    for (int it = 0; it < 20; ++it) {
      std::complex<double> f = 0.0, df = 0.0;
      bool on_pole = false;
      for (std::size_t j = 0; j < n; ++j) {
        const std::complex<double> d = z - u[j];
        if (std::abs(d) < 1e-300) {
          on_pole = true;
          break;
        }
        f += g[j] / d;
        df -= g[j] / (d * d);
      }
      if (on_pole || std::abs(df) == 0.0) break;
      const std::complex<double> step = f / df;
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
      z -= step;
      if (std::abs(step) <= 1e-15 * (1.0 + std::abs(z))) break;
    }
    if (std::abs(z - roots[r]) < 0.5 * gap) roots[r] = z;
  }

  out.zeros.reserve(roots.size());
  out.zeros_all_negative = true;
  for (const auto& r : roots) {
    const std::complex<double> s = centre + scale * r;
    out.zeros.push_back(s);
    if (!(s.real() < 0.0)) out.zeros_all_negative = false;
  }
  std::sort(out.zeros.begin(), out.zeros.end(), [](auto x, auto y) {
    return x.real() != y.real() ? x.real() > y.real() : x.imag() > y.imag();
  });
  return out;
}

SampledStability sampled_stability(const Matrix& m, double dt) {
  if (!(dt > 0.0)) throw ConfigError("sampling interval must be positive");
  const SpectrumReport sp = spectrum(m);
  SampledStability out;
  out.stable = sp.stable;
  out.radii.reserve(sp.eigenvalues.size());
  for (const auto& l : sp.eigenvalues) out.radii.push_back(std::exp(l.real() * dt));
  return out;
}

namespace {

// Tridiagonal solve for the constant Crank-Nicolson left-hand side.
struct Tridiagonal {
  std::vector<double> lower, diag, upper;

  [[nodiscard]] std::vector<double> solve(std::vector<double> r) const {
    const std::size_t n = diag.size();
    std::vector<double> c(n), d(n);
    c[0] = upper[0] / diag[0];
    d[0] = r[0] / diag[0];
    for (std::size_t i = 1; i < n; ++i) {
      const double m = diag[i] - lower[i] * c[i - 1];
      c[i] = i + 1 < n ? upper[i] / m : 0.0;
      d[i] = (r[i] - lower[i] * d[i - 1]) / m;
    }
    for (std::size_t i = n - 1; i-- > 0;) d[i] -= c[i] * d[i + 1];
    return d;
  }
};

double l2(std::span<const double> v, double dx) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s * dx);
}

}  // namespace

OracleResult modal_vs_pde_oracle(const OracleInstance& inst) {
  require_length(inst.lx);
  if (inst.lx > 50.0) throw ConfigError("oracle is meant for small instances (lx <= 50)");
  if (inst.modes < 1 || inst.modes > 32) throw ConfigError("oracle needs 1 <= modes <= 32");
  if (inst.cells < 16) throw ConfigError("oracle needs at least 16 cells");
  if (!(inst.dt > 0.0) || !(inst.horizon > 0.0) || inst.samples < 1)
    throw ConfigError("oracle needs positive dt, horizon and sample count");
  if (!inst.initial) throw ConfigError("oracle needs an initial profile");

  const std::size_t m = inst.cells;
  const double dx = inst.lx / static_cast<double>(m);
  const auto centre = [dx](std::size_t i) { return (static_cast<double>(i) + 0.5) * dx; };
  const double gain = inst.k * inst.slope_f;

  // Finite-difference operator: chi + Neumann Laplacian, minus rank-one feedback u w^T.
  std::vector<double> act(m, 0.0);
  for (double x : inst.actuator_xs) {
    const auto c = std::min(m - 1, static_cast<std::size_t>(std::max(0.0, std::floor(x / dx))));
    act[c] += gain / dx;
  }
  std::vector<double> sense(m, 0.0);
  {
    const double pos = std::clamp(inst.sensor_x / dx - 0.5, 0.0, static_cast<double>(m - 1));
    const auto i0 = std::min(m - 2, static_cast<std::size_t>(pos));
    const double frac = pos - static_cast<double>(i0);
    sense[i0] += 1.0 - frac;
    sense[i0 + 1] += frac;
  }
  const double r = 1.0 / (dx * dx);
  const auto apply_t = [&](const std::vector<double>& z, std::size_t i) {
    const double left = z[i == 0 ? 0 : i - 1];
    const double right = z[i + 1 == m ? m - 1 : i + 1];
    return inst.chi * z[i] + r * (left - 2.0 * z[i] + right);
  };
  const auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  };

  const double h = inst.dt;
  Tridiagonal lhs;
  lhs.lower.assign(m, -0.5 * h * r);
  lhs.upper.assign(m, -0.5 * h * r);
  lhs.diag.assign(m, 1.0 - 0.5 * h * (inst.chi - 2.0 * r));
  lhs.diag.front() -= 0.5 * h * r;  // mirrored ghost
  lhs.diag.back() -= 0.5 * h * r;
  const std::vector<double> q = lhs.solve(act);
  const double sm_den = 1.0 + 0.5 * h * dot(sense, q);

  std::vector<double> z(m);
  for (std::size_t i = 0; i < m; ++i) z[i] = inst.initial(centre(i));

  // Modal side: project the same profile, integrate with RK4 at the same step.
  const GalerkinSystem sys = build_modal_system(inst.chi, inst.lx, inst.modes, inst.actuator_xs,
                                                inst.sensor_x, inst.convention);
  const std::size_t nm = sys.n;
  std::vector<double> basis(nm * m);
  for (std::size_t n = 0; n < nm; ++n)
    for (std::size_t i = 0; i < m; ++i) basis[n * m + i] = sys.basis(n + 1, centre(i));
  std::vector<double> a(nm, 0.0);
  for (std::size_t n = 0; n < nm; ++n)
    for (std::size_t i = 0; i < m; ++i) a[n] += z[i] * basis[n * m + i] * dx;
  const Matrix mm = closed_loop_matrix(sys, inst.k, inst.slope_f);
  const auto rhs = [&](const std::vector<double>& v) {
    std::vector<double> out(nm, 0.0);
    for (std::size_t i = 0; i < nm; ++i)
      for (std::size_t j = 0; j < nm; ++j) out[i] += mm(i, j) * v[j];
    return out;
  };
  const auto reconstruct = [&](const std::vector<double>& coeffs) {
    std::vector<double> out(m, 0.0);
    for (std::size_t n = 0; n < nm; ++n)
      for (std::size_t i = 0; i < m; ++i) out[i] += coeffs[n] * basis[n * m + i];
    return out;
  };

  OracleResult res;
  const double norm0_pde = l2(z, dx);
  const double norm0_modal = l2(reconstruct(a), dx);
  const auto compare = [&]() {
    const std::vector<double> zm = reconstruct(a);
    double diff = 0.0;
    for (std::size_t i = 0; i < m; ++i) diff += (z[i] - zm[i]) * (z[i] - zm[i]);
    const double ref = l2(z, dx);
    const double dev = ref > 0.0 ? std::sqrt(diff * dx) / ref : (diff > 0.0 ? INFINITY : 0.0);
    res.max_relative_deviation = std::max(res.max_relative_deviation, dev);
    res.pde_norm_ratio = norm0_pde > 0.0 ? ref / norm0_pde : 0.0;
    res.modal_norm_ratio = norm0_modal > 0.0 ? l2(zm, dx) / norm0_modal : 0.0;
  };

  compare();
  const auto total_steps = static_cast<std::size_t>(std::llround(inst.horizon / h));
  std::size_t next_sample = 1;
  std::vector<double> rhs_vec(m);
  for (std::size_t step = 1; step <= total_steps; ++step) {
    const double zs = dot(sense, z);
    for (std::size_t i = 0; i < m; ++i) rhs_vec[i] = z[i] + 0.5 * h * (apply_t(z, i) - act[i] * zs);
    std::vector<double> y = lhs.solve(rhs_vec);
    const double corr = 0.5 * h * dot(sense, y) / sm_den;
    for (std::size_t i = 0; i < m; ++i) z[i] = y[i] - corr * q[i];

    const auto k1 = rhs(a);
    std::vector<double> tmp(nm);
    for (std::size_t i = 0; i < nm; ++i) tmp[i] = a[i] + 0.5 * h * k1[i];
    const auto k2 = rhs(tmp);
    for (std::size_t i = 0; i < nm; ++i) tmp[i] = a[i] + 0.5 * h * k2[i];
    const auto k3 = rhs(tmp);
    for (std::size_t i = 0; i < nm; ++i) tmp[i] = a[i] + h * k3[i];
    const auto k4 = rhs(tmp);
    for (std::size_t i = 0; i < nm; ++i) a[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

    if (step * inst.samples >= next_sample * total_steps) {
      compare();
      ++next_sample;
    }
  }
  return res;
}

GainSearch minimal_stabilizing_gain(const std::function<Matrix(double)>& closed_loop, double k_lo,
                                    double k_hi, std::size_t steps, double rel_tol) {
  if (!(k_lo > 0.0) || !(k_hi > k_lo) || steps < 2)
    throw ConfigError("gain sweep needs 0 < k_lo < k_hi and at least 2 steps");
  const auto abscissa = [&](double k) { return spectrum(closed_loop(k)).spectral_abscissa; };

  GainSearch out;
  const double ratio = std::log(k_hi / k_lo) / static_cast<double>(steps - 1);
  std::optional<std::size_t> first_stable;
  for (std::size_t i = 0; i < steps; ++i) {
    const double k = k_lo * std::exp(ratio * static_cast<double>(i));
    const double sa = abscissa(k);
    out.sweep.push_back({k, sa});
    if (!first_stable && sa < 0.0) first_stable = i;
  }
  if (!first_stable) return out;

  double hi = out.sweep[*first_stable].k;
  double lo = *first_stable == 0 ? 0.0 : out.sweep[*first_stable - 1].k;
  if (abscissa(lo) < 0.0) {
    out.minimal_stabilizing_k = lo;
    return out;
  }
  while (hi - lo > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    (abscissa(mid) < 0.0 ? hi : lo) = mid;
  }
  out.minimal_stabilizing_k = hi;
  return out;
}

}  // namespace spiralctl::stability

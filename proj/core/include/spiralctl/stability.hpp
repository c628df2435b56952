#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spiralctl/fhn_model.hpp"
#include "spiralctl/linalg.hpp"

namespace spiralctl::stability {

using linalg::Matrix;

/// Planar front speed from the three roots of the cubic at frozen inhibitor.
[[nodiscard]] double c_inf_kinematic(double v_plus, double v_minus, double v_mid);

/// Derivative of the cubic V(alpha-V)(V-1) at a root; the root shift per unit inhibitor is its inverse.
[[nodiscard]] double root_shift_denominator(double v_star, double alpha);

/// First-order shift of the root v_star when the inhibitor moves from 0 to w0.
/// Throws NumericalError when the root is degenerate.
[[nodiscard]] double perturbed_root(double v_star, double w0, double alpha);

/// Sensitivity of the front speed to the inhibitor level at the front, at w = 0.
[[nodiscard]] double dc_inf_dW(double alpha);

/// Analytic slope of the tanh front profile.
[[nodiscard]] double front_slope_analytic(double beta);

enum class ChiMode { analytic, numeric_slope };

struct FrontLinearization {
  double chi = 0.0;      ///< transverse growth constant
  double slope_f = 0.0;  ///< activator slope at the front
  double dcdw = 0.0;     ///< speed sensitivity to the inhibitor
  double slope_w = 0.0;  ///< inhibitor slope at the front
};

/// Growth constant of the linearized front. numeric_slope requires slope_w_numeric.
[[nodiscard]] FrontLinearization chi_estimate(ChiMode mode, const model::ModelParams& p,
                                              std::optional<double> slope_w_numeric = {});

/// chi - (n pi / lx)^2 for n = 1..n_modes.
[[nodiscard]] std::vector<double> open_loop_eigs(double chi, double lx, std::size_t n_modes);

/// Open-loop eigenvalues shifted by distributed feedback -k * slope_f.
[[nodiscard]] std::vector<double> uniform_closed_loop_eigs(double chi, double lx, double k,
                                                           double slope_f, std::size_t n_modes);

enum class ModeConvention {
  shifted_cosine,           ///< literal matrices: A starts at chi - (pi/lx)^2, constant mode dropped
  cosine_with_constant  ///< self-consistent Neumann basis including the constant mode
};

[[nodiscard]] std::string_view to_string(ModeConvention c);
[[nodiscard]] ModeConvention parse_convention(std::string_view s);

/// Orthonormal Neumann eigenfunctions on [0, lx]; index n is 1-based, n = 1 is the constant.
[[nodiscard]] double mode_shape(std::size_t n, double x, double lx);

/// Truncated modal realization a' = A a + B v, w = H a with diagonal A.
struct GalerkinSystem {
  std::size_t n = 0;
  std::vector<double> a;  ///< diagonal of A
  std::vector<double> b;
  std::vector<double> h;
  double lx = 0.0;
  double chi = 0.0;
  ModeConvention convention = ModeConvention::cosine_with_constant;

  [[nodiscard]] Matrix a_matrix() const;
  /// Spatial profile paired with modal coordinate n (1-based) when reconstructing a front.
  [[nodiscard]] double basis(std::size_t n, double x) const;
};

[[nodiscard]] GalerkinSystem build_modal_system(double chi, double lx, std::size_t n_modes,
                                                std::span<const double> actuator_xs,
                                                double sensor_x,
                                                ModeConvention convention = ModeConvention::cosine_with_constant);

/// A - k * slope_f * B H.
[[nodiscard]] Matrix closed_loop_matrix(const GalerkinSystem& sys, double k, double slope_f);

/// A - k * slope_f * I: sensing and actuation distributed over the whole front.
[[nodiscard]] Matrix uniform_closed_loop_matrix(const GalerkinSystem& sys, double k, double slope_f);

struct SpectrumReport {
  std::vector<std::complex<double>> eigenvalues;
  double spectral_abscissa = 0.0;
  bool stable = false;
};

[[nodiscard]] SpectrumReport spectrum(const Matrix& m);

struct Solvability {
  double hb = 0.0;
  bool hb_nonzero = false;
  std::vector<std::complex<double>> zeros;
  bool zeros_all_negative = false;
};

/// Output-feedback solvability of the SISO modal system: H B != 0 and the transmission zeros,
/// i.e. the roots of sum_j H_j B_j prod_{i != j} (s - A_ii), lie in the open left half-plane.
/// Throws NumericalError when every H_j B_j vanishes.
[[nodiscard]] Solvability solvability_check(const GalerkinSystem& sys);

struct SampledStability {
  bool stable = false;
  std::vector<double> radii;  ///< exp(Re(lambda) * dt) per eigenvalue
};

/// Stability of the sample-and-hold loop; equivalent to the continuous spectral abscissa sign.
[[nodiscard]] SampledStability sampled_stability(const Matrix& m, double dt);

struct OracleInstance {
  double chi = 0.0;
  double lx = 50.0;
  double k = 0.0;
  double slope_f = front_slope_analytic(0.5);
  std::vector<double> actuator_xs;
  double sensor_x = 0.0;
  std::size_t modes = 16;
  ModeConvention convention = ModeConvention::cosine_with_constant;
  double horizon = 1.0;
  std::function<double(double)> initial;  ///< initial front deviation profile
  std::size_t cells = 1000;
  double dt = 0.005;
  std::size_t samples = 50;  ///< comparison instants over the horizon
};

struct OracleResult {
  double max_relative_deviation = 0.0;
  double pde_norm_ratio = 0.0;    ///< final over initial L2 norm, finite differences
  double modal_norm_ratio = 0.0;  ///< final over initial L2 norm, modal reconstruction
};

/// Integrates the linear front equation z_t = chi z + z_xx - k slope_f z(sensor) sum delta(x - x_d)
/// both by finite differences on a fine cell-centred grid (Crank-Nicolson) and through the truncated
/// modal ODEs, and compares the two profiles in relative L2 norm at each sample instant.
[[nodiscard]] OracleResult modal_vs_pde_oracle(const OracleInstance& inst);

struct GainSweepPoint {
  double k = 0.0;
  double spectral_abscissa = 0.0;
};

struct GainSearch {
  std::vector<GainSweepPoint> sweep;
  std::optional<double> minimal_stabilizing_k;
};

/// Log-spaced sweep of the spectral abscissa over [k_lo, k_hi], then bisection on the first
/// unstable-to-stable bracket.
[[nodiscard]] GainSearch minimal_stabilizing_gain(const std::function<Matrix(double)>& closed_loop,
                                                  double k_lo, double k_hi, std::size_t steps,
                                                  double rel_tol = 1e-6);

}  // namespace spiralctl::stability

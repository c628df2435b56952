#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "spiralctl/fhn_model.hpp"

namespace spiralctl::grid {

/// Dense scalar field on an nx-by-ny lattice, row-major with y contiguous: (i, j) -> i * ny + j.
/// Cell (i, j) is centred at ((i + 0.5) dx, (j + 0.5) dy).
class Field2D {
 public:
  Field2D() = default;
  Field2D(std::size_t nx, std::size_t ny, double value = 0.0)
      : nx_(nx), ny_(ny), data_(nx * ny, value) {}

  [[nodiscard]] std::size_t nx() const { return nx_; }
  [[nodiscard]] std::size_t ny() const { return ny_; }
  [[nodiscard]] std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * ny_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * ny_ + j]; }

  [[nodiscard]] std::span<double> data() { return data_; }
  [[nodiscard]] std::span<const double> data() const { return data_; }
  [[nodiscard]] std::span<double> column(std::size_t i) { return {data_.data() + i * ny_, ny_}; }
  [[nodiscard]] std::span<const double> column(std::size_t i) const {
    return {data_.data() + i * ny_, ny_};
  }

  void fill(double value) { std::fill(data_.begin(), data_.end(), value); }

  bool operator==(const Field2D&) const = default;

 private:
  std::size_t nx_ = 0;
  std::size_t ny_ = 0;
  std::vector<double> data_;
};

enum class YBoundary { no_flux, periodic };

/// x edges are always no-flux.
struct BoundarySpec {
  YBoundary y_mode = YBoundary::no_flux;

  [[nodiscard]] bool periodic() const { return y_mode == YBoundary::periodic; }
};

/// Potential and recovery fields plus lattice geometry and the current time.
struct Grid2D {
  Grid2D() = default;
  Grid2D(std::size_t nx, std::size_t ny, double dx = 1.0, double dy = 1.0);

  Field2D v;
  Field2D w;
  double dx = 1.0;
  double dy = 1.0;
  double t = 0.0;

  [[nodiscard]] std::size_t nx() const { return v.nx(); }
  [[nodiscard]] std::size_t ny() const { return v.ny(); }
  [[nodiscard]] double lx() const { return static_cast<double>(nx()) * dx; }
  [[nodiscard]] double ly() const { return static_cast<double>(ny()) * dy; }
  [[nodiscard]] double x_center(std::size_t i) const { return (static_cast<double>(i) + 0.5) * dx; }
  [[nodiscard]] double y_center(std::size_t j) const { return (static_cast<double>(j) + 0.5) * dy; }
  /// Index of the cell containing coordinate x (clamped to the lattice).
  [[nodiscard]] std::size_t cell_x(double x) const;
  [[nodiscard]] std::size_t cell_y(double y) const;

  /// Throws ConfigError unless nx, ny >= 4, dx, dy > 0 and both fields share dimensions.
  void validate() const;
};

enum class CflPolicy { reject, warn };

struct SimConfig {
  double dt = 0.2;
  double t_end = 1000.0;
  std::size_t snapshot_stride = 500;
  CflPolicy cfl_policy = CflPolicy::reject;
  int threads = 1;

  void validate() const;
};

/// D dt (2/dx^2 + 2/dy^2); explicit Euler is diffusion-stable when this is <= 1.
[[nodiscard]] double cfl_factor(double D, double dt, double dx, double dy);

/// Throws NumericalError if the factor exceeds 1 under CflPolicy::reject. Returns true if the
/// step is within the bound.
bool check_cfl(const model::ModelParams& p, double dt, double dx, double dy, CflPolicy policy);

/// Five-point Laplacian. Mirror ghost cells on no-flux edges, wrap-around on periodic y.
[[nodiscard]] Field2D laplacian(const Field2D& field, BoundarySpec b, double dx, double dy);

/// Explicit Euler integrator with reusable scratch storage. Output is bit-identical for any
/// thread count.
class Stepper {
 public:
  Stepper(model::ModelParams params, std::vector<model::HeterogeneityPatch> patches,
          BoundarySpec boundary, int threads = 1);

  /// Advances g by dt. `control` is either null (zero current) or a field with g's dimensions.
  void advance(Grid2D& g, const Field2D* control, double dt);

  void set_boundary(BoundarySpec b) { boundary_ = b; }
  [[nodiscard]] BoundarySpec boundary() const { return boundary_; }
  [[nodiscard]] const model::ModelParams& params() const { return params_; }
  [[nodiscard]] std::span<const model::HeterogeneityPatch> patches() const { return patches_; }

 private:
  bool fill_alpha(const Grid2D& g);

  model::ModelParams params_;
  std::vector<model::HeterogeneityPatch> patches_;
  BoundarySpec boundary_;
  int threads_;
  Field2D v_next_;
  Field2D alpha_;
};

/// One forward-Euler step. `control` may be empty (zero current). Checks dt against the CFL
/// bound using `policy`.
[[nodiscard]] Grid2D step(const Grid2D& g, const model::ModelParams& p,
                          std::span<const model::HeterogeneityPatch> patches,
                          const Field2D* control, BoundarySpec b, double dt,
                          CflPolicy policy = CflPolicy::reject);

/// V = 1 on 0.245 Ly <= y <= 0.26 Ly (all x), rest state elsewhere; W at rest everywhere.
void init_pulse_seed(Grid2D& g, const model::RestState& rest);

/// Zeroes V on x_frac.lo Lx <= x <= x_frac.hi Lx for every y. W is left untouched.
void break_wave(Grid2D& g, model::Interval x_frac = {0.05, 0.5});

struct TorusOptions {
  double lower_fraction = 0.1;   ///< rows watched for the exiting pulse
  double exit_level = 0.1;       ///< max V below this counts as "gone"
  double quiet_time = 50.0;      ///< must stay gone this long
  double timeout = 3000.0;
};

/// Integrates a seeded grid under no-flux y until the downward pulse has left through y = 0,
/// then returns with the boundary switched to periodic. Throws NumericalError if no pulse ever
/// reaches the lower rows or it fails to leave before the timeout.
BoundarySpec make_torus_single_wave(Grid2D& g, const model::ModelParams& p, const SimConfig& sim,
                                    const TorusOptions& opts = {});

/// Supplies a control current each step. Implemented by the feedback controller.
class ControlSource {
 public:
  virtual ~ControlSource() = default;
  /// Observes the state before a step; returns the current to inject (null for zero).
  virtual const Field2D* update(const Grid2D& g) = 0;
};

using Observer = std::function<void(const Grid2D&)>;

struct RunSummary {
  std::size_t steps = 0;
  std::size_t snapshots = 0;
};

/// Advances g until g.t reaches `t_end` (within half a step). Observers see the state at the
/// start and after every `snapshot_stride` steps.
RunSummary run(Grid2D& g, Stepper& stepper, const SimConfig& sim, double t_end,
               ControlSource* controller, std::span<const Observer> observers);

/// Flat binary checkpoint: nx, ny as int64, then V and W as row-major float64 (native order).
void write_checkpoint(const Grid2D& g, std::ostream& out);
[[nodiscard]] Grid2D read_checkpoint(std::istream& in, double dx = 1.0, double dy = 1.0);

}  // namespace spiralctl::grid

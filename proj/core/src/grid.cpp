#include "spiralctl/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>

#include "spiralctl/errors.hpp"

namespace spiralctl::grid {

Grid2D::Grid2D(std::size_t nx, std::size_t ny, double dx_, double dy_)
    : v(nx, ny), w(nx, ny), dx(dx_), dy(dy_) {
  validate();
}

std::size_t Grid2D::cell_x(double x) const {
  const double c = std::floor(x / dx);
  if (c <= 0.0) return 0;
  return std::min(static_cast<std::size_t>(c), nx() - 1);
}

std::size_t Grid2D::cell_y(double y) const {
  const double c = std::floor(y / dy);
  if (c <= 0.0) return 0;
  return std::min(static_cast<std::size_t>(c), ny() - 1);
}

void Grid2D::validate() const {
  if (nx() < 4 || ny() < 4) throw ConfigError("grid: Nx and Ny must be >= 4");
  if (!(dx > 0.0 && dy > 0.0)) throw ConfigError("grid: dx and dy must be > 0");
  if (w.nx() != v.nx() || w.ny() != v.ny()) throw ConfigError("grid: V and W dimensions differ");
}

void SimConfig::validate() const {
  if (!(dt > 0.0)) throw ConfigError("sim.dt must be > 0");
  if (!(t_end > 0.0)) throw ConfigError("sim.t_end must be > 0");
  if (snapshot_stride < 1) throw ConfigError("sim.snapshot_stride must be >= 1");
  if (threads < 1) throw ConfigError("sim.threads must be >= 1");
}

double cfl_factor(double D, double dt, double dx, double dy) {
  return D * dt * (2.0 / (dx * dx) + 2.0 / (dy * dy));
}

bool check_cfl(const model::ModelParams& p, double dt, double dx, double dy, CflPolicy policy) {
  const double factor = cfl_factor(p.D, dt, dx, dy);
  if (factor <= 1.0) return true;
  char msg[256];
  std::snprintf(msg, sizeof msg,
                "time step dt=%g violates the explicit diffusion bound (D dt (2/dx^2 + 2/dy^2) = "
                "%g > 1); use dt <= %g or set sim.cfl_policy=warn",
                dt, factor, dt / factor);
  if (policy == CflPolicy::reject) throw NumericalError(msg);
  std::fprintf(stderr, "warning: %s\n", msg);
  return false;
}

namespace {

// Laplacian of one column i at row j; `left`/`right` are the x-neighbour columns with mirror
// ghosts already resolved.
struct ColumnStencil {
  const double* left;
  const double* mid;
  const double* right;
  std::size_t ny;
  bool periodic;
  double inv_dx2;
  double inv_dy2;

  template <typename Fn>
  void for_each(Fn&& fn) const {
    const std::size_t last = ny - 1;
    {
      const double below = periodic ? mid[last] : mid[0];
      fn(0, (left[0] - 2.0 * mid[0] + right[0]) * inv_dx2 +
                (mid[1] - 2.0 * mid[0] + below) * inv_dy2);
    }
    for (std::size_t j = 1; j < last; ++j) {
      fn(j, (left[j] - 2.0 * mid[j] + right[j]) * inv_dx2 +
                (mid[j + 1] - 2.0 * mid[j] + mid[j - 1]) * inv_dy2);
    }
    {
      const double above = periodic ? mid[0] : mid[last];
      fn(last, (left[last] - 2.0 * mid[last] + right[last]) * inv_dx2 +
                   (above - 2.0 * mid[last] + mid[last - 1]) * inv_dy2);
    }
  }
};

ColumnStencil column_stencil(const Field2D& f, std::size_t i, BoundarySpec b, double dx,
                             double dy) {
  const std::size_t nx = f.nx();
  const std::size_t il = (i == 0) ? 0 : i - 1;
  const std::size_t ir = (i + 1 == nx) ? i : i + 1;
  return {f.column(il).data(), f.column(i).data(), f.column(ir).data(), f.ny(), b.periodic(),
          1.0 / (dx * dx), 1.0 / (dy * dy)};
}

}  // namespace

Field2D laplacian(const Field2D& field, BoundarySpec b, double dx, double dy) {
  Field2D out(field.nx(), field.ny());
  for (std::size_t i = 0; i < field.nx(); ++i) {
    auto col = out.column(i);
    column_stencil(field, i, b, dx, dy).for_each([&](std::size_t j, double lap) { col[j] = lap; });
  }
  return out;
}

Stepper::Stepper(model::ModelParams params, std::vector<model::HeterogeneityPatch> patches,
                 BoundarySpec boundary, int threads)
    : params_(params), patches_(std::move(patches)), boundary_(boundary), threads_(threads) {
  params_.validate();
  for (const auto& patch : patches_) patch.validate();
  if (threads_ < 1) throw ConfigError("threads must be >= 1");
}

bool Stepper::fill_alpha(const Grid2D& g) {
  const bool any_active = std::any_of(patches_.begin(), patches_.end(), [&](const auto& patch) {
    return patch.t_range.contains(g.t);
  });
  if (!any_active) return false;
  if (alpha_.nx() != g.nx() || alpha_.ny() != g.ny()) alpha_ = Field2D(g.nx(), g.ny());
  const double lx = g.lx();
  const double ly = g.ly();
  for (std::size_t i = 0; i < g.nx(); ++i)
    for (std::size_t j = 0; j < g.ny(); ++j)
      alpha_(i, j) = model::alpha_at(g.x_center(i), g.y_center(j), g.t, lx, ly, params_, patches_);
  return true;
}

void Stepper::advance(Grid2D& g, const Field2D* control, double dt) {
  if (v_next_.nx() != g.nx() || v_next_.ny() != g.ny()) v_next_ = Field2D(g.nx(), g.ny());
  if (control != nullptr && (control->nx() != g.nx() || control->ny() != g.ny()))
    throw ConfigError("control field dimensions do not match the grid");

  const bool heterogeneous = fill_alpha(g);
  const model::ModelParams p = params_;
  const std::size_t nx = g.nx();
  const std::size_t ny = g.ny();
  const double eps_dt = p.eps * dt;

#pragma omp parallel for schedule(static) num_threads(threads_) if (threads_ > 1)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(nx); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const double* vv = g.v.column(i).data();
    double* ww = g.w.column(i).data();
    double* out = v_next_.column(i).data();
    const double* cur = control ? control->column(i).data() : nullptr;
    const double* al = heterogeneous ? alpha_.column(i).data() : nullptr;
    column_stencil(g.v, i, boundary_, g.dx, g.dy).for_each([&](std::size_t j, double lap) {
      const double a = al ? al[j] : p.alpha;
      const double v = vv[j];
      double rate = p.D * lap + model::reaction_f(v, a) - ww[j];
      if (cur) rate += cur[j];
      out[j] = v + dt * rate;
    });
    // W reads only the old V of the same cell, so it can be updated in place.
    for (std::size_t j = 0; j < ny; ++j)
      ww[j] += eps_dt * (p.beta * vv[j] - p.gamma * ww[j] + p.delta);
  }
  std::swap(g.v, v_next_);
  g.t += dt;
}

Grid2D step(const Grid2D& g, const model::ModelParams& p,
            std::span<const model::HeterogeneityPatch> patches, const Field2D* control,
            BoundarySpec b, double dt, CflPolicy policy) {
  check_cfl(p, dt, g.dx, g.dy, policy);
  Stepper stepper(p, {patches.begin(), patches.end()}, b);
  Grid2D next = g;
  stepper.advance(next, control, dt);
  return next;
}

void init_pulse_seed(Grid2D& g, const model::RestState& rest) {
  const double lo = 0.245 * g.ly();
  const double hi = 0.26 * g.ly();
  for (std::size_t i = 0; i < g.nx(); ++i) {
    for (std::size_t j = 0; j < g.ny(); ++j) {
      const double y = g.y_center(j);
      g.v(i, j) = (y >= lo && y <= hi) ? 1.0 : rest.v;
      g.w(i, j) = rest.w;
    }
  }
}

void break_wave(Grid2D& g, model::Interval x_frac) {
  const double lo = x_frac.lo * g.lx();
  const double hi = x_frac.hi * g.lx();
  for (std::size_t i = 0; i < g.nx(); ++i) {
    const double x = g.x_center(i);
    if (x < lo || x > hi) continue;
    auto col = g.v.column(i);
    std::fill(col.begin(), col.end(), 0.0);
  }
}

namespace {

double max_v_lower_rows(const Grid2D& g, std::size_t rows) {
  double m = -1e300;
  for (std::size_t i = 0; i < g.nx(); ++i) {
    auto col = g.v.column(i);
    m = std::max(m, *std::max_element(col.begin(), col.begin() + static_cast<std::ptrdiff_t>(rows)));
  }
  return m;
}

}  // namespace

BoundarySpec make_torus_single_wave(Grid2D& g, const model::ModelParams& p, const SimConfig& sim,
                                    const TorusOptions& opts) {
  check_cfl(p, sim.dt, g.dx, g.dy, sim.cfl_policy);
  Stepper stepper(p, {}, BoundarySpec{YBoundary::no_flux}, sim.threads);
  const auto rows = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(opts.lower_fraction * static_cast<double>(g.ny()))));

  const double t0 = g.t;
  bool arrived = false;
  double gone_since = std::numeric_limits<double>::quiet_NaN();
  while (g.t - t0 < opts.timeout) {
    if (max_v_lower_rows(g, rows) >= opts.exit_level) {
      arrived = true;
      gone_since = std::numeric_limits<double>::quiet_NaN();
    } else if (arrived) {
      if (std::isnan(gone_since)) gone_since = g.t;
      if (g.t - gone_since >= opts.quiet_time) return BoundarySpec{YBoundary::periodic};
    }
    stepper.advance(g, nullptr, sim.dt);
  }
  throw NumericalError(arrived ? "make_torus_single_wave: lower pulse did not leave the domain"
                               : "make_torus_single_wave: no pulse reached the lower boundary");
}

RunSummary run(Grid2D& g, Stepper& stepper, const SimConfig& sim, double t_end,
               ControlSource* controller, std::span<const Observer> observers) {
  sim.validate();
  check_cfl(stepper.params(), sim.dt, g.dx, g.dy, sim.cfl_policy);
  RunSummary summary;
  const auto notify = [&] {
    for (const auto& obs : observers) obs(g);
    ++summary.snapshots;
  };
  notify();
  while (g.t < t_end - 0.5 * sim.dt) {
    const Field2D* current = controller ? controller->update(g) : nullptr;
    stepper.advance(g, current, sim.dt);
    ++summary.steps;
    if (summary.steps % sim.snapshot_stride == 0) notify();
  }
  return summary;
}

void write_checkpoint(const Grid2D& g, std::ostream& out) {
  const std::int64_t dims[2] = {static_cast<std::int64_t>(g.nx()), static_cast<std::int64_t>(g.ny())};
  out.write(reinterpret_cast<const char*>(dims), sizeof dims);
  out.write(reinterpret_cast<const char*>(g.v.data().data()),
            static_cast<std::streamsize>(g.v.size() * sizeof(double)));
  out.write(reinterpret_cast<const char*>(g.w.data().data()),
            static_cast<std::streamsize>(g.w.size() * sizeof(double)));
  if (!out) throw NumericalError("checkpoint write failed");
}

Grid2D read_checkpoint(std::istream& in, double dx, double dy) {
  std::int64_t dims[2] = {0, 0};
  in.read(reinterpret_cast<char*>(dims), sizeof dims);
  if (!in || dims[0] < 4 || dims[1] < 4 || dims[0] > (1 << 20) || dims[1] > (1 << 20))
    throw ConfigError("checkpoint: bad header");
  Grid2D g(static_cast<std::size_t>(dims[0]), static_cast<std::size_t>(dims[1]), dx, dy);
  in.read(reinterpret_cast<char*>(g.v.data().data()),
          static_cast<std::streamsize>(g.v.size() * sizeof(double)));
  in.read(reinterpret_cast<char*>(g.w.data().data()),
          static_cast<std::streamsize>(g.w.size() * sizeof(double)));
  if (!in) throw ConfigError("checkpoint: truncated data");
  return g;
}

}  // namespace spiralctl::grid

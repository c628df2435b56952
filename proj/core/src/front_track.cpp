#include "spiralctl/front_track.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "spiralctl/errors.hpp"

namespace spiralctl::front {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double wrap_signed(double d, double period) {
  d = std::fmod(d, period);
  if (d >= 0.5 * period) d -= period;
  if (d < -0.5 * period) d += period;
  return d;
}

double wrap_positive(double z, double period) {
  z = std::fmod(z, period);
  if (z < 0.0) z += period;
  return z;
}

struct CentredStats {
  double mean;
  double stddev;
};

CentredStats valid_stats(const FrontLine& f) {
  const std::size_t n = f.valid_count();
  if (n == 0) throw NumericalError("front line has no valid columns");
  double anchor = 0.0;
  if (f.periodic) {
    double s = 0.0, c = 0.0;
    for (std::size_t i = 0; i < f.z.size(); ++i) {
      if (!f.valid[i]) continue;
      const double a = 2.0 * std::numbers::pi * f.z[i] / f.ly;
      s += std::sin(a);
      c += std::cos(a);
    }
    anchor = wrap_positive(std::atan2(s, c) * f.ly / (2.0 * std::numbers::pi), f.ly);
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < f.z.size(); ++i)
    if (f.valid[i]) sum += f.periodic ? wrap_signed(f.z[i] - anchor, f.ly) : f.z[i];
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < f.z.size(); ++i) {
    if (!f.valid[i]) continue;
    const double d = (f.periodic ? wrap_signed(f.z[i] - anchor, f.ly) : f.z[i]) - mean;
    ss += d * d;
  }
  const double centre = f.periodic ? wrap_positive(anchor + mean, f.ly) : mean;
  return {centre, std::sqrt(ss / static_cast<double>(n))};
}

}  // namespace

std::size_t FrontLine::valid_count() const {
  return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), std::uint8_t{1}));
}

double FrontLine::coverage() const {
  return z.empty() ? 0.0 : static_cast<double>(valid_count()) / static_cast<double>(z.size());
}

std::string_view to_string(WaveState s) {
  switch (s) {
    case WaveState::planar: return "planar";
    case WaveState::broken: return "broken";
    case WaveState::spiral: return "spiral";
  }
  return "unknown";
}

std::optional<double> detect_front_column(const grid::Grid2D& g, std::size_t i, double theta,
                                          Travel travel, grid::BoundarySpec b) {
  const std::size_t ny = g.ny();
  const bool periodic = b.periodic();
  // Scan against the travel direction, starting ahead of the wave.
  const bool scan_up = (travel == Travel::minus_y);
  const auto col = g.v.column(i);
  std::size_t start;
  if (periodic)
    start = static_cast<std::size_t>(std::min_element(col.begin(), col.end()) - col.begin());
  else
    start = scan_up ? 0 : ny - 1;
  const std::size_t steps = periodic ? ny : ny - 1;

  // Unwrapped row coordinate of the k-th scanned cell.
  const auto row_at = [&](std::size_t k) -> std::ptrdiff_t {
    const auto s = static_cast<std::ptrdiff_t>(start);
    const auto kk = static_cast<std::ptrdiff_t>(k);
    return scan_up ? s + kk : s - kk;
  };
  const auto value_at = [&](std::ptrdiff_t r) {
    const auto n = static_cast<std::ptrdiff_t>(ny);
    return col[static_cast<std::size_t>(((r % n) + n) % n)];
  };

  double prev = value_at(row_at(0));
  for (std::size_t k = 1; k <= steps; ++k) {
    const std::ptrdiff_t r = row_at(k);
    const double cur = value_at(r);
    if (prev < theta && cur >= theta) {
      const double frac = (theta - prev) / (cur - prev);
      const double y_prev = (static_cast<double>(row_at(k - 1)) + 0.5) * g.dy;
      const double y_cur = (static_cast<double>(r) + 0.5) * g.dy;
      const double z = y_prev + frac * (y_cur - y_prev);
      return periodic ? wrap_positive(z, g.ly()) : z;
    }
    prev = cur;
  }
  return std::nullopt;
}

FrontLine detect_front(const grid::Grid2D& g, double theta, Travel travel, grid::BoundarySpec b) {
  const std::size_t nx = g.nx();
  FrontLine f;
  f.t = g.t;
  f.ly = g.ly();
  f.periodic = b.periodic();
  f.z.assign(nx, kNaN);
  f.valid.assign(nx, 0);

  for (std::size_t i = 0; i < nx; ++i) {
    if (const auto z = detect_front_column(g, i, theta, travel, b)) {
      f.z[i] = *z;
      f.valid[i] = 1;
    }
  }
  return f;
}

double planarity(const FrontLine& f) { return valid_stats(f).stddev; }

double mean_position(const FrontLine& f) { return valid_stats(f).mean; }

ColumnVelocity front_velocity(const FrontLine& f1, const FrontLine& f0) {
  if (!(f1.t > f0.t)) throw ConfigError("front_velocity: f1.t must exceed f0.t");
  if (f1.z.size() != f0.z.size()) throw ConfigError("front_velocity: column counts differ");
  const double dt = f1.t - f0.t;
  ColumnVelocity out;
  out.c.assign(f1.z.size(), kNaN);
  out.valid.assign(f1.z.size(), 0);
  for (std::size_t i = 0; i < f1.z.size(); ++i) {
    if (!f1.valid[i] || !f0.valid[i]) continue;
    double dz = f1.z[i] - f0.z[i];
    if (f1.periodic) dz = wrap_signed(dz, f1.ly);
    out.c[i] = dz / dt;
    out.valid[i] = 1;
  }
  return out;
}

std::size_t crossing_count(const grid::Grid2D& g, std::size_t i, double theta,
                           grid::BoundarySpec b) {
  const auto col = g.v.column(i);
  std::size_t count = 0;
  for (std::size_t j = 1; j < col.size(); ++j)
    if ((col[j - 1] >= theta) != (col[j] >= theta)) ++count;
  if (b.periodic() && (col.back() >= theta) != (col.front() >= theta)) ++count;
  return count;
}

double multi_crossing_fraction(const grid::Grid2D& g, double theta, grid::BoundarySpec b,
                               std::size_t max_crossings) {
  std::size_t multi = 0;
  for (std::size_t i = 0; i < g.nx(); ++i)
    if (crossing_count(g, i, theta, b) > max_crossings) ++multi;
  return static_cast<double>(multi) / static_cast<double>(g.nx());
}

FrontMetrics measure(const grid::Grid2D& g, const FrontLine& front, const FrontLine* previous,
                     double theta, grid::BoundarySpec b, const ClassifierThresholds& th) {
  FrontMetrics m;
  m.t = front.t;
  m.coverage = front.coverage();
  if (front.valid_count() > 0) {
    const auto stats = valid_stats(front);
    m.mean_z = stats.mean;
    m.planarity = stats.stddev;
  } else {
    m.mean_z = kNaN;
    m.planarity = kNaN;
  }
  m.mean_cy = kNaN;
  if (previous != nullptr && front.t > previous->t) {
    const auto vel = front_velocity(front, *previous);
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < vel.c.size(); ++i)
      if (vel.valid[i]) sum += vel.c[i], ++n;
    if (n > 0) m.mean_cy = sum / static_cast<double>(n);
  }
  m.multi_crossing_fraction = multi_crossing_fraction(g, theta, b, th.max_crossings);
  return m;
}

WaveState classify_state(std::span<const FrontMetrics> history, std::size_t window, double dy,
                         const ClassifierThresholds& th) {
  if (window < 2) throw ConfigError("classify_state: window must be >= 2");
  if (history.size() < window) throw ConfigError("classify_state: history shorter than window");
  const auto recent = history.last(window);
  const bool spiral = std::any_of(recent.begin(), recent.end(), [&](const FrontMetrics& m) {
    return m.multi_crossing_fraction >= th.spiral_column_fraction;
  });
  if (spiral) return WaveState::spiral;
  const bool planar = std::all_of(recent.begin(), recent.end(), [&](const FrontMetrics& m) {
    return m.coverage > th.min_coverage && m.planarity < th.max_planarity_cells * dy;
  });
  return planar ? WaveState::planar : WaveState::broken;
}

}  // namespace spiralctl::front

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "spiralctl/grid.hpp"

namespace spiralctl::front {

/// Direction the tracked wave travels in. The leading edge is the front whose V rises when the
/// column is scanned against the travel direction from the resting region ahead of it.
enum class Travel { plus_y, minus_y };

/// Per-column front position Z(x, t) in y units.
struct FrontLine {
  double t = 0.0;
  double ly = 0.0;
  bool periodic = false;
  std::vector<double> z;
  std::vector<std::uint8_t> valid;

  [[nodiscard]] std::size_t valid_count() const;
  [[nodiscard]] double coverage() const;
};

struct FrontMetrics {
  double t = 0.0;
  double mean_z = 0.0;
  double planarity = 0.0;  ///< NaN when no column has a front
  double coverage = 0.0;
  double mean_cy = 0.0;    ///< NaN when no velocity is available
  double multi_crossing_fraction = 0.0;
};

struct ColumnVelocity {
  std::vector<double> c;
  std::vector<std::uint8_t> valid;
};

enum class WaveState { planar, broken, spiral };

[[nodiscard]] std::string_view to_string(WaveState s);

/// Thresholds for the planar / broken / spiral decision.
struct ClassifierThresholds {
  double min_coverage = 0.95;
  double max_planarity_cells = 2.0;     ///< in units of dy
  std::size_t max_crossings = 2;        ///< more than this in a column marks a multi-front column
  double spiral_column_fraction = 0.1;
};

/// Leading-edge front per column at level theta, linearly interpolated between cell centres.
/// With periodic y the scan starts at the column's minimum-V row.
[[nodiscard]] FrontLine detect_front(const grid::Grid2D& g, double theta, Travel travel,
                                     grid::BoundarySpec b);

/// Leading-edge position in a single column, or nullopt when the column has no crossing.
[[nodiscard]] std::optional<double> detect_front_column(const grid::Grid2D& g, std::size_t i,
                                                        double theta, Travel travel,
                                                        grid::BoundarySpec b);

/// Population standard deviation of the valid z (circular in periodic mode).
/// Throws NumericalError when no column is valid.
[[nodiscard]] double planarity(const FrontLine& f);

/// Mean of the valid z (circular in periodic mode). Throws NumericalError when empty.
[[nodiscard]] double mean_position(const FrontLine& f);

/// (z1 - z0) / (t1 - t0) per column; periodic fronts use the shortest signed displacement.
[[nodiscard]] ColumnVelocity front_velocity(const FrontLine& f1, const FrontLine& f0);

/// Number of level-theta crossings along y in column i (cyclic when periodic).
[[nodiscard]] std::size_t crossing_count(const grid::Grid2D& g, std::size_t i, double theta,
                                         grid::BoundarySpec b);

/// Fraction of columns whose crossing count exceeds `max_crossings`.
[[nodiscard]] double multi_crossing_fraction(const grid::Grid2D& g, double theta,
                                             grid::BoundarySpec b, std::size_t max_crossings = 2);

/// Metrics for one snapshot. `previous` (may be null) supplies the velocity estimate.
[[nodiscard]] FrontMetrics measure(const grid::Grid2D& g, const FrontLine& front,
                                   const FrontLine* previous, double theta, grid::BoundarySpec b,
                                   const ClassifierThresholds& th = {});

/// Classifies the last `window` samples of the history (window >= 2).
[[nodiscard]] WaveState classify_state(std::span<const FrontMetrics> history, std::size_t window,
                                       double dy, const ClassifierThresholds& th = {});

}  // namespace spiralctl::front

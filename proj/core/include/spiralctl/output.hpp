#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "spiralctl/feedback_control.hpp"
#include "spiralctl/front_track.hpp"
#include "spiralctl/grid.hpp"

namespace spiralctl::output {

/// Grey levels for a frame: V mapped linearly from [min(0, Vmin), max(1, Vmax)] to [0, 255].
/// Row i is the x index, column j the y index.
[[nodiscard]] std::vector<std::uint8_t> frame_pixels(const grid::Field2D& v);

/// Binary PGM, Ny pixels wide and Nx pixels high.
void emit_frame(const grid::Grid2D& g, const std::filesystem::path& path);

/// One metrics row. NaN fields are written as empty cells.
struct MetricsRow {
  front::FrontMetrics metrics;
  double c_bar = 0.0;
  double total_current = 0.0;
};

void emit_metrics(std::span<const MetricsRow> rows, const std::filesystem::path& path);
void emit_events(std::span<const control::ControlEvent> events, const std::filesystem::path& path);

}  // namespace spiralctl::output

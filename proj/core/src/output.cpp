#include "spiralctl/output.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "spiralctl/config.hpp"
#include "spiralctl/errors.hpp"

namespace spiralctl::output {

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

std::string cell(double v) { return std::isfinite(v) ? config::format_number(v) : std::string{}; }

}  // namespace

std::vector<std::uint8_t> frame_pixels(const grid::Field2D& v) {
  const auto data = v.data();
  const auto [mn, mx] = std::minmax_element(data.begin(), data.end());
  const double lo = data.empty() ? 0.0 : std::min(0.0, *mn);
  const double hi = data.empty() ? 1.0 : std::max(1.0, *mx);
  std::vector<std::uint8_t> px(data.size());
  for (std::size_t n = 0; n < data.size(); ++n) {
    const double s = std::clamp((data[n] - lo) / (hi - lo), 0.0, 1.0);
    px[n] = static_cast<std::uint8_t>(std::lround(255.0 * s));
  }
  return px;
}

void emit_frame(const grid::Grid2D& g, const std::filesystem::path& path) {
  const auto px = frame_pixels(g.v);
  auto out = open_for_write(path);
  out << "P5\n" << g.ny() << ' ' << g.nx() << "\n255\n";
  out.write(reinterpret_cast<const char*>(px.data()), static_cast<std::streamsize>(px.size()));
  finish(out, path);
}

void emit_metrics(std::span<const MetricsRow> rows, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << "t,mean_z,planarity,coverage,mean_cy,c_bar,total_current\n";
  for (const auto& r : rows) {
    const auto& m = r.metrics;
    out << cell(m.t) << ',' << cell(m.mean_z) << ',' << cell(m.planarity) << ','
        << cell(m.coverage) << ',' << cell(m.mean_cy) << ',' << cell(r.c_bar) << ','
        << cell(r.total_current) << '\n';
  }
  finish(out, path);
}

void emit_events(std::span<const control::ControlEvent> events, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << "t,line,d,d_set,c_bar,current_per_cell\n";
  for (const auto& e : events)
    out << cell(e.t) << ',' << e.line << ',' << cell(e.d) << ',' << cell(e.d_set) << ','
        << cell(e.c_bar) << ',' << cell(e.current_per_cell) << '\n';
  finish(out, path);
}

}  // namespace spiralctl::output

#include "spiralctl/runner.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

#include "spiralctl/config.hpp"
#include "spiralctl/errors.hpp"

namespace spiralctl::experiment {

namespace {

namespace fs = std::filesystem;

std::string utc_stamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%d-%H%M%S", &tm);
  return buf;
}

fs::path make_run_dir(const ExperimentPreset& p, const RunOptions& opts) {
  const std::string base = opts.timestamped_dir ? p.name + "-" + utc_stamp() : p.name;
  fs::path dir = opts.out_root / base;
  if (opts.timestamped_dir)
    for (int n = 2; fs::exists(dir); ++n) dir = opts.out_root / (base + "-" + std::to_string(n));
  fs::create_directories(dir / "frames");
  return dir;
}

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string frame_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04zu.pgm", index);
  return buf;
}

// Checkpoint kinds, merged when several fall on the same instant.
enum : unsigned { kSample = 1u, kSnapshot = 2u, kBreak = 4u };

std::map<long long, unsigned> schedule(const ExperimentPreset& p) {
  // Keyed by step index so that floating-point time never decides ordering.
  const auto step_of = [&p](double t) { return std::llround(t / p.sim.dt); };
  std::map<long long, unsigned> plan;
  const long long last = step_of(p.sim.t_end);
  for (double t = 0.0; step_of(t) <= last; t += p.sample_every) plan[step_of(t)] |= kSample;
  plan[last] |= kSample;
  for (double t : p.snapshot_times) plan[step_of(t)] |= kSnapshot;
  if (p.break_at && step_of(*p.break_at) <= last) plan[step_of(*p.break_at)] |= kBreak;
  return plan;
}

front::WaveState state_at(std::span<const front::FrontMetrics> history, std::size_t window,
                          double dy, const front::ClassifierThresholds& th) {
  if (history.size() == 1) {
    const front::FrontMetrics twice[2] = {history[0], history[0]};
    return front::classify_state(twice, 2, dy, th);
  }
  return front::classify_state(history, std::min(window, history.size()), dy, th);
}

}  // namespace

RunReport run_experiment(const ExperimentPreset& p, const RunOptions& opts) {
  RunReport report;
  report.preset = p.name;

  grid::Grid2D g(p.nx, p.ny, p.dx, p.dy);
  grid::init_pulse_seed(g, model::steady_state(p.model));
  const grid::BoundarySpec boundary = grid::make_torus_single_wave(g, p.model, p.sim, p.torus);
  report.torus_time = g.t;
  g.t = 0.0;
  if (opts.progress)
    *opts.progress << p.name << ": torus ready after t = " << short_number(report.torus_time) << "\n";

  grid::Stepper stepper(p.model, p.patches, boundary, p.sim.threads);
  std::unique_ptr<control::FeedbackController> controller;
  if (p.controlled)
    controller = std::make_unique<control::FeedbackController>(p.controller, p.layout, g, boundary,
                                                               p.theta, front::Travel::plus_y);

  if (opts.write_files) {
    report.run_dir = make_run_dir(p, opts);
    report.metrics_csv = report.run_dir / "metrics.csv";
    report.events_csv = report.run_dir / "events.csv";
    report.report_txt = report.run_dir / "report.txt";
  }

  std::vector<front::FrontMetrics> history;
  std::optional<front::FrontLine> previous;
  bool broken = false;
  for (const auto& [step, kinds] : schedule(p)) {
    const double target = static_cast<double>(step) * p.sim.dt;
    if (target > g.t) grid::run(g, stepper, p.sim, target, controller.get(), {});
    if (kinds & kSample) {
      front::FrontLine f = front::detect_front(g, p.theta, front::Travel::plus_y, boundary);
      f.t = target;  // scheduled time; g.t carries accumulated rounding
      const front::FrontMetrics m =
          front::measure(g, f, previous ? &*previous : nullptr, p.theta, boundary, p.thresholds);
      previous = std::move(f);
      history.push_back(m);
      output::MetricsRow row{m, NAN, NAN};
      if (controller) {
        row.c_bar = controller->state().c_bar;
        row.total_current = controller->total_current();
      }
      report.samples.push_back(row);
      report.sample_states.push_back(state_at(history, p.classify_window, p.dy, p.thresholds));
    }
    if ((kinds & kSnapshot) && opts.write_files && p.write_frames) {
      const fs::path path = report.run_dir / "frames" / frame_name(report.frames.size() + 1);
      output::emit_frame(g, path);
      report.frames.push_back(path);
    }
    if ((kinds & kSnapshot) && opts.progress && !history.empty()) {
      const auto& m = history.back();
      *opts.progress << p.name << ": t = " << short_number(target) << "  coverage "
                     << short_number(m.coverage) << "  planarity " << short_number(m.planarity)
                     << "  state " << front::to_string(report.sample_states.back()) << "\n";
    }
    if ((kinds & kBreak) && !broken) {
      grid::break_wave(g, p.break_x);
      broken = true;
    }
  }

  report.final_classification =
      history.size() >= 2 ? front::classify_state(history, std::min(p.classify_window, history.size()),
                                                  p.dy, p.thresholds)
                          : front::WaveState::broken;
  if (report.final_classification == front::WaveState::planar) {
    std::size_t s = report.sample_states.size();
    while (s > 0 && report.sample_states[s - 1] == front::WaveState::planar) --s;
    report.time_to_planar = report.samples[s].metrics.t;
  }
  if (controller) {
    report.events.assign(controller->events().begin(), controller->events().end());
    report.missing_polls = controller->missing_polls();
  }

  if (opts.write_files) {
    output::emit_metrics(report.samples, report.metrics_csv);
    output::emit_events(report.events, report.events_csv);
    if (p.name == "fig1") {
      const auto nc = model::nullclines(p.model, -0.4, 1.2, 161);
      std::ofstream out(report.run_dir / "nullclines.csv", std::ios::binary);
      out << "v,w_fast,w_slow\n";
      for (std::size_t n = 0; n < nc.v.size(); ++n)
        out << config::format_number(nc.v[n]) << ',' << config::format_number(nc.w_fast[n]) << ','
            << config::format_number(nc.w_slow[n]) << '\n';
    }
    std::ofstream out(report.report_txt, std::ios::binary);
    out << format_report(report, p);
    if (!out) throw std::runtime_error("cannot write " + report.report_txt.string());
  }
  return report;
}

RunReport run_preset(std::string_view name,
                     std::span<const std::pair<std::string, std::string>> overrides,
                     const RunOptions& opts) {
  return run_experiment(make_preset(name, overrides), opts);
}

std::string format_report(const RunReport& r, const ExperimentPreset& p) {
  using config::format_number;
  std::ostringstream o;
  o << "preset: " << p.name << "\n";
  o << "title: " << p.title << "\n";
  o << "torus_time: " << short_number(r.torus_time) << "\n";
  o << "final_classification: " << front::to_string(r.final_classification) << "\n";
  o << "time_to_planar: " << (r.time_to_planar ? format_number(*r.time_to_planar) : "none") << "\n";
  o << "samples: " << r.samples.size() << "\n";
  if (!r.samples.empty()) {
    const auto& m = r.samples.back().metrics;
    o << "final_coverage: " << format_number(m.coverage) << "\n";
    o << "final_planarity: " << (std::isfinite(m.planarity) ? format_number(m.planarity) : "none") << "\n";
    o << "final_multi_crossing_fraction: " << format_number(m.multi_crossing_fraction) << "\n";
  }
  if (p.controlled) {
    o << "control_events: " << r.events.size() << "\n";
    o << "missing_front_polls: " << r.missing_polls << "\n";
  }
  o << "frames: " << r.frames.size() << "\n";
  for (std::size_t n = 0; n < r.frames.size() && n < p.snapshot_times.size(); ++n)
    o << "  " << r.frames[n].filename().string() << " t=" << format_number(p.snapshot_times[n]) << "\n";
  const auto checks = reference_checks(p);
  const auto failed = std::count_if(checks.begin(), checks.end(), [](const auto& c) { return !c.ok(); });
  o << "reference_checks: " << checks.size() - static_cast<std::size_t>(failed) << "/" << checks.size()
    << " match\n";
  for (const auto& c : checks)
    if (!c.ok())
      o << "  differs: " << c.item << " reference " << format_number(c.literal) << " resolved "
        << format_number(c.resolved) << "\n";
  o << "\n[settings]\n" << p.settings.dump();
  return o.str();
}

}  // namespace spiralctl::experiment

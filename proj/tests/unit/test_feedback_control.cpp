#include <doctest.h>

#include <cmath>
#include <set>

#include "spiralctl/errors.hpp"
#include "spiralctl/feedback_control.hpp"

using namespace spiralctl;
using namespace spiralctl::control;

namespace {

SensorLayout one_line(double y) {
  SensorLayout s;
  s.x_sensors = {50.0};
  s.y_lines = {y};
  return s;
}

// Feeds a front moving at `speed` through one trigger line for `laps` laps, polling every dt.
ControllerState drive(ControllerState s, const ControllerConfig& cfg, const SensorLayout& sensors,
                      double ly, double speed, double t0, double t1, double dt,
                      std::vector<ControlEvent>* events = nullptr) {
  for (double t = t0; t <= t1; t += dt) {
    const double z = std::fmod(speed * t, ly);
    PollResult r = poll(s, z, cfg, sensors, t, ly, true);
    if (r.event && events) events->push_back(*r.event);
    s = r.state;
  }
  return s;
}

}  // namespace

TEST_SUITE("feedback_control") {
  TEST_CASE("on-target front yields no correction") {
    ControllerConfig cfg;
    std::vector<ControlEvent> ev;
    const ControllerState s = drive({}, cfg, one_line(30.0), 100.0, 0.5, 0.0, 700.0, 0.2, &ev);
    REQUIRE(ev.size() >= 2);
    for (const auto& e : ev) {
      CHECK(e.d == doctest::Approx(100.0));
      CHECK(e.d_set == doctest::Approx(100.0).epsilon(1e-9));
      CHECK(std::abs(e.c_bar) < 1e-9);
    }
    CHECK(std::abs(actuator_current(s.c_bar, cfg, 1.0, 1.0)) < 1e-12);
  }

  TEST_CASE("lagging front gets excited") {
    ControllerConfig cfg;
    std::vector<ControlEvent> ev;
    const ControllerState s = drive({}, cfg, one_line(30.0), 100.0, 0.4, 0.0, 600.0, 0.2, &ev);
    REQUIRE(!ev.empty());
    // One lap of 100 at speed 0.4 takes 250, while the set speed expects 125.
    CHECK(ev.back().c_bar == doctest::Approx(100.0 - 0.5 * 250.0).epsilon(1e-6));
    CHECK(s.c_bar < 0.0);
    CHECK(actuator_current(s.c_bar, cfg, 1.0, 1.0) > 0.0);
  }

  TEST_CASE("first crossing only arms the controller") {
    ControllerConfig cfg;
    std::vector<ControlEvent> ev;
    const ControllerState s = drive({}, cfg, one_line(30.0), 100.0, 0.5, 0.0, 100.0, 0.2, &ev);
    CHECK(s.triggered == 1);
    CHECK(ev.empty());
    CHECK(s.c_bar == 0.0);
  }

  TEST_CASE("no crossing holds the state") {
    ControllerConfig cfg;
    ControllerState s;
    s.prev_z = 10.0;
    s.prev_t = 5.0;
    s.c_bar = -3.0;
    s.last_crossing_time = 2.0;
    s.last_line = 0;
    const PollResult r = poll(s, 10.2, cfg, one_line(30.0), 5.2, 100.0, true);
    CHECK_FALSE(r.event);
    CHECK(r.state.c_bar == s.c_bar);
    CHECK(r.state.last_crossing_time == s.last_crossing_time);
    CHECK(r.state.triggered == s.triggered);
  }

  TEST_CASE("large jumps are re-acquisitions") {
    ControllerConfig cfg;
    ControllerState s;
    s.prev_z = 10.0;
    const PollResult r = poll(s, 40.0, cfg, one_line(30.0), 0.2, 100.0, true);
    CHECK(r.state.triggered == 0);
    const PollResult gone = poll(s, std::nullopt, cfg, one_line(30.0), 0.2, 100.0, true);
    CHECK(gone.state.front_missing);
    CHECK_FALSE(gone.state.prev_z);
  }

  TEST_CASE("current formula and sign") {
    ControllerConfig cfg;
    cfg.slope_f = 0.3536;
    CHECK(actuator_current(-10.0, cfg, 1.0, 1.0) == doctest::Approx(0.003536));
    CHECK(actuator_current(0.0, cfg, 1.0, 1.0) == 0.0);
    for (double c : {-1e3, -1.0, -1e-9}) CHECK(actuator_current(c, cfg, 0.5, 2.0) > 0.0);
    for (double c : {1e-9, 1.0, 1e3}) CHECK(actuator_current(c, cfg, 0.5, 2.0) < 0.0);
  }

  TEST_CASE("control field is local and gated by the start time") {
    const grid::Grid2D geo(200, 400);
    const Layout l = sparse_layout_fig4(200, 400);
    ControllerConfig cfg;
    cfg.slope_f = 0.3536;
    ControllerState s;
    s.c_bar = -10.0;
    const grid::Field2D early = control_field(s, cfg, l.actuators, geo, 5.0);
    for (double v : early.data()) CHECK(v == 0.0);
    s.c_bar = 0.0;
    const grid::Field2D idle = control_field(s, cfg, l.actuators, geo, 20.0);
    for (double v : idle.data()) CHECK(v == 0.0);
    s.c_bar = -10.0;
    const grid::Field2D on = control_field(s, cfg, l.actuators, geo, 20.0);
    std::size_t active = 0;
    for (double v : on.data()) {
      if (v != 0.0) {
        ++active;
        CHECK(v == doctest::Approx(0.003536));
      }
    }
    CHECK(active == 150);
  }

  TEST_CASE("layouts") {
    const Layout ideal = idealized_layout(200, 400);
    CHECK(ideal.actuators.xs.size() == 100);
    CHECK(ideal.actuators.ys.size() == 200);
    CHECK(ideal.sensors.x_sensors.size() == 7);
    CHECK(ideal.sensors.y_lines.at(0) == doctest::Approx(294.0));
    for (std::size_t i = 1; i < 7; ++i)
      CHECK(ideal.sensors.x_sensors[i] - ideal.sensors.x_sensors[i - 1] == doctest::Approx(25.0));

    const grid::Grid2D geo(200, 400);
    const Layout f4 = sparse_layout_fig4(200, 400);
    CHECK(f4.actuators.count() == 150);
    CHECK(geo.cell_x(f4.sensors.x_sensors[0]) == 66);
    CHECK(geo.cell_x(f4.sensors.x_sensors[1]) == 133);
    CHECK(f4.actuators.xs.front() == doctest::Approx(1.0));
    CHECK(f4.actuators.xs.back() == doctest::Approx(97.0));
    CHECK(f4.actuators.ys.front() == doctest::Approx(110.0));
    CHECK(f4.actuators.ys.back() == doctest::Approx(260.0));
    CHECK(sparse_layout_fig5(200, 400).actuators.count() == 300);
    CHECK(sparse_layout_fig8(200, 400).sensors.x_sensors.size() == 5);

    std::set<std::size_t> cells;
    for (double x : f4.actuators.xs)
      for (double y : f4.actuators.ys) cells.insert(geo.cell_x(x) * 400 + geo.cell_y(y));
    CHECK(cells.size() == 150);
  }

  TEST_CASE("invalid settings are rejected") {
    ControllerConfig cfg;
    cfg.k = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    SensorLayout s = one_line(30.0);
    s.monitor = 3;
    CHECK_THROWS_AS(s.validate(100, 100), ConfigError);
    ActuatorLayout a{{150.0}, {10.0}};
    CHECK_THROWS_AS(a.validate(100, 100), ConfigError);
  }

  TEST_CASE("controller runs on a live grid") {
    grid::Grid2D g(20, 100);
    for (std::size_t i = 0; i < 20; ++i)
      for (std::size_t j = 40; j < 50; ++j) g.v(i, j) = 1.0;
    Layout l;
    l.sensors = one_line(70.0);
    l.sensors.x_sensors = {10.0};
    l.actuators = {{5.0, 15.0}, {20.0}};
    FeedbackController c({}, l, g, {grid::YBoundary::periodic});
    CHECK(c.update(g) == nullptr);
    CHECK(c.monitored_column() == 10);
    CHECK(c.missing_polls() == 0);
    CHECK(c.total_current() == 0.0);
  }
}

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "spiralctl/errors.hpp"
#include "spiralctl/front_track.hpp"
#include "spiralctl/grid.hpp"

using namespace spiralctl;
using namespace spiralctl::grid;

namespace {

Field2D random_field(std::size_t nx, std::size_t ny, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Field2D f(nx, ny);
  for (double& x : f.data()) x = u(rng);
  return f;
}

double total(const Field2D& f) { return std::accumulate(f.data().begin(), f.data().end(), 0.0); }

// Direct five-point stencil with explicit ghost lookups, written independently of the library.
double reference_laplacian(const Field2D& f, std::size_t i, std::size_t j, bool periodic) {
  const auto nx = static_cast<long>(f.nx());
  const auto ny = static_cast<long>(f.ny());
  const auto at = [&](long a, long b) {
    if (a < 0) a = 0;
    if (a >= nx) a = nx - 1;
    if (periodic) b = (b + ny) % ny;
    else if (b < 0) b = 0;
    else if (b >= ny) b = ny - 1;
    return f(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
  };
  const long a = static_cast<long>(i), b = static_cast<long>(j);
  return at(a + 1, b) + at(a - 1, b) + at(a, b + 1) + at(a, b - 1) - 4.0 * at(a, b);
}

}  // namespace

TEST_SUITE("grid") {
  TEST_CASE("laplacian annihilates constants") {
    const Field2D c(12, 9, 3.25);
    for (auto b : {YBoundary::no_flux, YBoundary::periodic}) {
      const Field2D l = laplacian(c, {b}, 1.0, 1.0);
      for (double v : l.data()) CHECK(v == 0.0);
    }
  }

  TEST_CASE("laplacian matches a direct stencil") {
    const Field2D f = random_field(7, 11, 3);
    for (bool periodic : {false, true}) {
      const Field2D l =
          laplacian(f, {periodic ? YBoundary::periodic : YBoundary::no_flux}, 1.0, 1.0);
      for (std::size_t i = 0; i < f.nx(); ++i)
        for (std::size_t j = 0; j < f.ny(); ++j)
          CHECK(l(i, j) == doctest::Approx(reference_laplacian(f, i, j, periodic)).epsilon(1e-13));
    }
  }

  TEST_CASE("spike stencil") {
    Field2D f(9, 9);
    f(4, 4) = 2.0;
    const Field2D l = laplacian(f, {}, 1.0, 1.0);
    CHECK(l(4, 4) == -8.0);
    CHECK(l(3, 4) == 2.0);
    CHECK(l(5, 4) == 2.0);
    CHECK(l(4, 3) == 2.0);
    CHECK(l(4, 5) == 2.0);
    CHECK(l(3, 3) == 0.0);
  }

  TEST_CASE("no-flux laplacian sums to zero") {
    for (unsigned seed : {1u, 2u, 3u}) {
      const Field2D f = random_field(13, 17, seed);
      CHECK(std::abs(total(laplacian(f, {}, 0.7, 1.3))) < 1e-11);
      CHECK(std::abs(total(laplacian(f, {YBoundary::periodic}, 0.7, 1.3))) < 1e-11);
    }
  }

  TEST_CASE("cosine is a discrete eigenfunction up to O(dx^2)") {
    const std::size_t nx = 200;
    const double lx = 200.0;
    Field2D f(nx, 4);
    Grid2D geo(nx, 4);
    for (std::size_t i = 0; i < nx; ++i)
      for (std::size_t j = 0; j < 4; ++j) f(i, j) = std::cos(std::numbers::pi * geo.x_center(i) / lx);
    const Field2D l = laplacian(f, {}, 1.0, 1.0);
    const double rate = std::pow(std::numbers::pi / lx, 2);
    for (std::size_t i = 0; i < nx; ++i) CHECK(std::abs(l(i, 0) + rate * f(i, 0)) < 1e-8);
  }

  TEST_CASE("euler step on uniform and resting states") {
    const model::ModelParams p;
    Grid2D g(8, 8);
    g.v.fill(0.5);
    const Grid2D next = step(g, p, {}, nullptr, {}, 0.1);
    for (double v : next.v.data()) CHECK(v == doctest::Approx(0.51));
    for (double w : next.w.data()) CHECK(w == doctest::Approx(0.00025));
    CHECK(next.t == doctest::Approx(0.1));

    Grid2D rest(8, 8);
    const Grid2D same = step(rest, p, {}, nullptr, {}, 0.2);
    CHECK(same.v == rest.v);
    CHECK(same.w == rest.w);
  }

  TEST_CASE("injected current enters linearly") {
    const model::ModelParams p;
    Grid2D g(10, 10);
    g.v = random_field(10, 10, 9);
    Field2D current(10, 10);
    current(3, 7) = 0.25;
    const Grid2D base = step(g, p, {}, nullptr, {}, 0.2);
    const Grid2D kicked = step(g, p, {}, &current, {}, 0.2);
    for (std::size_t i = 0; i < 10; ++i)
      for (std::size_t j = 0; j < 10; ++j) {
        const double expect = (i == 3 && j == 7) ? 0.05 : 0.0;
        CHECK(kicked.v(i, j) - base.v(i, j) == doctest::Approx(expect).epsilon(1e-12));
      }
  }

  TEST_CASE("cfl bound") {
    const model::ModelParams p;
    CHECK(cfl_factor(1.0, 0.2, 1.0, 1.0) == doctest::Approx(0.8));
    CHECK(check_cfl(p, 0.2, 1.0, 1.0, CflPolicy::reject));
    CHECK_THROWS_AS(check_cfl(p, 0.5, 1.0, 1.0, CflPolicy::reject), NumericalError);
    CHECK_FALSE(check_cfl(p, 0.5, 1.0, 1.0, CflPolicy::warn));
    Grid2D g(6, 6);
    CHECK_THROWS_AS((void)step(g, p, {}, nullptr, {}, 0.5), NumericalError);
  }

  TEST_CASE("pulse seed band") {
    Grid2D g(4, 400);
    init_pulse_seed(g, {});
    for (std::size_t j = 0; j < 400; ++j) {
      const double y = g.y_center(j);
      const double want = (y >= 98.0 && y <= 104.0) ? 1.0 : 0.0;
      CHECK(g.v(2, j) == want);
    }
    for (double w : g.w.data()) CHECK(w == 0.0);

    Grid2D small(4, 100);
    init_pulse_seed(small, {});
    for (std::size_t j = 0; j < 100; ++j) {
      const double y = small.y_center(j);
      CHECK(small.v(0, j) == ((y >= 24.5 && y <= 26.0) ? 1.0 : 0.0));
    }
  }

  TEST_CASE("break zeroes the requested columns and is idempotent") {
    Grid2D g(200, 20);
    g.v.fill(0.7);
    g.w.fill(0.1);
    break_wave(g);
    for (std::size_t i = 0; i < 200; ++i) {
      const double x = g.x_center(i);
      CHECK(g.v(i, 5) == ((x >= 10.0 && x <= 100.0) ? 0.0 : 0.7));
    }
    for (double w : g.w.data()) CHECK(w == 0.1);
    Grid2D twice = g;
    break_wave(twice);
    CHECK(twice.v == g.v);
  }

  TEST_CASE("threads give identical fields") {
    const model::ModelParams p;
    Grid2D a(24, 60);
    init_pulse_seed(a, {});
    Grid2D b = a;
    Stepper one(p, {}, {}, 1);
    Stepper four(p, {}, {}, 4);
    for (int s = 0; s < 50; ++s) {
      one.advance(a, nullptr, 0.2);
      four.advance(b, nullptr, 0.2);
    }
    CHECK(a.v == b.v);
    CHECK(a.w == b.w);
  }

  TEST_CASE("checkpoint round trip") {
    Grid2D g(5, 7);
    g.v = random_field(5, 7, 11);
    g.w = random_field(5, 7, 12);
    std::stringstream buf;
    write_checkpoint(g, buf);
    const Grid2D back = read_checkpoint(buf);
    CHECK(back.v == g.v);
    CHECK(back.w == g.w);
    std::stringstream junk("xx");
    CHECK_THROWS((void)read_checkpoint(junk));
  }

  TEST_CASE("rest state never forms a torus") {
    Grid2D g(8, 60);
    SimConfig sim;
    TorusOptions opts;
    opts.timeout = 100.0;
    CHECK_THROWS_AS(make_torus_single_wave(g, {}, sim, opts), NumericalError);
  }

  TEST_CASE("torus keeps a single pulse") {
    const model::ModelParams p;
    Grid2D g(12, 400);
    init_pulse_seed(g, {});
    SimConfig sim;
    const BoundarySpec b = make_torus_single_wave(g, p, sim);
    CHECK(b.periodic());
    const auto single = [&] {
      for (std::size_t i = 0; i < g.nx(); ++i)
        if (front::crossing_count(g, i, 0.5, b) != 2) return false;
      return true;
    };
    CHECK(single());
    Stepper stepper(p, {}, b);
    run(g, stepper, sim, g.t + 500.0, nullptr, {});
    CHECK(single());
  }

  TEST_CASE("run without control leaves rest unchanged") {
    Grid2D g(8, 8);
    Stepper stepper({}, {}, {});
    SimConfig sim;
    sim.snapshot_stride = 5;
    std::vector<Field2D> frames;
    const Observer keep = [&](const Grid2D& s) { frames.push_back(s.v); };
    const RunSummary r = run(g, stepper, sim, 10.0, nullptr, std::span(&keep, 1));
    CHECK(r.steps == 50);
    REQUIRE(frames.size() >= 2);
    for (const auto& f : frames) CHECK(f == frames.front());
  }
}

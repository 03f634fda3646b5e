#include <doctest.h>

#include <cmath>
#include <random>

#include "chopt/control.hpp"
#include "chopt/fields.hpp"

using namespace chopt;

namespace {

Field random_field(const Grid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Field f(g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = nd(rng);
  return f;
}

}  // namespace

TEST_CASE("grid invariants") {
  const Grid g = Grid::rectangle(4, 5, 2.0, 1.0);
  CHECK(g.cell_count() == 20);
  CHECK(g.cell_volume() == doctest::Approx(0.5 * 0.2));
  CHECK(g.spacing(0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(Grid::line(2, 1.0), Error);
  CHECK_THROWS_AS(Grid::line(8, 0.0), Error);
  CHECK_THROWS_AS(Grid::rectangle(3, 2, 1.0, 1.0), Error);
}

TEST_CASE("laplacian of a constant vanishes") {
  for (const Grid& g : {Grid::line(17, 1.0), Grid::rectangle(6, 9, 1.0, 2.0)}) {
    const Field lap = laplacian_neumann(Field(g, 3.7));
    CHECK(lap.max_abs() == 0.0);
  }
}

TEST_CASE("laplacian is exact on quadratics in the interior") {
  const Grid g = Grid::line(64, 1.0);
  Field f(g);
  for (int i = 0; i < 64; ++i) f[i] = g.center(0, i) * g.center(0, i);
  const Field lap = laplacian_neumann(f);
  for (int i = 1; i < 63; ++i) CHECK(lap[i] == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("discrete divergence theorem and stencil symmetry") {
  std::mt19937_64 rng(11);
  for (const Grid& g : {Grid::line(33, 1.3), Grid::rectangle(7, 11, 1.0, 0.6)}) {
    for (int rep = 0; rep < 100; ++rep) {
      const Field f = random_field(g, rng);
      const Field h = random_field(g, rng);
      const Field lf = laplacian_neumann(f);
      double scale = 0.0;
      for (std::size_t i = 0; i < lf.size(); ++i) scale += std::abs(lf[i]) * g.cell_volume();
      CHECK(std::abs(integrate(lf)) <= 1e-12 * scale);
      const double a = inner(lf, h);
      const double b = inner(f, laplacian_neumann(h));
      CHECK(std::abs(a - b) <= 1e-12 * std::max(std::abs(a), 1.0) * 1e2);
    }
  }
}

TEST_CASE("midpoint integration examples") {
  const Grid g = Grid::line(64, 1.0);
  CHECK(integrate(Field(g, 1.0)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(integrate(Field(g, 0.0)) == 0.0);
  Field x(g);
  for (int i = 0; i < 64; ++i) x[i] = g.center(0, i);
  CHECK(integrate(x) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("inner product properties") {
  std::mt19937_64 rng(5);
  const Grid g = Grid::rectangle(5, 6, 1.0, 1.0);
  const Field one(g, 1.0);
  CHECK(inner(one, one) == doctest::Approx(1.0).epsilon(1e-15));
  for (int rep = 0; rep < 20; ++rep) {
    const Field f = random_field(g, rng);
    const Field h = random_field(g, rng);
    CHECK(inner(f, f) > 0.0);
    CHECK(inner(f, h) == inner(h, f));
  }
  CHECK(inner(Field(g), Field(g)) == 0.0);
  CHECK_THROWS_AS(inner(Field(g), Field(Grid::line(30, 1.0))), Error);
  try {
    inner(Field(g), Field(Grid::line(30, 1.0)));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Dimension);
  }
}

TEST_CASE("time grid locate and nodes") {
  const TimeGrid t{2.0, 8};
  CHECK(t.dt() == doctest::Approx(0.25));
  CHECK(t.t(0) == 0.0);
  CHECK(t.t(8) == 2.0);
  auto loc = t.locate(0.5);
  CHECK(loc.at_node);
  CHECK(loc.node == 2);
  CHECK(loc.k == 1);
  CHECK(loc.s == 1.0);
  loc = t.locate(0.6);
  CHECK_FALSE(loc.at_node);
  CHECK(loc.k == 2);
  CHECK(loc.s == doctest::Approx(0.4));
  CHECK_THROWS_AS(t.locate(-0.1), Error);
  CHECK_THROWS_AS(t.locate(2.1), Error);
  CHECK_THROWS_AS((TimeGrid{1.0, 0}).validate(), Error);
}

TEST_CASE("hat weights integrate piecewise linear data exactly") {
  const TimeGrid t{1.0, 10};
  // g(t) = 3 + 2t is linear, so its interpolant is exact.
  std::vector<double> g(11);
  for (int k = 0; k <= 10; ++k) g[k] = 3.0 + 2.0 * t.t(k);
  for (auto [a, b] : std::vector<std::pair<double, double>>{{0.0, 1.0}, {0.0, 0.37}, {0.12, 0.37}, {0.3, 0.3}, {0.25, 0.8}}) {
    const auto w = hat_weights(t, a, b);
    double sum = 0.0;
    for (int k = 0; k <= 10; ++k) sum += w[k] * g[k];
    CHECK(sum == doctest::Approx(3.0 * (b - a) + (b * b - a * a)).epsilon(1e-13));
  }
  // Trapezoid weights on the full horizon.
  const auto w = hat_weights(t, 0.0, 1.0);
  CHECK(w[0] == doctest::Approx(0.05));
  CHECK(w[5] == doctest::Approx(0.1));
  CHECK(w[10] == doctest::Approx(0.05));
}

TEST_CASE("interpolation in time") {
  const Grid g = Grid::line(8, 1.0);
  std::mt19937_64 rng(3);
  const Field base = random_field(g, rng);
  Trajectory traj;
  traj.time = TimeGrid{1.0, 10};
  for (int k = 0; k <= 10; ++k) {
    Field f = base;
    f *= traj.time.t(k);
    traj.frames.push_back({f, f, f});
  }
  // Exact at nodes.
  CHECK(interpolate_in_time(traj, 1, traj.time.t(4)) == traj.frames[4][1]);
  // Linear in time: phi(t) = t g.
  const Field mid = interpolate_in_time(traj, 1, 0.3);
  for (std::size_t i = 0; i < mid.size(); ++i) CHECK(std::abs(mid[i] - 0.3 * base[i]) <= 1e-14);
  const Field off = interpolate_in_time(traj, 0, 0.33);
  for (std::size_t i = 0; i < off.size(); ++i) CHECK(std::abs(off[i] - 0.33 * base[i]) <= 1e-14);
  // Midway between equal frames.
  Trajectory flat;
  flat.time = TimeGrid{1.0, 2};
  flat.frames.assign(3, {base, base, base});
  CHECK(interpolate_in_time(flat, 2, 0.25) == base);
  CHECK_THROWS_AS(interpolate_in_time(traj, 1, 1.5), Error);
  // Convexity: value between bracketing frames.
  for (std::size_t i = 0; i < off.size(); ++i) {
    const double lo = std::min(traj.frames[3][0][i], traj.frames[4][0][i]);
    const double hi = std::max(traj.frames[3][0][i], traj.frames[4][0][i]);
    CHECK(off[i] >= lo - 1e-15);
    CHECK(off[i] <= hi + 1e-15);
  }
}

TEST_CASE("control inner product uses left-rectangle weights") {
  const Grid g = Grid::line(4, 1.0);
  const TimeGrid t{2.0, 4};
  ControlField u = ControlField::constant(g, t, 1.0);
  u.nodes[4] = Field(g, 100.0);  // last node carries no weight
  CHECK(control_inner(u, u) == doctest::Approx(2.0));
  CHECK(control_norm(u) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("control bounds") {
  const Grid g = Grid::line(4, 1.0);
  CHECK_THROWS_AS(ControlBounds::constant(g, 1.0, 0.0), Error);
  const ControlBounds b = ControlBounds::constant(g, -1.0, 3.0);
  const ControlField mid = b.midpoint(TimeGrid{1.0, 3});
  CHECK(mid.nodes.size() == 4);
  CHECK(mid.nodes[2][1] == 1.0);
  CHECK(b.contains(mid));
}

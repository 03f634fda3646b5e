#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "chopt/error.hpp"
#include "chopt/potentials.hpp"

using namespace chopt;

namespace {

std::vector<double> samples(double lo, double hi, int count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ud(lo, hi);
  std::vector<double> r(count);
  for (double& v : r) v = ud(rng);
  return r;
}

bool close(double a, double b, double rel) { return std::abs(a - b) <= rel * std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("quartic potential values") {
  const Potential q = Potential::quartic();
  CHECK(potential_eval(q, 1.0, 0) == 0.0);
  CHECK(potential_eval(q, 0.0, 0) == 0.25);
  CHECK(potential_eval(q, 0.0, 1) == 0.0);
  CHECK(potential_eval(q, 2.0, 1) == doctest::Approx(6.0));
  CHECK(potential_eval(q, 2.0, 3) == doctest::Approx(12.0));
  CHECK(q.contains(1e6));
}

TEST_CASE("logarithmic potential values") {
  const Potential l = Potential::logarithmic(2.0);
  CHECK(potential_eval(l, 0.0, 2) == doctest::Approx(-2.0));
  CHECK(potential_eval(l, 0.0, 0) == 0.0);
  CHECK(potential_eval(l, 0.0, 1) == 0.0);
}

TEST_CASE("split parts") {
  const Potential q = Potential::quartic();
  CHECK(potential_split_eval(q, 1.0, PotentialPart::Convex, 1) == doctest::Approx(1.0));
  CHECK(potential_split_eval(q, 1.0, PotentialPart::Smooth, 1) == doctest::Approx(-1.0));
  CHECK(potential_split_eval(q, 0.0, PotentialPart::Convex, 0) == 0.0);
  const Potential l = Potential::logarithmic(2.0);
  CHECK(potential_split_eval(l, 0.0, PotentialPart::Convex, 0) == 0.0);
  for (double r : {-0.7, 0.1, 0.55}) CHECK(potential_split_eval(l, r, PotentialPart::Smooth, 1) == doctest::Approx(-4.0 * r));

  for (const Potential& pot : {q, l}) {
    const double span = pot.is_singular() ? 0.999 : 3.0;
    for (double r : samples(-span, span, 100, 9)) {
      for (int order = 0; order <= 2; ++order) {
        const double sum = potential_split_eval(pot, r, PotentialPart::Convex, order) +
                           potential_split_eval(pot, r, PotentialPart::Smooth, order);
        CHECK(close(sum, potential_eval(pot, r, order), 1e-12));
      }
    }
  }
}

TEST_CASE("derivatives match central differences") {
  const double h = 1e-5;
  for (const Potential& pot : {Potential::quartic(), Potential::logarithmic(2.0)}) {
    const double span = pot.is_singular() ? 0.95 : 2.0;
    for (double r : samples(-span, span, 50, 21)) {
      for (int order = 1; order <= 3; ++order) {
        const double fd = (potential_eval(pot, r + h, order - 1) - potential_eval(pot, r - h, order - 1)) / (2 * h);
        const double exact = potential_eval(pot, r, order);
        CHECK(std::abs(fd - exact) <= 1e-6 * std::max(1.0, std::abs(exact)));
      }
    }
  }
}

TEST_CASE("convex part is convex") {
  for (const Potential& pot : {Potential::quartic(), Potential::logarithmic(2.0)}) {
    const double span = pot.is_singular() ? 0.9999 : 5.0;
    for (double r : samples(-span, span, 200, 4)) CHECK(potential_split_eval(pot, r, PotentialPart::Convex, 2) >= -1e-12);
  }
}

TEST_CASE("logarithmic domain") {
  const Potential l = Potential::logarithmic(2.0);
  for (double r : {-1.0, 1.0, 1.5, -3.0, std::nan("")}) {
    for (int order = 0; order <= 3; ++order) {
      try {
        potential_eval(l, r, order);
        FAIL("expected a domain error");
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Domain);
      }
    }
  }
  // F' diverges towards the endpoints.
  CHECK(potential_eval(l, 1.0 - 1e-12, 1) > 20.0);
  CHECK(potential_eval(l, -1.0 + 1e-12, 1) < -20.0);
  CHECK(potential_eval(l, 1.0 - 1e-14, 1) > potential_eval(l, 1.0 - 1e-10, 1));
}

TEST_CASE("proliferation") {
  const Proliferation c = Proliferation::constant(0.5);
  for (double r : {-3.0, 0.0, 0.7}) {
    CHECK(proliferation_eval(c, r, 0) == 0.5);
    CHECK(proliferation_eval(c, r, 1) == 0.0);
    CHECK(proliferation_eval(c, r, 2) == 0.0);
  }
  const Proliferation ramp = Proliferation::smooth_ramp(1.0, 0.2);
  CHECK(proliferation_eval(ramp, 10.0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(proliferation_eval(ramp, -10.0, 0) == doctest::Approx(0.0).epsilon(1e-12));
  const double h = 1e-5;
  for (double r : samples(-1.0, 1.0, 10, 8)) {
    for (int order = 1; order <= 2; ++order) {
      const double fd = (proliferation_eval(ramp, r + h, order - 1) - proliferation_eval(ramp, r - h, order - 1)) / (2 * h);
      CHECK(std::abs(fd - proliferation_eval(ramp, r, order)) <= 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
  for (double r : samples(-2.0, 2.0, 200, 2)) {
    const double p = proliferation_eval(ramp, r, 0);
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
    CHECK(std::abs(proliferation_eval(ramp, r, 1)) <= 0.5 / 0.2 + 1e-12);
    CHECK(std::isfinite(proliferation_eval(ramp, r, 2)));
  }
}

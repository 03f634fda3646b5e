#include "chopt/potentials.hpp"

#include <cmath>
#include <sstream>

#include "chopt/error.hpp"

namespace chopt {

namespace {

void check_order(int order, int max_order) {
  require(order >= 0 && order <= max_order, ErrorKind::InvalidArgument,
          "derivative order must lie in 0.." + std::to_string(max_order));
}

void check_domain(const Potential& pot, double r) {
  if (!std::isfinite(r)) fail(ErrorKind::Domain, "potential argument is not finite");
  if (pot.contains(r)) return;
  std::ostringstream msg;
  msg.precision(17);
  if (r <= pot.lower_bound()) {
    msg << "potential argument r = " << r << " violates lower bound r_- = " << pot.lower_bound();
  } else {
    msg << "potential argument r = " << r << " violates upper bound r_+ = " << pot.upper_bound();
  }
  fail(ErrorKind::Domain, msg.str());
}

double convex_part(const Potential& pot, double r, int order) {
  if (pot.kind == PotentialKind::Quartic) {
    switch (order) {
      case 0: return 0.25 * r * r * r * r;
      case 1: return r * r * r;
      case 2: return 3.0 * r * r;
      default: return 6.0 * r;
    }
  }
  const double a = 1.0 - r;
  const double b = 1.0 + r;
  switch (order) {
    case 0: return a * std::log(a) + b * std::log(b);
    case 1: return std::log(b) - std::log(a);
    case 2: return 1.0 / a + 1.0 / b;
    default: return 1.0 / (a * a) - 1.0 / (b * b);
  }
}

double smooth_part(const Potential& pot, double r, int order) {
  if (pot.kind == PotentialKind::Quartic) {
    switch (order) {
      case 0: return 0.25 - 0.5 * r * r;
      case 1: return -r;
      case 2: return -1.0;
      default: return 0.0;
    }
  }
  switch (order) {
    case 0: return -pot.lambda * r * r;
    case 1: return -2.0 * pot.lambda * r;
    case 2: return -2.0 * pot.lambda;
    default: return 0.0;
  }
}

}  // namespace

double Potential::lower_bound() const {
  return kind == PotentialKind::Logarithmic ? -1.0 : -std::numeric_limits<double>::infinity();
}

double Potential::upper_bound() const {
  return kind == PotentialKind::Logarithmic ? 1.0 : std::numeric_limits<double>::infinity();
}

double potential_eval(const Potential& pot, double r, int order) {
  check_order(order, 3);
  check_domain(pot, r);
  if (pot.kind == PotentialKind::Quartic) {
    // Direct forms avoid cancellation in Bhat + pihat near the wells.
    switch (order) {
      case 0: {
        const double w = r * r - 1.0;
        return 0.25 * w * w;
      }
      case 1: return r * r * r - r;
      case 2: return 3.0 * r * r - 1.0;
      default: return 6.0 * r;
    }
  }
  return convex_part(pot, r, order) + smooth_part(pot, r, order);
}

double potential_split_eval(const Potential& pot, double r, PotentialPart part, int order) {
  check_order(order, 3);
  check_domain(pot, r);
  return part == PotentialPart::Convex ? convex_part(pot, r, order) : smooth_part(pot, r, order);
}

double proliferation_eval(const Proliferation& p, double r, int order) {
  check_order(order, 2);
  if (p.kind == ProliferationKind::Constant) return order == 0 ? p.p0 : 0.0;
  const double th = std::tanh(r / p.width);
  const double sech2 = 1.0 - th * th;
  switch (order) {
    case 0: return 0.5 * p.p0 * (1.0 + th);
    case 1: return 0.5 * p.p0 / p.width * sech2;
    default: return -p.p0 / (p.width * p.width) * sech2 * th;
  }
}

}  // namespace chopt

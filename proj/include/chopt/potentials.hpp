#pragma once

#include <limits>

namespace chopt {

enum class PotentialKind { Quartic, Logarithmic };
enum class PotentialPart { Convex, Smooth };

/// Double-well potential F = Bhat + pihat.
///
/// Quartic:      F(r) = (r^2 - 1)^2 / 4,  Bhat = r^4 / 4,  pihat = 1/4 - r^2 / 2.
/// Logarithmic:  F(r) = (1-r)log(1-r) + (1+r)log(1+r) - lambda r^2 on (-1, 1),
///               Bhat = entropy terms, pihat = -lambda r^2.
/// Bhat(0) = 0 in both cases.
struct Potential {
  PotentialKind kind = PotentialKind::Quartic;
  double lambda = 2.0;

  static Potential quartic() { return {PotentialKind::Quartic, 0.0}; }
  static Potential logarithmic(double lambda = 2.0) { return {PotentialKind::Logarithmic, lambda}; }

  double lower_bound() const;  ///< r_-
  double upper_bound() const;  ///< r_+
  bool is_singular() const { return kind == PotentialKind::Logarithmic; }
  bool contains(double r) const { return r > lower_bound() && r < upper_bound(); }

  bool operator==(const Potential&) const = default;
};

/// F^{(order)}(r), order in 0..3. Throws a domain error outside (r_-, r_+).
double potential_eval(const Potential& pot, double r, int order);

/// Derivative of the convex part Bhat or the smooth part pihat, order 0..3.
double potential_split_eval(const Potential& pot, double r, PotentialPart part, int order);

enum class ProliferationKind { Constant, SmoothRamp };

/// P(r) = P0 (constant) or P0 (1 + tanh(r / s)) / 2 (smooth ramp).
struct Proliferation {
  ProliferationKind kind = ProliferationKind::SmoothRamp;
  double p0 = 1.0;
  double width = 0.5;

  static Proliferation constant(double p0) { return {ProliferationKind::Constant, p0, 0.0}; }
  static Proliferation smooth_ramp(double p0, double width = 0.5) {
    return {ProliferationKind::SmoothRamp, p0, width};
  }

  bool operator==(const Proliferation&) const = default;
};

/// P^{(order)}(r), order in 0..2.
double proliferation_eval(const Proliferation& p, double r, int order);

}  // namespace chopt

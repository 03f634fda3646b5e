#pragma once

#include <vector>

#include "chopt/fields.hpp"

namespace chopt {

/// Distributed control u(x, t): one field per time node, read as piecewise
/// constant on [t_k, t_{k+1}). The last node carries no dynamics and has zero
/// weight in the L2(Q) inner product.
///
/// Gradients, perturbation directions and FD probes share this shape.
struct ControlField {
  TimeGrid time;
  std::vector<Field> nodes;

  static ControlField constant(const Grid& grid, const TimeGrid& time, double value);
  static ControlField zeros_like(const ControlField& other);

  const Grid& grid() const { return nodes.front().grid(); }
  std::size_t node_count() const { return nodes.size(); }

  ControlField& axpy(double a, const ControlField& x);
  ControlField& operator*=(double factor);

  bool operator==(const ControlField&) const = default;
};

ControlField operator+(ControlField a, const ControlField& b);
ControlField operator-(ControlField a, const ControlField& b);
ControlField operator*(double factor, ControlField a);

void check_same_shape(const ControlField& a, const ControlField& b);

/// Discrete L2(Q) inner product: sum_{k < nt} dt * inner(a_k, b_k).
double control_inner(const ControlField& a, const ControlField& b);
double control_norm(const ControlField& a);

/// Box constraints u_* <= u <= u^* defining the admissible set.
struct ControlBounds {
  Field lower;
  Field upper;

  static ControlBounds constant(const Grid& grid, double lower, double upper);
  void validate() const;
  bool contains(const ControlField& u) const;
  ControlField midpoint(const TimeGrid& time) const;

  bool operator==(const ControlBounds&) const = default;
};

}  // namespace chopt

#include "chopt/control.hpp"

#include <cmath>

namespace chopt {

ControlField ControlField::constant(const Grid& grid, const TimeGrid& time, double value) {
  ControlField u;
  u.time = time;
  u.nodes.assign(time.node_count(), Field(grid, value));
  return u;
}

ControlField ControlField::zeros_like(const ControlField& other) {
  return constant(other.grid(), other.time, 0.0);
}

void check_same_shape(const ControlField& a, const ControlField& b) {
  require(a.time == b.time && a.nodes.size() == b.nodes.size(), ErrorKind::ShapeMismatch,
          "control fields have different time grids");
  require(a.nodes.size() == static_cast<std::size_t>(a.time.node_count()), ErrorKind::ShapeMismatch,
          "control field node count does not match its time grid");
  require(a.grid() == b.grid(), ErrorKind::ShapeMismatch, "control fields live on different grids");
}

ControlField& ControlField::axpy(double a, const ControlField& x) {
  check_same_shape(*this, x);
  for (std::size_t k = 0; k < nodes.size(); ++k) nodes[k].axpy(a, x.nodes[k]);
  return *this;
}

ControlField& ControlField::operator*=(double factor) {
  for (Field& f : nodes) f *= factor;
  return *this;
}

ControlField operator+(ControlField a, const ControlField& b) { return a.axpy(1.0, b); }
ControlField operator-(ControlField a, const ControlField& b) { return a.axpy(-1.0, b); }
ControlField operator*(double factor, ControlField a) { return a *= factor; }

double control_inner(const ControlField& a, const ControlField& b) {
  check_same_shape(a, b);
  double sum = 0.0;
  for (int k = 0; k < a.time.nt; ++k) sum += inner(a.nodes[k], b.nodes[k]);
  return a.time.dt() * sum;
}

double control_norm(const ControlField& a) { return std::sqrt(control_inner(a, a)); }

ControlBounds ControlBounds::constant(const Grid& grid, double lower, double upper) {
  ControlBounds b{Field(grid, lower), Field(grid, upper)};
  b.validate();
  return b;
}

void ControlBounds::validate() const {
  check_same_grid(lower, upper);
  for (std::size_t i = 0; i < lower.size(); ++i) {
    require(std::isfinite(lower[i]) && std::isfinite(upper[i]), ErrorKind::InvalidArgument,
            "control bounds must be finite");
    require(lower[i] <= upper[i], ErrorKind::InvalidArgument,
            "control bounds violate u_* <= u^* at cell " + std::to_string(i));
  }
}

bool ControlBounds::contains(const ControlField& u) const {
  for (const Field& f : u.nodes)
    for (std::size_t i = 0; i < f.size(); ++i)
      if (f[i] < lower[i] || f[i] > upper[i]) return false;
  return true;
}

ControlField ControlBounds::midpoint(const TimeGrid& time) const {
  Field mid = 0.5 * (lower + upper);
  ControlField u;
  u.time = time;
  u.nodes.assign(time.node_count(), mid);
  return u;
}

}  // namespace chopt

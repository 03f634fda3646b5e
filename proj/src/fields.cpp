#include "chopt/fields.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace chopt {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Domain: return "domain_error";
    case ErrorKind::Dimension: return "dimension_error";
    case ErrorKind::ShapeMismatch: return "shape_mismatch";
    case ErrorKind::InvalidArgument: return "invalid_argument";
    case ErrorKind::Config: return "config_error";
    case ErrorKind::NewtonDivergence: return "newton_divergence";
    case ErrorKind::SeparationViolation: return "separation_violation";
    case ErrorKind::NanDetected: return "nan_detected";
    case ErrorKind::LineSearchFailure: return "line_search_failure";
    case ErrorKind::Io: return "io_error";
  }
  return "unknown_error";
}

Grid Grid::line(int n, double length) {
  Grid g;
  g.dim = 1;
  g.n = {n, 1};
  g.extents = {length, 1.0};
  g.validate();
  return g;
}

Grid Grid::rectangle(int n0, int n1, double length0, double length1) {
  Grid g;
  g.dim = 2;
  g.n = {n0, n1};
  g.extents = {length0, length1};
  g.validate();
  return g;
}

double Grid::cell_volume() const {
  double v = spacing(0);
  if (dim == 2) v *= spacing(1);
  return v;
}

void Grid::validate() const {
  require(dim == 1 || dim == 2, ErrorKind::Dimension, "grid dim must be 1 or 2");
  for (int a = 0; a < dim; ++a) {
    require(n[a] >= 3, ErrorKind::Dimension, "grid needs at least 3 cells per axis");
    require(std::isfinite(extents[a]) && extents[a] > 0.0, ErrorKind::Dimension,
            "grid extents must be positive");
  }
  require(dim == 2 || n[1] == 1, ErrorKind::Dimension, "1D grid must have n[1] == 1");
}

Field::Field(const Grid& grid, double value) : grid_(grid), values_(grid.cell_count(), value) {}

Field::Field(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  require(values_.size() == grid_.cell_count(), ErrorKind::Dimension,
          "field value count " + std::to_string(values_.size()) + " does not match grid cell count " +
              std::to_string(grid_.cell_count()));
}

bool Field::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double Field::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double Field::min() const { return *std::min_element(values_.begin(), values_.end()); }
double Field::max() const { return *std::max_element(values_.begin(), values_.end()); }

void check_same_grid(const Field& a, const Field& b) {
  require(a.grid() == b.grid(), ErrorKind::Dimension, "fields live on different grids");
}

Field& Field::operator+=(const Field& other) {
  check_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  check_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

Field& Field::operator*=(double factor) {
  for (double& v : values_) v *= factor;
  return *this;
}

Field& Field::axpy(double a, const Field& x) {
  check_same_grid(*this, x);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += a * x.values_[i];
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double factor, Field a) { return a *= factor; }

Field laplacian_neumann(const Field& f) {
  const Grid& g = f.grid();
  Field out(g);
  const int n0 = g.n[0];
  const int n1 = g.n[1];
  const double inv0 = 1.0 / (g.spacing(0) * g.spacing(0));
  if (g.dim == 1) {
    for (int i = 0; i < n0; ++i) {
      const double left = f[i > 0 ? i - 1 : i];
      const double right = f[i < n0 - 1 ? i + 1 : i];
      out[i] = (left - 2.0 * f[i] + right) * inv0;
    }
    return out;
  }
  const double inv1 = 1.0 / (g.spacing(1) * g.spacing(1));
  for (int i = 0; i < n0; ++i) {
    for (int j = 0; j < n1; ++j) {
      const std::size_t c = static_cast<std::size_t>(i) * n1 + j;
      const double up = f[static_cast<std::size_t>(i > 0 ? i - 1 : i) * n1 + j];
      const double down = f[static_cast<std::size_t>(i < n0 - 1 ? i + 1 : i) * n1 + j];
      const double left = f[static_cast<std::size_t>(i) * n1 + (j > 0 ? j - 1 : j)];
      const double right = f[static_cast<std::size_t>(i) * n1 + (j < n1 - 1 ? j + 1 : j)];
      out[c] = (up - 2.0 * f[c] + down) * inv0 + (left - 2.0 * f[c] + right) * inv1;
    }
  }
  return out;
}

double integrate(const Field& f) {
  double sum = 0.0;
  for (double v : f.values()) sum += v;
  return sum * f.grid().cell_volume();
}

double inner(const Field& f, const Field& g) {
  check_same_grid(f, g);
  double sum = 0.0;
  const std::size_t n = f.size();
  for (std::size_t i = 0; i < n; ++i) sum += f[i] * g[i];
  return sum * f.grid().cell_volume();
}

double norm_l2(const Field& f) { return std::sqrt(inner(f, f)); }

void TimeGrid::validate() const {
  require(nt >= 1, ErrorKind::InvalidArgument, "time grid needs nt >= 1");
  require(std::isfinite(T) && T > 0.0, ErrorKind::InvalidArgument, "final time T must be positive");
}

TimeLocation TimeGrid::locate(double tau) const {
  require(std::isfinite(tau) && tau >= 0.0 && tau <= T * (1.0 + 1e-14), ErrorKind::Domain,
          "time " + std::to_string(tau) + " outside [0, " + std::to_string(T) + "]");
  TimeLocation loc;
  const double x = tau / dt();
  const double nearest = std::round(x);
  if (std::abs(x - nearest) <= 1e-10) {
    loc.at_node = true;
    loc.node = static_cast<int>(nearest);
    if (loc.node == 0) {
      loc.k = 0;
      loc.s = 0.0;
    } else {
      loc.k = loc.node - 1;
      loc.s = 1.0;
    }
    return loc;
  }
  loc.k = std::clamp(static_cast<int>(std::floor(x)), 0, nt - 1);
  loc.s = std::clamp(x - loc.k, 0.0, 1.0);
  return loc;
}

int TimeGrid::nearest_node(double tau) const {
  return std::clamp(static_cast<int>(std::lround(tau / dt())), 0, nt);
}

std::vector<double> hat_weights(const TimeGrid& time, double a, double b) {
  require(a >= 0.0 && b >= a && b <= time.T * (1.0 + 1e-14), ErrorKind::Domain,
          "integration window must satisfy 0 <= a <= b <= T");
  std::vector<double> w(time.node_count(), 0.0);
  if (b <= a) return w;
  const double dt = time.dt();
  const TimeLocation la = time.locate(a);
  const TimeLocation lb = time.locate(b);
  // Window endpoints as (interval, fraction) pairs; a node at the start of
  // the window belongs to the interval that begins there.
  int ka = la.k;
  double sa = la.s;
  if (la.at_node) {
    ka = std::min(la.node, time.nt - 1);
    sa = la.node == time.nt ? 1.0 : 0.0;
  }
  const int kb = lb.k;
  const double sb = lb.s;
  for (int k = ka; k <= kb; ++k) {
    const double lo = (k == ka) ? sa : 0.0;
    const double hi = (k == kb) ? sb : 1.0;
    if (hi <= lo) continue;
    // integral of (1 - s) and s over [lo, hi], times dt
    const double right = 0.5 * (hi * hi - lo * lo);
    const double left = (hi - lo) - right;
    w[k] += dt * left;
    w[k + 1] += dt * right;
  }
  return w;
}

Field interpolate_in_time(const Trajectory& traj, int component, double tau) {
  require(component >= 0 && component < 3, ErrorKind::InvalidArgument, "component index must be 0, 1 or 2");
  const TimeLocation loc = traj.time.locate(tau);
  if (loc.at_node) return traj.at(loc.node, component);
  const Field& a = traj.at(loc.k, component);
  const Field& b = traj.at(loc.k + 1, component);
  Field out(a.grid());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (1.0 - loc.s) * a[i] + loc.s * b[i];
  return out;
}

}  // namespace chopt

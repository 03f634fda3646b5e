#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "chopt/error.hpp"

namespace chopt {

/// Rectangular cell-centred grid in one or two dimensions.
///
/// Cell `(i0, i1)` is stored at linear index `i0 * n[1] + i1` (last axis
/// fastest). In 1D only axis 0 is meaningful and `n[1] == 1`.
struct Grid {
  int dim = 1;
  std::array<int, 2> n{3, 1};
  std::array<double, 2> extents{1.0, 1.0};

  static Grid line(int n, double length);
  static Grid rectangle(int n0, int n1, double length0, double length1);

  double spacing(int axis) const { return extents[axis] / n[axis]; }
  std::size_t cell_count() const { return static_cast<std::size_t>(n[0]) * n[1]; }
  double cell_volume() const;
  /// Cell-centre coordinate along `axis` for index `i`.
  double center(int axis, int i) const { return (i + 0.5) * spacing(axis); }

  void validate() const;

  bool operator==(const Grid&) const = default;
};

class Field {
 public:
  Field() = default;
  explicit Field(const Grid& grid, double value = 0.0);
  Field(const Grid& grid, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }

  bool all_finite() const;
  double max_abs() const;
  double min() const;
  double max() const;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double factor);
  /// this += a * x
  Field& axpy(double a, const Field& x);

  bool operator==(const Field&) const = default;

 private:
  Grid grid_;
  std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double factor, Field a);

void check_same_grid(const Field& a, const Field& b);

/// Five-point (2D) / three-point (1D) Laplacian with homogeneous Neumann
/// faces: the ghost value outside a face equals the adjacent interior value.
Field laplacian_neumann(const Field& f);

/// Midpoint rule, summed in storage order.
double integrate(const Field& f);
/// integrate(f * g) with the same fixed summation order.
double inner(const Field& f, const Field& g);
double norm_l2(const Field& f);

/// Position of a time inside the grid: `tau` lies in [t_k, t_{k+1}] with
/// `tau = t_k + s * dt`. A positive node time t_j reports the interval that
/// ends there (k = j - 1, s = 1), so the containing interval is the one to
/// the left.
struct TimeLocation {
  int k = 0;
  double s = 0.0;
  bool at_node = false;
  int node = 0;  ///< valid when at_node
};

struct TimeGrid {
  double T = 1.0;
  int nt = 1;

  double dt() const { return T / nt; }
  double t(int k) const { return T * static_cast<double>(k) / nt; }
  int node_count() const { return nt + 1; }

  void validate() const;
  TimeLocation locate(double tau) const;
  /// Index of the node nearest to tau.
  int nearest_node(double tau) const;

  bool operator==(const TimeGrid&) const = default;
};

/// Weights w_k with sum_k w_k g_k equal to the exact integral over [a, b] of
/// the piecewise-linear interpolant of nodal values g_k. Requires
/// 0 <= a <= b <= T.
std::vector<double> hat_weights(const TimeGrid& time, double a, double b);

using Triple = std::array<Field, 3>;

/// Time-indexed field triples; the meaning of the three slots is bound by the
/// producer: (mu, phi, sigma), (eta, theta, rho) or (q, p, r).
struct Trajectory {
  TimeGrid time;
  std::vector<Triple> frames;

  const Grid& grid() const { return frames.front()[0].grid(); }
  std::size_t frame_count() const { return frames.size(); }
  const Field& at(int k, int component) const { return frames.at(k).at(component); }
};

/// Piecewise-linear interpolation of one component; exact at nodes.
Field interpolate_in_time(const Trajectory& traj, int component, double tau);

}  // namespace chopt

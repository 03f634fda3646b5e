#include "coupled_system.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <cmath>

namespace chopt::detail {

namespace {

Block inverse(const Block& m) {
  const double c00 = m[4] * m[8] - m[5] * m[7];
  const double c01 = m[5] * m[6] - m[3] * m[8];
  const double c02 = m[3] * m[7] - m[4] * m[6];
  const double det = m[0] * c00 + m[1] * c01 + m[2] * c02;
  require(std::isfinite(det) && det != 0.0, ErrorKind::NanDetected, "singular block in coupled system");
  const double inv = 1.0 / det;
  return {c00 * inv,
          (m[2] * m[7] - m[1] * m[8]) * inv,
          (m[1] * m[5] - m[2] * m[4]) * inv,
          c01 * inv,
          (m[0] * m[8] - m[2] * m[6]) * inv,
          (m[2] * m[3] - m[0] * m[5]) * inv,
          c02 * inv,
          (m[1] * m[6] - m[0] * m[7]) * inv,
          (m[0] * m[4] - m[1] * m[3]) * inv};
}

Block transpose(const Block& m) { return {m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]}; }

// y = M x for 3-vectors
inline void mul(const Block& m, const double* x, double* y) {
  y[0] = m[0] * x[0] + m[1] * x[1] + m[2] * x[2];
  y[1] = m[3] * x[0] + m[4] * x[1] + m[5] * x[2];
  y[2] = m[6] * x[0] + m[7] * x[1] + m[8] * x[2];
}

// Neighbour list of a cell under the reflecting-ghost stencil: each real
// neighbour contributes weight 1/h^2; ghosts cancel against the centre.
template <typename F>
void for_each_neighbour(const Grid& g, std::size_t cell, F&& f) {
  const int n1 = g.n[1];
  const int i = static_cast<int>(cell / n1);
  const int j = static_cast<int>(cell % n1);
  const double w0 = 1.0 / (g.spacing(0) * g.spacing(0));
  if (i > 0) f(cell - n1, w0);
  if (i < g.n[0] - 1) f(cell + n1, w0);
  if (g.dim == 2) {
    const double w1 = 1.0 / (g.spacing(1) * g.spacing(1));
    if (j > 0) f(cell - 1, w1);
    if (j < n1 - 1) f(cell + 1, w1);
  }
}

}  // namespace

struct CoupledSystem::SparseImpl {
  Eigen::SparseMatrix<double> matrix;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  bool analyzed = false;
};

CoupledSystem::CoupledSystem(const Grid& grid, double laplacian_coeff)
    : grid_(grid), coeff_(laplacian_coeff), blocks_(grid.cell_count(), Block{}) {}

CoupledSystem::~CoupledSystem() = default;
CoupledSystem::CoupledSystem(CoupledSystem&&) noexcept = default;
CoupledSystem& CoupledSystem::operator=(CoupledSystem&&) noexcept = default;

void CoupledSystem::factorize() {
  if (grid_.dim == 1) {
    factorize_tridiagonal();
    return;
  }
  if (!sparse_) sparse_ = std::make_unique<SparseImpl>();
  const std::size_t n = blocks_.size();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(n * 9 + n * 12);
  for (std::size_t c = 0; c < n; ++c) {
    double degree = 0.0;
    for_each_neighbour(grid_, c, [&](std::size_t nb, double w) {
      degree += w;
      for (int k = 0; k < 3; ++k)
        triplets.emplace_back(static_cast<int>(3 * c + k), static_cast<int>(3 * nb + k), -coeff_ * w);
    });
    for (int r = 0; r < 3; ++r)
      for (int k = 0; k < 3; ++k) {
        double v = blocks_[c][3 * r + k];
        if (r == k) v += coeff_ * degree;
        triplets.emplace_back(static_cast<int>(3 * c + r), static_cast<int>(3 * c + k), v);
      }
  }
  auto& s = *sparse_;
  s.matrix.resize(static_cast<int>(3 * n), static_cast<int>(3 * n));
  s.matrix.setFromTriplets(triplets.begin(), triplets.end());
  s.matrix.makeCompressed();
  if (!s.analyzed) {
    s.lu.analyzePattern(s.matrix);
    s.analyzed = true;
  }
  s.lu.factorize(s.matrix);
  require(s.lu.info() == Eigen::Success, ErrorKind::NanDetected, "sparse LU factorization failed");
}

void CoupledSystem::factorize_tridiagonal() {
  const std::size_t n = blocks_.size();
  const double w = 1.0 / (grid_.spacing(0) * grid_.spacing(0));
  const double off = -coeff_ * w;
  inv_pivots_.resize(n);
  Block prev_inv{};
  for (std::size_t i = 0; i < n; ++i) {
    const double degree = (i > 0 ? w : 0.0) + (i + 1 < n ? w : 0.0);
    Block m = blocks_[i];
    m[0] += coeff_ * degree;
    m[4] += coeff_ * degree;
    m[8] += coeff_ * degree;
    if (i > 0)
      for (int k = 0; k < 9; ++k) m[k] -= off * off * prev_inv[k];
    inv_pivots_[i] = inverse(m);
    prev_inv = inv_pivots_[i];
  }
}

void CoupledSystem::solve_tridiagonal(std::span<double> b, bool transposed) const {
  const std::size_t n = blocks_.size();
  const double off = -coeff_ / (grid_.spacing(0) * grid_.spacing(0));
  double tmp[3];
  auto pivot = [&](std::size_t i) { return transposed ? transpose(inv_pivots_[i]) : inv_pivots_[i]; };
  // forward elimination: y_i = b_i - off * M_{i-1}^{-1} y_{i-1}
  for (std::size_t i = 1; i < n; ++i) {
    mul(pivot(i - 1), &b[3 * (i - 1)], tmp);
    for (int k = 0; k < 3; ++k) b[3 * i + k] -= off * tmp[k];
  }
  // back substitution: x_i = M_i^{-1} (y_i - off * x_{i+1})
  for (std::size_t ii = n; ii-- > 0;) {
    double y[3] = {b[3 * ii], b[3 * ii + 1], b[3 * ii + 2]};
    if (ii + 1 < n)
      for (int k = 0; k < 3; ++k) y[k] -= off * b[3 * (ii + 1) + k];
    mul(pivot(ii), y, &b[3 * ii]);
  }
}

void CoupledSystem::solve(std::span<double> rhs) const {
  require(rhs.size() == 3 * blocks_.size(), ErrorKind::Dimension, "coupled system rhs has wrong size");
  if (grid_.dim == 1) {
    solve_tridiagonal(rhs, false);
    return;
  }
  Eigen::Map<Eigen::VectorXd> b(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
  Eigen::VectorXd x = sparse_->lu.solve(b);
  b = x;
}

void CoupledSystem::solve_transposed(std::span<double> rhs) const {
  require(rhs.size() == 3 * blocks_.size(), ErrorKind::Dimension, "coupled system rhs has wrong size");
  if (grid_.dim == 1) {
    solve_tridiagonal(rhs, true);
    return;
  }
  Eigen::Map<Eigen::VectorXd> b(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
  Eigen::VectorXd x = sparse_->lu.transpose().solve(b);
  b = x;
}

void CoupledSystem::apply(std::span<const double> x, std::span<double> y, bool transposed) const {
  const std::size_t n = blocks_.size();
  for (std::size_t c = 0; c < n; ++c) {
    const Block m = transposed ? transpose(blocks_[c]) : blocks_[c];
    mul(m, &x[3 * c], &y[3 * c]);
    double degree = 0.0;
    for_each_neighbour(grid_, c, [&](std::size_t nb, double w) {
      degree += w;
      for (int k = 0; k < 3; ++k) y[3 * c + k] -= coeff_ * w * x[3 * nb + k];
    });
    for (int k = 0; k < 3; ++k) y[3 * c + k] += coeff_ * degree * x[3 * c + k];
  }
}

}  // namespace chopt::detail

#pragma once

// Linear systems of the form  A = blockdiag(D_i) - c * (L (x) I_3)
// over cell-interleaved unknowns (3 i + component), where L is the Neumann
// Laplacian stencil. Every implicit step of the state, linearised and adjoint
// solvers reduces to one of these.

#include <array>
#include <memory>
#include <span>
#include <vector>

#include "chopt/fields.hpp"

namespace chopt::detail {

using Block = std::array<double, 9>;  // row-major 3x3

class CoupledSystem {
 public:
  CoupledSystem(const Grid& grid, double laplacian_coeff);
  ~CoupledSystem();
  CoupledSystem(CoupledSystem&&) noexcept;
  CoupledSystem& operator=(CoupledSystem&&) noexcept;

  std::size_t cells() const { return blocks_.size(); }
  Block& block(std::size_t cell) { return blocks_[cell]; }

  /// Factorizes the current blocks; must be called after changing them.
  void factorize();
  /// Solves A x = b in place.
  void solve(std::span<double> rhs) const;
  /// Solves A^T x = b in place.
  void solve_transposed(std::span<double> rhs) const;
  /// y = A x (or A^T x), used for residual checks.
  void apply(std::span<const double> x, std::span<double> y, bool transposed = false) const;

 private:
  struct SparseImpl;

  void factorize_tridiagonal();
  void solve_tridiagonal(std::span<double> rhs, bool transposed) const;

  Grid grid_;
  double coeff_;
  std::vector<Block> blocks_;
  // 1D block-Thomas data: inverses of the eliminated diagonal blocks.
  std::vector<Block> inv_pivots_;
  std::unique_ptr<SparseImpl> sparse_;
};

}  // namespace chopt::detail

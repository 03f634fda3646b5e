#pragma once

// Per-step matrices of the time scheme, written with every equation
// multiplied by dt. For the step t_k -> t_{k+1}:
//
//   A_{k+1} dX^{k+1} = B_k dX^k + dt E h_k
//
// is the exact linearisation of the state update, where A_{k+1} is the Newton
// Jacobian at the accepted phi^{k+1} and B_k collects the derivatives with
// respect to the previous frame. E injects into the nutrient row.

#include <span>
#include <vector>

#include "chopt/state.hpp"
#include "coupled_system.hpp"

namespace chopt::detail {

/// Fills `sys` with A_{k+1}: P frozen at phi_prev, B'' at phi_next.
void assemble_step_jacobian(const ModelParams& params, const Field& phi_prev, const Field& phi_next,
                            CoupledSystem& sys);

/// Per-cell blocks of B_k (explicit side), depending on phi^k and on
/// sigma^{k+1} - mu^{k+1}.
std::vector<Block> explicit_blocks(const ModelParams& params, const Triple& prev, const Triple& next);

/// Interleaves a triple into (3 i + c) layout and back.
void pack(const Triple& t, std::span<double> out);
void unpack(std::span<const double> in, Triple& t);

/// y = B x or y = B^T x with per-cell blocks.
void apply_blocks(const std::vector<Block>& blocks, std::span<const double> x, std::span<double> y,
                  bool transposed);

}  // namespace chopt::detail

#include "step_operators.hpp"

namespace chopt::detail {

void assemble_step_jacobian(const ModelParams& params, const Field& phi_prev, const Field& phi_next,
                            CoupledSystem& sys) {
  const double dt = params.time.dt();
  const double a = params.alpha;
  const double b = params.beta;
  for (std::size_t i = 0; i < sys.cells(); ++i) {
    const double p = proliferation_eval(params.proliferation, phi_prev[i], 0);
    const double bpp = potential_split_eval(params.potential, phi_next[i], PotentialPart::Convex, 2);
    sys.block(i) = {a + dt * p, 1.0, -dt * p,
                    -dt, b + dt * bpp, 0.0,
                    -dt * p, 0.0, 1.0 + dt * p};
  }
}

std::vector<Block> explicit_blocks(const ModelParams& params, const Triple& prev, const Triple& next) {
  const double dt = params.time.dt();
  const Field& phi = prev[kPhi];
  std::vector<Block> blocks(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double dp = proliferation_eval(params.proliferation, phi[i], 1);
    const double exchange = dt * dp * (next[kSigma][i] - next[kMu][i]);
    const double dpi = potential_split_eval(params.potential, phi[i], PotentialPart::Smooth, 2);
    blocks[i] = {params.alpha, 1.0 + exchange, 0.0,
                 0.0, params.beta - dt * dpi, 0.0,
                 0.0, -exchange, 1.0};
  }
  return blocks;
}

void pack(const Triple& t, std::span<double> out) {
  const std::size_t n = t[0].size();
  for (std::size_t i = 0; i < n; ++i)
    for (int c = 0; c < 3; ++c) out[3 * i + c] = t[c][i];
}

void unpack(std::span<const double> in, Triple& t) {
  const std::size_t n = t[0].size();
  for (std::size_t i = 0; i < n; ++i)
    for (int c = 0; c < 3; ++c) t[c][i] = in[3 * i + c];
}

void apply_blocks(const std::vector<Block>& blocks, std::span<const double> x, std::span<double> y,
                  bool transposed) {
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const Block& m = blocks[i];
    const double* xi = &x[3 * i];
    double* yi = &y[3 * i];
    if (!transposed) {
      yi[0] = m[0] * xi[0] + m[1] * xi[1] + m[2] * xi[2];
      yi[1] = m[3] * xi[0] + m[4] * xi[1] + m[5] * xi[2];
      yi[2] = m[6] * xi[0] + m[7] * xi[1] + m[8] * xi[2];
    } else {
      yi[0] = m[0] * xi[0] + m[3] * xi[1] + m[6] * xi[2];
      yi[1] = m[1] * xi[0] + m[4] * xi[1] + m[7] * xi[2];
      yi[2] = m[2] * xi[0] + m[5] * xi[1] + m[8] * xi[2];
    }
  }
}

}  // namespace chopt::detail

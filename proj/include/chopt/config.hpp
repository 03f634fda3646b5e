#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "chopt/control.hpp"
#include "chopt/objective.hpp"
#include "chopt/optimizer.hpp"
#include "chopt/state.hpp"
#include "chopt/verification.hpp"

namespace chopt {

/// A spatial field given as a constant, a snapshot file, or (for
/// time-dependent targets) one component of a trajectory manifest.
struct FieldSource {
  enum class Kind { Constant, Snapshot, Manifest };
  Kind kind = Kind::Constant;
  double value = 0.0;
  std::string path;
  std::string component;  ///< manifest component name

  static FieldSource constant(double v) { return {Kind::Constant, v, {}, {}}; }
  bool operator==(const FieldSource&) const = default;
};

struct InitialSpec {
  enum class Kind { Equilibrium, TanhFront, RandomInterior, Snapshots };
  Kind kind = Kind::Equilibrium;
  double c = 0.0;           ///< equilibrium
  double width = 0.0;       ///< tanh_front
  double position = 0.0;    ///< tanh_front, along axis 0
  double amplitude = 0.0;   ///< tanh_front peak |phi| and random_interior bound
  std::uint64_t seed = 0;   ///< random_interior
  std::string mu_path, phi_path, sigma_path;

  bool operator==(const InitialSpec&) const = default;
};

struct TargetSpec {
  /// When set, phi_Q = phi_Omega = c and sigma_Q = F'(c) on every node.
  std::optional<double> equilibrium;
  FieldSource phi_Q, sigma_Q, phi_Omega;

  bool operator==(const TargetSpec&) const = default;
};

struct RelaxationSpec {
  double gamma = 0.0;
  double eps = 0.0;
  FieldSource sigma_Omega;

  bool operator==(const RelaxationSpec&) const = default;
};

struct VerificationSettings {
  bool fd_gradient = true;
  bool duality = true;
  bool lipschitz = true;
  bool mass_balance = true;
  std::optional<double> tau;  ///< evaluation time; tau0 when unset
  FdGradientOptions fd;
  int duality_directions = 10;
  double duality_tol = 1e-9;
  int lipschitz_pairs = 5;
  std::vector<double> lipschitz_magnitudes{1e-1, 1e-2, 1e-3};
  double mass_tol = 1e-10;

  bool operator==(const VerificationSettings&) const = default;
};

enum class Pipeline { Simulate, Optimize, Verify, All };
const char* to_string(Pipeline p);

struct ExperimentConfig {
  Pipeline pipeline = Pipeline::All;
  std::uint64_t seed = kDefaultSeed;
  int threads = 1;
  std::string output_dir;

  double alpha = 0.0;
  double beta = 0.0;
  Potential potential;
  Proliferation proliferation;
  NewtonOptions newton;
  Grid grid;
  TimeGrid time;
  InitialSpec initial;

  std::array<double, 7> b{};
  TargetSpec targets;
  double tau_star = 0.0;
  std::optional<RelaxationSpec> relaxation;

  FieldSource lower, upper;
  std::optional<FieldSource> control0;  ///< midpoint of the bounds when unset
  std::optional<double> tau0;           ///< T / 2 when unset

  OptimizerConfig optimizer;
  VerificationSettings verification;

  /// Directory relative snapshot paths are resolved against; not serialised.
  std::filesystem::path base_dir;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses a JSON experiment description. Errors are Config errors whose
/// message starts with the JSON pointer of the offending key (or the line and
/// column of a syntax error). Physics parameters have no defaults.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Fully resolved JSON echo; parse_config(config_to_json(c), c.base_dir) == c.
std::string config_to_json(const ExperimentConfig& config);

/// Initial data presets:
///   equilibrium(c):             (F'(c), c, F'(c))
///   tanh_front(width, pos):     phi0 = -A tanh((x - pos) / width), mu0 = sigma0 = F'(phi0)
///   random_interior(A, seed):   phi0 uniform in [-A, A] per cell, mu0 = sigma0 = F'(phi0)
InitialData preset_initial_data(const InitialSpec& preset, const Grid& grid, const Potential& potential);

/// Everything a run needs, built from a config.
struct Problem {
  ModelParams params;
  InitialData init;
  CostSpec cost;
  ControlBounds bounds;
  ControlField u0;
  double tau0 = 0.0;
};

Problem build_problem(const ExperimentConfig& config);

}  // namespace chopt

#pragma once

#include <filesystem>
#include <string>

#include "chopt/config.hpp"

namespace chopt {

/// Process exit codes of a run.
enum class ExitCode : int { Ok = 0, Config = 2, Solver = 3, Verification = 4, Io = 5, Internal = 6 };

ExitCode exit_code_for(ErrorKind kind);

/// Version string baked in at build time (git describe when available).
const char* library_version();

struct RunOutcome {
  ExitCode code = ExitCode::Ok;
  std::string message;
  std::filesystem::path output_dir;
};

/// Executes the configured pipeline and writes its artifacts below the
/// output directory:
///   simulate/  state manifest + snapshots, diagnostics.csv
///   optimize/  history.csv, breakdown.csv, control, state and adjoint manifests
///   verify/    one report per check, verification_summary.json
///   run-summary.json  resolved config, version and results
/// Errors are caught and mapped onto the exit codes; the summary is written
/// whenever the output directory is usable.
RunOutcome run_experiment(const ExperimentConfig& config);

}  // namespace chopt

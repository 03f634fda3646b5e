#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "chopt/control.hpp"
#include "chopt/objective.hpp"
#include "chopt/optimizer.hpp"
#include "chopt/state.hpp"

namespace chopt {

/// Field snapshot: 32-byte header ("CHFLD1", two zero bytes, uint32 dim,
/// uint32 n0, uint32 n1, 12 reserved zero bytes) followed by the values as
/// little-endian float64 in storage order.
void write_snapshot(const std::filesystem::path& path, const Field& field);
/// Reads a snapshot onto `grid`; the stored cell counts must match.
Field read_snapshot(const std::filesystem::path& path, const Grid& grid);

/// Writes one snapshot per frame and component plus a JSON manifest listing
/// node index, time and file per component. Snapshot paths in the manifest
/// are relative to its directory.
void write_trajectory(const std::filesystem::path& manifest, const Trajectory& traj,
                      const std::vector<std::string>& component_names);
Trajectory read_trajectory(const std::filesystem::path& manifest, std::vector<std::string>* component_names = nullptr);

/// A control is stored as a one-component trajectory named "u".
void write_control(const std::filesystem::path& manifest, const ControlField& u);
ControlField read_control(const std::filesystem::path& manifest);

/// Reads one named component of a trajectory manifest as a per-node list.
std::vector<Field> read_component(const std::filesystem::path& manifest, const std::string& component,
                                  const Grid& grid, const TimeGrid& time);

/// Shortest decimal that round-trips, '.' separator, independent of locale.
std::string format_double(double v);

void write_diagnostics_csv(const std::filesystem::path& path, const StateTrajectory& state);
void write_history_csv(const std::filesystem::path& path, const std::vector<IterationRecord>& history);
void write_breakdown_csv(const std::filesystem::path& path, const std::vector<IterationRecord>& history);
void write_adjoint_csv(const std::filesystem::path& path, const std::vector<double>& step_residuals,
                       double snap_offset);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace chopt

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "smcf/diagnostics.hpp"
#include "smcf/field.hpp"

namespace smcf {

/// Shortest decimal that round-trips (17 significant digits).
std::string format_double(double x);

/// "t{time:.6f}.csv"
std::string snapshot_filename(double t);

/// Header "x,u" for line fields, "r,u" for radial ones.
void write_snapshot_csv(const std::filesystem::path& path, const Field& f);

struct SnapshotTable {
  std::string coordinate;  // "x" or "r"
  std::vector<double> nodes;
  std::vector<double> values;
};

SnapshotTable read_snapshot_csv(const std::filesystem::path& path);

/// Header "t,sup_u,grad_max,l2,h1_grad,sup_phi,barrier_margin"; empty cells
/// for monitors that were not configured.
void write_diagnostics_csv(const std::filesystem::path& path,
                           const std::vector<DiagnosticsRecord>& records);
std::vector<DiagnosticsRecord> read_diagnostics_csv(const std::filesystem::path& path);

/// Snapshots into dir, records into dir/diagnostics.csv.
void write_trajectory(const std::filesystem::path& dir, const FlowTrajectory& traj);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

/// Table of "x,u" or "r,u" pairs for tabulated initial data.
SnapshotTable read_profile_table(const std::filesystem::path& path);

}  // namespace smcf

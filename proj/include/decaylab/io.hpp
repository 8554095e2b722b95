#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "decaylab/report.hpp"
#include "decaylab/timestepper.hpp"
#include "json.hpp"

namespace decaylab::io {

/// Semantic version compiled into every output header.
std::string code_version();

/// CSV cell quoting (RFC 4180): quotes cells holding a comma, quote or newline.
std::string csv_cell(const std::string& s);

/// Long-format norm tracks: t,field,m,p,value. Anchored tracks carry their
/// tag in the field column (Ez@t0=1); fractional Sobolev tracks put s in m.
void write_norms_csv(const std::filesystem::path& path, const Trajectory& traj,
                     const nlohmann::json& header);
void write_steps_csv(const std::filesystem::path& path, const Trajectory& traj,
                     const nlohmann::json& header);
/// One two-column file per track under dir (plot data).
void write_series_files(const std::filesystem::path& dir, const Trajectory& traj);

/// Everything verify needs: steps, tracks, events and run metadata.
nlohmann::json trajectory_to_json(const Trajectory& traj, const nlohmann::json& header);
/// Rebuilds a trajectory saved by trajectory_to_json. The config must be the
/// one the run used; final_state and checkpoints are not restored.
Trajectory trajectory_from_json(const nlohmann::json& j, const SimConfig& config);

nlohmann::json series_to_json(const DecaySeries& s);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace decaylab::io

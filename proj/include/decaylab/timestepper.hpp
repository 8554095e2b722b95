#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "decaylab/initial_data.hpp"
#include "decaylab/linear_semigroup.hpp"
#include "decaylab/params.hpp"
#include "decaylab/series.hpp"
#include "decaylab/state.hpp"

namespace decaylab {

/// Raised when a step produces non-finite coefficients.
class InstabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SimConfig {
  SystemId system = SystemId::micropolar;
  SystemParams params;
  int n = 64;
  double box_length = 100.0;
  InitialDataSpec initial;
  double dt = 0.2;
  double t_end = 200.0;
  std::vector<double> checkpoint_times;
  std::vector<double> anchors;
  int samples_per_decade = 24;  // log-spaced norm samples
  double first_sample = 0.2;    // earliest log-spaced sample time
  bool track_lp = true;         // L^4 and L^infinity tracks (extra transforms)
  bool keep_checkpoints = false;
  std::optional<std::filesystem::path> checkpoint_dir;
  double horizon_factor = 2.0;  // t_end may not exceed horizon_factor * T_max
};

/// (L/8)^2 / nu: the latest time trusted as a proxy for the whole space.
double trusted_horizon(const SimConfig& c);

/// Throws std::invalid_argument on inconsistent settings.
void validate(const SimConfig& c);

struct StepRecord {
  double t = 0.0;
  double dt = 0.0;
  double z = 0.0;    // ||z||
  double dz = 0.0;   // ||D z||
  double d2z = 0.0;  // ||D^2 z||
  double dissipation = 0.0;  // 2 nu int_0^t ||D z||^2 (trapezoid)
};

struct RunEvent {
  double t = 0.0;
  std::string what;
};

struct Trajectory {
  SimConfig config;
  double z0_norm = 0.0;
  double nu = 0.0;  // dissipation floor used in the energy budget
  std::vector<StepRecord> steps;
  std::map<std::string, DecaySeries> tracks;
  std::vector<RunEvent> events;
  std::vector<std::pair<double, State>> checkpoints;
  std::vector<std::filesystem::path> checkpoint_files;
  State final_state;
  std::size_t eigen_modes = 0;
  std::size_t pade_modes = 0;
  double wall_seconds = 0.0;

  [[nodiscard]] const DecaySeries& track(const std::string& key) const;
  [[nodiscard]] bool has_track(const std::string& key) const { return tracks.count(key) > 0; }
};

/// Keys of the standard tracks.
std::string track_key(const std::string& field, int m, double p = 2.0, const std::string& tag = "");
std::string anchor_tag(double t0);

/// Integrating-factor RK2 (Heun on the transformed variable):
///   k1 = N(z), z* = E(z + dt k1), z_new = E(z + dt/2 k1) + dt/2 N(z*)
/// where E is the exact linear propagator over dt. `extra` states are pushed
/// through E alongside (linear anchor trajectories). Throws InstabilityError
/// on non-finite output.
State step(const State& s, double dt, const linear::ModeExponentials& e, const SystemParams& p,
           std::span<State* const> extra = {});

using ProgressFn = std::function<void(const StepRecord&)>;

Trajectory run(const SimConfig& config, const ProgressFn& progress = {});

// Checkpoint files -------------------------------------------------------------

void write_checkpoint(const std::filesystem::path& path, const State& s);
State read_checkpoint(const std::filesystem::path& path);

}  // namespace decaylab

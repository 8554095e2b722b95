#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "decaylab/config.hpp"
#include "decaylab/report.hpp"
#include "decaylab/timestepper.hpp"

namespace decaylab::commands {

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kConfigError = 2,
  kInstability = 3,
  kRuntimeError = 4,
};

struct Options {
  std::filesystem::path config;
  std::optional<std::filesystem::path> out;  // default: out/<experiment name>
  int workers = 1;
  bool force = false;
  std::ostream* log = nullptr;  // progress and summaries; nullptr = silent
};

/// Header embedded in every output: tool, version, command, resolved config.
nlohmann::json output_header(const config::ExperimentSpec& spec, const std::string& command);

/// All requested checks of a spec on one trajectory (fits are attached to
/// the trajectory's tracks).
std::vector<VerificationReport> verify_trajectory(const config::ExperimentSpec& spec,
                                                  Trajectory& traj);

/// Failed = evaluated and not passing; hypothesis_not_met rows are not failures.
std::size_t count_failures(const std::vector<VerificationReport>& reports);

/// K, K-tilde, beta, C and t** over the configured alpha grid and m <= m_max.
struct ConstantsRow {
  double alpha = 0.0;
  int m = 0;
  double k = 0.0;
  std::string k_case;
  double k_tilde = 0.0;
  std::optional<double> beta;
  std::optional<double> c;
  std::string c_case;
};
std::vector<ConstantsRow> constants_table(const config::ExperimentSpec& spec);

int cmd_run(const Options& opt);
int cmd_verify(const Options& opt);
int cmd_constants(const Options& opt);
int cmd_sweep(const Options& opt);

}  // namespace decaylab::commands

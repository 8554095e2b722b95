#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "decaylab/diagnostics.hpp"
#include "decaylab/timestepper.hpp"
#include "json.hpp"

namespace decaylab::config {

/// Configuration problem with the file position that caused it (line 0 when
/// the problem is not tied to one line).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, int line, const std::string& msg);
  [[nodiscard]] int line() const { return line_; }

 private:
  int line_;
};

inline const std::set<std::string> kTheoremIds{"decay",  "error_decay",   "pressure",
                                               "energy", "anchor",        "interpolation",
                                               "sobolev", "comparison"};

struct SweepSpec {
  std::string parameter;  // section.key, e.g. system.chi
  std::vector<std::string> values;
};

struct ConstantsTable {
  std::vector<double> alphas{0.0, 0.25, 0.5, 0.75, 1.0, 1.25};
  int m_max = 4;
};

struct ExperimentSpec {
  std::string name = "experiment";
  SimConfig sim;
  diagnostics::VerifyRequest verify;
  std::set<std::string> theorems{"decay", "error_decay", "pressure", "energy",
                                 "anchor", "interpolation", "sobolev", "comparison"};
  std::vector<double> comparison_times{0.1, 1.0, 10.0};
  ConstantsTable constants;
  std::set<std::string> formats{"csv", "json"};
  std::optional<SweepSpec> sweep;
  std::string source_path;
};

/// Sectioned key = value text. Unknown sections or keys, missing mandatory
/// keys and range violations raise ConfigError with path and line.
ExperimentSpec parse_config_text(const std::string& text, const std::string& path = "<string>");
ExperimentSpec parse_config(const std::filesystem::path& path);

/// Fully resolved settings, every default spelled out.
nlohmann::json to_json(const ExperimentSpec& spec);

/// One child spec per sweep value; the child's name carries the value.
std::vector<ExperimentSpec> expand_sweep(const ExperimentSpec& spec);

}  // namespace decaylab::config

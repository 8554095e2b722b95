#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace decaylab {

struct ConstantUse {
  std::string name;
  double value = 0.0;
  std::string provenance;  // how the value was obtained
};

/// One inequality check. pass iff measured <= bound * (1 + tolerance) +
/// absolute_tolerance. Exponent-level checks are encoded with
/// measured = required - fitted and bound = 0.
struct VerificationReport {
  std::string theorem_id;
  std::string label;
  std::map<std::string, double> inputs;
  std::vector<ConstantUse> constants;
  double measured = 0.0;
  double bound = 0.0;
  double slack = 0.0;  // bound - measured
  double tolerance = 0.0;
  double absolute_tolerance = 0.0;
  bool pass = false;
  std::string status = "evaluated";  // or hypothesis_not_met
  std::vector<std::string> caveats;

  /// Recomputes slack and pass from measured/bound/tolerances.
  void finalize();
};

/// Exponent-level check: passes when fitted >= required.
VerificationReport exponent_check(std::string theorem_id, std::string label, double fitted,
                                  double required);

nlohmann::json to_json(const VerificationReport& r);
VerificationReport report_from_json(const nlohmann::json& j);

}  // namespace decaylab

#include "decaylab/report.hpp"

#include <charconv>
#include <cmath>

#include "decaylab/series.hpp"

namespace decaylab {

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string DecaySeries::key() const {
  std::string k = field;
  if (!tag.empty()) k += "@" + tag;
  if (s) {
    k += ":s=" + format_number(*s);
    return k;
  }
  k += ":m=" + std::to_string(m);
  k += ":p=" + format_number(p);
  return k;
}

void VerificationReport::finalize() {
  slack = bound - measured;
  pass = std::isfinite(measured) && measured <= bound * (1.0 + tolerance) + absolute_tolerance;
}

VerificationReport exponent_check(std::string theorem_id, std::string label, double fitted,
                                  double required) {
  VerificationReport r;
  r.theorem_id = std::move(theorem_id);
  r.label = std::move(label);
  r.inputs["fitted_exponent"] = fitted;
  r.inputs["required_exponent"] = required;
  r.measured = required - fitted;
  r.bound = 0.0;
  r.finalize();
  return r;
}

namespace {
nlohmann::json number(double v) {
  // JSON has no inf/nan; keep them readable
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}
double number_back(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  return NAN;
}
}  // namespace

nlohmann::json to_json(const VerificationReport& r) {
  nlohmann::json j;
  j["theorem_id"] = r.theorem_id;
  j["label"] = r.label;
  j["inputs"] = nlohmann::json::object();
  for (const auto& [k, v] : r.inputs) j["inputs"][k] = number(v);
  j["constants"] = nlohmann::json::array();
  for (const auto& c : r.constants) {
    j["constants"].push_back(
        {{"name", c.name}, {"value", number(c.value)}, {"provenance", c.provenance}});
  }
  j["measured"] = number(r.measured);
  j["bound"] = number(r.bound);
  j["slack"] = number(r.slack);
  j["tolerance"] = r.tolerance;
  j["absolute_tolerance"] = r.absolute_tolerance;
  j["pass"] = r.pass;
  j["status"] = r.status;
  j["caveats"] = r.caveats;
  return j;
}

VerificationReport report_from_json(const nlohmann::json& j) {
  VerificationReport r;
  r.theorem_id = j.at("theorem_id").get<std::string>();
  r.label = j.at("label").get<std::string>();
  for (const auto& [k, v] : j.at("inputs").items()) r.inputs[k] = number_back(v);
  for (const auto& c : j.at("constants")) {
    r.constants.push_back({c.at("name").get<std::string>(), number_back(c.at("value")),
                           c.at("provenance").get<std::string>()});
  }
  r.measured = number_back(j.at("measured"));
  r.bound = number_back(j.at("bound"));
  r.slack = number_back(j.at("slack"));
  r.tolerance = j.at("tolerance").get<double>();
  r.absolute_tolerance = j.at("absolute_tolerance").get<double>();
  r.pass = j.at("pass").get<bool>();
  r.status = j.at("status").get<std::string>();
  r.caveats = j.at("caveats").get<std::vector<std::string>>();
  return r;
}

}  // namespace decaylab

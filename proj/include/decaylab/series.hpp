#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace decaylab {

/// Shortest round-trip decimal form ("2", "0.2", "1e-08"); "inf" for infinity.
std::string format_number(double v);

/// Time-stamped norm samples of one quantity, plus whatever fit results have
/// been attached by the diagnostics.
struct DecaySeries {
  std::string field;       // z, u, w, Ez, Ew, p, ...
  int m = 0;               // derivative order
  double p = 2.0;          // Lebesgue exponent; infinity allowed
  std::optional<double> s; // fractional Sobolev order (norm is then H^s-dot)
  std::string tag;         // e.g. "t0=1" for anchored error fields

  std::vector<double> t;
  std::vector<double> value;

  std::optional<std::pair<double, double>> fit_window;
  std::optional<double> fitted_exponent;
  std::optional<double> fit_residual;
  std::map<double, double> tail_sup;
  std::vector<std::string> caveats;

  void push(double time, double v) {
    t.push_back(time);
    value.push_back(v);
  }
  [[nodiscard]] std::size_t size() const { return t.size(); }
  [[nodiscard]] bool empty() const { return t.empty(); }
  /// Stable identifier used for file names and CSV rows.
  [[nodiscard]] std::string key() const;
};

}  // namespace decaylab

#pragma once

#include <functional>
#include <optional>
#include <string>

#include "decaylab/params.hpp"

namespace decaylab::constants {

struct AlphaParams {
  double alpha = 0.75;
  std::optional<double> lambda0;  // estimate of limsup t^alpha ||u||
  std::optional<double> z0_norm;  // ||z_0||_{L^2}
};

struct ConstantReport {
  std::string name;
  double value = 0.0;
  std::optional<double> attained_delta;
  std::string case_label;
};

/// Golden-section minimization of a unimodal function on [lo, hi].
/// Returns the abscissa of the final bracket midpoint.
double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                               double tol);

/// log of delta^{-1/2} prod_{j=0}^{m} (alpha + j/2 + delta)^{1/2}
double k_objective_log(double alpha, int m, double delta);

/// K_{alpha,m}: infimum over delta > 0 of the objective. Minimized by golden
/// section on log(delta) over [1e-8, 1e8]. Degenerate cases:
///   alpha = 0, m = 0: identically 1 (any delta attains it; reported as 1);
///   alpha = 0, m >= 1: infimum sqrt(m!/2^m) approached as delta -> 0+;
///   alpha > 0, m = 0: infimum 1 approached as delta -> infinity.
ConstantReport k_alpha_m(double alpha, int m);

/// sum_{l=0}^{m} K_l^{1/4} K_{l+1}^{3/4} K_{m-l+1}^{1/4} K_{m-l+2}^{3/4}
double k_tilde(double alpha, int m);

/// Extra decay of the error fields; left-closed branches on [0, 5/4).
double beta_of_alpha(double alpha);

/// Constant bounding the weighted limsup of ||D^m E_z||. `c` is the heat
/// comparison rate of the linear semigroup.
ConstantReport error_constant(const SystemParams& params, const AlphaParams& ap, int m, double c);

enum class RegularityVariant { leray, improved };
inline constexpr double kImprovedRegularityCoefficient = 0.000464504284;
inline constexpr double kLerayBoundOnK = 0.000791572;

/// Bound on the eventual-regularity time: coefficient * nu^-5 ||z0||^4.
double regularity_time_bound(double nu, double z0_norm, RegularityVariant variant);

enum class NormField { z, w, Ez, Ew, pressure };

/// Predicted algebraic decay exponent of ||D^m field||_{L^p}; p may be
/// infinity.
double predicted_exponent(const AlphaParams& ap, int m, NormField field, double p);

}  // namespace decaylab::constants

#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "decaylab/params.hpp"
#include "decaylab/state.hpp"

namespace decaylab::systems {

/// Right-hand side split into the part integrated exactly through the
/// symbol exponential (all linear terms, couplings included) and the explicit
/// remainder (quadratic terms, projected and dealiased).
struct RhsSplit {
  State stiff_linear;
  State explicit_part;

  [[nodiscard]] State total() const;
};

RhsSplit rhs_micropolar(const State& s, const SystemParams& p);
RhsSplit rhs_navier_stokes(const State& s, const SystemParams& p);
RhsSplit rhs_magneto_micropolar(const State& s, const SystemParams& p);
RhsSplit rhs_tropical(const State& s, const SystemParams& p);
RhsSplit rhs_rotating(const State& s, const SystemParams& p);
RhsSplit rhs_generic_linear(const State& s, const SystemParams& p);
RhsSplit rhs_generic_parabolic(const State& s, const SystemParams& p, const std::string& flux_id);

/// Dispatch on s.system.
RhsSplit rhs(const State& s, const SystemParams& p);

/// Explicit part only; what the time stepper evaluates every stage.
State explicit_part(const State& s, const SystemParams& p);

/// Full right-hand side evaluated in one piece by a separate route
/// (physical-space operators, advective form of the transport terms). Used to
/// check the split.
State monolithic_rhs(const State& s, const SystemParams& p);

/// Pressure of the u block: phat = -(xi xi^T : (u u)^) / |xi|^2, zero mean.
SpectralField pressure_recover(const State& s, const SystemParams& p);

// Flux library of the generic parabolic system ---------------------------------

/// Quadratic flux f_j : R^n -> R^n, j = 0, 1, 2 (one per space direction),
/// with symmetric Jacobian A_j(u) = D f_j(u) linear in u.
struct FluxModel {
  std::string name;
  double bound_constant = 1.0;  // |f_j(u)| <= bound_constant |u|^2
  std::function<void(std::span<const double> u, int j, std::span<double> f)> flux;
  /// Row-major n x n Jacobian.
  std::function<void(std::span<const double> u, int j, std::span<double> a)> jacobian;
};

/// Adds or replaces a flux model by name.
void register_flux(FluxModel model);
const FluxModel& find_flux(const std::string& name);
std::vector<std::string> flux_names();

/// Samples random states and throws std::invalid_argument when the flux
/// breaks the quadratic bound or has a non-symmetric Jacobian.
void validate_flux(const FluxModel& model, int components, std::uint64_t seed = 0);

}  // namespace decaylab::systems

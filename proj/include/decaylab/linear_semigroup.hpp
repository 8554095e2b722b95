#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "decaylab/linalg.hpp"
#include "decaylab/params.hpp"
#include "decaylab/report.hpp"
#include "decaylab/series.hpp"
#include "decaylab/state.hpp"

namespace decaylab::linear {

using linalg::CMat;

/// Antisymmetric matrix with R3(xi) v = xi x v.
Eigen::Matrix3d rotation_matrix(const Vec3& xi);

/// 6x6 generator of the linearized micropolar system at wavenumber xi,
/// acting on (uhat, what):
///   [ -(mu+chi)|xi|^2 I        i chi R3(xi)                     ]
///   [  i chi R3(xi)           -(gamma|xi|^2 + 2 chi) I - kappa xi xi^T ]
CMat symbol_matrix(const Vec3& xi, const SystemParams& p);

/// Stiff linear symbol of any system, ordered as block_layout(id). On a
/// lattice `xi` enters even-order terms and `xi_odd` first-order ones; the two
/// differ only on Nyquist planes where odd derivatives are zeroed.
CMat system_symbol(SystemId id, const SystemParams& p, const Vec3& xi, const Vec3& xi_odd);
inline CMat system_symbol(SystemId id, const SystemParams& p, const Vec3& xi) {
  return system_symbol(id, p, xi, xi);
}

/// Number of scalar unknowns per mode.
int symbol_width(SystemId id, const SystemParams& p);

/// Largest real part over the eigenvalues of a small dense matrix.
double eigen_max_real(const CMat& m);

struct EigenBoundReport {
  std::vector<Vec3> sampled_xi;
  std::vector<double> lambda_max_over_xi2;
  double best_C = 0.0;
  bool hypothesis_ok = false;
  std::uint64_t seed = 0;
};

/// Samples |xi| log-uniformly in [1e-3, 1e2] and directions uniformly on the
/// sphere with an additive-recurrence low-discrepancy sequence whose start
/// point derives from `seed`.
EigenBoundReport eigen_bound(const SystemParams& p, std::size_t samples, std::uint64_t seed = 0);

/// Per-mode table exp(M(xi) t) over a lattice. Modes with xi and -xi share
/// one evaluation (the partner receives the complex conjugate).
class ModeExponentials {
 public:
  ModeExponentials(SystemId id, const SystemParams& p, const Lattice& lat, double t);

  void apply(State& s) const;
  /// Applies the table to several states in one pass over memory.
  void apply(std::span<State* const> states) const;

  [[nodiscard]] double time() const { return t_; }
  [[nodiscard]] int width() const { return width_; }
  [[nodiscard]] std::size_t eigen_count() const { return eigen_count_; }
  [[nodiscard]] std::size_t pade_count() const { return pade_count_; }
  [[nodiscard]] const std::vector<linalg::ExpmMethod>& methods() const { return methods_; }

 private:
  SystemId id_;
  Lattice lattice_;
  double t_;
  int width_;
  std::vector<std::complex<double>> table_;  // modes x width x width, row major
  std::vector<linalg::ExpmMethod> methods_;
  std::size_t eigen_count_ = 0;
  std::size_t pade_count_ = 0;
};

/// State -> symbol applied mode-wise (the stiff part of the right-hand side).
State apply_symbol(const State& s, const SystemParams& p);

/// exp(A t) applied to a state of any system.
State evolve_linear(const State& s0, double t, const SystemParams& p);

/// Closed-form Lame flow: the part of what along xi decays at
/// (gamma+kappa)|xi|^2, the transverse part at gamma|xi|^2.
SpectralField lame_semigroup(const SpectralField& w0, double t, double gamma, double kappa);

/// Multiplies each mode by exp(-c |xi|^2 t).
SpectralField heat_semigroup(const SpectralField& f, double t, double c);

/// Compares ||exp(At) G|| with ||exp(c Delta t) G|| for every time, and the
/// Lame flow of the w block with the heat flow at rate min(c, gamma).
std::vector<VerificationReport> verify_comparison(const State& g, const SystemParams& p, double c,
                                                  const std::vector<double>& times);

/// Gaussian initial data on R^3: u0 = P[a_u g], w0 = a_w g with
/// g(x) = exp(-|x|^2 / (2 sigma^2)).
struct InitialDataProfile {
  double sigma = 1.0;
  Vec3 u_amplitude{1.0, 0.0, 0.0};
  Vec3 w_amplitude{0.0, 1.0, 0.0};
};

struct QuadratureSeries {
  DecaySeries u;
  DecaySeries w;
  DecaySeries z;
};

/// Exact R^3 norms of the linear flow from a Gaussian profile:
/// ||block||^2 = (2 pi)^-3 int |exp(M(xi) t) zhat0(xi)|^2 dxi, adaptive
/// Gauss-Kronrod in |xi| and a product Gauss rule on the sphere. Supported
/// systems: micropolar, navier_stokes (u only) and generic_linear (the
/// single block is reported as u, unprojected).
QuadratureSeries linear_decay_quadrature(const InitialDataProfile& profile, SystemId id,
                                         const SystemParams& p, const std::vector<double>& times,
                                         double rel_tol = 1e-10);

}  // namespace decaylab::linear

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "decaylab/report.hpp"
#include "decaylab/series.hpp"
#include "decaylab/spectral_field.hpp"
#include "decaylab/timestepper.hpp"

namespace decaylab::diagnostics {

using Window = std::pair<double, double>;

struct FitResult {
  double exponent = 0.0;
  double residual = 0.0;  // RMS in log space
  std::size_t samples = 0;
  Window window{0.0, 0.0};
  std::vector<std::string> caveats;
};

/// Least-squares slope of -log(value) against log(t) over samples with t in
/// the window. The series is cut at the first value below 1e-14. Throws
/// std::invalid_argument when fewer than 10 samples remain.
FitResult fit_decay_exponent(const DecaySeries& series, Window window);

/// Runs the fit and stores window, exponent, residual and caveats on the series.
FitResult attach_fit(DecaySeries& series, Window window);

struct Lambda0Estimate {
  double value = 0.0;
  double alpha = 0.0;
  Window window{0.0, 0.0};
  bool growing = false;
  std::vector<std::string> caveats;
};

/// sup over the window of t^alpha value(t). The windowed sup stands in for a
/// limsup; a caveat saying so is always attached.
Lambda0Estimate estimate_lambda0(const DecaySeries& series, double alpha, Window window);

/// sup over the window of t^a value(t), recorded in series.tail_sup[a].
double tail_sup(DecaySeries& series, double a, Window window);

/// Last sampled time at which ||D^m z|| still increased over a step; 0 when
/// the sequence never increases. m in {0, 1, 2}.
double monotone_transient(const Trajectory& traj, int m);

/// Default fit window: the last decade of trusted time after the transient,
/// [max(transient, t_hi / 10), t_hi] with t_hi = min(last step, trusted horizon).
Window default_window(const Trajectory& traj, double transient = 0.0);

struct VerifyRequest {
  double alpha = 0.75;
  std::vector<int> m_list{0, 1};
  std::vector<double> s_list{0.5, 1.5};
  std::vector<double> p_list{4.0};
  std::vector<int> linf_m{0, 1};
  std::optional<Window> window;
  double constant_tolerance = 0.05;  // relative slack on windowed-sup vs limsup bounds
  int sobolev_samples = 1000;
  int sobolev_n = 16;
  std::uint64_t seed = 1;
};

/// Decay bounds for ||D^m z|| and ||D^m w|| with the constant K_{alpha,m}
/// and lambda0 measured on the same trajectory, plus exponent-level checks.
std::vector<VerificationReport> verify_thm1(Trajectory& traj, const VerifyRequest& req);

/// Error-field bounds for every anchor, exponent gain over z and the w-error
/// gain over the z-error.
std::vector<VerificationReport> verify_thm2(Trajectory& traj, const VerifyRequest& req);

/// Pressure exponent 2 alpha + 3/4 (floor 0.2 below).
std::vector<VerificationReport> verify_pressure(Trajectory& traj, const VerifyRequest& req);

/// Energy inequality, per-step monotonicity of ||z||, eventual monotonicity
/// of ||Dz|| and ||D^2 z|| before the fit window.
std::vector<VerificationReport> verify_energy(const Trajectory& traj, const VerifyRequest& req);

/// Difference of two anchored linear flows decays at >= 5/4 + m/2 - 0.2.
std::vector<VerificationReport> verify_anchor_independence(Trajectory& traj,
                                                           const VerifyRequest& req);

/// H^s-dot, L^p and L^infinity exponent checks.
std::vector<VerificationReport> check_interpolated_decay(Trajectory& traj,
                                                         const VerifyRequest& req);

struct SobolevSummary {
  std::size_t checks = 0;
  std::size_t violations = 0;
  double worst_ratio = 0.0;  // max lhs / rhs
  std::string worst_case;
};

/// For each field, m = 1..3 and l = 0..m-1:
///   ||D^l f||_inf ||D^(m-l) f||_2 <= ||f||_2^(1/2) ||Df||_2^(1/2) ||D^(m+1) f||_2,
/// together with the two ingredients
///   ||D^k f||_2^2 <= ||D^(k-1) f||_2 ||D^(k+1) f||_2          (k = 1..3)
///   ||D^l f||_inf <= ||D^(l+1) f||_2^(1/2) ||D^(l+2) f||_2^(1/2) (l = 0..2).
/// L^infinity norms are taken on a 2x padded grid. Returns one report per
/// inequality family.
std::vector<VerificationReport> check_sobolev_lemma(const std::vector<SpectralField>& fields,
                                                    SobolevSummary* summary = nullptr);

/// Seeded band-limited samples used by check_sobolev_lemma in verify runs.
std::vector<SpectralField> sobolev_samples(int count, int n, std::uint64_t seed);

}  // namespace decaylab::diagnostics

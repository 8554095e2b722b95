#include "decaylab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "decaylab/constants.hpp"
#include "decaylab/linear_semigroup.hpp"
#include "decaylab/spectral_ops.hpp"

namespace decaylab::diagnostics {

namespace {

constexpr double kFloor = 1e-14;
constexpr std::size_t kMinSamples = 10;

std::string window_text(Window w) {
  return "[" + format_number(w.first) + ", " + format_number(w.second) + "]";
}

bool in_window(double t, Window w) {
  return t >= w.first * (1.0 - 1e-12) && t <= w.second * (1.0 + 1e-12);
}

std::string sup_caveat(Window w) {
  return "windowed sup over t in " + window_text(w) + " stands in for the limsup";
}

DecaySeries& need(Trajectory& traj, const std::string& key) {
  auto it = traj.tracks.find(key);
  if (it == traj.tracks.end()) throw std::invalid_argument("trajectory is missing track " + key);
  return it->second;
}

void add_caveats(VerificationReport& r, const std::vector<std::string>& c) {
  r.caveats.insert(r.caveats.end(), c.begin(), c.end());
}

Window resolve_window(const Trajectory& traj, const VerifyRequest& req) {
  return req.window ? *req.window : default_window(traj);
}

VerificationReport fit_check(const std::string& id, const std::string& label, DecaySeries& s,
                             Window w, double required) {
  const FitResult f = attach_fit(s, w);
  VerificationReport r = exponent_check(id, label, f.exponent, required);
  r.inputs["fit_residual"] = f.residual;
  r.inputs["fit_samples"] = static_cast<double>(f.samples);
  r.inputs["window_lo"] = w.first;
  r.inputs["window_hi"] = w.second;
  add_caveats(r, f.caveats);
  return r;
}

VerificationReport gap_check(const std::string& id, const std::string& label, DecaySeries& fast,
                             DecaySeries& slow, Window w, double gap) {
  const FitResult a = attach_fit(fast, w);
  const FitResult b = attach_fit(slow, w);
  VerificationReport r = exponent_check(id, label, a.exponent, b.exponent + gap);
  r.inputs["fitted_exponent_reference"] = b.exponent;
  r.inputs["required_gap"] = gap;
  r.inputs["window_lo"] = w.first;
  r.inputs["window_hi"] = w.second;
  add_caveats(r, a.caveats);
  add_caveats(r, b.caveats);
  return r;
}

double comparison_rate(const Trajectory& traj, std::uint64_t seed, std::string* provenance) {
  const SystemParams& p = traj.config.params;
  if (traj.config.system == SystemId::micropolar) {
    const auto eb = linear::eigen_bound(p, 10000, seed);
    *provenance = "fitted C in lambda_max(M(xi)) <= -C |xi|^2 over 10^4 sampled xi";
    return eb.best_C;
  }
  *provenance = "dissipation floor of the system";
  return dissipation_floor(p, traj.config.system);
}

}  // namespace

FitResult fit_decay_exponent(const DecaySeries& series, Window window) {
  FitResult out;
  out.window = window;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double v = series.value[i];
    if (!(v >= kFloor)) {
      out.caveats.push_back("series truncated at t = " + format_number(series.t[i]) +
                            " where the value fell below 1e-14");
      break;
    }
    if (!in_window(series.t[i], window)) continue;
    xs.push_back(std::log(series.t[i]));
    ys.push_back(-std::log(v));
  }
  if (xs.size() < kMinSamples) {
    throw std::invalid_argument("fit of " + series.key() + " over " + window_text(window) +
                                " has " + std::to_string(xs.size()) +
                                " samples; at least 10 are needed");
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit window holds a single time");
  out.exponent = sxy / sxx;
  const double icpt = my - out.exponent * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (icpt + out.exponent * xs[i]);
    ss += r * r;
  }
  out.residual = std::sqrt(ss / n);
  out.samples = xs.size();
  return out;
}

FitResult attach_fit(DecaySeries& series, Window window) {
  FitResult f = fit_decay_exponent(series, window);
  series.fit_window = window;
  series.fitted_exponent = f.exponent;
  series.fit_residual = f.residual;
  for (const auto& c : f.caveats) {
    if (std::find(series.caveats.begin(), series.caveats.end(), c) == series.caveats.end()) {
      series.caveats.push_back(c);
    }
  }
  return f;
}

Lambda0Estimate estimate_lambda0(const DecaySeries& series, double alpha, Window window) {
  Lambda0Estimate e;
  e.alpha = alpha;
  e.window = window;
  double first = -1.0, last = -1.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (!in_window(series.t[i], window)) continue;
    const double w = std::pow(series.t[i], alpha) * series.value[i];
    if (count == 0) first = w;
    last = w;
    e.value = std::max(e.value, w);
    ++count;
  }
  if (count == 0) throw std::invalid_argument("empty window " + window_text(window));
  e.caveats.push_back(sup_caveat(window));
  if (count >= 2 && last > first && last >= e.value) {
    e.growing = true;
    e.caveats.push_back("tail_sup growing; alpha likely overestimates decay");
  }
  return e;
}

double tail_sup(DecaySeries& series, double a, Window window) {
  const double v = estimate_lambda0(series, a, window).value;
  series.tail_sup[a] = v;
  return v;
}

double monotone_transient(const Trajectory& traj, int m) {
  if (m < 0 || m > 2) throw std::invalid_argument("monotone_transient supports m = 0, 1, 2");
  double last = 0.0;
  for (std::size_t i = 1; i < traj.steps.size(); ++i) {
    const auto& a = traj.steps[i - 1];
    const auto& b = traj.steps[i];
    const double va = m == 0 ? a.z : (m == 1 ? a.dz : a.d2z);
    const double vb = m == 0 ? b.z : (m == 1 ? b.dz : b.d2z);
    if (vb > va) last = b.t;
  }
  return last;
}

Window default_window(const Trajectory& traj, double transient) {
  const double t_last = traj.steps.empty() ? 0.0 : traj.steps.back().t;
  const double t_hi = std::min(t_last, trusted_horizon(traj.config));
  return {std::max(transient, t_hi / 10.0), t_hi};
}

// ---------------------------------------------------------------------------

std::vector<VerificationReport> verify_thm1(Trajectory& traj, const VerifyRequest& req) {
  const Window w = resolve_window(traj, req);
  const double alpha = req.alpha;
  const SystemParams& p = traj.config.params;
  const double nu = dissipation_floor(p, traj.config.system);
  DecaySeries& u = need(traj, track_key("u", 0));
  const Lambda0Estimate l0 = estimate_lambda0(u, alpha, w);
  u.tail_sup[alpha] = l0.value;
  const ConstantUse lambda_use{"lambda0", l0.value,
                               "sup of t^" + format_number(alpha) + " ||u|| over " + window_text(w)};
  const ConstantUse nu_use{"nu", nu, "dissipation floor of the system"};

  std::vector<VerificationReport> out;
  for (int m : req.m_list) {
    DecaySeries& zs = need(traj, track_key("z", m));
    const auto k = constants::k_alpha_m(alpha, m);
    VerificationReport r;
    r.theorem_id = "decay";
    r.label = "sup t^(alpha+m/2) ||D^m z|| <= K_{alpha,m} nu^(-m/2) lambda0, m = " +
              std::to_string(m);
    r.inputs = {{"alpha", alpha}, {"m", m}, {"window_lo", w.first}, {"window_hi", w.second}};
    r.constants = {{"K_alpha_m", k.value, "golden-section minimization; " + k.case_label},
                   lambda_use, nu_use};
    r.measured = tail_sup(zs, alpha + 0.5 * m, w);
    r.bound = k.value * std::pow(nu, -0.5 * m) * l0.value;
    r.tolerance = req.constant_tolerance;
    r.caveats.push_back(sup_caveat(w));
    add_caveats(r, l0.caveats);
    if (m == 0) r.caveats.push_back("K_{alpha,0} is an infimum approached as delta -> infinity");
    r.finalize();
    out.push_back(std::move(r));

    constants::AlphaParams ap{alpha, l0.value, traj.z0_norm};
    out.push_back(fit_check("decay", "fitted exponent of ||D^m z|| >= alpha + m/2 - 0.15, m = " +
                                         std::to_string(m),
                            zs, w, constants::predicted_exponent(ap, m, constants::NormField::z, 2.0) - 0.15));
  }

  if (traj.has_track(track_key("w", 0))) {
    for (int m : req.m_list) {
      DecaySeries& ws = need(traj, track_key("w", m));
      const auto k = constants::k_alpha_m(alpha, m + 1);
      VerificationReport r;
      r.theorem_id = "decay";
      r.label = "sup t^(alpha+(m+1)/2) ||D^m w|| <= (K_{alpha,m+1}/2) nu^(-(m+1)/2) lambda0, m = " +
                std::to_string(m);
      r.inputs = {{"alpha", alpha}, {"m", m}, {"window_lo", w.first}, {"window_hi", w.second}};
      r.constants = {{"K_alpha_m+1", k.value, "golden-section minimization; " + k.case_label},
                     lambda_use, nu_use};
      r.measured = tail_sup(ws, alpha + 0.5 * (m + 1), w);
      r.bound = 0.5 * k.value * std::pow(nu, -0.5 * (m + 1)) * l0.value;
      r.tolerance = req.constant_tolerance;
      r.caveats.push_back(sup_caveat(w));
      r.finalize();
      out.push_back(std::move(r));
    }
    out.push_back(gap_check("decay", "fitted exponent of ||w|| exceeds that of ||u|| by >= 0.35",
                            need(traj, track_key("w", 0)), u, w, 0.35));
  }
  return out;
}

std::vector<VerificationReport> verify_thm2(Trajectory& traj, const VerifyRequest& req) {
  const double alpha = req.alpha;
  if (alpha < 0.0 || alpha >= 1.25) {
    throw std::invalid_argument("error decay needs 0 <= alpha < 5/4, got " + format_number(alpha));
  }
  if (traj.config.anchors.empty()) throw std::invalid_argument("error decay needs anchors");
  const Window w = resolve_window(traj, req);
  const SystemParams& p = traj.config.params;
  const double beta = constants::beta_of_alpha(alpha);
  DecaySeries& u = need(traj, track_key("u", 0));
  const Lambda0Estimate l0 = estimate_lambda0(u, alpha, w);
  std::string c_prov;
  const double c = comparison_rate(traj, req.seed, &c_prov);
  const bool hyp = traj.config.system != SystemId::micropolar || eigen_hypothesis(p);
  const constants::AlphaParams ap{alpha, l0.value, traj.z0_norm};
  DecaySeries& z0 = need(traj, track_key("z", 0));

  std::vector<VerificationReport> out;
  for (double t0 : traj.config.anchors) {
    if (t0 >= w.first) continue;  // error window starts after the fit window opens
    const std::string tag = anchor_tag(t0);
    for (int m : req.m_list) {
      DecaySeries& es = need(traj, track_key("Ez", m, 2.0, tag));
      const auto cst = constants::error_constant(p, ap, m, c);
      VerificationReport r;
      r.theorem_id = "error_decay";
      r.label = "sup t^(alpha+beta+m/2) ||D^m E_z|| <= C(nu,chi,alpha,m), m = " +
                std::to_string(m) + ", t0 = " + format_number(t0);
      r.inputs = {{"alpha", alpha}, {"beta", beta}, {"m", m}, {"t0", t0},
                  {"window_lo", w.first}, {"window_hi", w.second}};
      r.constants = {{"C", cst.value, cst.case_label},
                     {"lambda0", l0.value, "sup of t^alpha ||u|| over " + window_text(w)},
                     {"c", c, c_prov},
                     {"z0_norm", traj.z0_norm, "initial state"}};
      r.measured = tail_sup(es, alpha + beta + 0.5 * m, w);
      r.bound = cst.value;
      r.tolerance = req.constant_tolerance;
      r.caveats.push_back(sup_caveat(w));
      if (!hyp) r.status = "hypothesis_not_met";
      r.finalize();
      out.push_back(std::move(r));

      if (traj.has_track(track_key("w", 0))) {
        DecaySeries& ew = need(traj, track_key("Ew", m, 2.0, tag));
        const auto cw = constants::error_constant(p, ap, m + 1, c);
        VerificationReport q = out.back();
        q.label = "sup t^(alpha+beta+(m+1)/2) ||D^m E_w|| <= C(nu,chi,alpha,m+1)/2, m = " +
                  std::to_string(m) + ", t0 = " + format_number(t0);
        q.constants[0] = {"C", cw.value, cw.case_label};
        q.measured = tail_sup(ew, alpha + beta + 0.5 * (m + 1), w);
        q.bound = 0.5 * cw.value;
        q.finalize();
        out.push_back(std::move(q));
      }
    }
    DecaySeries& e0 = need(traj, track_key("Ez", 0, 2.0, tag));
    auto g = gap_check("error_decay",
                       "fitted exponent of ||E_z|| exceeds that of ||z|| by >= beta - 0.2, t0 = " +
                           format_number(t0),
                       e0, z0, w, beta - 0.2);
    if (!hyp) g.status = "hypothesis_not_met";
    out.push_back(std::move(g));
    if (traj.has_track(track_key("w", 0))) {
      auto h = gap_check("error_decay",
                         "fitted exponent of ||E_w|| exceeds that of ||E_z|| by >= 0.3, t0 = " +
                             format_number(t0),
                         need(traj, track_key("Ew", 0, 2.0, tag)), e0, w, 0.3);
      if (!hyp) h.status = "hypothesis_not_met";
      out.push_back(std::move(h));
    }
  }
  if (out.empty()) {
    throw std::invalid_argument("no anchor precedes the fit window " + window_text(w));
  }
  return out;
}

std::vector<VerificationReport> verify_pressure(Trajectory& traj, const VerifyRequest& req) {
  const Window w = resolve_window(traj, req);
  const constants::AlphaParams ap{req.alpha, std::nullopt, std::nullopt};
  const double pred = constants::predicted_exponent(ap, 0, constants::NormField::pressure, 2.0);
  return {fit_check("pressure", "fitted exponent of ||p|| >= 2 alpha + 3/4 - 0.2",
                    need(traj, track_key("p", 0)), w, pred - 0.2)};
}

std::vector<VerificationReport> verify_energy(const Trajectory& traj, const VerifyRequest& req) {
  std::vector<VerificationReport> out;
  const double z0sq = traj.z0_norm * traj.z0_norm;
  {
    VerificationReport r;
    r.theorem_id = "energy";
    r.label = "||z(t)||^2 + 2 nu int_0^t ||Dz||^2 <= ||z0||^2";
    double worst = 0.0, at = 0.0;
    for (const auto& s : traj.steps) {
      const double v = s.z * s.z + s.dissipation;
      if (v > worst) {
        worst = v;
        at = s.t;
      }
    }
    r.inputs = {{"nu", traj.nu}, {"t_worst", at}};
    r.measured = z0sq > 0.0 ? worst / z0sq : 0.0;
    r.bound = 1.0;
    r.tolerance = 1e-6;
    r.caveats.push_back("time integral by the trapezoid rule on every step");
    r.finalize();
    out.push_back(std::move(r));
  }
  {
    VerificationReport r;
    r.theorem_id = "energy";
    r.label = "||z|| nonincreasing across every step";
    double worst = 0.0;
    for (std::size_t i = 1; i < traj.steps.size(); ++i) {
      worst = std::max(worst, traj.steps[i].z - traj.steps[i - 1].z);
    }
    r.measured = worst;
    r.bound = 0.0;
    r.absolute_tolerance = 1e-10 * traj.z0_norm;
    r.finalize();
    out.push_back(std::move(r));
  }
  const Window w = resolve_window(traj, req);
  const double t_star =
      constants::regularity_time_bound(traj.nu, traj.z0_norm, constants::RegularityVariant::improved);
  for (int m : {1, 2}) {
    VerificationReport r;
    r.theorem_id = "energy";
    r.label = "||D^" + std::to_string(m) + " z|| nonincreasing after the measured transient, "
              "which ends before the fit window";
    r.measured = monotone_transient(traj, m);
    r.bound = w.first;
    r.inputs = {{"m", m}, {"measured_transient", r.measured}, {"t_star_bound", t_star}};
    r.caveats.push_back("transient measured on every step; the monotonicity constant K_m has no "
                        "numerical value, so t_star_bound is reported, not asserted");
    r.finalize();
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<VerificationReport> verify_anchor_independence(Trajectory& traj,
                                                           const VerifyRequest& req) {
  const Window w = resolve_window(traj, req);
  std::vector<VerificationReport> out;
  for (auto& [key, s] : traj.tracks) {
    if (s.field != "zbar_diff" || s.m > 1 || s.s) continue;
    const double req_exp = 1.25 + 0.5 * s.m - 0.2;
    out.push_back(fit_check("anchor",
                            "difference of anchored linear flows (" + s.tag +
                                ") decays at >= 5/4 + m/2 - 0.2, m = " + std::to_string(s.m),
                            s, w, req_exp));
  }
  if (out.empty()) throw std::invalid_argument("anchor independence needs two anchors");
  return out;
}

std::vector<VerificationReport> check_interpolated_decay(Trajectory& traj,
                                                         const VerifyRequest& req) {
  const Window w = resolve_window(traj, req);
  const double a = req.alpha;
  std::vector<VerificationReport> out;
  for (double s : req.s_list) {
    const bool integer = s == 0.0;
    DecaySeries& ts = integer ? need(traj, track_key("z", 0)) : [&]() -> DecaySeries& {
      DecaySeries proto;
      proto.field = "z";
      proto.s = s;
      return need(traj, proto.key());
    }();
    out.push_back(fit_check("interpolation",
                            "fitted exponent of ||z||_{H^s} >= alpha + s/2 - 0.15, s = " +
                                format_number(s),
                            ts, w, a + 0.5 * s - 0.15));
  }
  for (double p : req.p_list) {
    if (!(p >= 2.0)) throw std::invalid_argument("unsupported Lebesgue exponent " + format_number(p));
    const double shift = std::isinf(p) ? 0.75 : 3.0 * (p - 2.0) / (4.0 * p);
    out.push_back(fit_check("interpolation",
                            "fitted exponent of ||z||_{L^p} >= alpha + 3(p-2)/(4p) - 0.25, p = " +
                                format_number(p),
                            need(traj, track_key("z", 0, p)), w, a + shift - 0.25));
  }
  for (int m : req.linf_m) {
    out.push_back(fit_check("interpolation",
                            "fitted exponent of ||D^m z||_{L^inf} >= alpha + m/2 + 3/4 - 0.25, m = " +
                                std::to_string(m),
                            need(traj, track_key("z", m, spectral::kInfinity)), w,
                            a + 0.5 * m + 0.75 - 0.25));
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<SpectralField> sobolev_samples(int count, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Lattice lat = make_lattice(n, 2.0 * std::numbers::pi);
  std::uniform_int_distribution<int> kmax(1, n / 3);
  std::uniform_int_distribution<int> comps(1, 3);
  std::vector<SpectralField> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const int c = comps(rng);
    const int k = kmax(rng);
    out.push_back(spectral::random_band_limited(lat, c, k, rng));
  }
  return out;
}

std::vector<VerificationReport> check_sobolev_lemma(const std::vector<SpectralField>& fields,
                                                    SobolevSummary* summary) {
  struct Family {
    const char* label;
    double worst = 0.0;
    std::string worst_case;
    std::size_t checks = 0;
    std::size_t violations = 0;
  };
  Family lemma{"||D^l f||_inf ||D^(m-l) f|| <= ||f||^(1/2) ||Df||^(1/2) ||D^(m+1) f||, m <= 3", 0.0, {}, 0, 0};
  Family interp{"||D^k f||^2 <= ||D^(k-1) f|| ||D^(k+1) f||, k <= 3", 0.0, {}, 0, 0};
  Family linf{"||D^l f||_inf <= ||D^(l+1) f||^(1/2) ||D^(l+2) f||^(1/2), l <= 2", 0.0, {}, 0, 0};
  constexpr double tol = 1e-6;

  auto record = [&](Family& fam, double lhs, double rhs, std::size_t idx, const std::string& what) {
    ++fam.checks;
    if (rhs <= 0.0 && lhs <= 0.0) return;
    const double ratio = rhs > 0.0 ? lhs / rhs : std::numeric_limits<double>::infinity();
    if (ratio > fam.worst) {
      fam.worst = ratio;
      fam.worst_case = "sample " + std::to_string(idx) + ", " + what;
    }
    if (ratio > 1.0 + tol) ++fam.violations;
  };

  for (std::size_t i = 0; i < fields.size(); ++i) {
    const SpectralField& f = fields[i];
    double h[5];
    for (int k = 0; k <= 4; ++k) h[k] = spectral::hs_norm(f, k);
    double inf[3];
    for (int l = 0; l <= 2; ++l) inf[l] = spectral::derivative_lp_norm(f, l, spectral::kInfinity, 2);
    for (int m = 1; m <= 3; ++m)
      for (int l = 0; l < m; ++l) {
        record(lemma, inf[l] * h[m - l], std::sqrt(h[0] * h[1]) * h[m + 1], i,
               "m = " + std::to_string(m) + ", l = " + std::to_string(l));
      }
    for (int k = 1; k <= 3; ++k) {
      record(interp, h[k] * h[k], h[k - 1] * h[k + 1], i, "k = " + std::to_string(k));
    }
    for (int l = 0; l <= 2; ++l) {
      record(linf, inf[l], std::sqrt(h[l + 1] * h[l + 2]), i, "l = " + std::to_string(l));
    }
  }

  std::vector<VerificationReport> out;
  SobolevSummary sum;
  for (Family* fam : {&lemma, &interp, &linf}) {
    VerificationReport r;
    r.theorem_id = "sobolev";
    r.label = fam->label;
    r.inputs = {{"samples", static_cast<double>(fields.size())},
                {"checks", static_cast<double>(fam->checks)},
                {"violations", static_cast<double>(fam->violations)}};
    r.measured = fam->worst;
    r.bound = 1.0;
    r.tolerance = tol;
    r.caveats.push_back("L^inf taken on a 2x padded grid of band-limited fields");
    if (!fam->worst_case.empty()) r.caveats.push_back("largest ratio at " + fam->worst_case);
    r.finalize();
    out.push_back(std::move(r));
    sum.checks += fam->checks;
    sum.violations += fam->violations;
    if (fam->worst > sum.worst_ratio) {
      sum.worst_ratio = fam->worst;
      sum.worst_case = fam->worst_case;
    }
  }
  if (summary) *summary = sum;
  return out;
}

}  // namespace decaylab::diagnostics

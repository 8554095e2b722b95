#include <cmath>
#include <random>

#include "decaylab/diagnostics.hpp"
#include "decaylab/linear_semigroup.hpp"
#include "decaylab/spectral_ops.hpp"
#include "doctest.h"
#include "oracle.hpp"
#include "support.hpp"

using namespace decaylab;
using namespace decaylab::diagnostics;

namespace {

DecaySeries power_series(const std::string& field, int m, double c, double e, double t0, double t1,
                         int points, double noise = 0.0, std::uint64_t seed = 0) {
  DecaySeries s;
  s.field = field;
  s.m = m;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-noise, noise);
  for (int i = 0; i < points; ++i) {
    const double t = t0 * std::pow(t1 / t0, static_cast<double>(i) / (points - 1));
    s.push(t, c * std::pow(t, -e) * (1.0 + u(rng)));
  }
  return s;
}

void put(Trajectory& tr, DecaySeries s) { tr.tracks[s.key()] = std::move(s); }

}  // namespace

TEST_CASE("fit_decay_exponent") {
  CHECK(fit_decay_exponent(power_series("z", 0, 2.0, 0.75, 1.0, 100.0, 30), {1.0, 100.0}).exponent ==
        doctest::Approx(0.75).epsilon(1e-10));
  CHECK(std::abs(fit_decay_exponent(power_series("z", 0, 3.0, 0.0, 1.0, 100.0, 30), {1.0, 100.0}).exponent) <
        1e-10);

  DecaySeries corr;
  for (int i = 0; i < 40; ++i) {
    const double t = 100.0 * std::pow(10.0, i / 39.0);
    corr.push(t, (1.0 / t) * (1.0 + 1.0 / t));
  }
  CHECK(std::abs(fit_decay_exponent(corr, {100.0, 1000.0}).exponent - 1.0) < 0.02);

  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto s = power_series("z", 0, 1.0, 1.3, 5.0, 500.0, 48, 0.01, seed);
    CHECK(std::abs(fit_decay_exponent(s, {5.0, 500.0}).exponent - 1.3) < 0.02);
  }

  CHECK_THROWS(fit_decay_exponent(power_series("z", 0, 1.0, 1.0, 1.0, 10.0, 9), {1.0, 10.0}));

  DecaySeries cut = power_series("z", 0, 1.0, 1.0, 1.0, 100.0, 30);
  cut.value[20] = 0.0;
  const FitResult f = fit_decay_exponent(cut, {1.0, 100.0});
  CHECK(f.samples == 20);
  CHECK(f.caveats.size() == 1);
}

TEST_CASE("estimate_lambda0") {
  const auto s = power_series("u", 0, 1.0, 0.6, 1.0, 50.0, 20);
  CHECK(estimate_lambda0(s, 0.6, {1.0, 50.0}).value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(estimate_lambda0(s, 0.6, {10.0, 20.0}).value == doctest::Approx(1.0).epsilon(1e-12));
  const auto grow = estimate_lambda0(s, 0.9, {1.0, 50.0});
  CHECK(grow.growing);
  bool found = false;
  for (const auto& c : grow.caveats) found |= c == "tail_sup growing; alpha likely overestimates decay";
  CHECK(found);
  CHECK_FALSE(estimate_lambda0(s, 0.5, {1.0, 50.0}).growing);
  CHECK_THROWS(estimate_lambda0(s, 0.5, {100.0, 200.0}));

  // tail_sup(a2) / tail_sup(a1) >= t_lo^(a2 - a1)
  DecaySeries x = s;
  const double s1 = tail_sup(x, 0.3, {2.0, 40.0});
  const double s2 = tail_sup(x, 0.5, {2.0, 40.0});
  CHECK(s2 / s1 >= std::pow(2.0, 0.2) * (1.0 - 1e-12));
  CHECK(x.tail_sup.size() == 2);
}

TEST_CASE("lambda0 from the heat-Gaussian series stabilizes") {
  const oracle::GaussianProfile g{1.0, 1.0, true};
  DecaySeries s;
  for (int i = 0; i <= 120; ++i) {
    const double t = std::pow(10.0, 1.0 + 3.0 * i / 120.0);
    s.push(t, oracle::heat_gaussian_norm(t, 1.0, g));
  }
  const double a = estimate_lambda0(s, 0.75, {100.0, 1000.0}).value;
  const double b = estimate_lambda0(s, 0.75, {100.0, 2000.0}).value;
  CHECK(std::abs(b - a) <= 0.02 * a);

  const double fit = fit_decay_exponent(s, {100.0, 10000.0}).exponent;
  const double c = estimate_lambda0(s, fit, {100.0, 2500.0}).value;
  const double d = estimate_lambda0(s, fit, {100.0, 5000.0}).value;
  CHECK(std::abs(d - c) <= 0.05 * c);
}

TEST_CASE("verify_thm1 on synthetic power laws") {
  Trajectory tr;
  tr.config.params = SystemParams{};
  tr.z0_norm = 1.0;
  put(tr, power_series("u", 0, 1.0, 0.75, 10.0, 100.0, 20));
  put(tr, power_series("z", 0, 1.0, 0.75, 10.0, 100.0, 20));
  put(tr, power_series("z", 1, 0.5, 1.25, 10.0, 100.0, 20));
  put(tr, power_series("w", 0, 0.1, 1.25, 10.0, 100.0, 20));
  put(tr, power_series("w", 1, 0.05, 1.75, 10.0, 100.0, 20));
  VerifyRequest req;
  req.window = Window{10.0, 100.0};
  const auto reps = verify_thm1(tr, req);
  REQUIRE(reps.size() == 7);
  for (const auto& r : reps) {
    CAPTURE(r.label);
    CHECK(r.pass);
  }
  CHECK(reps[0].bound == doctest::Approx(1.0));
  CHECK(tr.track(track_key("z", 0)).fitted_exponent.has_value());

  // lambda0 = 0: the bound collapses and any positive z fails
  Trajectory zero = tr;
  zero.tracks.erase(track_key("w", 0));
  zero.tracks.erase(track_key("w", 1));
  for (auto& v : zero.tracks[track_key("u", 0)].value) v = 0.0;
  req.m_list = {0};
  const auto r0 = verify_thm1(zero, req);
  CHECK(r0[0].bound == 0.0);
  CHECK_FALSE(r0[0].pass);
}

TEST_CASE("exponent checks fail on slow decay") {
  Trajectory tr;
  put(tr, power_series("z", 0, 1.0, 0.3, 10.0, 100.0, 20));
  DecaySeries hs = power_series("z", 0, 1.0, 0.3, 10.0, 100.0, 20);
  hs.s = 0.5;
  put(tr, hs);
  DecaySeries lp = power_series("z", 0, 1.0, 0.3, 10.0, 100.0, 20);
  lp.p = 4.0;
  put(tr, lp);
  VerifyRequest req;
  req.window = Window{10.0, 100.0};
  req.s_list = {0.0, 0.5};
  req.p_list = {2.0, 4.0};
  req.linf_m = {};
  const auto reps = check_interpolated_decay(tr, req);
  REQUIRE(reps.size() == 4);
  for (const auto& r : reps) CHECK_FALSE(r.pass);
  // s = 0 and p = 2 read the plain L^2 track
  CHECK(reps[0].measured == doctest::Approx(reps[2].measured + 0.1));
}

TEST_CASE("interpolated decay on the heat-Gaussian") {
  // ||(-Lap)^{s/2} e^{t Lap} g|| decays like t^{-(3/4 + s/2)}
  Trajectory tr;
  DecaySeries h;
  h.field = "z";
  h.s = 1.0;
  for (int i = 0; i <= 40; ++i) {
    const double t = std::pow(10.0, 2.0 + 2.0 * i / 40.0);
    // closed form: int |xi|^2 e^{-(s2 + 2t)|xi|^2} xi^2 dxi ~ (s2 + 2t)^{-5/2}
    h.push(t, std::pow(1.0 + 2.0 * t, -1.25));
  }
  put(tr, h);
  VerifyRequest req;
  req.window = Window{100.0, 10000.0};
  req.s_list = {1.0};
  req.p_list = {};
  req.linf_m = {};
  const auto reps = check_interpolated_decay(tr, req);
  CHECK(reps[0].pass);
  CHECK(tr.tracks.begin()->second.fitted_exponent.value() == doctest::Approx(1.25).epsilon(1e-3));
}

TEST_CASE("Sobolev lemma") {
  const Lattice lat = make_lattice(16, 2.0 * M_PI);
  // single mode: ||D^k f|| = |xi|^k ||f||, ||D^l f||_inf = |xi|^l |a|
  const SpectralField one = testing::cosine_mode(lat, 1, 0, {1, 1, 0}, 1.0);
  SobolevSummary sum;
  auto reps = check_sobolev_lemma({one}, &sum);
  CHECK(sum.violations == 0);
  for (const auto& r : reps) CHECK(r.pass);
  // lemma family: |xi|^l * |xi|^(m-l) ||f|| vs |xi|^(1/2) |xi|^(m+1) ||f||: ratio |xi|^(-3/2) / ||f|| * |a|
  const double xi = std::sqrt(2.0), norm = spectral::hs_norm(one, 0.0);
  CHECK(reps[0].measured == doctest::Approx(1.0 / (std::pow(xi, 1.5) * norm)).epsilon(1e-10));
  CHECK(reps[1].measured == doctest::Approx(1.0).epsilon(1e-12));

  // Gaussian bump holds
  const Lattice big = make_lattice(32, 2.0 * M_PI);
  GridField g{big, 1, aligned_vector<double>(big.size())};
  for (std::size_t i = 0; i < big.size(); ++i) {
    const auto [a, b, e] = big.unravel(i);
    const double x = a * big.cell() - M_PI, y = b * big.cell() - M_PI, z = e * big.cell() - M_PI;
    g.values[i] = std::exp(-(x * x + y * y + z * z));
  }
  check_sobolev_lemma({spectral::dealias(spectral::from_physical(g))}, &sum);
  CHECK(sum.violations == 0);

  // homogeneity: scaling f leaves every ratio unchanged
  const auto samples = sobolev_samples(5, 16, 3);
  std::vector<SpectralField> scaled;
  for (const auto& f : samples) scaled.push_back(7.5 * f);
  const auto a = check_sobolev_lemma(samples);
  const auto b = check_sobolev_lemma(scaled);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(b[i].measured == doctest::Approx(a[i].measured).epsilon(1e-10));
  }
}

TEST_CASE("default window and monotone transient") {
  Trajectory tr;
  tr.config.n = 64;
  tr.config.box_length = 100.0;
  tr.config.params = SystemParams{};
  for (int i = 0; i <= 1000; ++i) tr.steps.push_back({0.2 * i, 0.2, 1.0, i < 20 ? 1.0 + i : 1.0, 1.0, 0.0});
  const Window w = default_window(tr);
  CHECK(w.second == doctest::Approx(156.25));
  CHECK(w.first == doctest::Approx(15.625));
  CHECK(monotone_transient(tr, 1) == doctest::Approx(0.2 * 19));
  CHECK(monotone_transient(tr, 0) == 0.0);
  CHECK(default_window(tr, 30.0).first == 30.0);
}

TEST_CASE("report determinism") {
  Trajectory tr;
  put(tr, power_series("zbar_diff", 0, 1.0, 1.3, 10.0, 100.0, 20));
  tr.tracks.begin()->second.tag = "t0=1,5";
  VerifyRequest req;
  req.window = Window{10.0, 100.0};
  Trajectory tr2 = tr;
  const auto a = verify_anchor_independence(tr, req);
  const auto b = verify_anchor_independence(tr2, req);
  CHECK(to_json(a[0]).dump() == to_json(b[0]).dump());
  CHECK(a[0].pass);
}

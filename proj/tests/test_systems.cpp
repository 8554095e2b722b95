#include <cmath>

#include "decaylab/linear_semigroup.hpp"
#include "decaylab/systems.hpp"
#include "doctest.h"
#include "oracle.hpp"
#include "support.hpp"

using namespace decaylab;
using namespace decaylab::systems;
using spectral::hs_norm;
using spectral::inner;

namespace {

const Lattice kLat = make_lattice(16, 2.0 * M_PI);
constexpr int kBand = 5;  // n/3 on the 16-grid

double pairing(const State& a, const State& b) { return state_inner(a, b); }

double scale(const State& a, const State& b) { return state_hs_norm(a, 0.0) * state_hs_norm(b, 0.0); }

SystemParams all_params() {
  SystemParams p;
  p.mu = 0.9;
  p.chi = 0.6;
  p.gamma = 1.1;
  p.kappa = 0.4;
  p.magnetic_nu = 0.7;
  p.omega = 1.3;
  p.tropical = {0.8, 0.5, 0.6};
  p.generic_gamma_exponent = 0.75;
  p.generic_ci = {1.0, 0.5, 2.0};
  // rotation by 0.3 about e3
  const double c = std::cos(0.3), s = std::sin(0.3);
  p.generic_rotation = {c, -s, 0, s, c, 0, 0, 0, 1};
  return p;
}

/// Dissipation rate sum of viscosity * ||D block||^2 of each system's symbol.
double dissipation(const State& s, const SystemParams& p) {
  auto d = [&](const char* name) { return std::pow(hs_norm(s.block(name), 1.0), 2); };
  switch (s.system) {
    case SystemId::tropical:
      return p.tropical.mu * d("u") + p.tropical.nu * d("v") + p.tropical.eta * d("theta");
    case SystemId::rotating_ns:
    case SystemId::navier_stokes:
      return p.mu * d("u");
    default:
      return 0.0;
  }
}

}  // namespace

TEST_CASE("shear triad: explicit part against the hand formula") {
  // u = (a cos y, b cos x, c cos x): (u.grad)u = (-ab cos x sin y, -ab sin x cos y, -ac sin x cos y).
  // The first two components are -ab grad(sin x sin y) and project away; the third is solenoidal.
  const double a = 0.7, b = -1.2, c = 0.9;
  State s = make_state(SystemId::micropolar, kLat);
  s.block("u") = testing::cosine_mode(kLat, 3, 0, {0, 1, 0}, a) + testing::cosine_mode(kLat, 3, 1, {1, 0, 0}, b) +
                 testing::cosine_mode(kLat, 3, 2, {1, 0, 0}, c);
  SystemParams p;
  p.chi = 0.0;

  GridField hand{kLat, 3, aligned_vector<double>(kLat.size() * 3, 0.0)};
  for (std::size_t i = 0; i < kLat.size(); ++i) {
    const auto [ix, iy, iz] = kLat.unravel(i);
    const double x = ix * kLat.cell(), y = iy * kLat.cell();
    hand.component(2)[i] = a * c * std::sin(x) * std::cos(y);
  }
  const SpectralField expect = spectral::from_physical(hand);
  const RhsSplit r = rhs_micropolar(s, p);
  CHECK(testing::rel_diff(expect, r.explicit_part.block("u")) < 1e-12);
  CHECK(hs_norm(r.explicit_part.block("w"), 0.0) == 0.0);
}

TEST_CASE("zero state gives zero right-hand side") {
  const SystemParams p = all_params();
  for (SystemId id : {SystemId::micropolar, SystemId::navier_stokes, SystemId::magneto_micropolar,
                      SystemId::tropical, SystemId::rotating_ns, SystemId::generic_linear,
                      SystemId::generic_parabolic}) {
    const State z = make_state(id, kLat);
    CHECK(state_hs_norm(rhs(z, p).total(), 0.0) == 0.0);
  }
}

TEST_CASE("split matches the monolithic evaluation") {
  const SystemParams p = all_params();
  std::mt19937_64 rng(31);
  for (SystemId id : {SystemId::micropolar, SystemId::navier_stokes, SystemId::magneto_micropolar,
                      SystemId::tropical, SystemId::rotating_ns, SystemId::generic_linear,
                      SystemId::generic_parabolic}) {
    CAPTURE(to_string(id));
    for (int trial = 0; trial < 3; ++trial) {
      const State s = testing::random_state(id, kLat, kBand, rng);
      const State split = rhs(s, p).total();
      const State mono = monolithic_rhs(s, p);
      CHECK(testing::rel_diff(mono, split) < 1e-10);
    }
  }
}

TEST_CASE("explicit part keeps u solenoidal and mean free") {
  std::mt19937_64 rng(32);
  const SystemParams p = all_params();
  for (SystemId id : {SystemId::micropolar, SystemId::magneto_micropolar, SystemId::tropical,
                      SystemId::navier_stokes}) {
    const State s = testing::random_state(id, kLat, kBand, rng);
    const State e = explicit_part(s, p);
    CHECK(spectral::divergence_ratio(e.block("u")) <= 1e-10);
    CHECK(std::abs(e.block("u").at(0, 0)) == 0.0);
  }
}

TEST_CASE("transport and coupling terms are energy neutral") {
  std::mt19937_64 rng(33);
  const SystemParams p = all_params();
  for (SystemId id : {SystemId::micropolar, SystemId::navier_stokes, SystemId::magneto_micropolar,
                      SystemId::tropical, SystemId::generic_parabolic}) {
    CAPTURE(to_string(id));
    for (int trial = 0; trial < 10; ++trial) {
      const State s = testing::random_state(id, kLat, kBand, rng);
      const State e = explicit_part(s, p);
      CHECK(std::abs(pairing(e, s)) <= 1e-8 * scale(e, s));
    }
  }
}

TEST_CASE("magneto-micropolar") {
  std::mt19937_64 rng(34);
  SystemParams p = all_params();
  State m = testing::random_state(SystemId::magneto_micropolar, kLat, kBand, rng);
  m.block("b").set_zero();
  State mp = make_state(SystemId::micropolar, kLat);
  mp.block("u") = m.block("u");
  mp.block("w") = m.block("w");
  const State a = rhs(m, p).total();
  const State b = rhs(mp, p).total();
  CHECK(testing::rel_diff(b.block("u"), a.block("u")) < 1e-14);
  CHECK(testing::rel_diff(b.block("w"), a.block("w")) < 1e-14);
  CHECK(hs_norm(a.block("b"), 0.0) == 0.0);

  // u = 0: b only diffuses
  State d = testing::random_state(SystemId::magneto_micropolar, kLat, kBand, rng);
  d.block("u").set_zero();
  const RhsSplit rd = rhs(d, p);
  CHECK(hs_norm(rd.explicit_part.block("b"), 0.0) == 0.0);
  SpectralField diff = spectral::laplacian(d.block("b"));
  diff *= p.magnetic_nu;
  CHECK(testing::rel_diff(diff, rd.stiff_linear.block("b")) < 1e-13);

  // <(b.grad) b, u> + <(b.grad) u, b> = 0: the b-dependent parts of the explicit terms
  for (int trial = 0; trial < 10; ++trial) {
    const State s = testing::random_state(SystemId::magneto_micropolar, kLat, kBand, rng);
    State nob = s;
    nob.block("b").set_zero();
    State e = explicit_part(s, p);
    e -= explicit_part(nob, p);
    // what remains is P[(b.grad) b] in u and -(u.grad) b + (b.grad) u in b; the transport
    // part pairs to zero on its own, so the sum pairs to zero
    CHECK(std::abs(pairing(e, s)) <= 1e-8 * scale(e, s));
  }
}

TEST_CASE("tropical climate") {
  std::mt19937_64 rng(35);
  const SystemParams p = all_params();
  State t = testing::random_state(SystemId::tropical, kLat, kBand, rng);
  t.block("v").set_zero();
  t.block("theta").set_zero();
  State ns = make_state(SystemId::navier_stokes, kLat);
  ns.block("u") = t.block("u");
  SystemParams q = p;
  q.mu = p.tropical.mu;
  CHECK(testing::rel_diff(rhs(ns, q).total().block("u"), rhs(t, p).total().block("u")) < 1e-14);

  // u = 0, single mode v: theta source is -div v
  State s = make_state(SystemId::tropical, kLat);
  s.block("v") = testing::cosine_mode(kLat, 3, 0, {2, 0, 0}, 1.0);
  const RhsSplit r = rhs(s, p);
  SpectralField src = spectral::divergence(s.block("v"));
  src *= -1.0;
  CHECK(testing::rel_diff(src, r.total().block("theta")) < 1e-14);

  for (int trial = 0; trial < 10; ++trial) {
    const State x = testing::random_state(SystemId::tropical, kLat, kBand, rng);
    const double direct = inner(spectral::gradient(x.block("theta")), x.block("v")) +
                          inner(spectral::divergence(x.block("v")), x.block("theta"));
    CHECK(std::abs(direct) <= 1e-8 * hs_norm(x.block("theta"), 1.0) * hs_norm(x.block("v"), 0.0));
    // the symbol's coupling pair is skew: <A x, x> is pure dissipation
    const State ax = linear::apply_symbol(x, p);
    CHECK(std::abs(pairing(ax, x) + dissipation(x, p)) <= 1e-8 * dissipation(x, p));
  }
}

TEST_CASE("rotating Navier-Stokes") {
  std::mt19937_64 rng(36);
  SystemParams p = all_params();
  State s = testing::random_state(SystemId::rotating_ns, kLat, kBand, rng);
  SystemParams still = p;
  still.omega = 0.0;
  State ns = make_state(SystemId::navier_stokes, kLat);
  ns.block("u") = s.block("u");
  CHECK(testing::rel_diff(rhs(ns, p).total(), rhs(State{SystemId::rotating_ns, 0.0, ns.blocks}, still).total()) <
        1e-14);

  for (int trial = 0; trial < 10; ++trial) {
    const State x = testing::random_state(SystemId::rotating_ns, kLat, kBand, rng);
    State cor = linear::apply_symbol(x, p);
    cor -= linear::apply_symbol(x, still);
    CHECK(std::abs(pairing(cor, x)) <= 1e-10 * scale(cor, x));
  }

  // horizontal u = cos(z) e_x along e3: -omega J u = -omega cos(z) e_y
  State h = make_state(SystemId::rotating_ns, kLat);
  h.block("u") = testing::cosine_mode(kLat, 3, 0, {0, 0, 1}, 1.0);
  State cor = linear::apply_symbol(h, p);
  cor -= linear::apply_symbol(h, still);
  SpectralField expect = testing::cosine_mode(kLat, 3, 1, {0, 0, 1}, -p.omega);
  CHECK(testing::rel_diff(expect, cor.block("u")) < 1e-14);
}

TEST_CASE("generic dissipative linear system") {
  SystemParams p;
  p.generic_gamma_exponent = 1.0;
  const State zero = make_state(SystemId::generic_linear, kLat);
  std::mt19937_64 rng(37);
  State s = testing::random_state(SystemId::generic_linear, kLat, kBand, rng);
  CHECK(state_hs_norm(explicit_part(s, p), 0.0) == 0.0);
  const State e = linear::evolve_linear(s, 0.4, p);
  CHECK(testing::rel_diff(linear::heat_semigroup(s.block("v"), 0.4, 1.0), e.block("v")) < 1e-12);

  p.generic_gamma_exponent = 0.5;
  p.generic_ci = {0.5, 1.5, 3.0};
  for (int c = 0; c < 3; ++c) {
    State m = zero;
    m.block("v") = testing::cosine_mode(kLat, 3, c, {1, 2, 2}, 1.0);  // |xi| = 3
    const State ev = linear::evolve_linear(m, 0.7, p);
    const double rate = -std::log(ev.block("v").at(c, kLat.index(1, 2, 2)).real() / 0.5) / 0.7;
    CHECK(std::abs(rate - p.generic_ci[c] * 3.0) <= 1e-10 * p.generic_ci[c] * 3.0);
  }

  SystemParams bad;
  bad.generic_ci = {1.0, 0.0, 1.0};
  CHECK_THROWS(validate(bad, SystemId::generic_linear));
}

TEST_CASE("generic parabolic system") {
  SystemParams p;
  p.parabolic_c = 1.0;
  for (int n : {2, 3, 4}) {
    p.parabolic_components = n;
    std::mt19937_64 rng(38 + n);
    const State s = testing::random_state(SystemId::generic_parabolic, kLat, kBand, rng, n);
    const State e = explicit_part(s, p);
    CHECK(std::abs(pairing(e, s)) <= 1e-8 * scale(e, s));
    const RhsSplit r = rhs(s, p);
    SpectralField heat = spectral::laplacian(s.block("u"));
    CHECK(testing::rel_diff(heat, r.stiff_linear.block("u")) < 1e-14);
  }
  CHECK_NOTHROW(validate_flux(find_flux("gradient_quadratic"), 3));

  FluxModel cubic;
  cubic.name = "cubic";
  cubic.flux = [](std::span<const double> u, int, std::span<double> f) {
    double u2 = 0.0;
    for (double v : u) u2 += v * v;
    for (std::size_t c = 0; c < u.size(); ++c) f[c] = u2 * u[c];
  };
  cubic.jacobian = [](std::span<const double> u, int, std::span<double> a) {
    const std::size_t n = u.size();
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) a[r * n + c] = 2.0 * u[r] * u[c];
  };
  CHECK_THROWS_AS(validate_flux(cubic, 3), std::invalid_argument);

  FluxModel skewed = find_flux("gradient_quadratic");
  skewed.name = "skewed";
  skewed.jacobian = [](std::span<const double> u, int, std::span<double> a) {
    const std::size_t n = u.size();
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) a[r * n + c] = r < c ? u[0] : 0.0;
  };
  CHECK_THROWS_AS(validate_flux(skewed, 3), std::invalid_argument);

  register_flux(skewed);
  CHECK(find_flux("skewed").name == "skewed");
}

TEST_CASE("pressure recovery") {
  State z = make_state(SystemId::micropolar, kLat);
  const SystemParams p;
  CHECK(hs_norm(pressure_recover(z, p), 0.0) == 0.0);

  // u = A cos(y) e_x + B cos(x) e_y gives p = A B sin(x) sin(y)
  const double a = 0.7, b = -1.2;
  z.block("u") = testing::cosine_mode(kLat, 3, 0, {0, 1, 0}, a) + testing::cosine_mode(kLat, 3, 1, {1, 0, 0}, b);
  GridField ref{kLat, 1, aligned_vector<double>(kLat.size())};
  for (std::size_t i = 0; i < kLat.size(); ++i) {
    const auto [ix, iy, iz] = kLat.unravel(i);
    ref.values[i] = a * b * std::sin(ix * kLat.cell()) * std::sin(iy * kLat.cell());
  }
  const SpectralField pr = pressure_recover(z, p);
  CHECK(testing::rel_diff(spectral::from_physical(ref), pr) < 1e-12);

  // Delta p = -d_i d_j (u_i u_j) with the products from the padded oracle
  std::mt19937_64 rng(39);
  const State s = testing::random_state(SystemId::micropolar, kLat, kBand, rng);
  const SpectralField ps = pressure_recover(s, p);
  SpectralField res = spectral::laplacian(ps);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      spectral::MultiIndex beta{0, 0, 0};
      beta[i] += 1;
      beta[j] += 1;
      res += spectral::dealias(spectral::derivative(oracle::padded_convolution(s.block("u"), i, s.block("u"), j), beta));
    }
  spectral::zero_mean(res);
  CHECK(hs_norm(res, 0.0) <= 1e-10 * hs_norm(spectral::laplacian(ps), 0.0));
  CHECK(spectral::hermitian_defect(ps) < 1e-12);
}

TEST_CASE("cross-coupling Young bound") {
  std::mt19937_64 rng(40);
  for (int trial = 0; trial < 10; ++trial) {
    const State s = testing::random_state(SystemId::micropolar, kLat, kBand, rng);
    const SpectralField cu = spectral::curl(s.block("u"));
    for (int m = 0; m <= 2; ++m) {
      double pair = 0.0;
      if (m == 0) {
        pair = inner(s.block("w"), cu);
      } else {
        for (const auto& [beta, wgt] : spectral::multi_indices(m))
          pair += wgt * inner(spectral::derivative(s.block("w"), beta), spectral::derivative(cu, beta));
      }
      const double bound = std::pow(hs_norm(s.block("w"), m), 2) + std::pow(hs_norm(s.block("u"), m + 1), 2);
      CHECK(std::abs(2.0 * pair) <= bound * (1.0 + 1e-12));
    }
  }
}

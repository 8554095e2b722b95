#include <cmath>

#include "decaylab/fft.hpp"
#include "decaylab/spectral_ops.hpp"
#include "doctest.h"
#include "oracle.hpp"
#include "support.hpp"

using namespace decaylab;
using namespace decaylab::spectral;
using testing::cosine_mode;

TEST_CASE("make_lattice") {
  const Lattice a = make_lattice(8, 2.0 * M_PI);
  for (int i = 0; i < 8; ++i) CHECK(a.wavenumber(i) == doctest::Approx(a.signed_freq(i)).epsilon(1e-15));
  CHECK(a.signed_freq(4) == -4);
  CHECK(a.signed_freq(3) == 3);
  int zeros = 0;
  for (std::size_t m = 0; m < a.size(); ++m) zeros += a.xi2(m) == 0.0;
  CHECK(zeros == 1);

  const Lattice b = make_lattice(64, 100.0);
  CHECK(b.wavenumber(1) == doctest::Approx(2.0 * M_PI / 100.0));

  CHECK_THROWS(make_lattice(6, 1.0));
  CHECK_THROWS(make_lattice(8, 0.0));
  CHECK_THROWS(make_lattice(8, -1.0));
  CHECK_THROWS(make_lattice(1024, 1.0));
}

TEST_CASE("transform round trip") {
  const Lattice lat = make_lattice(16, 5.0);
  std::mt19937_64 rng(1);
  const SpectralField f = random_band_limited(lat, 3, 5, rng);
  const SpectralField g = from_physical(to_physical(f));
  CHECK(testing::rel_diff(f, g) < 1e-12);
  CHECK(hermitian_defect(f) < 1e-14);
}

TEST_CASE("derivative") {
  const Lattice lat = make_lattice(16, 7.0);
  SpectralField c(lat, 1);
  c.at(0, 0) = 2.5;
  CHECK(hs_norm(derivative(c, {1, 0, 0}), 0.0) == 0.0);
  CHECK(hs_norm(derivative(c, {0, 2, 1}), 0.0) == 0.0);

  // sin(2 pi x / L) -> (2 pi / L) cos(2 pi x / L)
  SpectralField s(lat, 1);
  s.at(0, lat.index(1, 0, 0)) = cplx(0.0, -0.5);
  s.at(0, lat.index(15, 0, 0)) = cplx(0.0, 0.5);
  const GridField d = to_physical(derivative(s, {1, 0, 0}));
  const double kap = 2.0 * M_PI / lat.box_length;
  double err = 0.0;
  for (int i = 0; i < 16; ++i) {
    const double x = i * lat.cell();
    err = std::max(err, std::abs(d.values[lat.index(i, 3, 5)] - kap * std::cos(kap * x)));
  }
  CHECK(err < 1e-13);

  std::mt19937_64 rng(2);
  const SpectralField f = random_band_limited(lat, 1, 5, rng);
  const SpectralField a = derivative(derivative(f, {1, 0, 0}), {0, 1, 0});
  const SpectralField b = derivative(f, {1, 1, 0});
  CHECK(hs_norm(a - b, 0.0) <= 1e-12 * hs_norm(b, 0.0));
  CHECK(hermitian_defect(derivative(f, {2, 1, 0})) < 1e-12);
}

TEST_CASE("hs_norm") {
  const Lattice lat = make_lattice(16, 3.0);
  std::mt19937_64 rng(3);
  const SpectralField f = random_band_limited(lat, 3, 5, rng);
  CHECK(hs_norm(f, 0.0) == doctest::Approx(lp_norm(f, 2.0)).epsilon(1e-10));

  // one conjugate pair of amplitude a/2 at xi0: ||D^2||^2 = L^3 |xi0|^4 a^2 / 2
  const SpectralField m = cosine_mode(lat, 1, 0, {1, 2, 0}, 3.0);
  const double xi2 = lat.dk() * lat.dk() * 5.0;
  CHECK(hs_norm(m, 2.0) == doctest::Approx(std::sqrt(lat.volume() * xi2 * xi2 * 9.0 / 2.0)).epsilon(1e-13));

  for (int trial = 0; trial < 20; ++trial) {
    const SpectralField g = random_band_limited(lat, 2, 6, rng);
    const double h1 = hs_norm(g, 1.0);
    CHECK(h1 * h1 <= hs_norm(g, 0.0) * hs_norm(g, 2.0) * (1.0 + 1e-12));
  }

  // multinomial D^m convention agrees with the |xi|^{2m} weight
  for (int order = 1; order <= 3; ++order) {
    double sum = 0.0;
    for (const auto& [beta, w] : multi_indices(order)) {
      const double v = hs_norm(derivative(f, beta), 0.0);
      sum += w * v * v;
    }
    CHECK(std::sqrt(sum) == doctest::Approx(hs_norm(f, order)).epsilon(1e-8));
  }
}

TEST_CASE("lp_norm") {
  const Lattice lat = make_lattice(16, 4.0);
  SpectralField c(lat, 1);
  c.at(0, 0) = -1.75;
  CHECK(lp_norm(c, kInfinity) == doctest::Approx(1.75).epsilon(1e-14));

  // Gaussian bump: ||f||_inf <= ||f||_2^{1/4} ||D^2 f||_2^{3/4}
  const Lattice big = make_lattice(32, 20.0);
  GridField g{big, 1, aligned_vector<double>(big.size())};
  for (std::size_t i = 0; i < big.size(); ++i) {
    const auto [a, b, e] = big.unravel(i);
    const double x = a * big.cell() - 10.0, y = b * big.cell() - 10.0, z = e * big.cell() - 10.0;
    g.values[i] = std::exp(-(x * x + y * y + z * z) / 4.0);
  }
  const SpectralField f = from_physical(g);
  const double lhs = lp_norm(f, kInfinity, 2);
  const double rhs = std::pow(hs_norm(f, 0.0), 0.25) * std::pow(hs_norm(f, 2.0), 0.75);
  CHECK(lhs <= rhs);
  CHECK(derivative_lp_norm(f, 1, 2.0) == doctest::Approx(hs_norm(f, 1.0)).epsilon(1e-10));
}

TEST_CASE("leray projection") {
  const Lattice lat = make_lattice(16, 6.0);
  std::mt19937_64 rng(4);
  const SpectralField phi = random_band_limited(lat, 1, 5, rng);
  CHECK(hs_norm(leray_project(gradient(phi)), 0.0) <= 1e-13 * hs_norm(gradient(phi), 0.0));

  const SpectralField v = random_band_limited(lat, 3, 5, rng);
  const SpectralField w = random_band_limited(lat, 3, 5, rng);
  const SpectralField pv = leray_project(v);
  CHECK(divergence_ratio(pv) <= 1e-10);
  CHECK(testing::rel_diff(pv, leray_project(pv)) <= 1e-12);
  CHECK(std::abs(inner(pv, w) - inner(v, leray_project(w))) <= 1e-10 * hs_norm(v, 0.0) * hs_norm(w, 0.0));
}

TEST_CASE("curl and divergence identities") {
  const Lattice lat = make_lattice(16, 6.0);
  std::mt19937_64 rng(5);
  const SpectralField phi = random_band_limited(lat, 1, 5, rng);
  const SpectralField v = random_band_limited(lat, 3, 5, rng);
  CHECK(hs_norm(curl(gradient(phi)), 0.0) <= 1e-12 * hs_norm(gradient(phi), 1.0));
  CHECK(hs_norm(divergence(curl(v)), 0.0) <= 1e-12 * hs_norm(v, 2.0));
  const SpectralField lhs = curl(curl(v));
  const SpectralField rhs = gradient(divergence(v)) - laplacian(v);
  CHECK(hs_norm(lhs - rhs, 0.0) <= 1e-12 * hs_norm(v, 2.0));

  // curl of a single transverse mode: curl(cos(k y) e_x) = k sin(k y) e_z
  const SpectralField m = cosine_mode(lat, 3, 0, {0, 1, 0}, 1.0);
  const GridField c = to_physical(curl(m));
  const double k = lat.dk();
  CHECK(c.component(2)[lat.index(0, 2, 0)] == doctest::Approx(k * std::sin(k * 2 * lat.cell())).epsilon(1e-12));
}

TEST_CASE("dealias") {
  const Lattice lat = make_lattice(16, 2.0 * M_PI);
  std::mt19937_64 rng(6);
  const SpectralField band = random_band_limited(lat, 2, 5, rng);
  CHECK(testing::rel_diff(band, dealias(band)) == 0.0);

  SpectralField noise(lat, 1);
  std::normal_distribution<double> gauss;
  for (auto& c : noise.data()) c = cplx(gauss(rng), gauss(rng));
  const SpectralField d = dealias(noise);
  for (std::size_t m = 0; m < lat.size(); ++m) {
    const bool kept = lat.max_abs_freq(m) <= 16 / 3;
    CHECK(is_retained(lat, m) == kept);
    CHECK(d.at(0, m) == (kept ? noise.at(0, m) : cplx(0.0, 0.0)));
  }

  // pseudo-spectral product of dealiased fields equals the padded product
  const SpectralField f = random_band_limited(lat, 1, 5, rng);
  const SpectralField g = random_band_limited(lat, 1, 5, rng);
  GridField pf = to_physical(f);
  const GridField pg = to_physical(g);
  for (std::size_t i = 0; i < pf.values.size(); ++i) pf.values[i] *= pg.values[i];
  const SpectralField prod = dealias(from_physical(pf));
  const SpectralField ref = dealias(oracle::padded_convolution(f, 0, g, 0));
  double err = 0.0, scale = 0.0;
  for (std::size_t m = 0; m < lat.size(); ++m) {
    err = std::max(err, std::abs(prod.at(0, m) - ref.at(0, m)));
    scale = std::max(scale, std::abs(ref.at(0, m)));
  }
  CHECK(err <= 1e-12 * scale);
}

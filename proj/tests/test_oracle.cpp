#include <cmath>

#include "doctest.h"
#include "oracle.hpp"
#include "support.hpp"

using namespace decaylab;
using testing::cosine_mode;

TEST_CASE("dense exponential: zero time and diagonal generator") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Random(12, 12);
  CHECK((oracle::dense_expm(a, 0.0) - Eigen::MatrixXd::Identity(12, 12)).norm() == 0.0);

  Eigen::VectorXd d(4);
  d << -1.0, 0.5, -3.0, 0.0;
  const Eigen::MatrixXd e = oracle::dense_expm(d.asDiagonal().toDenseMatrix(), 0.7);
  for (int i = 0; i < 4; ++i) CHECK(e(i, i) == doctest::Approx(std::exp(0.7 * d[i])).epsilon(1e-14));
  CHECK(std::abs(e(0, 1)) < 1e-15);
}

TEST_CASE("fourier differentiation matrices are exact on resolved modes") {
  const int n = 8;
  const double len = 3.0;
  const Eigen::MatrixXd d1 = oracle::fourier_d1(n, len);
  const Eigen::MatrixXd d2 = oracle::fourier_d2(n, len);
  Eigen::VectorXd f(n), df(n), d2f(n);
  const double kap = 2.0 * M_PI * 3.0 / len;
  for (int j = 0; j < n; ++j) {
    const double x = j * len / n;
    f[j] = std::sin(kap * x);
    df[j] = kap * std::cos(kap * x);
    d2f[j] = -kap * kap * std::sin(kap * x);
  }
  CHECK((d1 * f - df).norm() < 1e-12 * df.norm());
  CHECK((d2 * f - d2f).norm() < 1e-12 * d2f.norm());
}

TEST_CASE("dense evolution at t = 0 is the identity") {
  const Lattice lat = make_lattice(8, 2.0 * M_PI);
  std::mt19937_64 rng(3);
  const State s = testing::random_state(SystemId::micropolar, lat, 2, rng);
  const State e = oracle::dense_expm_evolve(s, 0.0, SystemParams{});
  CHECK(testing::rel_diff(s, e) < 1e-13);
}

TEST_CASE("padded convolution of two cosines gives sum and difference modes") {
  const Lattice lat = make_lattice(16, 2.0 * M_PI);
  const SpectralField f = cosine_mode(lat, 1, 0, {1, 0, 0}, 2.0);
  const SpectralField g = cosine_mode(lat, 1, 0, {0, 2, 0}, 3.0);
  const SpectralField h = oracle::padded_convolution(f, 0, g, 0);
  // 2cos(x) 3cos(2y) = 3cos(x+2y) + 3cos(x-2y): amplitude 3/2 on each of 4 modes
  CHECK(std::abs(h.at(0, lat.index(1, 2, 0)) - 1.5) < 1e-13);
  CHECK(std::abs(h.at(0, lat.index(1, 14, 0)) - 1.5) < 1e-13);
  CHECK(std::abs(h.at(0, lat.index(15, 2, 0)) - 1.5) < 1e-13);
  CHECK(std::abs(h.at(0, lat.index(15, 14, 0)) - 1.5) < 1e-13);
  double total = 0.0;
  for (std::size_t i = 0; i < lat.size(); ++i) total += std::norm(h.at(0, i));
  CHECK(total == doctest::Approx(4 * 2.25).epsilon(1e-12));

  SpectralField zero(lat, 1);
  CHECK(spectral::hs_norm(oracle::padded_convolution(f, 0, zero, 0), 0.0) == 0.0);
}

TEST_CASE("grid search reference values") {
  CHECK(oracle::grid_search_k(0.0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(oracle::grid_search_k(0.0, 1) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-7));
}

TEST_CASE("heat Gaussian closed form") {
  oracle::GaussianProfile g{1.5, 2.0, false};
  // t = 0: ||a exp(-|x|^2/(2 s^2))||^2 = |a|^2 (pi s^2)^{3/2}
  CHECK(oracle::heat_gaussian_norm(0.0, 1.0, g) ==
        doctest::Approx(2.0 * std::pow(M_PI * 1.5 * 1.5, 0.75)).epsilon(1e-13));
  // doubling c is a time dilation
  CHECK(oracle::heat_gaussian_norm(3.0, 2.0, g) ==
        doctest::Approx(oracle::heat_gaussian_norm(6.0, 1.0, g)).epsilon(1e-14));
  // t^{3/4} norm tends to (2pi s^2)^{3/2} |a| (pi^{1/2}/4 * 4pi)^{1/2} (2pi)^{-3/2} 2^{-3/4}
  const double lim = std::pow(2.0 * M_PI * 2.25, 1.5) * 2.0 *
                     std::sqrt(std::sqrt(M_PI) / 4.0 * 4.0 * M_PI / std::pow(2.0 * M_PI, 3.0)) *
                     std::pow(2.0, -0.75);
  CHECK(oracle::heat_gaussian_norm(1e8, 1.0, g) * std::pow(1e8, 0.75) ==
        doctest::Approx(lim).epsilon(1e-6));
  // Leray projection keeps 2/3 of the energy of a constant-direction Gaussian
  oracle::GaussianProfile p = g;
  p.solenoidal = true;
  CHECK(oracle::heat_gaussian_norm(1.0, 1.0, p) ==
        doctest::Approx(std::sqrt(2.0 / 3.0) * oracle::heat_gaussian_norm(1.0, 1.0, g)).epsilon(1e-14));
}

TEST_CASE("Lame per-mode exponential on a single longitudinal mode") {
  const Lattice lat = make_lattice(8, 2.0 * M_PI);
  SpectralField w = cosine_mode(lat, 3, 0, {1, 0, 0}, 1.0);
  const SpectralField e = oracle::lame_modewise_expm(w, 0.3, 1.0, 2.0);
  CHECK(e.at(0, lat.index(1, 0, 0)).real() == doctest::Approx(0.5 * std::exp(-3.0 * 0.3)).epsilon(1e-13));
}

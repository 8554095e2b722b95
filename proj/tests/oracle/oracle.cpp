#include "oracle.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unsupported/Eigen/MatrixFunctions>

#include "decaylab/fft.hpp"

namespace decaylab::oracle {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

int signed_k(int idx, int n) { return idx < n / 2 ? idx : idx - n; }

MatrixXd kron(const MatrixXd& a, const MatrixXd& b) {
  MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Grid samples of one component (real part of the synthesis).
VectorXd synthesize(const SpectralField& f, int c) {
  const int n = f.lattice().n;
  aligned_vector<cplx> buf(f.component(c).begin(), f.component(c).end());
  fft::backward(buf, n);
  VectorXd out(static_cast<Eigen::Index>(buf.size()));
  for (std::size_t x = 0; x < buf.size(); ++x) out[static_cast<Eigen::Index>(x)] = buf[x].real();
  return out;
}

void analyze(const VectorXd& v, SpectralField& f, int c) {
  const int n = f.lattice().n;
  aligned_vector<cplx> buf(static_cast<std::size_t>(v.size()));
  for (Eigen::Index x = 0; x < v.size(); ++x) buf[static_cast<std::size_t>(x)] = v[x];
  fft::forward(buf, n);
  const double inv = 1.0 / static_cast<double>(buf.size());
  auto dst = f.component(c);
  for (std::size_t x = 0; x < buf.size(); ++x) dst[x] = buf[x] * inv;
}

}  // namespace

MatrixXd dense_expm(const MatrixXd& a, double t) {
  const MatrixXd at = a * t;
  return at.exp();
}

MatrixXd fourier_d1(int n, double box_length) {
  const double dk = 2.0 * std::numbers::pi / box_length;
  const double h = box_length / n;
  MatrixXd d = MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) {
        if (k == n / 2) continue;
        const double kap = dk * signed_k(k, n);
        // Re(i kap e^{i kap (x_j - x_l)}) = -kap sin(kap (x_j - x_l))
        s += -kap * std::sin(kap * (j - l) * h);
      }
      d(j, l) = s / n;
    }
  return d;
}

MatrixXd fourier_d2(int n, double box_length) {
  const double dk = 2.0 * std::numbers::pi / box_length;
  const double h = box_length / n;
  MatrixXd d = MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) {
        const double kap = dk * signed_k(k, n);
        s += -kap * kap * std::cos(kap * (j - l) * h);
      }
      d(j, l) = s / n;
    }
  return d;
}

MatrixXd micropolar_generator(const Lattice& lat, const SystemParams& p) {
  const int n = lat.n;
  if (n > 8) throw std::invalid_argument("dense generator limited to n <= 8");
  const MatrixXd id = MatrixXd::Identity(n, n);
  const MatrixXd d1 = fourier_d1(n, lat.box_length);
  const MatrixXd d2 = fourier_d2(n, lat.box_length);
  const MatrixXd dx[3] = {kron(d1, kron(id, id)), kron(id, kron(d1, id)), kron(id, kron(id, d1))};
  const MatrixXd lap = kron(d2, kron(id, id)) + kron(id, kron(d2, id)) + kron(id, kron(id, d2));
  const Eigen::Index m = static_cast<Eigen::Index>(lat.size());
  const MatrixXd eye = MatrixXd::Identity(m, m);

  MatrixXd a = MatrixXd::Zero(6 * m, 6 * m);
  auto blk = [&](int r, int c) { return a.block(r * m, c * m, m, m); };
  // curl: (curl v)_r = d_{r+1} v_{r+2} - d_{r+2} v_{r+1}
  for (int r = 0; r < 3; ++r) {
    const int r1 = (r + 1) % 3, r2 = (r + 2) % 3;
    blk(r, r) += (p.mu + p.chi) * lap;
    blk(r, 3 + r2) += p.chi * dx[r1];
    blk(r, 3 + r1) -= p.chi * dx[r2];
    blk(3 + r, 3 + r) += p.gamma * lap - 2.0 * p.chi * eye;
    for (int c = 0; c < 3; ++c) blk(3 + r, 3 + c) += p.kappa * dx[r] * dx[c];
    blk(3 + r, r2) += p.chi * dx[r1];
    blk(3 + r, r1) -= p.chi * dx[r2];
  }
  return a;
}

namespace {

void check_dense_input(const State& s0) {
  if (s0.system != SystemId::micropolar) throw std::invalid_argument("dense oracle is micropolar only");
  if (s0.lattice().n > 8) throw std::invalid_argument("dense oracle limited to n <= 8");
}

VectorXd to_grid_vector(const State& s0) {
  const Eigen::Index m = static_cast<Eigen::Index>(s0.lattice().size());
  VectorXd v(6 * m);
  for (int c = 0; c < 3; ++c) {
    v.segment(c * m, m) = synthesize(s0.block("u"), c);
    v.segment((3 + c) * m, m) = synthesize(s0.block("w"), c);
  }
  return v;
}

State from_grid_vector(const VectorXd& v, const State& like, double time) {
  const Eigen::Index m = static_cast<Eigen::Index>(like.lattice().size());
  State s = like;
  s.time = time;
  for (int c = 0; c < 3; ++c) {
    analyze(v.segment(c * m, m), s.block("u"), c);
    analyze(v.segment((3 + c) * m, m), s.block("w"), c);
  }
  return s;
}

}  // namespace

State dense_expm_evolve(const State& s0, double t, const SystemParams& p) {
  check_dense_input(s0);
  const VectorXd out = dense_expm(micropolar_generator(s0.lattice(), p), t) * to_grid_vector(s0);
  return from_grid_vector(out, s0, s0.time + t);
}

std::vector<State> dense_expm_trajectory(const State& s0, double h, const std::vector<int>& steps,
                                         const SystemParams& p) {
  check_dense_input(s0);
  const MatrixXd e = dense_expm(micropolar_generator(s0.lattice(), p), h);
  VectorXd v = to_grid_vector(s0);
  std::vector<State> out;
  int done = 0;
  for (int k : steps) {
    if (k < done) throw std::invalid_argument("steps must be ascending");
    for (; done < k; ++done) v = e * v;
    out.push_back(from_grid_vector(v, s0, s0.time + k * h));
  }
  return out;
}

SpectralField padded_convolution(const SpectralField& f, int cf, const SpectralField& g, int cg) {
  const Lattice& lat = f.lattice();
  const int n = lat.n;
  if (n > 32) throw std::invalid_argument("padded convolution limited to n <= 32");
  const int n2 = 2 * n;
  const std::size_t big = static_cast<std::size_t>(n2) * n2 * n2;
  auto pad = [&](const SpectralField& h, int c) {
    aligned_vector<cplx> buf(big, cplx(0.0, 0.0));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          const int a = (signed_k(i, n) + n2) % n2;
          const int b = (signed_k(j, n) + n2) % n2;
          const int e = (signed_k(k, n) + n2) % n2;
          buf[(static_cast<std::size_t>(a) * n2 + b) * n2 + e] = h.at(c, lat.index(i, j, k));
        }
    fft::backward(buf, n2);
    return buf;
  };
  aligned_vector<cplx> pf = pad(f, cf);
  const aligned_vector<cplx> pg = pad(g, cg);
  for (std::size_t x = 0; x < big; ++x) pf[x] = pf[x].real() * pg[x].real();
  fft::forward(pf, n2);
  const double inv = 1.0 / static_cast<double>(big);
  SpectralField out(lat, 1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const int a = (signed_k(i, n) + n2) % n2;
        const int b = (signed_k(j, n) + n2) % n2;
        const int e = (signed_k(k, n) + n2) % n2;
        out.at(0, lat.index(i, j, k)) = pf[(static_cast<std::size_t>(a) * n2 + b) * n2 + e] * inv;
      }
  return out;
}

double grid_search_k(double alpha, int m) {
  constexpr int points = 1000000;
  const double lo = std::log(1e-8), hi = std::log(1e8);
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < points; ++i) {
    const double delta = std::exp(lo + (hi - lo) * i / (points - 1));
    double prod = 1.0 / std::sqrt(delta);
    for (int j = 0; j <= m; ++j) prod *= std::sqrt(alpha + 0.5 * j + delta);
    best = std::min(best, prod);
  }
  return best;
}

double heat_gaussian_norm(double t, double c, const GaussianProfile& g) {
  const double pi = std::numbers::pi;
  const double s2 = g.sigma * g.sigma;
  const double ghat0_sq = std::pow(2.0 * pi * s2, 3.0);       // |g^(0)|^2
  const double angular = g.solenoidal ? 8.0 * pi / 3.0 : 4.0 * pi;
  const double radial = std::sqrt(pi) / 4.0 * std::pow(s2 + 2.0 * c * t, -1.5);
  const double sq = ghat0_sq * g.amplitude * g.amplitude * angular * radial / std::pow(2.0 * pi, 3.0);
  return std::sqrt(sq);
}

SpectralField lame_modewise_expm(const SpectralField& w0, double t, double gamma, double kappa) {
  const Lattice& lat = w0.lattice();
  const int n = lat.n;
  const double dk = 2.0 * std::numbers::pi / lat.box_length;
  SpectralField out(lat, 3);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const std::size_t idx = lat.index(i, j, k);
        const int f[3] = {signed_k(i, n), signed_k(j, n), signed_k(k, n)};
        Eigen::Vector3d xi, xo;
        for (int a = 0; a < 3; ++a) {
          xi[a] = dk * f[a];
          xo[a] = (f[a] == -n / 2) ? 0.0 : xi[a];
        }
        const Eigen::Matrix3d gen =
            -(gamma * xi.squaredNorm() * Eigen::Matrix3d::Identity() + kappa * xo * xo.transpose()) * t;
        const Eigen::Matrix3d e = gen.exp();
        Eigen::Vector3cd v;
        for (int a = 0; a < 3; ++a) v[a] = w0.at(a, idx);
        const Eigen::Vector3cd r = e.cast<cplx>() * v;
        for (int a = 0; a < 3; ++a) out.at(a, idx) = r[a];
      }
  return out;
}

}  // namespace decaylab::oracle

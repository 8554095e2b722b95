#include "decaylab/spectral_ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "decaylab/detail/wave_table.hpp"
#include "decaylab/fft.hpp"

namespace decaylab::spectral {

using detail::for_each_mode;
using detail::WaveTable;

namespace {

constexpr cplx I{0.0, 1.0};

void require_vector(const SpectralField& v) {
  if (v.components() != 3) throw std::invalid_argument("operation needs a 3-component field");
}

// Positions of one lattice frequency on a refined grid. A Nyquist frequency
// splits into two images (+n/2 and -n/2) carrying half the amplitude each.
struct Image {
  int index;
  double weight;
};

int images_of(int freq, int n, int m, Image out[2]) {
  if (m == n) {
    out[0] = {freq < 0 ? freq + n : freq, 1.0};
    return 1;
  }
  if (freq == -n / 2) {
    out[0] = {n / 2, 0.5};
    out[1] = {m - n / 2, 0.5};
    return 2;
  }
  out[0] = {freq < 0 ? freq + m : freq, 1.0};
  return 1;
}

}  // namespace

GridField to_physical(const SpectralField& f, int refine) {
  if (refine < 1) throw std::invalid_argument("refine must be >= 1");
  const Lattice& lat = f.lattice();
  const int n = lat.n;
  const int m = n * refine;
  const Lattice fine = make_lattice_unchecked(m, lat.box_length);
  GridField g{fine, f.components(), aligned_vector<double>(fine.size() * f.components())};
  aligned_vector<cplx> buffer(fine.size());
  const WaveTable wt(lat);

  for (int c = 0; c < f.components(); ++c) {
    std::fill(buffer.begin(), buffer.end(), cplx{});
    auto src = f.component(c);
    if (refine == 1) {
      std::copy(src.begin(), src.end(), buffer.begin());
    } else {
      for_each_mode(lat, [&](std::size_t idx, int i, int j, int k) {
        const cplx v = src[idx];
        if (v == cplx{}) return;
        Image a[2], b[2], d[2];
        const int na = images_of(wt.freq[i], n, m, a);
        const int nb = images_of(wt.freq[j], n, m, b);
        const int nd = images_of(wt.freq[k], n, m, d);
        for (int x = 0; x < na; ++x)
          for (int y = 0; y < nb; ++y)
            for (int z = 0; z < nd; ++z)
              buffer[fine.index(a[x].index, b[y].index, d[z].index)] +=
                  v * (a[x].weight * b[y].weight * d[z].weight);
      });
    }
    fft::backward(buffer, m);
    auto dst = g.component(c);
    for (std::size_t i = 0; i < buffer.size(); ++i) dst[i] = buffer[i].real();
  }
  return g;
}

SpectralField from_physical(const GridField& g) {
  const Lattice& lat = g.lattice;
  SpectralField f(lat, g.components);
  aligned_vector<cplx> buffer(lat.size());
  const double scale = 1.0 / static_cast<double>(lat.size());
  for (int c = 0; c < g.components; ++c) {
    auto src = g.component(c);
    for (std::size_t i = 0; i < buffer.size(); ++i) buffer[i] = src[i];
    fft::forward(buffer, lat.n);
    auto dst = f.component(c);
    for (std::size_t i = 0; i < buffer.size(); ++i) dst[i] = buffer[i] * scale;
  }
  return f;
}

SpectralField derivative(const SpectralField& f, const MultiIndex& beta) {
  for (int b : beta) {
    if (b < 0) throw std::invalid_argument("negative derivative order");
  }
  if (beta[0] + beta[1] + beta[2] > 6) throw std::invalid_argument("derivative order above 6");
  const Lattice& lat = f.lattice();
  const WaveTable wt(lat);
  // per-axis factors (i k)^b
  std::vector<cplx> fx(lat.n), fy(lat.n), fz(lat.n);
  auto axis_factor = [&](std::vector<cplx>& out, int order) {
    static constexpr cplx ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (int i = 0; i < lat.n; ++i) {
      const double kk = (order % 2 == 1) ? wt.kd[i] : wt.k[i];
      double mag = 1.0;
      for (int p = 0; p < order; ++p) mag *= kk;
      out[i] = ipow[order % 4] * mag;
    }
  };
  axis_factor(fx, beta[0]);
  axis_factor(fy, beta[1]);
  axis_factor(fz, beta[2]);

  SpectralField out(lat, f.components());
  for (int c = 0; c < f.components(); ++c) {
    auto src = f.component(c);
    auto dst = out.component(c);
    for_each_mode(lat, [&](std::size_t idx, int i, int j, int k) {
      dst[idx] = src[idx] * (fx[i] * fy[j] * fz[k]);
    });
  }
  return out;
}

SpectralField gradient(const SpectralField& f) {
  if (f.components() != 1) throw std::invalid_argument("gradient needs a scalar field");
  const Lattice& lat = f.lattice();
  const WaveTable wt(lat);
  SpectralField out(lat, 3);
  auto src = f.component(0);
  auto gx = out.component(0), gy = out.component(1), gz = out.component(2);
  for_each_mode(lat, [&](std::size_t idx, int i, int j, int k) {
    gx[idx] = I * wt.kd[i] * src[idx];
    gy[idx] = I * wt.kd[j] * src[idx];
    gz[idx] = I * wt.kd[k] * src[idx];
  });
  return out;
}

SpectralField divergence(const SpectralField& v) {
  require_vector(v);
  const Lattice& lat = v.lattice();
  const WaveTable wt(lat);
  SpectralField out(lat, 1);
  auto vx = v.component(0), vy = v.component(1), vz = v.component(2);
  auto dst = out.component(0);
  for_each_mode(lat, [&](std::size_t idx, int i, int j, int k) {
    dst[idx] = I * (wt.kd[i] * vx[idx] + wt.kd[j] * vy[idx] + wt.kd[k] * vz[idx]);
  });
  return out;
}

SpectralField curl(const SpectralField& v) {
  require_vector(v);
  const Lattice& lat = v.lattice();
  const WaveTable wt(lat);
  SpectralField out(lat, 3);
  auto vx = v.component(0), vy = v.component(1), vz = v.component(2);
  auto cx = out.component(0), cy = out.component(1), cz = out.component(2);
  for_each_mode(lat, [&](std::size_t idx, int i, int j, int k) {
    const double a = wt.kd[i], b = wt.kd[j], c = wt.kd[k];
    cx[idx] = I * (b * vz[idx] - c * vy[idx]);
    cy[idx] = I * (c * vx[idx] - a * vz[idx]);
    cz[idx] = I * (a * vy[idx] - b * vx[idx]);
  });
  return out;
}

SpectralField laplacian(const SpectralField& f) {
  const Lattice& lat = f.lattice();
  const WaveTable wt(lat);
  SpectralField out(lat, f.components());
  for (int c = 0; c < f.components(); ++c) {
    auto src = f.component(c);
    auto dst = out.component(c);
    for_each_mode(lat, [&](std::size_t idx, int i, int j, int k) {
      dst[idx] = -(wt.k[i] * wt.k[i] + wt.k[j] * wt.k[j] + wt.k[k] * wt.k[k]) * src[idx];
    });
  }
  return out;
}

SpectralField leray_project(const SpectralField& v) {
  require_vector(v);
  const Lattice& lat = v.lattice();
  const WaveTable wt(lat);
  SpectralField out = v;
  auto ux = out.component(0), uy = out.component(1), uz = out.component(2);
  for_each_mode(lat, [&](std::size_t idx, int i, int j, int k) {
    if (idx == 0) {
      ux[0] = uy[0] = uz[0] = 0.0;
      return;
    }
    const double a = wt.kd[i], b = wt.kd[j], c = wt.kd[k];
    const double q = a * a + b * b + c * c;
    if (q == 0.0) return;
    const cplx dot = (a * ux[idx] + b * uy[idx] + c * uz[idx]) / q;
    ux[idx] -= a * dot;
    uy[idx] -= b * dot;
    uz[idx] -= c * dot;
  });
  return out;
}

bool is_retained(const Lattice& lat, std::size_t mode) {
  return 3 * lat.max_abs_freq(mode) <= lat.n;
}

void dealias_in_place(SpectralField& f) {
  const Lattice& lat = f.lattice();
  const WaveTable wt(lat);
  const int n = lat.n;
  for (int c = 0; c < f.components(); ++c) {
    auto d = f.component(c);
    for_each_mode(lat, [&](std::size_t idx, int i, int j, int k) {
      if (3 * std::abs(wt.freq[i]) > n || 3 * std::abs(wt.freq[j]) > n ||
          3 * std::abs(wt.freq[k]) > n) {
        d[idx] = 0.0;
      }
    });
  }
}

SpectralField dealias(const SpectralField& f) {
  SpectralField out = f;
  dealias_in_place(out);
  return out;
}

void zero_mean(SpectralField& f) {
  for (int c = 0; c < f.components(); ++c) f.at(c, 0) = 0.0;
}

double hs_norm(const SpectralField& f, double s) {
  if (s < 0.0 || s > 6.0) throw std::invalid_argument("hs_norm order must lie in [0, 6]");
  const Lattice& lat = f.lattice();
  const WaveTable wt(lat);
  std::vector<double> weight(lat.size());
  for_each_mode(lat, [&](std::size_t idx, int i, int j, int k) {
    const double q = wt.k[i] * wt.k[i] + wt.k[j] * wt.k[j] + wt.k[k] * wt.k[k];
    if (s == std::floor(s)) {
      double w = 1.0;
      for (int e = 0; e < static_cast<int>(s); ++e) w *= q;
      weight[idx] = w;
    } else {
      weight[idx] = std::pow(q, s);
    }
  });
  double acc = 0.0;
  for (int c = 0; c < f.components(); ++c) {
    auto d = f.component(c);
    for (std::size_t idx = 0; idx < d.size(); ++idx) acc += weight[idx] * std::norm(d[idx]);
  }
  return std::sqrt(lat.volume() * acc);
}

double inner(const SpectralField& f, const SpectralField& g) {
  if (!f.same_shape(g)) throw std::invalid_argument("inner product of different shapes");
  double acc = 0.0;
  auto a = f.data();
  auto b = g.data();
  for (std::size_t i = 0; i < a.size(); ++i) acc += (std::conj(a[i]) * b[i]).real();
  return f.lattice().volume() * acc;
}

namespace {

double norm_of_magnitude(std::span<const double> mag2, double p, double cell_volume) {
  if (std::isinf(p)) {
    double mx = 0.0;
    for (double v : mag2) mx = std::max(mx, v);
    return std::sqrt(mx);
  }
  if (p < 1.0) throw std::invalid_argument("L^p norm needs p >= 1");
  double acc = 0.0;
  if (p == 2.0) {
    for (double v : mag2) acc += v;
  } else {
    for (double v : mag2) acc += std::pow(v, 0.5 * p);
  }
  return std::pow(acc * cell_volume, 1.0 / p);
}

}  // namespace

double lp_norm(const SpectralField& f, double p, int refine) {
  const GridField g = to_physical(f, refine);
  std::vector<double> mag2(g.lattice.size(), 0.0);
  for (int c = 0; c < g.components; ++c) {
    auto v = g.component(c);
    for (std::size_t i = 0; i < mag2.size(); ++i) mag2[i] += v[i] * v[i];
  }
  const double h = g.lattice.cell();
  return norm_of_magnitude(mag2, p, h * h * h);
}

std::vector<std::pair<MultiIndex, double>> multi_indices(int m) {
  if (m < 0) throw std::invalid_argument("negative order");
  auto fact = [](int k) {
    double r = 1.0;
    for (int i = 2; i <= k; ++i) r *= i;
    return r;
  };
  std::vector<std::pair<MultiIndex, double>> out;
  for (int a = m; a >= 0; --a)
    for (int b = m - a; b >= 0; --b) {
      const int c = m - a - b;
      out.push_back({{a, b, c}, fact(m) / (fact(a) * fact(b) * fact(c))});
    }
  return out;
}

double derivative_lp_norm(const SpectralField& f, int m, double p, int refine) {
  if (m == 0) return lp_norm(f, p, refine);
  std::vector<double> mag2;
  double cell = 0.0;
  for (const auto& [beta, w] : multi_indices(m)) {
    const GridField g = to_physical(derivative(f, beta), refine);
    if (mag2.empty()) {
      mag2.assign(g.lattice.size(), 0.0);
      const double h = g.lattice.cell();
      cell = h * h * h;
    }
    for (int c = 0; c < g.components; ++c) {
      auto v = g.component(c);
      for (std::size_t i = 0; i < mag2.size(); ++i) mag2[i] += w * v[i] * v[i];
    }
  }
  return norm_of_magnitude(mag2, p, cell);
}

double hermitian_defect(const SpectralField& f) {
  const Lattice& lat = f.lattice();
  double worst = 0.0;
  for (int c = 0; c < f.components(); ++c) {
    auto d = f.component(c);
    for (std::size_t idx = 0; idx < d.size(); ++idx) {
      if (lat.touches_nyquist(idx)) continue;
      worst = std::max(worst, std::abs(d[lat.partner(idx)] - std::conj(d[idx])));
    }
  }
  return worst;
}

void enforce_hermitian(SpectralField& f) {
  const Lattice& lat = f.lattice();
  for (int c = 0; c < f.components(); ++c) {
    auto d = f.component(c);
    for (std::size_t idx = 0; idx < d.size(); ++idx) {
      const std::size_t p = lat.partner(idx);
      if (p < idx) continue;
      if (p == idx) {
        d[idx] = d[idx].real();
        continue;
      }
      const cplx avg = 0.5 * (d[idx] + std::conj(d[p]));
      d[idx] = avg;
      d[p] = std::conj(avg);
    }
  }
}

double divergence_ratio(const SpectralField& v) {
  require_vector(v);
  const Lattice& lat = v.lattice();
  const WaveTable wt(lat);
  double num = 0.0, den = 0.0;
  auto ux = v.component(0), uy = v.component(1), uz = v.component(2);
  for_each_mode(lat, [&](std::size_t idx, int i, int j, int k) {
    const double a = wt.kd[i], b = wt.kd[j], c = wt.kd[k];
    num = std::max(num, std::abs(a * ux[idx] + b * uy[idx] + c * uz[idx]));
    const double amp = std::sqrt(std::norm(ux[idx]) + std::norm(uy[idx]) + std::norm(uz[idx]));
    den = std::max(den, std::sqrt(a * a + b * b + c * c) * amp);
  });
  return den == 0.0 ? 0.0 : num / den;
}

SpectralField random_band_limited(const Lattice& lat, int components, int kmax,
                                  std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  SpectralField f(lat, components);
  for (int c = 0; c < components; ++c) {
    auto d = f.component(c);
    for (std::size_t idx = 1; idx < d.size(); ++idx) {
      if (lat.max_abs_freq(idx) > kmax || lat.touches_nyquist(idx)) continue;
      const double re = gauss(rng);
      const double im = gauss(rng);
      d[idx] = {re, im};
    }
  }
  enforce_hermitian(f);
  return f;
}

}  // namespace decaylab::spectral

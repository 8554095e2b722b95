#include "decaylab/initial_data.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "decaylab/detail/wave_table.hpp"
#include "decaylab/spectral_ops.hpp"

namespace decaylab {

SpectralField gaussian_field(const Lattice& lat, double sigma, const Vec3& centre,
                             const std::vector<double>& amplitude) {
  if (!(sigma > 0.0)) throw std::invalid_argument("bump width must be > 0");
  const int comps = static_cast<int>(amplitude.size());
  SpectralField f(lat, comps);
  const detail::WaveTable wt(lat);
  const double s2 = sigma * sigma;
  const double pref = std::pow(2.0 * std::numbers::pi * s2, 1.5) / lat.volume();
  detail::for_each_mode(lat, [&](std::size_t idx, int i, int j, int k) {
    const double k2 = wt.k[i] * wt.k[i] + wt.k[j] * wt.k[j] + wt.k[k] * wt.k[k];
    const double phase = wt.k[i] * centre[0] + wt.k[j] * centre[1] + wt.k[k] * centre[2];
    const cplx g = pref * std::exp(-0.5 * s2 * k2) * std::polar(1.0, -phase);
    for (int c = 0; c < comps; ++c) f.at(c, idx) = amplitude[c] * g;
  });
  // the Nyquist planes cannot carry the phase consistently; they are outside
  // the dealiased set anyway
  spectral::dealias_in_place(f);
  return f;
}

namespace {

void normalize(SpectralField& f, double target) {
  const double n = spectral::hs_norm(f, 0.0);
  if (n > 0.0) f *= target / n;
}

SpectralField taylor_green(const Lattice& lat, double norm) {
  GridField g{lat, 3, aligned_vector<double>(lat.size() * 3)};
  const double k = lat.dk();
  detail::for_each_mode(lat, [&](std::size_t idx, int i, int j, int l) {
    const double x = i * lat.cell(), y = j * lat.cell(), z = l * lat.cell();
    g.component(0)[idx] = std::sin(k * x) * std::cos(k * y) * std::cos(k * z);
    g.component(1)[idx] = -std::cos(k * x) * std::sin(k * y) * std::cos(k * z);
    g.component(2)[idx] = 0.0;
  });
  SpectralField f = spectral::from_physical(g);
  normalize(f, norm);
  return f;
}

}  // namespace

State make_initial_state(SystemId id, const SystemParams& p, const Lattice& lat,
                         const InitialDataSpec& spec) {
  State s = make_state(id, lat, p.parabolic_components);
  const auto layout = block_layout(id, p.parabolic_components);
  if (spec.kind == "zero") return s;

  if (spec.kind == "taylor_green") {
    if (layout.front().components != 3) {
      throw std::invalid_argument("taylor_green needs a 3-component first block");
    }
    s.blocks.front().field = taylor_green(lat, spec.norm_u);
    return s;
  }

  if (spec.kind == "gaussian") {
    for (std::size_t b = 0; b < layout.size() && b < 2; ++b) {
      const Vec3& a = b == 0 ? spec.u_amplitude : spec.w_amplitude;
      std::vector<double> amp(layout[b].components, 0.0);
      for (int c = 0; c < layout[b].components && c < 3; ++c) amp[c] = a[c];
      SpectralField f = gaussian_field(lat, spec.sigma, {0.0, 0.0, 0.0}, amp);
      spectral::zero_mean(f);
      if (layout[b].solenoidal) f = spectral::leray_project(f);
      s.blocks[b].field = std::move(f);
    }
    return s;
  }

  if (spec.kind != "bumps") throw std::invalid_argument("unknown initial data kind '" + spec.kind + "'");
  if (spec.bumps < 1) throw std::invalid_argument("bumps must be >= 1");
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> amp_dist;
  std::uniform_real_distribution<double> pos(-spec.spread, spec.spread);
  for (std::size_t b = 0; b < layout.size(); ++b) {
    SpectralField f(lat, layout[b].components);
    for (int k = 0; k < spec.bumps; ++k) {
      std::vector<double> amp(layout[b].components);
      for (auto& a : amp) a = amp_dist(rng);
      const Vec3 c{pos(rng), pos(rng), pos(rng)};
      f += gaussian_field(lat, spec.sigma, c, amp);
    }
    spectral::zero_mean(f);
    if (layout[b].solenoidal) f = spectral::leray_project(f);
    normalize(f, b == 0 ? spec.norm_u : spec.norm_other);
    s.blocks[b].field = std::move(f);
  }
  return s;
}

}  // namespace decaylab

#include "decaylab/systems.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <stdexcept>

#include "decaylab/detail/wave_table.hpp"
#include "decaylab/fft.hpp"
#include "decaylab/linear_semigroup.hpp"
#include "decaylab/spectral_ops.hpp"

namespace decaylab::systems {

using detail::for_each_mode;
using detail::WaveTable;

namespace {

constexpr cplx I{0.0, 1.0};

// Pseudo-spectral products on the lattice grid. Each product is transformed
// once and then scattered into its destination with a derivative factor.
class ProductEngine {
 public:
  explicit ProductEngine(const Lattice& lat)
      : lat_(lat), wt_(lat), buf_(lat.size()), inv_(1.0 / static_cast<double>(lat.size())) {}

  const Lattice& lattice() const { return lat_; }

  void transform(std::span<const double> a, std::span<const double> b) {
    for (std::size_t x = 0; x < buf_.size(); ++x) buf_[x] = a[x] * b[x];
    finish_transform();
  }
  void transform(std::span<const double> a) {
    for (std::size_t x = 0; x < buf_.size(); ++x) buf_[x] = a[x];
    finish_transform();
  }

  // out += sign * d/dx_axis (last transform)
  void add_derivative(std::span<cplx> out, int axis, double sign) {
    for_each_mode(lat_, [&](std::size_t idx, int i, int j, int k) {
      const int a[3] = {i, j, k};
      out[idx] += (sign * wt_.kd[a[axis]]) * I * buf_[idx];
    });
  }
  // out += sign * (last transform)
  void add_plain(std::span<cplx> out, double sign) {
    for (std::size_t idx = 0; idx < buf_.size(); ++idx) out[idx] += sign * buf_[idx];
  }

 private:
  void finish_transform() {
    fft::forward(buf_, lat_.n);
    for (auto& v : buf_) v *= inv_;
  }

  Lattice lat_;
  WaveTable wt_;
  aligned_vector<cplx> buf_;
  double inv_;
};

void finish(SpectralField& f, bool project) {
  spectral::dealias_in_place(f);
  spectral::zero_mean(f);
  if (project) f = spectral::leray_project(f);
}

// out_i = sum_j d_j (a_i b_j)
SpectralField div_outer(ProductEngine& eng, const GridField& a, const GridField& b) {
  SpectralField out(eng.lattice(), a.components);
  for (int i = 0; i < a.components; ++i)
    for (int j = 0; j < 3; ++j) {
      eng.transform(a.component(i), b.component(j));
      eng.add_derivative(out.component(i), j, 1.0);
    }
  return out;
}

// out_i = sum_j d_j (a_i a_j), exploiting symmetry
SpectralField div_outer_sym(ProductEngine& eng, const GridField& a) {
  SpectralField out(eng.lattice(), 3);
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      eng.transform(a.component(i), a.component(j));
      eng.add_derivative(out.component(i), j, 1.0);
      if (j != i) eng.add_derivative(out.component(j), i, 1.0);
    }
  return out;
}

// (vel . grad) f, advective form, f arbitrary components
SpectralField advect(ProductEngine& eng, const GridField& vel, const SpectralField& f) {
  const Lattice& lat = eng.lattice();
  SpectralField out(lat, f.components());
  std::vector<double> acc(lat.size());
  for (int c = 0; c < f.components(); ++c) {
    SpectralField fc(lat, 1);
    std::copy(f.component(c).begin(), f.component(c).end(), fc.component(0).begin());
    const GridField g = spectral::to_physical(spectral::gradient(fc));
    std::fill(acc.begin(), acc.end(), 0.0);
    for (int j = 0; j < 3; ++j) {
      auto vj = vel.component(j);
      auto gj = g.component(j);
      for (std::size_t x = 0; x < acc.size(); ++x) acc[x] += vj[x] * gj[x];
    }
    eng.transform(acc);
    eng.add_plain(out.component(c), 1.0);
  }
  return out;
}

void require(const State& s, SystemId id, const SystemParams& p) {
  if (s.system != id) {
    throw std::invalid_argument("state belongs to system " + std::string(to_string(s.system)) +
                                ", expected " + std::string(to_string(id)));
  }
  check_layout(s, p.parabolic_components);
}

State zero_like(const State& s) {
  State out = s;
  for (auto& b : out.blocks) b.field.set_zero();
  return out;
}

// Explicit parts -------------------------------------------------------------

State explicit_micropolar_like(const State& s, bool with_w, bool with_b) {
  ProductEngine eng(s.lattice());
  State out = zero_like(s);
  const GridField u = spectral::to_physical(s.block("u"));
  SpectralField nu = div_outer_sym(eng, u);
  nu *= -1.0;
  if (with_b) {
    const GridField b = spectral::to_physical(s.block("b"));
    nu += div_outer_sym(eng, b);
    // b_t = -(u.grad) b + (b.grad) u = -d_j(b_i u_j) + d_j(u_i b_j)
    SpectralField nb = div_outer(eng, u, b);
    nb -= div_outer(eng, b, u);
    finish(nb, true);
    out.block("b") = std::move(nb);
  }
  finish(nu, true);
  out.block("u") = std::move(nu);
  if (with_w) {
    const GridField w = spectral::to_physical(s.block("w"));
    SpectralField nw = div_outer(eng, w, u);
    nw *= -1.0;
    finish(nw, false);
    out.block("w") = std::move(nw);
  }
  return out;
}

State explicit_tropical(const State& s) {
  ProductEngine eng(s.lattice());
  State out = zero_like(s);
  const GridField u = spectral::to_physical(s.block("u"));
  const GridField v = spectral::to_physical(s.block("v"));
  const GridField th = spectral::to_physical(s.block("theta"));

  SpectralField nu = div_outer_sym(eng, u);
  nu += div_outer_sym(eng, v);
  nu *= -1.0;
  finish(nu, true);

  // -(u.grad) v - (v.grad) u; the first in divergence form (div u = 0)
  SpectralField nv = div_outer(eng, v, u);
  nv += advect(eng, v, s.block("u"));
  nv *= -1.0;
  finish(nv, false);

  SpectralField nt = div_outer(eng, th, u);
  nt *= -1.0;
  finish(nt, false);

  out.block("u") = std::move(nu);
  out.block("v") = std::move(nv);
  out.block("theta") = std::move(nt);
  return out;
}

State explicit_parabolic(const State& s, const FluxModel& flux) {
  const SpectralField& uf = s.block("u");
  const Lattice& lat = s.lattice();
  const int n = uf.components();
  ProductEngine eng(lat);
  const GridField u = spectral::to_physical(uf);
  SpectralField out(lat, n);

  std::vector<double> uv(n), a(static_cast<std::size_t>(n) * n);
  GridField term1{lat, n, aligned_vector<double>(lat.size() * n, 0.0)};
  GridField au{lat, n, aligned_vector<double>(lat.size() * n, 0.0)};
  for (int j = 0; j < 3; ++j) {
    spectral::MultiIndex e{0, 0, 0};
    e[j] = 1;
    const GridField du = spectral::to_physical(spectral::derivative(uf, e));
    for (std::size_t x = 0; x < lat.size(); ++x) {
      for (int c = 0; c < n; ++c) uv[c] = u.component(c)[x];
      flux.jacobian(uv, j, a);
      for (int r = 0; r < n; ++r) {
        double t1 = 0.0, t2 = 0.0;
        for (int c = 0; c < n; ++c) {
          t1 += a[r * n + c] * du.component(c)[x];
          t2 += a[r * n + c] * uv[c];
        }
        term1.component(r)[x] += t1;
        au.component(r)[x] = t2;
      }
    }
    for (int r = 0; r < n; ++r) {
      eng.transform(au.component(r));
      eng.add_derivative(out.component(r), j, 1.0);
    }
  }
  for (int r = 0; r < n; ++r) {
    eng.transform(term1.component(r));
    eng.add_plain(out.component(r), 1.0);
  }
  out *= -1.0;
  finish(out, false);
  State res = zero_like(s);
  res.block("u") = std::move(out);
  return res;
}

// Monolithic route ------------------------------------------------------------

SpectralField dealiased(SpectralField f) {
  spectral::dealias_in_place(f);
  spectral::zero_mean(f);
  return f;
}

SpectralField scaled(double c, const SpectralField& f) { return c * f; }

// sum_j d_j f_j(u) for a quadratic flux, from pointwise flux values
SpectralField flux_divergence(ProductEngine& eng, const SpectralField& uf, const FluxModel& flux) {
  const Lattice& lat = uf.lattice();
  const int n = uf.components();
  const GridField u = spectral::to_physical(uf);
  SpectralField out(lat, n);
  std::vector<double> uv(n), f(n);
  GridField fg{lat, n, aligned_vector<double>(lat.size() * n)};
  for (int j = 0; j < 3; ++j) {
    for (std::size_t x = 0; x < lat.size(); ++x) {
      for (int c = 0; c < n; ++c) uv[c] = u.component(c)[x];
      flux.flux(uv, j, f);
      for (int c = 0; c < n; ++c) fg.component(c)[x] = f[c];
    }
    for (int c = 0; c < n; ++c) {
      eng.transform(fg.component(c));
      eng.add_derivative(out.component(c), j, 1.0);
    }
  }
  return out;
}

// pointwise product of a vector field with a scalar field
SpectralField times_scalar(ProductEngine& eng, const GridField& v, const GridField& s) {
  SpectralField out(eng.lattice(), v.components);
  for (int c = 0; c < v.components; ++c) {
    eng.transform(v.component(c), s.component(0));
    eng.add_plain(out.component(c), 1.0);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

State RhsSplit::total() const {
  State out = stiff_linear;
  out += explicit_part;
  return out;
}

namespace {
RhsSplit make_split(const State& s, const SystemParams& p, State explicit_state) {
  return {linear::apply_symbol(s, p), std::move(explicit_state)};
}
}  // namespace

RhsSplit rhs_micropolar(const State& s, const SystemParams& p) {
  require(s, SystemId::micropolar, p);
  return make_split(s, p, explicit_micropolar_like(s, true, false));
}

RhsSplit rhs_navier_stokes(const State& s, const SystemParams& p) {
  require(s, SystemId::navier_stokes, p);
  return make_split(s, p, explicit_micropolar_like(s, false, false));
}

RhsSplit rhs_magneto_micropolar(const State& s, const SystemParams& p) {
  require(s, SystemId::magneto_micropolar, p);
  return make_split(s, p, explicit_micropolar_like(s, true, true));
}

RhsSplit rhs_tropical(const State& s, const SystemParams& p) {
  require(s, SystemId::tropical, p);
  return make_split(s, p, explicit_tropical(s));
}

RhsSplit rhs_rotating(const State& s, const SystemParams& p) {
  require(s, SystemId::rotating_ns, p);
  return make_split(s, p, explicit_micropolar_like(s, false, false));
}

RhsSplit rhs_generic_linear(const State& s, const SystemParams& p) {
  require(s, SystemId::generic_linear, p);
  return make_split(s, p, zero_like(s));
}

RhsSplit rhs_generic_parabolic(const State& s, const SystemParams& p, const std::string& flux_id) {
  require(s, SystemId::generic_parabolic, p);
  return make_split(s, p, explicit_parabolic(s, find_flux(flux_id)));
}

RhsSplit rhs(const State& s, const SystemParams& p) {
  switch (s.system) {
    case SystemId::micropolar:
      return rhs_micropolar(s, p);
    case SystemId::navier_stokes:
      return rhs_navier_stokes(s, p);
    case SystemId::magneto_micropolar:
      return rhs_magneto_micropolar(s, p);
    case SystemId::tropical:
      return rhs_tropical(s, p);
    case SystemId::rotating_ns:
      return rhs_rotating(s, p);
    case SystemId::generic_linear:
      return rhs_generic_linear(s, p);
    case SystemId::generic_parabolic:
      return rhs_generic_parabolic(s, p, p.flux_library);
  }
  throw std::invalid_argument("unknown system");
}

State explicit_part(const State& s, const SystemParams& p) {
  switch (s.system) {
    case SystemId::micropolar:
      return explicit_micropolar_like(s, true, false);
    case SystemId::magneto_micropolar:
      return explicit_micropolar_like(s, true, true);
    case SystemId::navier_stokes:
    case SystemId::rotating_ns:
      return explicit_micropolar_like(s, false, false);
    case SystemId::tropical:
      return explicit_tropical(s);
    case SystemId::generic_linear:
      return zero_like(s);
    case SystemId::generic_parabolic:
      return explicit_parabolic(s, find_flux(p.flux_library));
  }
  throw std::invalid_argument("unknown system");
}

State monolithic_rhs(const State& s, const SystemParams& p) {
  using namespace spectral;
  check_layout(s, p.parabolic_components);
  ProductEngine eng(s.lattice());
  State out = zero_like(s);
  switch (s.system) {
    case SystemId::micropolar:
    case SystemId::magneto_micropolar: {
      const SpectralField& u = s.block("u");
      const SpectralField& w = s.block("w");
      const GridField ug = to_physical(u);
      SpectralField tu = dealiased(advect(eng, ug, u));
      SpectralField fu = scaled(p.mu + p.chi, laplacian(u)) + scaled(p.chi, curl(w));
      SpectralField fw = scaled(p.gamma, laplacian(w)) + scaled(p.kappa, gradient(divergence(w))) +
                         scaled(p.chi, curl(u)) + scaled(-2.0 * p.chi, w);
      fw -= dealiased(advect(eng, ug, w));
      if (s.system == SystemId::magneto_micropolar) {
        const SpectralField& b = s.block("b");
        const GridField bg = to_physical(b);
        tu -= dealiased(advect(eng, bg, b));
        SpectralField fb = scaled(p.magnetic_nu, laplacian(b));
        fb -= dealiased(advect(eng, ug, b));
        fb += dealiased(advect(eng, bg, u));
        out.block("b") = std::move(fb);
      }
      fu -= leray_project(tu);
      out.block("u") = std::move(fu);
      out.block("w") = std::move(fw);
      break;
    }
    case SystemId::navier_stokes:
    case SystemId::rotating_ns: {
      const SpectralField& u = s.block("u");
      SpectralField t = dealiased(advect(eng, to_physical(u), u));
      if (s.system == SystemId::rotating_ns && p.omega != 0.0) {
        SpectralField ju(u.lattice(), 3);
        for (std::size_t m = 0; m < u.modes(); ++m) {
          ju.at(0, m) = -u.at(1, m);
          ju.at(1, m) = u.at(0, m);
        }
        t.axpy(p.omega, ju);
      }
      out.block("u") = scaled(p.mu, laplacian(u)) - leray_project(t);
      break;
    }
    case SystemId::tropical: {
      const SpectralField& u = s.block("u");
      const SpectralField& v = s.block("v");
      const SpectralField& th = s.block("theta");
      const GridField ug = to_physical(u);
      const GridField vg = to_physical(v);
      const SpectralField dv = divergence(v);
      // div(v (x) v) = (v.grad) v + v div v
      SpectralField t = advect(eng, ug, u) + advect(eng, vg, v) +
                        times_scalar(eng, vg, to_physical(dv));
      out.block("u") = scaled(p.tropical.mu, laplacian(u)) - leray_project(dealiased(t));
      SpectralField fv = scaled(p.tropical.nu, laplacian(v)) - gradient(th);
      fv -= dealiased(advect(eng, ug, v) + advect(eng, vg, u));
      out.block("v") = std::move(fv);
      SpectralField ft = scaled(p.tropical.eta, laplacian(th)) - dv;
      ft -= dealiased(advect(eng, ug, th));
      out.block("theta") = std::move(ft);
      break;
    }
    case SystemId::generic_linear: {
      // R^T diag(-c_i (-Laplace)^gamma) R v, component by component
      const SpectralField& v = s.block("v");
      const Lattice& lat = v.lattice();
      const WaveTable wt(lat);
      const auto& r = p.generic_rotation;
      SpectralField& o = out.block("v");
      for_each_mode(lat, [&](std::size_t idx, int i, int j, int k) {
        const double k2 = wt.k[i] * wt.k[i] + wt.k[j] * wt.k[j] + wt.k[k] * wt.k[k];
        const double kk = std::pow(k2, p.generic_gamma_exponent);
        cplx rv[3];
        for (int a = 0; a < 3; ++a) {
          rv[a] = 0.0;
          for (int b = 0; b < 3; ++b) rv[a] += r[3 * a + b] * v.at(b, idx);
          rv[a] *= -p.generic_ci[a] * kk;
        }
        for (int b = 0; b < 3; ++b) {
          cplx acc = 0.0;
          for (int a = 0; a < 3; ++a) acc += r[3 * a + b] * rv[a];
          o.at(b, idx) = acc;
        }
      });
      break;
    }
    case SystemId::generic_parabolic: {
      // for a quadratic flux A_j(u) u = 2 f_j(u) and A_j(u) D_j u = D_j f_j(u)
      const SpectralField& u = s.block("u");
      SpectralField f = dealiased(flux_divergence(eng, u, find_flux(p.flux_library)));
      out.block("u") = scaled(p.parabolic_c, laplacian(u)) - scaled(3.0, f);
      break;
    }
  }
  return out;
}

SpectralField pressure_recover(const State& s, const SystemParams&) {
  const SpectralField& uf = s.block("u");
  if (uf.components() != 3) throw std::invalid_argument("pressure needs a 3-component u block");
  const Lattice& lat = uf.lattice();
  const GridField u = spectral::to_physical(uf);
  const WaveTable wt(lat);
  SpectralField p(lat, 1);
  aligned_vector<cplx> buf(lat.size());
  const double inv = 1.0 / static_cast<double>(lat.size());
  for (int a = 0; a < 3; ++a)
    for (int b = a; b < 3; ++b) {
      auto ua = u.component(a);
      auto ub = u.component(b);
      for (std::size_t x = 0; x < buf.size(); ++x) buf[x] = ua[x] * ub[x] * inv;
      fft::forward(buf, lat.n);
      const double mult = a == b ? 1.0 : 2.0;
      auto dst = p.component(0);
      for_each_mode(lat, [&](std::size_t idx, int i, int j, int k) {
        const double kd[3] = {wt.kd[i], wt.kd[j], wt.kd[k]};
        const double k2 = wt.k[i] * wt.k[i] + wt.k[j] * wt.k[j] + wt.k[k] * wt.k[k];
        if (k2 == 0.0) return;
        dst[idx] -= mult * kd[a] * kd[b] * buf[idx] / k2;
      });
    }
  spectral::dealias_in_place(p);
  spectral::zero_mean(p);
  return p;
}

// Flux library -----------------------------------------------------------------

namespace {

// f_j(u) = (u.a) u + |u|^2 a / 2 with a = e_{j mod n}; Jacobian
// u a^T + (u.a) I + a u^T is symmetric and |f_j(u)| <= 3/2 |u|^2.
FluxModel gradient_quadratic() {
  FluxModel m;
  m.name = "gradient_quadratic";
  m.bound_constant = 1.5;
  m.flux = [](std::span<const double> u, int j, std::span<double> f) {
    const int n = static_cast<int>(u.size());
    const int a = j % n;
    double u2 = 0.0;
    for (double v : u) u2 += v * v;
    for (int c = 0; c < n; ++c) f[c] = u[a] * u[c];
    f[a] += 0.5 * u2;
  };
  m.jacobian = [](std::span<const double> u, int j, std::span<double> out) {
    const int n = static_cast<int>(u.size());
    const int a = j % n;
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        double v = 0.0;
        if (c == a) v += u[r];
        if (r == a) v += u[c];
        if (r == c) v += u[a];
        out[r * n + c] = v;
      }
  };
  return m;
}

struct FluxRegistry {
  std::mutex mutex;
  std::map<std::string, FluxModel> models;
  FluxRegistry() { models.emplace("gradient_quadratic", gradient_quadratic()); }
};

FluxRegistry& registry() {
  static FluxRegistry r;
  return r;
}

}  // namespace

void register_flux(FluxModel model) {
  if (model.name.empty() || !model.flux || !model.jacobian) {
    throw std::invalid_argument("flux model needs a name, a flux and a Jacobian");
  }
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  r.models[model.name] = std::move(model);
}

const FluxModel& find_flux(const std::string& name) {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  const auto it = r.models.find(name);
  if (it == r.models.end()) throw std::invalid_argument("unknown flux library '" + name + "'");
  return it->second;
}

std::vector<std::string> flux_names() {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  std::vector<std::string> out;
  for (const auto& [k, v] : r.models) out.push_back(k);
  return out;
}

void validate_flux(const FluxModel& model, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<double> u(n), f(n), a(static_cast<std::size_t>(n) * n);
  for (int sample = 0; sample < 1000; ++sample) {
    const double scale = std::pow(10.0, -3.0 + 6.0 * (sample % 7) / 6.0);
    double u2 = 0.0;
    for (auto& v : u) {
      v = scale * nd(rng);
      u2 += v * v;
    }
    for (int j = 0; j < 3; ++j) {
      model.flux(u, j, f);
      double f2 = 0.0;
      for (double v : f) f2 += v * v;
      if (std::sqrt(f2) > model.bound_constant * u2 * (1.0 + 1e-12)) {
        throw std::invalid_argument("flux '" + model.name + "' violates |f_j(u)| <= C|u|^2");
      }
      model.jacobian(u, j, a);
      double amax = 0.0, asym = 0.0;
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
          amax = std::max(amax, std::abs(a[r * n + c]));
          asym = std::max(asym, std::abs(a[r * n + c] - a[c * n + r]));
        }
      if (asym > 1e-12 * std::max(amax, 1e-300)) {
        throw std::invalid_argument("flux '" + model.name + "' has a non-symmetric Jacobian");
      }
    }
  }
}

}  // namespace decaylab::systems

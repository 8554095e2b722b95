#include "decaylab/timestepper.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "decaylab/spectral_ops.hpp"
#include "decaylab/systems.hpp"

namespace decaylab {

namespace {

bool is_multiple(double x, double dt) {
  const double q = x / dt;
  return std::abs(q - std::round(q)) <= 1e-9 * std::max(1.0, std::abs(q));
}

std::string fmt(double v) { return format_number(v); }

bool has_pressure(SystemId id) {
  return id == SystemId::micropolar || id == SystemId::navier_stokes ||
         id == SystemId::magneto_micropolar || id == SystemId::tropical ||
         id == SystemId::rotating_ns;
}

double max_pointwise_speed(const State& s) {
  double vmax = 0.0;
  for (const auto& b : s.blocks) {
    if (b.field.components() != 3) continue;
    vmax = std::max(vmax, spectral::lp_norm(b.field, spectral::kInfinity));
  }
  return vmax;
}

}  // namespace

double trusted_horizon(const SimConfig& c) {
  const double l8 = c.box_length / 8.0;
  return l8 * l8 / dissipation_floor(c.params, c.system);
}

void validate(const SimConfig& c) {
  make_lattice(c.n, c.box_length);
  validate(c.params, c.system);
  if (c.system == SystemId::generic_parabolic) {
    systems::validate_flux(systems::find_flux(c.params.flux_library), c.params.parabolic_components);
  }
  if (!(c.dt > 0.0) || !std::isfinite(c.dt)) throw std::invalid_argument("dt must be > 0");
  if (!(c.t_end >= 0.0) || !std::isfinite(c.t_end)) throw std::invalid_argument("t_end must be >= 0");
  const double horizon = c.horizon_factor * trusted_horizon(c);
  if (c.t_end > horizon * (1.0 + 1e-12)) {
    throw std::invalid_argument("t_end = " + fmt(c.t_end) + " exceeds the run horizon " +
                                fmt(c.horizon_factor) + " * (L/8)^2/nu = " + fmt(horizon));
  }
  if (!is_multiple(c.t_end, c.dt)) throw std::invalid_argument("t_end must be a multiple of dt");
  for (double a : c.anchors) {
    if (a < 0.0 || a > c.t_end) throw std::invalid_argument("anchor " + fmt(a) + " outside [0, t_end]");
    if (!is_multiple(a, c.dt)) throw std::invalid_argument("anchor " + fmt(a) + " is not a multiple of dt");
  }
  for (double a : c.checkpoint_times) {
    if (a < 0.0 || a > c.t_end) {
      throw std::invalid_argument("checkpoint " + fmt(a) + " outside [0, t_end]");
    }
    if (!is_multiple(a, c.dt)) {
      throw std::invalid_argument("checkpoint " + fmt(a) + " is not a multiple of dt");
    }
  }
  if (c.samples_per_decade < 1) throw std::invalid_argument("samples_per_decade must be >= 1");
  if (!(c.first_sample > 0.0)) throw std::invalid_argument("first_sample must be > 0");
}

const DecaySeries& Trajectory::track(const std::string& key) const {
  const auto it = tracks.find(key);
  if (it == tracks.end()) throw std::out_of_range("trajectory has no track '" + key + "'");
  return it->second;
}

std::string track_key(const std::string& field, int m, double p, const std::string& tag) {
  DecaySeries s;
  s.field = field;
  s.m = m;
  s.p = p;
  s.tag = tag;
  return s.key();
}

std::string anchor_tag(double t0) { return "t0=" + fmt(t0); }

State step(const State& s, double dt, const linear::ModeExponentials& e, const SystemParams& p,
           std::span<State* const> extra) {
  if (std::abs(e.time() - dt) > 1e-14 * dt) {
    throw std::invalid_argument("exponential table was built for a different dt");
  }
  const State k1 = systems::explicit_part(s, p);
  State a = s;
  a.axpy(dt, k1);
  State b = s;
  b.axpy(0.5 * dt, k1);
  std::vector<State*> all{&a, &b};
  all.insert(all.end(), extra.begin(), extra.end());
  e.apply(all);
  const State k2 = systems::explicit_part(a, p);
  b.axpy(0.5 * dt, k2);
  b.time = s.time + dt;

  double acc = 0.0;
  for (const auto& blk : b.blocks)
    for (const cplx& v : blk.field.data()) acc += std::norm(v);
  if (!std::isfinite(acc)) {
    throw InstabilityError("non-finite coefficients after the step ending at t = " + fmt(b.time));
  }
  return b;
}

namespace {

struct Anchor {
  double t0;
  bool active = false;
  State zbar;
};

class Recorder {
 public:
  Recorder(Trajectory& tr) : tr_(tr) {}

  DecaySeries& series(const std::string& field, int m, double p, const std::string& tag = "",
                      std::optional<double> s = std::nullopt) {
    DecaySeries proto;
    proto.field = field;
    proto.m = m;
    proto.p = p;
    proto.s = s;
    proto.tag = tag;
    const std::string key = proto.key();
    auto it = tr_.tracks.find(key);
    if (it == tr_.tracks.end()) it = tr_.tracks.emplace(key, std::move(proto)).first;
    return it->second;
  }

  void sample(double t, const State& z, const std::vector<Anchor>& anchors) {
    const SimConfig& c = tr_.config;
    for (int m = 0; m <= 3; ++m) series("z", m, 2.0).push(t, state_hs_norm(z, m));
    for (const auto& b : z.blocks)
      for (int m = 0; m <= 1; ++m) series(b.name, m, 2.0).push(t, spectral::hs_norm(b.field, m));
    for (double s : {0.5, 1.5}) series("z", 0, 2.0, "", s).push(t, state_hs_norm(z, s));
    if (c.track_lp) {
      const SpectralField all = stacked(z);
      series("z", 0, 4.0).push(t, spectral::lp_norm(all, 4.0));
      series("z", 0, spectral::kInfinity).push(t, spectral::lp_norm(all, spectral::kInfinity, 2));
      series("z", 1, spectral::kInfinity)
          .push(t, spectral::derivative_lp_norm(all, 1, spectral::kInfinity, 2));
    }
    if (has_pressure(z.system)) {
      series("p", 0, 2.0).push(t, spectral::hs_norm(systems::pressure_recover(z, c.params), 0.0));
    }
    std::vector<const Anchor*> live;
    for (const auto& a : anchors) {
      if (!a.active || a.t0 >= t) continue;
      live.push_back(&a);
      State e = z;
      e -= a.zbar;
      const std::string tag = anchor_tag(a.t0);
      for (int m = 0; m <= 1; ++m) series("Ez", m, 2.0, tag).push(t, state_hs_norm(e, m));
      if (e.has("w")) {
        for (int m = 0; m <= 1; ++m) {
          series("Ew", m, 2.0, tag).push(t, spectral::hs_norm(e.block("w"), m));
        }
      }
    }
    if (live.size() >= 2) {
      State d = live[0]->zbar;
      d -= live[1]->zbar;
      const std::string tag = anchor_tag(live[0]->t0) + "," + fmt(live[1]->t0);
      for (int m = 0; m <= 1; ++m) series("zbar_diff", m, 2.0, tag).push(t, state_hs_norm(d, m));
    }
  }

 private:
  Trajectory& tr_;
};

std::vector<double> sample_targets(const SimConfig& c) {
  std::vector<double> out;
  for (int k = 0;; ++k) {
    const double t = c.first_sample * std::pow(10.0, static_cast<double>(k) / c.samples_per_decade);
    if (t > c.t_end * (1.0 + 1e-12)) break;
    out.push_back(t);
  }
  out.insert(out.end(), c.checkpoint_times.begin(), c.checkpoint_times.end());
  if (c.t_end > 0.0) out.push_back(c.t_end);
  std::sort(out.begin(), out.end());
  std::vector<double> uniq;
  for (double t : out) {
    if (t <= 0.0) continue;
    if (uniq.empty() || t - uniq.back() > 1e-9 * t) uniq.push_back(t);
  }
  return uniq;
}

}  // namespace

Trajectory run(const SimConfig& config, const ProgressFn& progress) {
  validate(config);
  const auto wall0 = std::chrono::steady_clock::now();
  const Lattice lat = make_lattice(config.n, config.box_length);
  const SystemParams& p = config.params;

  Trajectory tr;
  tr.config = config;
  tr.nu = dissipation_floor(p, config.system);
  State z = make_initial_state(config.system, p, lat, config.initial);
  tr.z0_norm = state_hs_norm(z, 0.0);
  Recorder rec(tr);

  std::vector<Anchor> anchors;
  {
    auto sorted = config.anchors;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    for (double a : sorted) anchors.push_back({a, false, State{}});
  }
  auto keep_checkpoint = [&](double t, const State& s) {
    if (config.keep_checkpoints) tr.checkpoints.emplace_back(t, s);
    if (config.checkpoint_dir) {
      std::filesystem::create_directories(*config.checkpoint_dir);
      const auto path = *config.checkpoint_dir / ("checkpoint_t" + fmt(t) + ".dlck");
      write_checkpoint(path, s);
      tr.checkpoint_files.push_back(path);
    }
  };
  auto activate_anchors = [&](double t, double dt, const State& s) {
    for (auto& a : anchors) {
      if (!a.active && std::abs(a.t0 - t) <= 1e-6 * dt) {
        a.active = true;
        a.zbar = s;
      }
    }
  };
  auto checkpoint_due = [&](double t, double dt) {
    return std::any_of(config.checkpoint_times.begin(), config.checkpoint_times.end(),
                       [&](double c) { return std::abs(c - t) <= 1e-6 * dt; });
  };

  double dt = config.dt;
  auto table = std::make_unique<linear::ModeExponentials>(config.system, p, lat, dt);
  tr.eigen_modes = table->eigen_count();
  tr.pade_modes = table->pade_count();
  if (table->pade_count() > 0) {
    tr.events.push_back({0.0, std::to_string(table->pade_count()) +
                                  " modes used the Pade exponential"});
  }

  const double z0 = tr.z0_norm;
  StepRecord rec0{0.0, 0.0, z0, state_hs_norm(z, 1.0), state_hs_norm(z, 2.0), 0.0};
  tr.steps.push_back(rec0);
  activate_anchors(0.0, dt, z);
  if (checkpoint_due(0.0, dt)) keep_checkpoint(0.0, z);

  const std::vector<double> targets = sample_targets(config);
  std::size_t next_target = 0;

  double t_base = 0.0;
  long steps_since_base = 0;
  long step_count = 0;
  double t = 0.0;
  while (t < config.t_end - 1e-9 * dt) {
    if (step_count % 10 == 0) {
      const double vmax = max_pointwise_speed(z);
      if (vmax > 0.0) {
        const double limit = 0.5 * lat.cell() / vmax;
        bool changed = false;
        while (dt > limit) {
          dt *= 0.5;
          changed = true;
        }
        if (changed) {
          std::ostringstream msg;
          msg << "dt reduced to " << fmt(dt) << " (advective limit " << limit << ")";
          tr.events.push_back({t, msg.str()});
          table = std::make_unique<linear::ModeExponentials>(config.system, p, lat, dt);
          t_base = t;
          steps_since_base = 0;
        }
      }
    }
    std::vector<State*> extra;
    for (auto& a : anchors)
      if (a.active) extra.push_back(&a.zbar);
    z = step(z, dt, *table, p, extra);
    ++step_count;
    ++steps_since_base;
    t = t_base + steps_since_base * dt;
    z.time = t;
    for (State* e : extra) e->time = t;

    const StepRecord& prev = tr.steps.back();
    StepRecord r{t, dt, state_hs_norm(z, 0.0), state_hs_norm(z, 1.0), state_hs_norm(z, 2.0), 0.0};
    r.dissipation = prev.dissipation + tr.nu * dt * (prev.dz * prev.dz + r.dz * r.dz);
    tr.steps.push_back(r);
    if (progress) progress(r);

    activate_anchors(t, dt, z);
    bool sampled = false;
    while (next_target < targets.size() && targets[next_target] <= t + 1e-6 * dt) {
      if (!sampled) rec.sample(t, z, anchors);
      sampled = true;
      ++next_target;
    }
    if (checkpoint_due(t, dt)) keep_checkpoint(t, z);
  }

  tr.final_state = std::move(z);
  tr.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
  return tr;
}

// ---------------------------------------------------------------------------
// Checkpoint container (little-endian):
//   "DLCK" u32 version u32 n f64 L f64 time u32 len + system name
//   u32 blocks, then per block: u32 len + name, u32 components,
//   components * n^3 pairs of f64 (re, im) in storage order.

namespace {

constexpr char kMagic[4] = {'D', 'L', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("truncated checkpoint file");
  return v;
}
void put_string(std::ostream& os, std::string_view s) {
  put<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}
std::string get_string(std::istream& is) {
  const auto len = get<std::uint32_t>(is);
  if (len > 4096) throw std::runtime_error("corrupt checkpoint string");
  std::string s(len, '\0');
  is.read(s.data(), len);
  if (!is) throw std::runtime_error("truncated checkpoint file");
  return s;
}

}  // namespace

void write_checkpoint(const std::filesystem::path& path, const State& s) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os.write(kMagic, 4);
  put<std::uint32_t>(os, kVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(s.lattice().n));
  put<double>(os, s.lattice().box_length);
  put<double>(os, s.time);
  put_string(os, to_string(s.system));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(s.blocks.size()));
  for (const auto& b : s.blocks) {
    put_string(os, b.name);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(b.field.components()));
    for (const cplx& v : b.field.data()) {
      put<double>(os, v.real());
      put<double>(os, v.imag());
    }
  }
  if (!os) throw std::runtime_error("failed writing " + path.string());
}

State read_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error("not a checkpoint file");
  if (get<std::uint32_t>(is) != kVersion) throw std::runtime_error("unsupported checkpoint version");
  const int n = static_cast<int>(get<std::uint32_t>(is));
  const double box = get<double>(is);
  const Lattice lat = make_lattice_unchecked(n, box);
  State s;
  s.time = get<double>(is);
  s.system = system_from_string(get_string(is));
  const auto nblocks = get<std::uint32_t>(is);
  for (std::uint32_t b = 0; b < nblocks; ++b) {
    std::string name = get_string(is);
    const int comps = static_cast<int>(get<std::uint32_t>(is));
    SpectralField f(lat, comps);
    for (cplx& v : f.data()) {
      const double re = get<double>(is);
      const double im = get<double>(is);
      v = {re, im};
    }
    s.blocks.push_back({std::move(name), std::move(f)});
  }
  return s;
}

}  // namespace decaylab

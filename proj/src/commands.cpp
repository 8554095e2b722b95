#include "decaylab/commands.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "decaylab/constants.hpp"
#include "decaylab/diagnostics.hpp"
#include "decaylab/initial_data.hpp"
#include "decaylab/io.hpp"
#include "decaylab/linear_semigroup.hpp"

namespace decaylab::commands {

namespace fs = std::filesystem;

namespace {

struct OutputDirError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

fs::path out_dir(const Options& opt, const config::ExperimentSpec& spec) {
  return opt.out ? *opt.out : fs::path("out") / spec.name;
}

// Refuses to overwrite any of `files` unless forced.
void claim(const fs::path& dir, const std::vector<std::string>& files, bool force) {
  fs::create_directories(dir);
  if (force) return;
  for (const auto& f : files) {
    if (fs::exists(dir / f)) {
      throw OutputDirError((dir / f).string() + " exists; pass --force to overwrite");
    }
  }
}

void say(const Options& opt, const std::string& line) {
  if (opt.log) *opt.log << line << std::endl;
}

ProgressFn progress_printer(const Options& opt, const SimConfig& c) {
  if (!opt.log) return {};
  const long total = std::lround(c.t_end / c.dt);
  const long every = std::max(1L, total / 10);
  auto count = std::make_shared<long>(0);
  std::ostream* os = opt.log;
  return [os, every, count](const StepRecord& r) {
    if (++*count % every == 0) {
      *os << "  t = " << format_number(r.t) << "  ||z|| = " << r.z << std::endl;
    }
  };
}

double comparison_rate(const config::ExperimentSpec& spec) {
  const SystemParams& p = spec.sim.params;
  if (spec.sim.system == SystemId::micropolar) {
    return linear::eigen_bound(p, 10000, spec.verify.seed).best_C;
  }
  return dissipation_floor(p, spec.sim.system);
}

template <class Fn>
int guarded(const Options& opt, Fn&& fn) {
  try {
    return fn();
  } catch (const config::ConfigError& e) {
    say(opt, std::string("config error: ") + e.what());
    return kConfigError;
  } catch (const OutputDirError& e) {
    say(opt, std::string("output error: ") + e.what());
    return kConfigError;
  } catch (const InstabilityError& e) {
    say(opt, std::string("instability: ") + e.what());
    return kInstability;
  } catch (const std::exception& e) {
    say(opt, std::string("error: ") + e.what());
    return kRuntimeError;
  }
}

void write_run_outputs(const fs::path& dir, const config::ExperimentSpec& spec,
                       const Trajectory& traj, const nlohmann::json& header) {
  if (spec.formats.count("csv")) {
    io::write_norms_csv(dir / "norms.csv", traj, header);
    io::write_steps_csv(dir / "steps.csv", traj, header);
  }
  io::write_series_files(dir / "series", traj);
  io::write_json(dir / "trajectory.json", io::trajectory_to_json(traj, header));
  nlohmann::json meta = header;
  meta["wall_seconds"] = traj.wall_seconds;
  meta["steps"] = traj.steps.empty() ? 0 : traj.steps.size() - 1;
  meta["z0_norm"] = traj.z0_norm;
  meta["exponential_modes"] = {{"eigen", traj.eigen_modes}, {"pade", traj.pade_modes}};
  nlohmann::json ev = nlohmann::json::array();
  for (const auto& e : traj.events) ev.push_back({{"t", e.t}, {"what", e.what}});
  meta["events"] = ev;
  meta["tracks"] = nlohmann::json::array();
  for (const auto& [key, s] : traj.tracks) meta["tracks"].push_back(key);
  io::write_json(dir / "meta.json", meta);
}

Trajectory simulate(const Options& opt, const config::ExperimentSpec& spec) {
  say(opt, "running " + spec.name + ": " + std::string(to_string(spec.sim.system)) + ", n = " +
               std::to_string(spec.sim.n) + ", t_end = " + format_number(spec.sim.t_end));
  SimConfig c = spec.sim;
  Trajectory traj = run(c, progress_printer(opt, c));
  say(opt, "  done in " + format_number(std::round(traj.wall_seconds * 10) / 10) + " s");
  return traj;
}

std::string pad(const std::string& s, std::size_t w) {
  return s.size() >= w ? s : s + std::string(w - s.size(), ' ');
}

void print_summary(const Options& opt, const std::vector<VerificationReport>& reports) {
  if (!opt.log) return;
  std::ostream& os = *opt.log;
  std::map<std::string, std::pair<int, int>> by_id;
  for (const auto& r : reports) {
    const bool failed = r.status == "evaluated" && !r.pass;
    std::string tag = r.status != "evaluated" ? "SKIP" : (r.pass ? "PASS" : "FAIL");
    os << pad(tag, 5) << pad(r.theorem_id, 14) << r.label << "  [measured " << r.measured
       << ", bound " << r.bound << "]\n";
    auto& [pass, fail] = by_id[r.theorem_id];
    (failed ? fail : pass) += 1;
  }
  os << "summary:";
  for (const auto& [id, pf] : by_id) os << " " << id << " " << pf.first << "/" << pf.first + pf.second;
  os << "\n" << count_failures(reports) << " failing of " << reports.size() << " checks" << std::endl;
}

}  // namespace

nlohmann::json output_header(const config::ExperimentSpec& spec, const std::string& command) {
  return {{"tool", "decaylab"},
          {"version", io::code_version()},
          {"command", command},
          {"config", config::to_json(spec)},
          {"conventions",
           {"D^m norms use the |xi|^m Fourier weight",
            "kappa block of the micropolar symbol is -kappa xi xi^T (grad div w)",
            "linear flow is the linearization of the nonlinear micropolar system",
            "magneto-micropolar w equation carries kappa grad div w, kappa default 1",
            "K_{alpha,0} rows extend beyond the stated range m >= 1"}}};
}

std::vector<VerificationReport> verify_trajectory(const config::ExperimentSpec& spec,
                                                  Trajectory& traj) {
  using namespace diagnostics;
  const VerifyRequest& req = spec.verify;
  std::vector<VerificationReport> out;
  auto append = [&out](std::vector<VerificationReport> v) {
    out.insert(out.end(), std::make_move_iterator(v.begin()), std::make_move_iterator(v.end()));
  };
  const auto& th = spec.theorems;
  if (th.count("energy")) append(verify_energy(traj, req));
  if (th.count("decay")) append(verify_thm1(traj, req));
  if (th.count("error_decay")) append(verify_thm2(traj, req));
  if (th.count("pressure")) append(verify_pressure(traj, req));
  if (th.count("anchor")) append(verify_anchor_independence(traj, req));
  if (th.count("interpolation")) append(check_interpolated_decay(traj, req));
  if (th.count("sobolev")) {
    append(check_sobolev_lemma(sobolev_samples(req.sobolev_samples, req.sobolev_n, req.seed)));
  }
  if (th.count("comparison")) {
    const Lattice lat = make_lattice(spec.sim.n, spec.sim.box_length);
    const State g = make_initial_state(spec.sim.system, spec.sim.params, lat, spec.sim.initial);
    append(linear::verify_comparison(g, spec.sim.params, comparison_rate(spec), spec.comparison_times));
  }
  return out;
}

std::size_t count_failures(const std::vector<VerificationReport>& reports) {
  return static_cast<std::size_t>(std::count_if(reports.begin(), reports.end(), [](const auto& r) {
    return r.status == "evaluated" && !r.pass;
  }));
}

std::vector<ConstantsRow> constants_table(const config::ExperimentSpec& spec) {
  const double c = comparison_rate(spec);
  std::vector<ConstantsRow> rows;
  for (double a : spec.constants.alphas) {
    for (int m = 0; m <= spec.constants.m_max; ++m) {
      ConstantsRow r;
      r.alpha = a;
      r.m = m;
      const auto k = constants::k_alpha_m(a, m);
      r.k = k.value;
      r.k_case = m == 0 ? k.case_label + "; extension beyond stated range" : k.case_label;
      r.k_tilde = constants::k_tilde(a, m);
      if (a < 1.25) {
        r.beta = constants::beta_of_alpha(a);
        const auto e = constants::error_constant(spec.sim.params, {a, 1.0, 1.0}, m, c);
        r.c = e.value;
        r.c_case = e.case_label;
      }
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

namespace {

nlohmann::json report_json(const config::ExperimentSpec& spec, const Trajectory& traj,
                           const std::vector<VerificationReport>& reports, bool reused) {
  nlohmann::json j = output_header(spec, "verify");
  j["trajectory_reused"] = reused;
  const std::size_t fails = count_failures(reports);
  std::size_t skipped = 0;
  for (const auto& r : reports) skipped += r.status != "evaluated";
  j["summary"] = {{"checks", reports.size()},
                  {"failed", fails},
                  {"not_evaluated", skipped},
                  {"passed", reports.size() - fails - skipped}};
  j["reports"] = nlohmann::json::array();
  for (const auto& r : reports) j["reports"].push_back(to_json(r));
  j["fits"] = nlohmann::json::array();
  for (const auto& [key, s] : traj.tracks) {
    if (!s.fitted_exponent && s.tail_sup.empty()) continue;
    nlohmann::json f = io::series_to_json(s);
    f.erase("t");
    f.erase("value");
    j["fits"].push_back(std::move(f));
  }
  return j;
}

}  // namespace

int cmd_run(const Options& opt) {
  return guarded(opt, [&] {
    const auto spec = config::parse_config(opt.config);
    const fs::path dir = out_dir(opt, spec);
    claim(dir, {"norms.csv", "steps.csv", "meta.json", "trajectory.json"}, opt.force);
    config::ExperimentSpec with_files = spec;
    if (!spec.sim.checkpoint_times.empty()) with_files.sim.checkpoint_dir = dir / "checkpoints";
    const Trajectory traj = simulate(opt, with_files);
    write_run_outputs(dir, spec, traj, output_header(spec, "run"));
    say(opt, "wrote " + dir.string());
    return static_cast<int>(kOk);
  });
}

int cmd_verify(const Options& opt) {
  return guarded(opt, [&] {
    const auto spec = config::parse_config(opt.config);
    const fs::path dir = out_dir(opt, spec);
    claim(dir, {"report.json"}, opt.force);
    const nlohmann::json cfg = config::to_json(spec);

    // Reuse a saved trajectory of the same configuration; never rewrite it.
    Trajectory traj;
    bool reused = false;
    const fs::path saved = dir / "trajectory.json";
    if (fs::exists(saved)) {
      const auto j = io::read_json(saved);
      // the config file path may be spelled differently between invocations
      auto saved_cfg = j.at("header").at("config");
      auto this_cfg = cfg;
      saved_cfg.erase("source");
      this_cfg.erase("source");
      if (saved_cfg == this_cfg) {
        traj = io::trajectory_from_json(j, spec.sim);
        reused = true;
        say(opt, "using saved trajectory " + saved.string());
      } else if (!opt.force) {
        throw OutputDirError(saved.string() + " belongs to a different configuration; pass --force");
      }
    }
    if (!reused) {
      claim(dir, {"norms.csv", "steps.csv", "meta.json"}, opt.force);
      traj = simulate(opt, spec);
      write_run_outputs(dir, spec, traj, output_header(spec, "run"));
    }

    const auto reports = verify_trajectory(spec, traj);
    const std::size_t fails = count_failures(reports);
    io::write_json(dir / "report.json", report_json(spec, traj, reports, reused));
    print_summary(opt, reports);
    say(opt, "wrote " + (dir / "report.json").string());
    return static_cast<int>(fails == 0 ? kOk : kCheckFailed);
  });
}

int cmd_constants(const Options& opt) {
  return guarded(opt, [&] {
    const auto spec = config::parse_config(opt.config);
    const fs::path dir = out_dir(opt, spec);
    claim(dir, {"constants.csv", "constants.json"}, opt.force);
    const auto rows = constants_table(spec);
    const Lattice lat = make_lattice(spec.sim.n, spec.sim.box_length);
    const State z0 = make_initial_state(spec.sim.system, spec.sim.params, lat, spec.sim.initial);
    const double z0n = state_hs_norm(z0, 0.0);
    const double nu = spec.sim.params.nu_min();
    const double ts_imp =
        constants::regularity_time_bound(nu, z0n, constants::RegularityVariant::improved);
    const double ts_ler =
        constants::regularity_time_bound(nu, z0n, constants::RegularityVariant::leray);

    nlohmann::json header = output_header(spec, "constants");
    header["error_constant_inputs"] = {{"lambda0", 1.0}, {"z0_norm", 1.0}, {"c", comparison_rate(spec)}};
    header["regularity_time"] = {{"nu", nu}, {"z0_norm", z0n}, {"improved", ts_imp}, {"leray", ts_ler}};

    std::ofstream os;
    if (spec.formats.count("csv")) {
      os.open(dir / "constants.csv", std::ios::trunc);
      os << std::setprecision(17) << "# " << header.dump() << "\n";
      os << "alpha,m,K,K_case,K_tilde,beta,C,C_case\n";
    }
    nlohmann::json jrows = nlohmann::json::array();
    for (const auto& r : rows) {
      if (os.is_open()) {
        os << r.alpha << "," << r.m << "," << r.k << "," << io::csv_cell(r.k_case) << ","
           << r.k_tilde << ",";
        if (r.beta) os << *r.beta;
        os << ",";
        if (r.c) os << *r.c;
        os << "," << io::csv_cell(r.c_case) << "\n";
      }
      jrows.push_back({{"alpha", r.alpha},
                       {"m", r.m},
                       {"K", r.k},
                       {"K_case", r.k_case},
                       {"K_tilde", r.k_tilde},
                       {"beta", r.beta ? nlohmann::json(*r.beta) : nlohmann::json(nullptr)},
                       {"C", r.c ? nlohmann::json(*r.c) : nlohmann::json(nullptr)},
                       {"C_case", r.c_case}});
    }
    nlohmann::json j = header;
    j["rows"] = jrows;
    io::write_json(dir / "constants.json", j);
    if (opt.log) {
      *opt.log << "alpha   m  K_{alpha,m}          K_tilde              beta\n";
      for (const auto& r : rows) {
        std::ostringstream line;
        line << std::setprecision(12) << pad(format_number(r.alpha), 8) << pad(std::to_string(r.m), 3)
             << pad(format_number(r.k), 21) << pad(format_number(r.k_tilde), 21)
             << (r.beta ? format_number(*r.beta) : "-");
        *opt.log << line.str() << "\n";
      }
      *opt.log << "t** bound (improved) = " << ts_imp << ", (Leray) = " << ts_ler << "\n";
      *opt.log << rows.size() << " rows; wrote " << (dir / "constants.csv").string() << std::endl;
    }
    return static_cast<int>(kOk);
  });
}

int cmd_sweep(const Options& opt) {
  return guarded(opt, [&]() -> int {
    const auto spec = config::parse_config(opt.config);
    if (!spec.sweep) throw config::ConfigError(spec.source_path, 0, "sweep needs a [sweep] section");
    const auto children = config::expand_sweep(spec);
    const fs::path dir = out_dir(opt, spec);
    claim(dir, {"sweep_summary.csv"}, opt.force);
    for (const auto& c : children) claim(dir / c.name, {"report.json", "trajectory.json"}, opt.force);

    struct Result {
      int code = kRuntimeError;
      std::size_t checks = 0, failed = 0;
      std::optional<double> u_exp, w_exp;
      std::string error;
    };
    std::vector<Result> results(children.size());
    std::atomic<std::size_t> next{0};
    std::mutex log_mu;
    auto worker = [&] {
      for (std::size_t i = next++; i < children.size(); i = next++) {
        const auto& child = children[i];
        Result& res = results[i];
        try {
          Trajectory traj = run(child.sim);
          const fs::path cdir = dir / child.name;
          write_run_outputs(cdir, child, traj, output_header(child, "run"));
          const auto reports = verify_trajectory(child, traj);
          res.checks = reports.size();
          res.failed = count_failures(reports);
          io::write_json(cdir / "report.json", report_json(child, traj, reports, false));
          if (traj.has_track(track_key("u", 0)) && traj.track(track_key("u", 0)).fitted_exponent) {
            res.u_exp = traj.track(track_key("u", 0)).fitted_exponent;
          }
          if (traj.has_track(track_key("w", 0)) && traj.track(track_key("w", 0)).fitted_exponent) {
            res.w_exp = traj.track(track_key("w", 0)).fitted_exponent;
          }
          res.code = res.failed == 0 ? kOk : kCheckFailed;
        } catch (const InstabilityError& e) {
          res.code = kInstability;
          res.error = e.what();
        } catch (const std::exception& e) {
          res.code = kRuntimeError;
          res.error = e.what();
        }
        std::lock_guard lock(log_mu);
        say(opt, "  " + child.name + ": exit " + std::to_string(res.code) +
                     (res.error.empty() ? "" : " (" + res.error + ")"));
      }
    };
    const int nworkers = std::clamp(opt.workers, 1, static_cast<int>(children.size()));
    say(opt, "sweep over " + spec.sweep->parameter + ": " + std::to_string(children.size()) +
                 " children, " + std::to_string(nworkers) + " workers");
    std::vector<std::thread> pool;
    for (int w = 0; w < nworkers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::ofstream os(dir / "sweep_summary.csv", std::ios::trunc);
    os << std::setprecision(17) << "# " << output_header(spec, "sweep").dump() << "\n";
    os << "child,parameter,value,exit_code,checks,failed,u_exponent,w_exponent,error\n";
    int code = kOk;
    for (std::size_t i = 0; i < children.size(); ++i) {
      const auto& r = results[i];
      os << io::csv_cell(children[i].name) << "," << spec.sweep->parameter << ","
         << io::csv_cell(spec.sweep->values[i]) << "," << r.code << "," << r.checks << ","
         << r.failed << ",";
      if (r.u_exp) os << *r.u_exp;
      os << ",";
      if (r.w_exp) os << *r.w_exp;
      os << "," << io::csv_cell(r.error) << "\n";
      if (r.code != kOk && code == kOk) code = r.code;
    }
    say(opt, "wrote " + (dir / "sweep_summary.csv").string());
    return code;
  });
}

}  // namespace decaylab::commands

#include <iostream>

#include "CLI11.hpp"
#include "decaylab/commands.hpp"

int main(int argc, char** argv) {
  using namespace decaylab::commands;
  CLI::App app{"decaylab: decay-rate experiments for micropolar and related dissipative systems"};
  app.require_subcommand(1);

  Options opt;
  opt.log = &std::cout;
  std::string out;
  auto add_common = [&](CLI::App* sub, bool workers) {
    sub->add_option("--config", opt.config, "experiment config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory (default out/<experiment name>)");
    if (workers) sub->add_option("--workers", opt.workers, "concurrent sweep children")->check(CLI::PositiveNumber);
    sub->add_flag("--force", opt.force, "overwrite existing outputs");
  };
  auto* run = app.add_subcommand("run", "simulate and write norm tracks");
  auto* verify = app.add_subcommand("verify", "simulate (or reuse a saved run) and check the decay bounds");
  auto* consts = app.add_subcommand("constants", "tabulate K, K-tilde, beta, C and t**");
  auto* sweep = app.add_subcommand("sweep", "run and verify one child per [sweep] value");
  add_common(run, false);
  add_common(verify, false);
  add_common(consts, false);
  add_common(sweep, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }
  if (!out.empty()) opt.out = out;

  if (*run) return cmd_run(opt);
  if (*verify) return cmd_verify(opt);
  if (*consts) return cmd_constants(opt);
  return cmd_sweep(opt);
}

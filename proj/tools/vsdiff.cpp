// Command-line front end: train, sample, sweep, oracle, zeta-sweep,
// trajectories, curve. See README for the config schema.
#include "vsd/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Variance-scaled reverse diffusion: distortion-perception sweeps"};
  app.require_subcommand(1);

  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  int threads = 1;
  std::vector<CLI::App*> subs;
  for (const auto& name : vsd::cli::command_names()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "JSON run configuration")->required();
    sub->add_option("--out", out, "output directory (overrides config)");
    sub->add_option("--seed", seed, "master seed (overrides config)");
    sub->add_option("--threads", threads, "worker threads (overrides config)")->check(CLI::PositiveNumber);
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : vsd::cli::kExitConfig;
  }

  for (CLI::App* sub : subs) {
    if (!sub->parsed()) continue;
    vsd::cli::Overrides o;
    if (sub->count("--out")) o.out = out;
    if (sub->count("--seed")) o.seed = seed;
    if (sub->count("--threads")) o.threads = threads;
    return vsd::cli::run_command(sub->get_name(), config, o, std::cout, std::cerr);
  }
  return vsd::cli::kExitOther;
}

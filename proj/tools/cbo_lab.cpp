// cbo_lab: command-line front end for the consensus-based optimization lab.

#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "cli/commands.hpp"

namespace {

struct Invocation {
  std::string config_path;
  cbo::cli::Options options;
};

CLI::App* add_command(CLI::App& app, const std::string& name, const std::string& help,
                      Invocation& inv) {
  CLI::App* sub = app.add_subcommand(name, help);
  sub->add_option("--config", inv.config_path, "experiment configuration (INI)")->required();
  sub->add_option("--out", inv.options.out_dir, "output directory")->capture_default_str();
  sub->add_option("--jobs", inv.options.jobs, "worker threads for sweeps (0 = all cores)")
      ->capture_default_str();
  sub->add_flag("--emit-plot-data", inv.options.emit_plot_data,
                "write two-column plot data next to each sweep CSV");
  sub->add_flag("--trajectory", inv.options.trajectory,
                "record every integration step in the trajectory CSV");
  return sub;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Consensus-based optimization lab: simulate, sweep, certify, verify"};
  app.require_subcommand(1);
  Invocation inv;
  auto* simulate = add_command(app, "simulate", "integrate the particle system", inv);
  auto* sweep_alpha = add_command(app, "sweep-alpha", "error vs alpha with fitted rate", inv);
  auto* sweep_n = add_command(app, "sweep-n", "error vs particle count on f(x) = x", inv);
  auto* certify = add_command(app, "certify", "construct the error-bound certificate", inv);
  auto* verify = add_command(app, "verify", "audit a trajectory against the flow identities", inv);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cbo::cli::kConfigError;
  }

  cbo::cli::ExperimentConfig cfg;
  try {
    cfg = cbo::cli::load_config(inv.config_path);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return cbo::cli::kConfigError;
  }

  using namespace cbo::cli;
  if (simulate->parsed()) return cmd_simulate(cfg, inv.options, std::cout, std::cerr);
  if (sweep_alpha->parsed()) return cmd_sweep_alpha(cfg, inv.options, std::cout, std::cerr);
  if (sweep_n->parsed()) return cmd_sweep_n(cfg, inv.options, std::cout, std::cerr);
  if (certify->parsed()) return cmd_certify(cfg, inv.options, std::cout, std::cerr);
  if (verify->parsed()) return cmd_verify(cfg, inv.options, std::cout, std::cerr);
  return kConfigError;
}

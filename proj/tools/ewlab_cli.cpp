// Command-line harness: tensor checks, commutator verification, convergence
// studies and the theorem-proxy experiments. Every experiment is a pure
// function of its arguments and seed; artifacts land in --out.

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ewlab/experiments.hpp"

namespace {

int finish(const ewlab::ExperimentResult& res) {
  res.print_verdicts();
  return res.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ewlab: numerical laboratory for inhomogeneous compressible elastic waves"};
  app.require_subcommand(1);

  std::string out_dir = "out";
  std::string config_path;
  std::uint64_t seed = 7;
  int levels = 3;
  int k = 3;
  bool want_null = false;

  auto* check = app.add_subcommand("check-tensor", "symmetry and null-condition deficits");
  check->add_flag("--null", want_null, "construct a projected null tensor");
  check->add_option("--seed", seed, "random seed");
  check->add_option("--out", out_dir, "output directory");

  auto* comm = app.add_subcommand("verify-commutators", "commutator and product-rule residuals");
  comm->add_option("--levels", levels, "number of joint (h, dt) refinements");
  comm->add_option("--out", out_dir, "output directory");

  auto* conv = app.add_subcommand("convergence", "manufactured plane-packet refinement study");
  conv->add_option("--levels", levels, "number of grid refinements");
  conv->add_option("--out", out_dir, "output directory");

  auto* sim = app.add_subcommand("simulate", "time integration with energy reports");
  sim->add_option("--config", config_path, "JSON configuration");
  sim->add_option("--seed", seed, "tensor seed override");
  sim->add_option("--out", out_dir, "output directory");
  sim->add_option("--k", k, "report family order (2 or 3)")->check(CLI::IsMember({2, 3}));

  auto* th1 = app.add_subcommand("theorem1-proxy", "growth-slope proxy for the almost-global bound");
  th1->add_option("--config", config_path, "JSON configuration");
  th1->add_option("--seed", seed, "tensor seed override");
  th1->add_option("--out", out_dir, "output directory");
  th1->add_option("--k", k, "report family order (2 or 3)")->check(CLI::IsMember({2, 3}));

  auto* th2 = app.add_subcommand("theorem2-proxy", "matched null-vs-generic boundedness proxy");
  th2->add_option("--config", config_path, "JSON configuration");
  th2->add_option("--seed", seed, "tensor seed override");
  th2->add_option("--out", out_dir, "output directory");
  th2->add_option("--k", k, "report family order (2 or 3)")->check(CLI::IsMember({2, 3}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed()) return finish(ewlab::check_tensor_experiment(want_null, seed, out_dir));
    if (comm->parsed()) return finish(ewlab::verify_commutators_experiment(levels, out_dir));
    if (conv->parsed()) return finish(ewlab::convergence_experiment(levels, out_dir));

    ewlab::SimConfig cfg;
    if (!config_path.empty()) cfg = ewlab::SimConfig::load(config_path);
    if (sim->count("--seed") || th1->count("--seed") || th2->count("--seed")) {
      cfg.tensor_seed = seed;
    }
    if (sim->count("--k") || th1->count("--k") || th2->count("--k")) cfg.k_report = k;

    if (sim->parsed()) return finish(ewlab::simulate_experiment(cfg, out_dir));
    if (th1->parsed()) return finish(ewlab::theorem1_experiment(cfg, out_dir));
    if (th2->parsed()) return finish(ewlab::theorem2_experiment(cfg, out_dir));
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

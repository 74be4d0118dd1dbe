#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "gmmpp/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Simulation and exact Bayesian inference for Markov modulated "
               "Poisson processes with switching functional forms"};
  app.require_subcommand(1);

  std::string config, data, out = gmmpp::default_out_dir(), fit_dir;
  std::uint64_t seed = 1;
  int chains = 1;
  std::optional<long> iters, burnin, thin;
  std::optional<double> horizon, threshold;

  auto* sim = app.add_subcommand("simulate", "Draw a trajectory and its events");
  sim->add_option("--config", config, "model config file")->required();
  sim->add_option("--seed", seed, "random seed");
  sim->add_option("--out", out, "output directory");

  auto* fit = app.add_subcommand("fit", "Run the MCMC sampler");
  fit->add_option("--config", config, "model config file")->required();
  fit->add_option("--data", data, "event-times or weekly-counts file")->required();
  fit->add_option("--seed", seed, "master seed (split per chain)");
  fit->add_option("--chains", chains, "number of independent chains");
  fit->add_option("--out", out, "output directory");
  long it_v = 0, bu_v = 0, th_v = 0;
  auto* o1 = fit->add_option("--iters", it_v, "override iteration count");
  auto* o2 = fit->add_option("--burnin", bu_v, "override burn-in");
  auto* o3 = fit->add_option("--thin", th_v, "override thinning");

  auto* pred = app.add_subcommand("predict", "Posterior prediction from a fit");
  pred->add_option("--config", config, "model config file")->required();
  pred->add_option("--fit", fit_dir, "directory with fit outputs")->required();
  double hz = 0.0, th = 0.0;
  auto* oh = pred->add_option("--horizon", hz, "prediction horizon past S");
  auto* ot = pred->add_option("--threshold", th, "epidemic stabilization level");
  pred->add_option("--seed", seed, "random seed");
  pred->add_option("--out", out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      gmmpp::run_simulate(config, seed, out);
    } else if (fit->parsed()) {
      gmmpp::FitOverrides ov;
      if (o1->count()) ov.iters = it_v;
      if (o2->count()) ov.burnin = bu_v;
      if (o3->count()) ov.thin = th_v;
      ov.seed = seed;
      gmmpp::run_fit(config, data, seed, chains, out, ov);
    } else if (pred->parsed()) {
      gmmpp::run_predict(config, fit_dir, oh->count() ? std::optional(hz) : std::nullopt,
                         ot->count() ? std::optional(th) : std::nullopt, seed, out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

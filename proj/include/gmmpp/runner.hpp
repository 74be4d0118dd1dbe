#pragma once

#include <optional>
#include <string>

#include "gmmpp/config.hpp"
#include "gmmpp/io.hpp"

namespace gmmpp {

struct SimulateOutcome {
  PathSkeleton path;
  std::vector<double> events;
  double integrated_intensity = 0.0;
};

// Draw (or pin, via [path]) a trajectory, then thin an NHPP against it.
// Negative-intensity trajectories are redrawn: the model gives them zero mass.
SimulateOutcome simulate_model(const RunSetup& setup, std::uint64_t seed);

void run_simulate(const std::string& config_path, std::uint64_t seed,
                  const std::string& out_dir);

struct FitOverrides {
  std::optional<long> iters, burnin, thin;
  std::optional<std::uint64_t> seed;
};

struct ChainOutcome {
  GibbsResult result;
  double wall_seconds = 0.0;
  double ess_log_post = 0.0;
  double sec_per_100_ess = 0.0;
};

struct FitOutcome {
  std::vector<ChainOutcome> chains;
  PosteriorSummary summary;  // pooled across chains
};

FitOutcome fit_model(const RunSetup& setup, const PointPattern& y, int chains,
                     std::uint64_t seed);

void run_fit(const std::string& config_path, const std::string& data_path,
             std::uint64_t seed, int chains, const std::string& out_dir,
             const FitOverrides& overrides);

void run_predict(const std::string& config_path, const std::string& fit_dir,
                 std::optional<double> horizon, std::optional<double> threshold,
                 std::uint64_t seed, const std::string& out_dir);

// Default output directory: $GMMPP_OUT or "./out".
std::string default_out_dir();

}  // namespace gmmpp

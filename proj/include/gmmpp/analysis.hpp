#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gmmpp/mcmc.hpp"

namespace gmmpp {

// Effective sample size n / (1 + 2 sum rho_j) with Geyer initial-positive-
// sequence truncation; empty result flags a (near-)constant chain.
std::optional<double> ess(std::span<const double> chain);

enum class PredictTarget { kIfPath, kIntegratedIf, kEventCount };

struct PredictiveDraw {
  std::vector<double> if_path;  // on the supplied grid (target i)
  double integrated_if = 0.0;   // Lambda over (S, S+horizon] (target ii)
  long event_count = 0;         // Poisson draw given Lambda (target iii)
};

// Forward-simulates the CTMC from each retained draw's final state and
// evaluates the requested functional over (S, S + horizon].
std::vector<PredictiveDraw> predict(const std::vector<PosteriorSample>& trace,
                                    const ModelSpec& spec, double horizon,
                                    PredictTarget target,
                                    std::span<const double> grid, Rng& rng);

// (1/S) int |lambda - lambda_ref|; closed form on line/constant overlaps,
// quadrature elsewhere.
double measure_of_fit(const PathSkeleton& path, const PsiSet& psi,
                      const PathSkeleton& ref_path, const PsiSet& ref_psi,
                      const ModelSpec& spec);

std::vector<double> measure_of_fit_trace(const std::vector<PosteriorSample>& trace,
                                         const PathSkeleton& ref_path,
                                         const PsiSet& ref_psi,
                                         const ModelSpec& spec);

// Stable flattened parameter vector (theta rates, transition entries, psi)
// shared by trace files and summaries.
std::vector<std::string> param_names(const ModelSpec& spec);
std::vector<double> param_values(const PosteriorSample& s, const ModelSpec& spec);

struct SummaryRow {
  std::string name;
  double mean = 0.0, sd = 0.0, lo = 0.0, hi = 0.0;  // equal-tailed 95% CI
};

struct IfGridRow {
  double time = 0.0, mean = 0.0, lo = 0.0, hi = 0.0;
};

struct PosteriorSummary {
  std::vector<SummaryRow> params;
  std::vector<IfGridRow> if_grid;
};

PosteriorSummary summarize(const std::vector<PosteriorSample>& trace,
                           const ModelSpec& spec, std::span<const double> grid);

}  // namespace gmmpp

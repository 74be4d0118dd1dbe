#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gmmpp/ctmc.hpp"
#include "gmmpp/likelihood.hpp"
#include "gmmpp/model.hpp"
#include "gmmpp/rng.hpp"

namespace gmmpp {

struct SamplerConfig {
  long n_iter = 10000;
  long burn_in = 2000;
  long thin = 1;
  double omega_multiplier = 2.0;   // kappa; Omega_k = kappa |Q_k|
  int ctmc_updates_per_sweep = 5;  // repetitions of {virtual refresh; block MH}
  long adapt_window = 200;         // M
  double adapt_threshold = 0.25;   // r
  long adapt_until = -1;           // defaults to burn_in
  double rw_target_accept = 0.44;
  std::uint64_t seed = 1;
};

std::vector<std::string> validate_sampler_config(const SamplerConfig& cfg);

// Full latent/parameter state phi = (W, U, T, V0, V, R, theta, psi) plus the
// adaptive bookkeeping (block partition, random-walk scales).
struct ChainState {
  AugmentedPath aug;
  PathSkeleton skel;  // collapse(aug) with start values; kept in sync
  QParams theta;
  PsiSet psi;
  std::vector<double> block_bounds;        // interior boundary times
  std::vector<std::vector<double>> rw_log_scale;  // per form, per psi param

  int num_blocks() const { return static_cast<int>(block_bounds.size()) + 1; }
};

struct PosteriorSample {
  long iteration = 0;
  double log_post = 0.0;
  double log_lik = 0.0;
  QParams theta;
  PsiSet psi;
  PathSkeleton skel;
};

struct AcceptanceEntry {
  std::string name;
  long proposed = 0;
  long accepted = 0;
  double rate() const { return proposed > 0 ? double(accepted) / double(proposed) : 0.0; }
};

struct GibbsResult {
  std::vector<PosteriorSample> samples;
  std::vector<AcceptanceEntry> acceptance;
  int final_num_blocks = 1;
  double post_adapt_block_rate = 0.0;  // pooled over blocks after adaptation stops
};

// ---- Block Metropolis-Hastings over (V0, V, U, T, R) -----------------------

// One interval of the current partition, with the boundary conditions the
// proposal must respect.
struct BlockSpan {
  double t0 = 0.0, t1 = 0.0;
  std::size_t c0 = 0, c1 = 0;  // candidate index range strictly inside (t0, t1)
  bool first = false;          // left edge is time 0: V0 gets resampled
  int left_state = 0;          // fixed entry state for interior blocks
  bool constrain_right = false;
  int right_state = 0;
};

BlockSpan block_span(const ChainState& state, const ModelSpec& spec, int block);

// Output of one forward pass over a block. log_norm_sum accumulates the log
// normalizing constants (one per candidate step); the acceptance probability
// is exp(proposed.log_norm_sum - current.log_norm_sum). log_q is the log
// proposal density of the produced (score: scored) assignment.
struct BlockPass {
  bool fail = false;
  double log_norm_sum = 0.0;
  double log_q = 0.0;
  int left_state = 0;
  std::vector<int> states;       // per candidate in [c0, c1)
  std::vector<double> births_r;  // start value per segment born in [t0, t1)
};

// Sequential proposal of Algorithm-1 form: at each candidate time, candidate
// states are weighted by the transition probability times the window
// likelihood with the starting value marginalized out; a start value is then
// drawn from its window-conditional whenever the move opens a new segment.
BlockPass propose_block(const ChainState& state, const ModelSpec& spec,
                        const PointPattern& y, const BlockSpan& span, Rng& rng);

// The same pass walked along the current trajectory (Algorithm 1 step 1),
// producing the normalizing constants needed by the acceptance ratio.
BlockPass score_block(const ChainState& state, const ModelSpec& spec,
                      const PointPattern& y, const BlockSpan& span);

bool accept_block(double current_log_norm_sum, double proposed_log_norm_sum,
                  Rng& rng);

void apply_block(ChainState& state, const ModelSpec& spec, const BlockSpan& span,
                 const BlockPass& proposal);

// ---- Remaining Gibbs blocks -------------------------------------------------

// Replace (U, W, V_W) from the Prop.-2 full conditional; skeleton unchanged.
// Omega is recomputed from the current theta.
void step_virtual(ChainState& state, const ModelSpec& spec, double omega_multiplier,
                  Rng& rng);

// Conjugate Gamma / Dirichlet draws given the collapsed skeleton.
void update_theta(ChainState& state, const ModelSpec& spec, const PointPattern& y,
                  Rng& rng);

struct PsiUpdateStats {
  std::vector<std::vector<long>> proposed, accepted;
};

// Constant forms with a fixed start and Gamma prior are drawn exactly from
// their Gamma full conditional; every other parameter takes a scalar
// random-walk step with diminishing adaptation of its scale.
void update_psi(ChainState& state, const ModelSpec& spec, const PointPattern& y,
                const SamplerConfig& cfg, long iteration, bool adapting,
                PsiUpdateStats* stats, Rng& rng);

// Grow the partition when the windowed block acceptance rate falls below the
// threshold; boundaries are reset to eligible jump times nearest the candidate
// quantile positions. Returns false when no eligible partition exists.
bool adapt_partition(ChainState& state, const ModelSpec& spec, double recent_rate,
                     double threshold);

// Re-derive fixed-policy start values from psi (after psi moves).
void refresh_fixed_starts(PathSkeleton& skel, const ModelSpec& spec, const PsiSet& psi);

// A valid, boring initial state: single-segment path in the first admissible
// state, start values at policy defaults.
ChainState init_chain(const PointPattern& y, const ModelSpec& spec,
                      const SamplerConfig& cfg, Rng& rng);

GibbsResult run_gibbs(const PointPattern& y, const ModelSpec& spec,
                      const SamplerConfig& cfg, Rng& rng);

}  // namespace gmmpp

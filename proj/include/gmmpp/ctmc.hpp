#pragma once

#include <vector>

#include "gmmpp/intensity.hpp"
#include "gmmpp/model.hpp"
#include "gmmpp/rng.hpp"

namespace gmmpp {

struct AugEvent {
  double time = 0.0;
  int state = 0;
  bool virtual_jump = false;
};

// Uniformized CTMC trajectory: Poisson candidate times W with subordinated
// states V; virtual events keep the previous state. omega holds the per-form
// dominating rates used to generate it.
struct AugmentedPath {
  int v0 = 0;
  std::vector<AugEvent> events;
  std::vector<double> omega;
  double horizon = 0.0;

  std::size_t num_candidates() const { return events.size(); }
};

std::vector<std::string> check_augmented(const AugmentedPath& aug, const StateMap& m,
                                         const QParams& q);

// Per-form dominating rates Omega_k = multiplier * |Q_k|.
std::vector<double> dominating_rates(const QParams& q, double multiplier);

// Gillespie simulation of the CTMC truncated at the horizon.
PathSkeleton simulate_ctmc(const SquareMatrix& Q, std::span<const double> pi0,
                           double horizon, Rng& rng);

// Row-stochastic subordinated-chain matrix B = I + Q_row / Omega_{h(row)}.
SquareMatrix uniformization_transition(const SquareMatrix& Q, const StateMap& m,
                                       std::span<const double> omega);

AugmentedPath simulate_augmented(const SquareMatrix& Q, const StateMap& m,
                                 std::span<const double> omega,
                                 std::span<const double> pi0, double horizon,
                                 Rng& rng);

// Drop virtual events; starting values are not carried.
PathSkeleton collapse(const AugmentedPath& aug);

// Redraw the virtual jumps of a fixed skeleton from their full conditional:
// independent Poisson processes at rate Omega_{h(V_i)} + Q_{V_i,V_i} per
// segment. The skeleton collapses back unchanged.
AugmentedPath resample_virtual_jumps(const PathSkeleton& skel, const StateMap& m,
                                     const QParams& q, std::span<const double> omega,
                                     double horizon, Rng& rng);

// exp(Q t) by scaling-and-squaring on the truncated series; test oracle.
SquareMatrix matrix_exponential(const SquareMatrix& Q, double t);

}  // namespace gmmpp

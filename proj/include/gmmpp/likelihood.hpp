#pragma once

#include <span>
#include <vector>

#include "gmmpp/ctmc.hpp"
#include "gmmpp/intensity.hpp"
#include "gmmpp/model.hpp"

namespace gmmpp {

// Observed point pattern: sorted event times on [0, S].
struct PointPattern {
  std::vector<double> times;
  double horizon = 0.0;

  std::size_t size() const { return times.size(); }
  // Index range of events in [a, b); the final window passes b > S to pick up
  // an event exactly at S.
  std::pair<std::size_t, std::size_t> range(double a, double b) const;
};

struct SuffStats {
  std::vector<double> visits;                    // m_k
  std::vector<double> occupation;                // tau_k
  std::vector<std::vector<double>> transitions;  // m_{k1 k2}
  std::vector<double> event_counts;              // n_k

  double departures(int k) const {
    double d = 0.0;
    for (double c : transitions[static_cast<std::size_t>(k)]) d += c;
    return d;
  }
};

SuffStats sufficient_stats(const PointPattern& y, const PathSkeleton& skel,
                           const StateMap& m, double horizon);

// Log factor of one candidate window [a, b) under one active segment:
// -int lambda + sum log lambda(t_n), kLogZero when the intensity dips below 0
// or an event sits at non-positive intensity.
double log_window_factor(const PointPattern& y, const FunctionalForm& f,
                         std::span<const double> psi, double delta,
                         double start_value, double a, double b, bool include_end);

// Same, addressed by the skeleton's segment structure (history implied by the
// skeleton up to the window).
double log_segment_factor(const PointPattern& y, const PathSkeleton& skel,
                          const ModelSpec& spec, const PsiSet& psi, double a,
                          double b);

// Eq.-(8)-style log likelihood, up to the dominating-measure constant:
// -int_0^S lambda + sum_n log lambda(t_n).
double log_likelihood(const PointPattern& y, const PathSkeleton& skel,
                      const ModelSpec& spec, const PsiSet& psi);

// Log density of the augmented CTMC path given theta (grid, subordinated
// transitions, initial state), w.r.t. a fixed dominating measure.
double log_augmented_path_density(const AugmentedPath& aug, const ModelSpec& spec,
                                  const QParams& theta);

double log_starting_value_prior(const PathSkeleton& skel, const ModelSpec& spec);

double log_theta_prior(const QParams& theta, const ModelSpec& spec);

double log_psi_prior(const PsiSet& psi, const ModelSpec& spec);

// Traced log-posterior density: likelihood + augmented path density + R prior
// + theta prior + psi prior.
double log_joint(const PointPattern& y, const AugmentedPath& aug,
                 const PathSkeleton& skel, const QParams& theta, const PsiSet& psi,
                 const ModelSpec& spec);

}  // namespace gmmpp

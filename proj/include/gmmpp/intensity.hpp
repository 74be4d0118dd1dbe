#pragma once

#include <span>
#include <vector>

#include "gmmpp/model.hpp"
#include "gmmpp/rng.hpp"

namespace gmmpp {

// Per-form parameter vectors held by the sampler; the ModelSpec's embedded
// psi values are only the initial/true ones.
using PsiSet = std::vector<std::vector<double>>;

inline PsiSet psi_of(const ModelSpec& spec) {
  PsiSet out;
  out.reserve(spec.forms.size());
  for (const auto& f : spec.forms) out.push_back(f.psi);
  return out;
}

struct JumpEvent {
  double time = 0.0;
  int state = 0;
};

// Collapsed CTMC trajectory. `start_values` carries the intensity start R of
// each segment ([T_i, T_{i+1})); it may be left empty for pure-CTMC uses.
struct PathSkeleton {
  int v0 = 0;
  std::vector<JumpEvent> jumps;
  std::vector<double> start_values;

  std::size_t num_segments() const { return jumps.size() + 1; }
  int state_of_segment(std::size_t i) const {
    return i == 0 ? v0 : jumps[i - 1].state;
  }
  double segment_begin(std::size_t i) const { return i == 0 ? 0.0 : jumps[i - 1].time; }
  double segment_end(std::size_t i, double horizon) const {
    return i + 1 < num_segments() ? jumps[i].time : horizon;
  }
  // Index of the segment owning time s (right-continuous at jumps).
  std::size_t segment_index(double s) const;
};

// Check ordering/state invariants; messages are empty when valid.
std::vector<std::string> check_skeleton(const PathSkeleton& skel, const StateMap& m,
                                        double horizon);

// One piece of the piecewise intensity: form `form` anchored at delta with
// start value R, viewed on [begin, end).
struct IntensitySegment {
  double begin = 0.0;
  double end = 0.0;
  double delta = 0.0;  // anchor (segment birth time); begin may lie inside
  int form = 0;
  double start_value = 0.0;
};

// lambda(s) for one form given its anchor and start value.
double eval_form(const FunctionalForm& f, std::span<const double> psi, double delta,
                 double start_value, double s);

// Closed-form integral / extrema of g over [a, b] within one segment.
double integrate_form(const FunctionalForm& f, std::span<const double> psi,
                      double delta, double start_value, double a, double b);
double min_form(const FunctionalForm& f, std::span<const double> psi, double delta,
                double start_value, double a, double b);
double max_form(const FunctionalForm& f, std::span<const double> psi, double delta,
                double start_value, double a, double b);

// Start value of a segment entering `form`: psi-determined for fixed-policy
// forms, otherwise must come from the stored skeleton values.
double resolved_fixed_start(const FunctionalForm& f, std::span<const double> psi,
                            double delta);

double evaluate(const PathSkeleton& skel, const ModelSpec& spec, const PsiSet& psi,
                double s);

double integrate_segment(const IntensitySegment& seg, const FunctionalForm& f,
                         std::span<const double> psi);
double min_on_segment(const IntensitySegment& seg, const FunctionalForm& f,
                      std::span<const double> psi);

// Total integral of the path intensity over [0, S].
double integrate_path(const PathSkeleton& skel, const ModelSpec& spec,
                      const PsiSet& psi);

// Lowest value the path intensity takes on [0, S].
double min_on_path(const PathSkeleton& skel, const ModelSpec& spec, const PsiSet& psi);

// NHPP simulation by segment-wise thinning against the closed-form maximum.
std::vector<double> simulate_nhpp(const PathSkeleton& skel, const ModelSpec& spec,
                                  const PsiSet& psi, Rng& rng);

// Gaussian-kernel intensity estimate with reflection at 0 and S; empty input
// gives the zero function. Elicitation helper only.
std::vector<double> kernel_estimate(std::span<const double> events, double horizon,
                                    double bandwidth, std::span<const double> grid);

// Rule-of-thumb bandwidth for the helper above.
double kernel_bandwidth(std::span<const double> events, double horizon);

}  // namespace gmmpp

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gmmpp/mcmc.hpp"

namespace gmmpp {

// Normal-cdf epidemic curve, reparameterized by the maximum growth/decay
// slopes c1_dot, c2_dot. Growth runs in absolute time; decay is anchored at
// the change time with its level pinned by continuity.
struct EpidemicParams {
  double a = 1.0;       // growth amplitude: IF tops out near b1 + a
  double b1 = 0.0;      // pre-epidemic level
  double b2 = 0.0;      // stabilization level
  double d1 = 0.0;      // growth offset
  double d2 = 0.0;      // decay offset (d2 < 3)
  double c1_dot = 1.0;  // maximum growth slope
  double c2_dot = 1.0;  // maximum decay slope
};

std::vector<std::string> validate_epidemic(const EpidemicParams& p);

double eval_growth(double s, const EpidemicParams& p);

// Continuity scale of the decay curve; invalid (<= 0) when the decay would
// start at or below b2.
double gamma_continuity(const EpidemicParams& p, double t1);

double eval_decay(double s, double t1, const EpidemicParams& p);

double integrate_growth(double a, double b, const EpidemicParams& p);
double integrate_decay(double a, double b, double t1, const EpidemicParams& p);

// Two-form model spec (growth, decay) carrying the epidemic parameters; the
// general path/likelihood machinery then applies unchanged.
ModelSpec epidemic_spec(const EpidemicParams& p, double horizon,
                        const QParams& theta);

EpidemicParams params_of(const PsiSet& psi);
PsiSet psi_from(const EpidemicParams& p);

// Skeleton with the single enforced change at t1, start values resolved.
PathSkeleton epidemic_skeleton(const EpidemicParams& p, double t1);

struct EpidemicOptions {
  double omega_multiplier = 5.0;
  std::optional<double> window_lo, window_hi;  // change-time truncation; kernel
                                               // peak heuristic when absent
};

// Exact draw of the change-point position from its discrete full conditional
// over the candidate times inside the truncation window. Returns the index
// into aug.events.
std::size_t sample_change_point(const PointPattern& y, const AugmentedPath& aug,
                                const EpidemicParams& p, double window_lo,
                                double window_hi, Rng& rng);

GibbsResult fit_epidemic(const PointPattern& y, const ModelSpec& spec,
                         const SamplerConfig& cfg, const EpidemicOptions& opt,
                         Rng& rng);

struct StabilizationDraw {
  double time = 0.0;  // when the decay curve reaches the threshold
  double iif = 0.0;   // integrated intensity from S to that time
  bool finite = true; // false when the threshold is at or below b2
};

std::vector<StabilizationDraw> predict_stabilization(
    const std::vector<PosteriorSample>& trace, double threshold, double horizon);

// Weekly counts expanded to event times: n cases in a week become n
// independent uniforms on [start, start+7), deterministically from the seed.
std::vector<double> disaggregate_weekly(const std::vector<std::pair<double, long>>& weeks,
                                        std::uint64_t seed, double week_length = 7.0);

// Default truncation window [0.5, 1.5] * t_peak from a kernel estimate.
std::pair<double, double> default_change_window(const PointPattern& y);

}  // namespace gmmpp

#include "gmmpp/intensity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gmmpp/util.hpp"

namespace gmmpp {

std::size_t PathSkeleton::segment_index(double s) const {
  // Last jump time <= s owns s.
  std::size_t lo = 0, hi = jumps.size();
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (jumps[mid].time <= s)
      lo = mid + 1;
    else
      hi = mid;
  }
  return lo;
}

std::vector<std::string> check_skeleton(const PathSkeleton& skel, const StateMap& m,
                                        double horizon) {
  std::vector<std::string> v;
  double prev = 0.0;
  int prev_state = skel.v0;
  for (const auto& j : skel.jumps) {
    if (!(j.time > prev)) v.push_back("jump times must be strictly increasing and > 0");
    if (j.time > horizon) v.push_back("jump time beyond the horizon");
    if (j.state == prev_state) v.push_back("consecutive skeleton states must differ");
    if (j.state < 0 || j.state >= m.num_states) v.push_back("state outside the state space");
    prev = j.time;
    prev_state = j.state;
  }
  if (!skel.start_values.empty() && skel.start_values.size() != skel.num_segments())
    v.push_back("need one starting value per segment");
  return v;
}

namespace {

struct Epi {
  double base, amp, offset, slope;  // b, a (or gamma), d, c-dot
};

Epi growth_params(std::span<const double> psi) {
  return {psi[0], psi[1], psi[2], psi[3]};
}

// Decay curve: gamma is pinned by continuity to the segment's start value.
Epi decay_params(std::span<const double> psi, double start_value) {
  const double b2 = psi[0], d2 = psi[1], c2 = psi[2];
  const double gamma = (start_value - b2) / norm_cdf(d2);
  if (!(gamma > 0.0))
    throw std::domain_error("epidemic decay: start value at or below the floor b2");
  return {b2, gamma, d2, c2};
}

constexpr double kSqrt2Pi = 2.5066282746310005024;

double growth_eval(const Epi& e, double s) {
  if (e.amp <= 0.0) return e.base;
  const double beta = kSqrt2Pi * e.slope / e.amp;
  return e.base + e.amp * norm_cdf(e.offset + beta * s);
}

double decay_eval(const Epi& e, double delta, double s) {
  const double beta = kSqrt2Pi * e.slope / e.amp;
  return e.base + e.amp * norm_cdf(e.offset - beta * (s - delta));
}

// int_a^b [base + amp * Phi(off + beta s)] ds via the Phi antiderivative.
double cdf_ramp_integral(double base, double amp, double off, double beta, double a,
                         double b) {
  const double len = b - a;
  if (amp <= 0.0) return base * len;
  if (std::abs(beta) * len < 1e-12)
    return (base + amp * norm_cdf(off + beta * 0.5 * (a + b))) * len;
  const double ua = off + beta * a, ub = off + beta * b;
  return base * len + amp / beta * (norm_cdf_antideriv(ub) - norm_cdf_antideriv(ua));
}

}  // namespace

double eval_form(const FunctionalForm& f, std::span<const double> psi, double delta,
                 double start_value, double s) {
  switch (f.kind) {
    case FormKind::kConstant:
      return start_value;
    case FormKind::kLinear:
      return start_value + psi[f.trend_slot()] * (s - delta);
    case FormKind::kExponential:
      return start_value * std::exp(psi[f.trend_slot()] * (s - delta));
    case FormKind::kEpidemicGrowth:
      return growth_eval(growth_params(psi), s);
    case FormKind::kEpidemicDecay:
      return decay_eval(decay_params(psi, start_value), delta, s);
  }
  return 0.0;
}

double integrate_form(const FunctionalForm& f, std::span<const double> psi,
                      double delta, double start_value, double a, double b) {
  const double len = b - a;
  if (len <= 0.0) return 0.0;
  switch (f.kind) {
    case FormKind::kConstant:
      return start_value * len;
    case FormKind::kLinear: {
      const double slope = psi[f.trend_slot()];
      const double xa = a - delta, xb = b - delta;
      return start_value * len + 0.5 * slope * (xb * xb - xa * xa);
    }
    case FormKind::kExponential: {
      const double rho = psi[f.trend_slot()];
      const double head = start_value * std::exp(rho * (a - delta));
      if (std::abs(rho * len) < 1e-10) return head * len * (1.0 + 0.5 * rho * len);
      return head * std::expm1(rho * len) / rho;
    }
    case FormKind::kEpidemicGrowth: {
      const Epi e = growth_params(psi);
      if (e.amp <= 0.0) return e.base * len;
      return cdf_ramp_integral(e.base, e.amp, e.offset, kSqrt2Pi * e.slope / e.amp, a, b);
    }
    case FormKind::kEpidemicDecay: {
      const Epi e = decay_params(psi, start_value);
      return cdf_ramp_integral(e.base, e.amp, e.offset + kSqrt2Pi * e.slope / e.amp * delta,
                               -kSqrt2Pi * e.slope / e.amp, a, b);
    }
  }
  return 0.0;
}

double min_form(const FunctionalForm& f, std::span<const double> psi, double delta,
                double start_value, double a, double b) {
  // Every supported form is monotone, so the extrema sit at the endpoints.
  const double va = eval_form(f, psi, delta, start_value, a);
  const double vb = eval_form(f, psi, delta, start_value, b);
  return std::min(va, vb);
}

double max_form(const FunctionalForm& f, std::span<const double> psi, double delta,
                double start_value, double a, double b) {
  const double va = eval_form(f, psi, delta, start_value, a);
  const double vb = eval_form(f, psi, delta, start_value, b);
  return std::max(va, vb);
}

double resolved_fixed_start(const FunctionalForm& f, std::span<const double> psi,
                            double delta) {
  if (f.start_from_psi()) return psi[0];
  if (f.kind == FormKind::kEpidemicGrowth)
    return growth_eval(growth_params(psi), delta);
  throw std::logic_error("resolved_fixed_start: form has no deterministic start");
}

double evaluate(const PathSkeleton& skel, const ModelSpec& spec, const PsiSet& psi,
                double s) {
  if (s < 0.0 || s > spec.horizon)
    throw std::out_of_range("evaluate: s outside the observation window");
  const std::size_t i = skel.segment_index(s);
  const int k = spec.state_map.form_of(skel.state_of_segment(i));
  const auto& f = spec.forms[static_cast<std::size_t>(k)];
  return eval_form(f, psi[static_cast<std::size_t>(k)], skel.segment_begin(i),
                   skel.start_values[i], s);
}

double integrate_segment(const IntensitySegment& seg, const FunctionalForm& f,
                         std::span<const double> psi) {
  return integrate_form(f, psi, seg.delta, seg.start_value, seg.begin, seg.end);
}

double min_on_segment(const IntensitySegment& seg, const FunctionalForm& f,
                      std::span<const double> psi) {
  return min_form(f, psi, seg.delta, seg.start_value, seg.begin, seg.end);
}

double integrate_path(const PathSkeleton& skel, const ModelSpec& spec,
                      const PsiSet& psi) {
  double total = 0.0;
  for (std::size_t i = 0; i < skel.num_segments(); ++i) {
    const int k = spec.state_map.form_of(skel.state_of_segment(i));
    const auto& f = spec.forms[static_cast<std::size_t>(k)];
    total += integrate_form(f, psi[static_cast<std::size_t>(k)], skel.segment_begin(i),
                            skel.start_values[i], skel.segment_begin(i),
                            skel.segment_end(i, spec.horizon));
  }
  return total;
}

double min_on_path(const PathSkeleton& skel, const ModelSpec& spec, const PsiSet& psi) {
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < skel.num_segments(); ++i) {
    const int k = spec.state_map.form_of(skel.state_of_segment(i));
    const auto& f = spec.forms[static_cast<std::size_t>(k)];
    lo = std::min(lo, min_form(f, psi[static_cast<std::size_t>(k)],
                               skel.segment_begin(i), skel.start_values[i],
                               skel.segment_begin(i), skel.segment_end(i, spec.horizon)));
  }
  return lo;
}

std::vector<double> simulate_nhpp(const PathSkeleton& skel, const ModelSpec& spec,
                                  const PsiSet& psi, Rng& rng) {
  std::vector<double> events;
  for (std::size_t i = 0; i < skel.num_segments(); ++i) {
    const int k = spec.state_map.form_of(skel.state_of_segment(i));
    const auto& f = spec.forms[static_cast<std::size_t>(k)];
    const auto ps = std::span<const double>(psi[static_cast<std::size_t>(k)]);
    const double a = skel.segment_begin(i);
    const double b = skel.segment_end(i, spec.horizon);
    const double delta = skel.segment_begin(i);
    const double R = skel.start_values[i];
    const double bound = max_form(f, ps, delta, R, a, b);
    if (bound < 0.0)
      throw std::domain_error("simulate_nhpp: negative intensity segment");
    if (bound == 0.0) continue;
    double t = a;
    for (;;) {
      t += rng.exponential(bound);
      if (t >= b) break;
      if (rng.uniform() * bound <= eval_form(f, ps, delta, R, t)) events.push_back(t);
    }
  }
  return events;
}

std::vector<double> kernel_estimate(std::span<const double> events, double horizon,
                                    double bandwidth, std::span<const double> grid) {
  if (!(bandwidth > 0.0)) throw std::invalid_argument("kernel_estimate: bandwidth <= 0");
  std::vector<double> out(grid.size(), 0.0);
  if (events.empty()) return out;
  const double inv_h = 1.0 / bandwidth;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double t = grid[g];
    double acc = 0.0;
    for (double e : events) {
      acc += norm_pdf((t - e) * inv_h);
      acc += norm_pdf((t + e) * inv_h);                    // reflect at 0
      acc += norm_pdf((2.0 * horizon - t - e) * inv_h);    // reflect at S
    }
    out[g] = acc * inv_h;
  }
  return out;
}

double kernel_bandwidth(std::span<const double> events, double horizon) {
  if (events.size() < 2) return horizon / 10.0;
  const double sd = sample_sd(events);
  const double n = static_cast<double>(events.size());
  const double h = 1.06 * sd * std::pow(n, -0.2);
  return std::clamp(h, horizon / 200.0, horizon / 4.0);
}

}  // namespace gmmpp

#include "gmmpp/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gmmpp/util.hpp"

namespace gmmpp {

std::pair<std::size_t, std::size_t> PointPattern::range(double a, double b) const {
  const auto lo = std::lower_bound(times.begin(), times.end(), a);
  const auto hi = std::lower_bound(times.begin(), times.end(), b);
  return {static_cast<std::size_t>(lo - times.begin()),
          static_cast<std::size_t>(hi - times.begin())};
}

SuffStats sufficient_stats(const PointPattern& y, const PathSkeleton& skel,
                           const StateMap& m, double horizon) {
  const int K = m.num_forms;
  SuffStats s;
  s.visits.assign(static_cast<std::size_t>(K), 0.0);
  s.occupation.assign(static_cast<std::size_t>(K), 0.0);
  s.event_counts.assign(static_cast<std::size_t>(K), 0.0);
  s.transitions.assign(static_cast<std::size_t>(K),
                       std::vector<double>(static_cast<std::size_t>(K), 0.0));
  for (std::size_t i = 0; i < skel.num_segments(); ++i) {
    const int k = m.form_of(skel.state_of_segment(i));
    const double a = skel.segment_begin(i);
    const double b = skel.segment_end(i, horizon);
    s.visits[static_cast<std::size_t>(k)] += 1.0;
    s.occupation[static_cast<std::size_t>(k)] += b - a;
    const auto [lo, hi] = y.range(a, i + 1 == skel.num_segments()
                                         ? std::nextafter(horizon, horizon + 1.0)
                                         : b);
    s.event_counts[static_cast<std::size_t>(k)] += static_cast<double>(hi - lo);
    if (i + 1 < skel.num_segments()) {
      const int k2 = m.form_of(skel.state_of_segment(i + 1));
      s.transitions[static_cast<std::size_t>(k)][static_cast<std::size_t>(k2)] += 1.0;
    }
  }
  return s;
}

double log_window_factor(const PointPattern& y, const FunctionalForm& f,
                         std::span<const double> psi, double delta,
                         double start_value, double a, double b, bool include_end) {
  if (b <= a) return 0.0;
  if (min_form(f, psi, delta, start_value, a, b) < 0.0) return kLogZero;
  double log_f = -integrate_form(f, psi, delta, start_value, a, b);
  const auto [lo, hi] =
      y.range(a, include_end ? std::nextafter(b, b + 1.0) : b);
  for (std::size_t n = lo; n < hi; ++n) {
    const double lam = eval_form(f, psi, delta, start_value, y.times[n]);
    if (!(lam > 0.0)) return kLogZero;
    log_f += std::log(lam);
  }
  return log_f;
}

double log_segment_factor(const PointPattern& y, const PathSkeleton& skel,
                          const ModelSpec& spec, const PsiSet& psi, double a,
                          double b) {
  if (a < 0.0 || b > spec.horizon || b < a)
    throw std::out_of_range("log_segment_factor: window outside [0, S]");
  double total = 0.0;
  // The window may straddle several segments; accumulate piecewise.
  std::size_t i = skel.segment_index(a);
  double lo = a;
  while (lo < b || (lo == a && a == b)) {
    const double seg_end = skel.segment_end(i, spec.horizon);
    const double hi = std::min(b, seg_end);
    const int k = spec.state_map.form_of(skel.state_of_segment(i));
    const auto& f = spec.forms[static_cast<std::size_t>(k)];
    const double piece = log_window_factor(
        y, f, psi[static_cast<std::size_t>(k)], skel.segment_begin(i),
        skel.start_values[i], lo, hi, hi >= spec.horizon);
    if (is_log_zero(piece)) return kLogZero;
    total += piece;
    if (hi >= b) break;
    lo = hi;
    ++i;
  }
  return total;
}

double log_likelihood(const PointPattern& y, const PathSkeleton& skel,
                      const ModelSpec& spec, const PsiSet& psi) {
  if (!y.times.empty() &&
      (y.times.front() < 0.0 || y.times.back() > spec.horizon))
    throw std::out_of_range("log_likelihood: events outside [0, S]");
  double total = 0.0;
  for (std::size_t i = 0; i < skel.num_segments(); ++i) {
    const int k = spec.state_map.form_of(skel.state_of_segment(i));
    const auto& f = spec.forms[static_cast<std::size_t>(k)];
    const double a = skel.segment_begin(i);
    const double b = skel.segment_end(i, spec.horizon);
    const double piece =
        log_window_factor(y, f, psi[static_cast<std::size_t>(k)], a,
                          skel.start_values[i], a, b, i + 1 == skel.num_segments());
    if (is_log_zero(piece)) return kLogZero;
    total += piece;
  }
  return total;
}

double log_augmented_path_density(const AugmentedPath& aug, const ModelSpec& spec,
                                  const QParams& theta) {
  const auto& m = spec.state_map;
  const SquareMatrix Q = expand_q_matrix(theta, m);
  const SquareMatrix B = uniformization_transition(Q, m, aug.omega);
  double lp = std::log(spec.pi0[static_cast<std::size_t>(aug.v0)]);
  int state = aug.v0;
  double t = 0.0;
  for (const auto& e : aug.events) {
    const double rate = aug.omega[static_cast<std::size_t>(m.form_of(state))];
    lp += std::log(rate) - rate * (e.time - t);
    const double b = B.at(state, e.state);
    if (!(b > 0.0)) return kLogZero;
    lp += std::log(b);
    state = e.state;
    t = e.time;
  }
  const double rate = aug.omega[static_cast<std::size_t>(m.form_of(state))];
  lp += -rate * (aug.horizon - t);
  return lp;
}

double log_starting_value_prior(const PathSkeleton& skel, const ModelSpec& spec) {
  double lp = 0.0;
  for (std::size_t i = 0; i < skel.num_segments(); ++i) {
    const int k = spec.state_map.form_of(skel.state_of_segment(i));
    const auto& pol = spec.forms[static_cast<std::size_t>(k)].start;
    switch (pol.kind) {
      case StartPolicy::Kind::kFixed:
        break;
      case StartPolicy::Kind::kVaryingDiscrete:
        lp -= std::log(static_cast<double>(pol.support.size()));
        break;
      case StartPolicy::Kind::kVaryingGamma:
        lp += log_gamma_pdf(skel.start_values[i], pol.gamma.shape, pol.gamma.rate);
        break;
    }
  }
  return lp;
}

double log_theta_prior(const QParams& theta, const ModelSpec& spec) {
  double lp = 0.0;
  for (std::size_t k = 0; k < theta.rates.size(); ++k) {
    const auto& pr = spec.priors.theta_rate[k];
    if (!pr.fixed) lp += log_gamma_pdf(theta.rates[k], pr.gamma.shape, pr.gamma.rate);
  }
  for (std::size_t k = 0; k < theta.trans.size(); ++k) {
    const auto& pt = spec.priors.theta_trans[k];
    if (pt.fixed) continue;
    double conc_sum = 0.0;
    for (std::size_t j = 0; j < pt.concentration.size(); ++j) {
      const double p = theta.trans[k][j];
      if (pt.concentration[j] != 1.0) {
        if (!(p > 0.0)) return kLogZero;
        lp += (pt.concentration[j] - 1.0) * std::log(p);
      }
      lp -= std::lgamma(pt.concentration[j]);
      conc_sum += pt.concentration[j];
    }
    lp += std::lgamma(conc_sum);
  }
  return lp;
}

double log_psi_prior(const PsiSet& psi, const ModelSpec& spec) {
  double lp = 0.0;
  for (std::size_t k = 0; k < psi.size(); ++k)
    for (std::size_t p = 0; p < psi[k].size(); ++p) {
      const double piece = spec.priors.psi[k][p].log_pdf(psi[k][p]);
      if (is_log_zero(piece)) return kLogZero;
      lp += piece;
    }
  return lp;
}

double log_joint(const PointPattern& y, const AugmentedPath& aug,
                 const PathSkeleton& skel, const QParams& theta, const PsiSet& psi,
                 const ModelSpec& spec) {
  const double ll = log_likelihood(y, skel, spec, psi);
  if (is_log_zero(ll)) return kLogZero;
  const double lpath = log_augmented_path_density(aug, spec, theta);
  if (is_log_zero(lpath)) return kLogZero;
  const double lr = log_starting_value_prior(skel, spec);
  if (is_log_zero(lr)) return kLogZero;
  const double lt = log_theta_prior(theta, spec);
  if (is_log_zero(lt)) return kLogZero;
  const double lpsi = log_psi_prior(psi, spec);
  if (is_log_zero(lpsi)) return kLogZero;
  return ll + lpath + lr + lt + lpsi;
}

}  // namespace gmmpp

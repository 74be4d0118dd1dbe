#include "gmmpp/epidemic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gmmpp/util.hpp"

namespace gmmpp {

namespace {
constexpr double kSqrt2Pi = 2.5066282746310005024;

FunctionalForm growth_form(const EpidemicParams& p) {
  FunctionalForm f;
  f.kind = FormKind::kEpidemicGrowth;
  f.psi = {p.b1, p.a, p.d1, p.c1_dot};
  return f;
}

FunctionalForm decay_form(const EpidemicParams& p) {
  FunctionalForm f;
  f.kind = FormKind::kEpidemicDecay;
  f.psi = {p.b2, p.d2, p.c2_dot};
  return f;
}
}  // namespace

std::vector<std::string> validate_epidemic(const EpidemicParams& p) {
  std::vector<std::string> v;
  if (!(p.a > 0.0)) v.push_back("a must be > 0");
  if (!(p.b1 >= 0.0)) v.push_back("b1 must be >= 0");
  if (!(p.b2 >= 0.0)) v.push_back("b2 must be >= 0");
  if (!(p.c1_dot > 0.0)) v.push_back("c1_dot must be > 0");
  if (!(p.c2_dot > 0.0)) v.push_back("c2_dot must be > 0");
  if (!(p.d2 < 3.0)) v.push_back("d2 must be < 3");
  return v;
}

double eval_growth(double s, const EpidemicParams& p) {
  return p.b1 + p.a * norm_cdf(p.d1 + kSqrt2Pi / p.a * p.c1_dot * s);
}

double gamma_continuity(const EpidemicParams& p, double t1) {
  return (eval_growth(t1, p) - p.b2) / norm_cdf(p.d2);
}

double eval_decay(double s, double t1, const EpidemicParams& p) {
  const double g = gamma_continuity(p, t1);
  if (!(g > 0.0)) throw std::domain_error("eval_decay: decay would start below b2");
  return p.b2 + g * norm_cdf(p.d2 - kSqrt2Pi / g * p.c2_dot * (s - t1));
}

double integrate_growth(double a, double b, const EpidemicParams& p) {
  const FunctionalForm f = growth_form(p);
  return integrate_form(f, f.psi, 0.0, p.b1, a, b);
}

double integrate_decay(double a, double b, double t1, const EpidemicParams& p) {
  const FunctionalForm f = decay_form(p);
  return integrate_form(f, f.psi, t1, eval_growth(t1, p), a, b);
}

ModelSpec epidemic_spec(const EpidemicParams& p, double horizon,
                        const QParams& theta) {
  ModelSpec spec;
  spec.forms = {growth_form(p), decay_form(p)};
  spec.state_map = build_state_map(2, {false, false});
  spec.theta = theta;
  spec.horizon = horizon;
  spec.pi0 = {1.0, 0.0};  // the cycle starts in the growth phase
  finalize_defaults(spec);
  return spec;
}

EpidemicParams params_of(const PsiSet& psi) {
  EpidemicParams p;
  p.b1 = psi[0][0];
  p.a = psi[0][1];
  p.d1 = psi[0][2];
  p.c1_dot = psi[0][3];
  p.b2 = psi[1][0];
  p.d2 = psi[1][1];
  p.c2_dot = psi[1][2];
  return p;
}

PsiSet psi_from(const EpidemicParams& p) {
  return {{p.b1, p.a, p.d1, p.c1_dot}, {p.b2, p.d2, p.c2_dot}};
}

PathSkeleton epidemic_skeleton(const EpidemicParams& p, double t1) {
  PathSkeleton skel;
  skel.v0 = 0;
  skel.jumps = {{t1, 1}};
  skel.start_values = {eval_growth(0.0, p), eval_growth(t1, p)};
  return skel;
}

std::size_t sample_change_point(const PointPattern& y, const AugmentedPath& aug,
                                const EpidemicParams& p, double window_lo,
                                double window_hi, Rng& rng) {
  const auto& ev = aug.events;
  const double S = aug.horizon;
  const double omega1 = aug.omega[0], omega2 = aug.omega[1];
  // Prefix sums of log g1 over events; the growth phase does not depend on
  // the change position.
  std::vector<double> growth_prefix(y.size() + 1, 0.0);
  for (std::size_t n = 0; n < y.size(); ++n)
    growth_prefix[n + 1] = growth_prefix[n] + std::log(eval_growth(y.times[n], p));

  std::vector<std::size_t> candidates;
  std::vector<double> log_w;
  for (std::size_t l = 0; l < ev.size(); ++l) {
    const double t1 = ev[l].time;
    if (t1 < window_lo || t1 > window_hi) continue;
    double lw = static_cast<double>(l + 1) * (std::log(omega1) - std::log(omega2)) +
                (omega2 - omega1) * t1;
    const double g = gamma_continuity(p, t1);
    if (!(g > 0.0)) {
      candidates.push_back(l);
      log_w.push_back(kLogZero);
      continue;
    }
    lw -= integrate_growth(0.0, t1, p) + integrate_decay(t1, S, t1, p);
    const auto [split, end] = y.range(t1, std::nextafter(S, S + 1.0));
    (void)end;
    lw += growth_prefix[split];
    bool dead = false;
    for (std::size_t n = split; n < y.size(); ++n) {
      const double lam = eval_decay(y.times[n], t1, p);
      if (!(lam > 0.0)) {
        dead = true;
        break;
      }
      lw += std::log(lam);
    }
    candidates.push_back(l);
    log_w.push_back(dead ? kLogZero : lw);
  }
  if (candidates.empty())
    throw std::runtime_error("sample_change_point: no candidate times in the window");
  const int pick = rng.categorical_log(log_w);
  return candidates[static_cast<std::size_t>(pick)];
}

namespace {

// Rebuild the candidate grid around a fixed change time.
AugmentedPath epidemic_grid(const EpidemicParams& p, double t1, const QParams& theta,
                            double horizon, double multiplier, Rng& rng) {
  (void)p;
  AugmentedPath aug;
  aug.horizon = horizon;
  aug.v0 = 0;
  aug.omega = dominating_rates(theta, multiplier);
  const double r1 = aug.omega[0] - theta.rates[0];
  const double r2 = aug.omega[1] - theta.rates[1];
  double t = 0.0;
  if (r1 > 0.0)
    for (;;) {
      t += rng.exponential(r1);
      if (t >= t1) break;
      aug.events.push_back({t, 0, true});
    }
  aug.events.push_back({t1, 1, false});
  t = t1;
  if (r2 > 0.0)
    for (;;) {
      t += rng.exponential(r2);
      if (t >= horizon) break;
      aug.events.push_back({t, 1, true});
    }
  return aug;
}

double epidemic_log_lik(const PointPattern& y, const EpidemicParams& p, double t1,
                        double horizon) {
  const double g = gamma_continuity(p, t1);
  if (!(g > 0.0)) return kLogZero;
  double ll = -(integrate_growth(0.0, t1, p) + integrate_decay(t1, horizon, t1, p));
  const auto [split, end] = y.range(t1, std::nextafter(horizon, horizon + 1.0));
  (void)end;
  for (std::size_t n = 0; n < split; ++n) {
    const double lam = eval_growth(y.times[n], p);
    if (!(lam > 0.0)) return kLogZero;
    ll += std::log(lam);
  }
  for (std::size_t n = split; n < y.size(); ++n) {
    const double lam = eval_decay(y.times[n], t1, p);
    if (!(lam > 0.0)) return kLogZero;
    ll += std::log(lam);
  }
  return ll;
}

double epidemic_log_prior(const EpidemicParams& p, const ModelSpec& spec) {
  if (!validate_epidemic(p).empty()) return kLogZero;
  return log_psi_prior(psi_from(p), spec);
}

}  // namespace

GibbsResult fit_epidemic(const PointPattern& y, const ModelSpec& spec,
                         const SamplerConfig& cfg, const EpidemicOptions& opt,
                         Rng& rng) {
  if (spec.forms.size() != 2 || spec.forms[0].kind != FormKind::kEpidemicGrowth ||
      spec.forms[1].kind != FormKind::kEpidemicDecay)
    throw std::invalid_argument("fit_epidemic: spec must hold growth and decay forms");
  EpidemicParams p = params_of(psi_of(spec));
  {
    const auto v = validate_epidemic(p);
    if (!v.empty())
      throw std::invalid_argument("fit_epidemic: invalid initial parameters: " + v[0]);
  }
  double window_lo, window_hi;
  if (opt.window_lo && opt.window_hi) {
    window_lo = *opt.window_lo;
    window_hi = *opt.window_hi;
  } else {
    std::tie(window_lo, window_hi) = default_change_window(y);
  }
  window_lo = std::max(window_lo, 1e-9 * spec.horizon);
  window_hi = std::min(window_hi, spec.horizon * (1.0 - 1e-9));

  // Initial change time: the first window quantile with positive density.
  double t1 = 0.5 * (window_lo + window_hi);
  {
    bool ok = false;
    for (double q : {0.5, 0.25, 0.75, 0.1, 0.9}) {
      const double cand = window_lo + q * (window_hi - window_lo);
      if (!is_log_zero(epidemic_log_lik(y, p, cand, spec.horizon))) {
        t1 = cand;
        ok = true;
        break;
      }
    }
    if (!ok)
      throw std::runtime_error(
          "fit_epidemic: no admissible change time in the window; adjust the "
          "initial parameters");
  }

  // Per-block random-walk state: growth shape, decay shape, baseline b1.
  struct RwBlock {
    std::vector<std::pair<int, int>> slots;  // (form, psi index)
    double log_scale = 0.0;
    std::vector<double> unit;
    long proposed = 0, accepted = 0;
  };
  std::vector<RwBlock> blocks;
  const auto add_block = [&](std::vector<std::pair<int, int>> slots, double target_frac) {
    RwBlock b;
    for (auto [k, i] : slots) {
      const auto& prior = spec.priors.psi[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
      if (prior.kind == PsiPrior::Kind::kFixed) continue;
      b.slots.emplace_back(k, i);
      const double v = spec.forms[static_cast<std::size_t>(k)].psi[static_cast<std::size_t>(i)];
      b.unit.push_back(std::max(0.01, target_frac * std::abs(v)));
    }
    if (!b.slots.empty()) blocks.push_back(std::move(b));
  };
  add_block({{0, 1}, {0, 2}, {0, 3}}, 0.05);  // a, d1, c1_dot
  add_block({{1, 0}, {1, 1}, {1, 2}}, 0.05);  // b2, d2, c2_dot
  add_block({{0, 0}}, 0.25);                  // b1
  const bool theta_fixed = spec.priors.theta_rate[0].fixed && spec.priors.theta_rate[1].fixed;

  const long adapt_until = cfg.adapt_until < 0 ? cfg.burn_in : cfg.adapt_until;
  QParams theta = spec.theta;
  ModelSpec live = spec;  // carries current psi for the prior evaluation only
  double cur_ll = epidemic_log_lik(y, p, t1, spec.horizon);
  AugmentedPath aug = epidemic_grid(p, t1, theta, spec.horizon, opt.omega_multiplier, rng);

  GibbsResult result;
  long cp_moves = 0;
  for (long iter = 0; iter < cfg.n_iter; ++iter) {
    const bool adapting = iter < adapt_until;
    // Candidate grid refresh and exact change-point draw.
    aug = epidemic_grid(p, t1, theta, spec.horizon, opt.omega_multiplier, rng);
    const std::size_t idx = sample_change_point(y, aug, p, window_lo, window_hi, rng);
    const double new_t1 = aug.events[idx].time;
    if (new_t1 != t1) {
      ++cp_moves;
      t1 = new_t1;
      for (auto& e : aug.events) {
        e.state = e.time < t1 ? 0 : 1;
        e.virtual_jump = e.time != t1;
      }
      std::stable_sort(aug.events.begin(), aug.events.end(),
                       [](const AugEvent& a, const AugEvent& b) { return a.time < b.time; });
      cur_ll = epidemic_log_lik(y, p, t1, spec.horizon);
    }

    // Parameter blocks: joint Gaussian steps, scale adapted per block.
    const double adapt_step = std::pow(static_cast<double>(iter) + 1.0, -0.6);
    for (auto& b : blocks) {
      EpidemicParams cand = p;
      PsiSet cand_psi = psi_from(p);
      for (std::size_t i = 0; i < b.slots.size(); ++i) {
        auto [k, slot] = b.slots[i];
        cand_psi[static_cast<std::size_t>(k)][static_cast<std::size_t>(slot)] +=
            std::exp(b.log_scale) * b.unit[i] * rng.normal();
      }
      cand = params_of(cand_psi);
      bool acc = false;
      const double lp_cand = epidemic_log_prior(cand, live);
      if (!is_log_zero(lp_cand)) {
        const double ll_cand = epidemic_log_lik(y, cand, t1, spec.horizon);
        if (!is_log_zero(ll_cand)) {
          const double lp_cur = epidemic_log_prior(p, live);
          const double la = (ll_cand + lp_cand) - (cur_ll + lp_cur);
          if (la >= 0.0 || std::log(rng.uniform()) < la) {
            p = cand;
            cur_ll = ll_cand;
            acc = true;
          }
        }
      }
      ++b.proposed;
      b.accepted += acc ? 1 : 0;
      if (adapting) {
        const double target = b.slots.size() > 1 ? 0.30 : cfg.rw_target_accept;
        b.log_scale += adapt_step * ((acc ? 1.0 : 0.0) - target);
      }
    }

    if (!theta_fixed) {
      // Conjugate update on the one-jump skeleton.
      for (int k = 0; k < 2; ++k) {
        const auto& pr = spec.priors.theta_rate[static_cast<std::size_t>(k)];
        if (pr.fixed) continue;
        const double departures = k == 0 ? 1.0 : 0.0;
        const double tau = k == 0 ? t1 : spec.horizon - t1;
        theta.rates[static_cast<std::size_t>(k)] =
            rng.gamma(pr.gamma.shape + departures, pr.gamma.rate + tau);
      }
    }

    if (iter >= cfg.burn_in && (iter - cfg.burn_in) % cfg.thin == 0) {
      PosteriorSample s;
      s.iteration = iter;
      s.theta = theta;
      s.psi = psi_from(p);
      s.skel = epidemic_skeleton(p, t1);
      s.log_lik = cur_ll;
      aug.omega = dominating_rates(theta, opt.omega_multiplier);
      ModelSpec traced = live;
      traced.theta = theta;
      s.log_post = cur_ll + log_augmented_path_density(aug, traced, theta) +
                   log_psi_prior(s.psi, live) + log_theta_prior(theta, live);
      result.samples.push_back(std::move(s));
    }
  }

  result.final_num_blocks = 1;
  result.acceptance.push_back({"change_point.moves", cfg.n_iter, cp_moves});
  const char* names[] = {"psi.growth_shape", "psi.decay_shape", "psi.baseline"};
  for (std::size_t i = 0; i < blocks.size(); ++i)
    result.acceptance.push_back(
        {names[std::min<std::size_t>(i, 2)], blocks[i].proposed, blocks[i].accepted});
  result.post_adapt_block_rate =
      blocks.empty() ? 1.0
                     : static_cast<double>(blocks[0].accepted) /
                           std::max(1L, blocks[0].proposed);
  return result;
}

std::vector<StabilizationDraw> predict_stabilization(
    const std::vector<PosteriorSample>& trace, double threshold, double horizon) {
  std::vector<StabilizationDraw> out;
  out.reserve(trace.size());
  for (const auto& s : trace) {
    const EpidemicParams p = params_of(s.psi);
    const double t1 = s.skel.jumps.empty() ? 0.0 : s.skel.jumps[0].time;
    StabilizationDraw d;
    const double g = gamma_continuity(p, t1);
    const double ratio = (threshold - p.b2) / g;
    if (!(ratio > 0.0)) {
      d.finite = false;
      d.time = std::numeric_limits<double>::quiet_NaN();
      d.iif = std::numeric_limits<double>::quiet_NaN();
    } else if (ratio >= 1.0) {
      d.time = horizon;  // already at or below the threshold
      d.iif = 0.0;
    } else {
      const double beta = kSqrt2Pi * p.c2_dot / g;
      const double t = t1 + (p.d2 - norm_quantile(ratio)) / beta;
      d.time = std::max(t, horizon);
      d.iif = t <= horizon ? 0.0 : integrate_decay(horizon, t, t1, p);
    }
    out.push_back(d);
  }
  return out;
}

std::vector<double> disaggregate_weekly(const std::vector<std::pair<double, long>>& weeks,
                                        std::uint64_t seed, double week_length) {
  std::vector<double> events;
  for (std::size_t w = 0; w < weeks.size(); ++w) {
    Rng sub(split_seed(seed, w));
    for (long i = 0; i < weeks[w].second; ++i)
      events.push_back(weeks[w].first + week_length * sub.uniform());
  }
  std::sort(events.begin(), events.end());
  return events;
}

std::pair<double, double> default_change_window(const PointPattern& y) {
  if (y.times.empty())
    throw std::invalid_argument("default_change_window: empty point pattern");
  const int n_grid = 200;
  std::vector<double> grid(n_grid);
  for (int i = 0; i < n_grid; ++i)
    grid[static_cast<std::size_t>(i)] = y.horizon * (i + 0.5) / n_grid;
  const double bw = kernel_bandwidth(y.times, y.horizon);
  const auto est = kernel_estimate(y.times, y.horizon, bw, grid);
  const auto peak = std::max_element(est.begin(), est.end());
  const double t_peak = grid[static_cast<std::size_t>(peak - est.begin())];
  return {0.5 * t_peak, std::min(1.5 * t_peak, y.horizon)};
}

}  // namespace gmmpp

#include "gmmpp/mcmc.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

#include "gmmpp/util.hpp"

namespace gmmpp {

std::vector<std::string> validate_sampler_config(const SamplerConfig& cfg) {
  std::vector<std::string> v;
  if (!(cfg.omega_multiplier > 1.0))
    v.push_back("omega multiplier must be > 1 (strict domination keeps virtual jumps)");
  if (!(cfg.adapt_threshold > 0.0 && cfg.adapt_threshold < 1.0))
    v.push_back("adapt threshold must lie in (0,1)");
  if (cfg.burn_in >= cfg.n_iter) v.push_back("burn-in must be smaller than the iteration count");
  if (cfg.adapt_until > cfg.burn_in)
    v.push_back("adaptation must stop at or before the end of burn-in");
  if (cfg.thin < 1) v.push_back("thinning must be >= 1");
  if (cfg.ctmc_updates_per_sweep < 1) v.push_back("ctmc updates per sweep must be >= 1");
  return v;
}

namespace {

// Marginalized likelihood factor of one window for a candidate segment,
// together with what is needed to draw (or score) its start value.
struct RMarginal {
  double log_m = kLogZero;
  double fixed_r = 0.0;
  std::vector<double> log_w;          // discrete support weights (prior included)
  double post_shape = 0.0, post_rate = 0.0;  // Gamma-conjugate window posterior
};

RMarginal marginal_new_segment(const PointPattern& y, const ModelSpec& spec,
                               const PsiSet& psi, int form, double delta, double a,
                               double b, bool include_end) {
  const auto& f = spec.forms[static_cast<std::size_t>(form)];
  const auto ps = std::span<const double>(psi[static_cast<std::size_t>(form)]);
  RMarginal out;
  switch (f.start.kind) {
    case StartPolicy::Kind::kFixed: {
      out.fixed_r = resolved_fixed_start(f, ps, delta);
      out.log_m = log_window_factor(y, f, ps, delta, out.fixed_r, a, b, include_end);
      return out;
    }
    case StartPolicy::Kind::kVaryingDiscrete: {
      const auto& sup = f.start.support;
      const double log_prior = -std::log(static_cast<double>(sup.size()));
      out.log_w.resize(sup.size());
      for (std::size_t i = 0; i < sup.size(); ++i)
        out.log_w[i] =
            log_prior + log_window_factor(y, f, ps, delta, sup[i], a, b, include_end);
      out.log_m = log_sum_exp(out.log_w);
      return out;
    }
    case StartPolicy::Kind::kVaryingGamma: {
      // Constant form: the window factor is r^{n} e^{-r len}, conjugate with
      // the Gamma prior; the marginal is the ratio of normalizing constants.
      const double len = b - a;
      const auto [lo, hi] = y.range(a, include_end ? std::nextafter(b, b + 1.0) : b);
      const double n = static_cast<double>(hi - lo);
      const double eta = f.start.gamma.shape, nu = f.start.gamma.rate;
      out.post_shape = eta + n;
      out.post_rate = nu + len;
      out.log_m = eta * std::log(nu) - std::lgamma(eta) + std::lgamma(out.post_shape) -
                  out.post_shape * std::log(out.post_rate);
      return out;
    }
  }
  return out;
}

struct ActiveSegment {
  int state = 0;
  double delta = 0.0;
  double r = 0.0;
};

// One forward walk over a block. With a null rng the walk follows the current
// trajectory and only accumulates the normalizing constants (score mode).
BlockPass run_pass(const ChainState& state, const ModelSpec& spec,
                   const PointPattern& y, const BlockSpan& span, Rng* rng) {
  const auto& m = spec.state_map;
  const int E = m.num_states;
  const bool score = rng == nullptr;
  const SquareMatrix Q = expand_q_matrix(state.theta, m);
  const SquareMatrix B = uniformization_transition(Q, m, state.aug.omega);

  BlockPass out;
  std::size_t cur_seg = state.skel.segment_index(span.t0);

  const auto window_end = [&](std::size_t c) {
    return c < span.c1 ? state.aug.events[c].time : span.t1;
  };
  const auto is_final_window = [&](double b) { return b >= spec.horizon; };

  std::vector<double> w(static_cast<std::size_t>(E));
  std::vector<RMarginal> marg(static_cast<std::size_t>(E));

  // Draws (propose) or scores (score mode) the start value of a new segment.
  const auto settle_r = [&](int j, const RMarginal& mg, double current_r) -> double {
    const auto& f = spec.forms[static_cast<std::size_t>(m.form_of(j))];
    switch (f.start.kind) {
      case StartPolicy::Kind::kFixed:
        return mg.fixed_r;
      case StartPolicy::Kind::kVaryingDiscrete: {
        std::size_t idx;
        if (score) {
          const auto& sup = f.start.support;
          idx = static_cast<std::size_t>(
              std::find(sup.begin(), sup.end(), current_r) - sup.begin());
          if (idx >= sup.size())
            throw std::runtime_error("score pass: start value not in the support");
        } else {
          idx = static_cast<std::size_t>(rng->categorical_log(mg.log_w));
        }
        out.log_q += mg.log_w[idx] - mg.log_m;
        return f.start.support[idx];
      }
      case StartPolicy::Kind::kVaryingGamma: {
        const double r = score ? current_r : rng->gamma(mg.post_shape, mg.post_rate);
        out.log_q += log_gamma_pdf(r, mg.post_shape, mg.post_rate);
        return r;
      }
    }
    return 0.0;
  };

  // Left edge.
  {
    const double a = span.t0, b = window_end(span.c0);
    const bool incl = is_final_window(b);
    std::fill(w.begin(), w.end(), kLogZero);
    if (span.first) {
      for (int j = 0; j < E; ++j) {
        const double p0 = spec.pi0[static_cast<std::size_t>(j)];
        if (!(p0 > 0.0)) continue;
        marg[static_cast<std::size_t>(j)] =
            marginal_new_segment(y, spec, state.psi, m.form_of(j), a, a, b, incl);
        if (is_log_zero(marg[static_cast<std::size_t>(j)].log_m)) continue;
        w[static_cast<std::size_t>(j)] =
            std::log(p0) + marg[static_cast<std::size_t>(j)].log_m;
      }
    } else {
      const int j = span.left_state;
      marg[static_cast<std::size_t>(j)] =
          marginal_new_segment(y, spec, state.psi, m.form_of(j), a, a, b, incl);
      w[static_cast<std::size_t>(j)] = marg[static_cast<std::size_t>(j)].log_m;
    }
    const double norm = log_sum_exp(w);
    if (is_log_zero(norm)) {
      if (score) throw std::runtime_error("score pass found a zero-mass current path");
      out.fail = true;
      return out;
    }
    out.log_norm_sum += norm;
    int j;
    if (score)
      j = span.first ? state.aug.v0 : span.left_state;
    else
      j = span.first ? rng->categorical_log(w) : span.left_state;
    out.log_q += w[static_cast<std::size_t>(j)] - norm;
    out.left_state = j;
    const double cur_r =
        state.skel.start_values.empty() ? 0.0 : state.skel.start_values[cur_seg];
    const double r = settle_r(j, marg[static_cast<std::size_t>(j)], cur_r);
    out.births_r.push_back(r);
  }

  ActiveSegment active{out.left_state, span.t0, out.births_r.back()};

  for (std::size_t c = span.c0; c < span.c1; ++c) {
    const double a = state.aug.events[c].time;
    const double b = window_end(c + 1);
    const bool incl = is_final_window(b);
    const bool last = (c + 1 == span.c1);
    std::fill(w.begin(), w.end(), kLogZero);
    for (int j = 0; j < E; ++j) {
      const double pb = B.at(active.state, j);
      if (!(pb > 0.0)) continue;
      double lw;
      if (j == active.state) {
        const int k = m.form_of(j);
        lw = log_window_factor(y, spec.forms[static_cast<std::size_t>(k)],
                               state.psi[static_cast<std::size_t>(k)], active.delta,
                               active.r, a, b, incl);
      } else {
        marg[static_cast<std::size_t>(j)] =
            marginal_new_segment(y, spec, state.psi, m.form_of(j), a, a, b, incl);
        lw = marg[static_cast<std::size_t>(j)].log_m;
      }
      if (is_log_zero(lw)) continue;
      double weight = std::log(pb) + lw;
      if (span.constrain_right && last) {
        // The jump into the right boundary must stay a state change.
        if (j == span.right_state) continue;
        const double pb2 = B.at(j, span.right_state);
        if (!(pb2 > 0.0)) continue;
        weight += std::log(pb2);
      }
      w[static_cast<std::size_t>(j)] = weight;
    }
    const double norm = log_sum_exp(w);
    if (is_log_zero(norm)) {
      if (score) throw std::runtime_error("score pass found a zero-mass current path");
      out.fail = true;
      return out;
    }
    out.log_norm_sum += norm;
    const int j = score ? state.aug.events[c].state : rng->categorical_log(w);
    out.log_q += w[static_cast<std::size_t>(j)] - norm;
    out.states.push_back(j);
    if (j != active.state) {
      if (score) ++cur_seg;
      const double cur_r = state.skel.start_values.empty()
                               ? 0.0
                               : state.skel.start_values[cur_seg];
      const double r = settle_r(j, marg[static_cast<std::size_t>(j)], cur_r);
      out.births_r.push_back(r);
      active = {j, a, r};
    }
  }
  return out;
}

}  // namespace

BlockSpan block_span(const ChainState& state, const ModelSpec& spec, int block) {
  const auto& bb = state.block_bounds;
  const int nb = state.num_blocks();
  BlockSpan span;
  span.t0 = block == 0 ? 0.0 : bb[static_cast<std::size_t>(block - 1)];
  span.t1 = block == nb - 1 ? spec.horizon : bb[static_cast<std::size_t>(block)];
  span.first = block == 0;
  const auto& ev = state.aug.events;
  span.c0 = static_cast<std::size_t>(
      std::upper_bound(ev.begin(), ev.end(), span.t0,
                       [](double t, const AugEvent& e) { return t < e.time; }) -
      ev.begin());
  span.c1 = static_cast<std::size_t>(
      std::lower_bound(ev.begin(), ev.end(), span.t1,
                       [](const AugEvent& e, double t) { return e.time < t; }) -
      ev.begin());
  if (!span.first)
    span.left_state = state.skel.state_of_segment(state.skel.segment_index(span.t0));
  span.constrain_right = block < nb - 1;
  if (span.constrain_right)
    span.right_state = state.skel.state_of_segment(state.skel.segment_index(span.t1));
  return span;
}

BlockPass propose_block(const ChainState& state, const ModelSpec& spec,
                        const PointPattern& y, const BlockSpan& span, Rng& rng) {
  return run_pass(state, spec, y, span, &rng);
}

BlockPass score_block(const ChainState& state, const ModelSpec& spec,
                      const PointPattern& y, const BlockSpan& span) {
  return run_pass(state, spec, y, span, nullptr);
}

bool accept_block(double current_log_norm_sum, double proposed_log_norm_sum,
                  Rng& rng) {
  const double log_alpha = proposed_log_norm_sum - current_log_norm_sum;
  if (log_alpha >= 0.0) return true;
  return std::log(rng.uniform()) < log_alpha;
}

void apply_block(ChainState& state, const ModelSpec& spec, const BlockSpan& span,
                 const BlockPass& proposal) {
  (void)spec;
  auto& ev = state.aug.events;
  if (span.first) state.aug.v0 = proposal.left_state;
  int prev = proposal.left_state;
  for (std::size_t i = 0; i < proposal.states.size(); ++i) {
    auto& e = ev[span.c0 + i];
    e.state = proposal.states[i];
    e.virtual_jump = (e.state == prev);
    prev = e.state;
  }
  if (span.constrain_right && span.c1 < ev.size()) {
    auto& boundary = ev[span.c1];
    boundary.virtual_jump = (boundary.state == prev);
    assert(!boundary.virtual_jump);
  }

  // Rebuild the skeleton, splicing start values: segments born inside the
  // block take the pass draws, everything else keeps its value.
  const PathSkeleton old = state.skel;
  PathSkeleton ns = collapse(state.aug);
  ns.start_values.resize(ns.num_segments());
  std::size_t bi = 0, oi = 0;
  for (std::size_t i = 0; i < ns.num_segments(); ++i) {
    const double birth = ns.segment_begin(i);
    if (birth >= span.t0 && birth < span.t1) {
      ns.start_values[i] = proposal.births_r[bi++];
    } else {
      while (oi < old.num_segments() && old.segment_begin(oi) != birth) ++oi;
      if (oi >= old.num_segments())
        throw std::logic_error("apply_block: lost a segment outside the block");
      ns.start_values[i] = old.start_values[oi];
    }
  }
  if (bi != proposal.births_r.size())
    throw std::logic_error("apply_block: start-value splice mismatch");
  state.skel = std::move(ns);
}

void step_virtual(ChainState& state, const ModelSpec& spec, double omega_multiplier,
                  Rng& rng) {
  const auto omega = dominating_rates(state.theta, omega_multiplier);
  state.aug = resample_virtual_jumps(state.skel, spec.state_map, state.theta, omega,
                                     spec.horizon, rng);
}

void update_theta(ChainState& state, const ModelSpec& spec, const PointPattern& y,
                  Rng& rng) {
  const auto& m = spec.state_map;
  const SuffStats stats = sufficient_stats(y, state.skel, m, spec.horizon);
  const int K = m.num_forms;
  for (int k = 0; k < K; ++k) {
    const auto& pr = spec.priors.theta_rate[static_cast<std::size_t>(k)];
    if (pr.fixed) continue;
    // Completed visits carry the theta_k factor; the censored final segment
    // only contributes survival through tau_k.
    const double shape = pr.gamma.shape + stats.departures(k);
    const double rate = pr.gamma.rate + stats.occupation[static_cast<std::size_t>(k)];
    state.theta.rates[static_cast<std::size_t>(k)] = rng.gamma(shape, rate);
  }
  for (int k = 0; k < K; ++k) {
    const auto& pt = spec.priors.theta_trans[static_cast<std::size_t>(k)];
    if (pt.fixed) continue;
    auto& row = state.theta.trans[static_cast<std::size_t>(k)];
    std::vector<double> draw(row.size(), 0.0);
    double total = 0.0;
    for (std::size_t slot = 0; slot < row.size(); ++slot) {
      int to;
      if (m.doubled())
        to = static_cast<int>(slot);
      else
        to = static_cast<int>(slot) < k ? static_cast<int>(slot)
                                        : static_cast<int>(slot) + 1;
      if (m.doubled() && to == k && !spec.forms[static_cast<std::size_t>(k)].self_jump)
        continue;  // structural zero
      const double conc =
          pt.concentration[slot] +
          stats.transitions[static_cast<std::size_t>(k)][static_cast<std::size_t>(to)];
      draw[slot] = rng.gamma(conc, 1.0);
      total += draw[slot];
    }
    for (std::size_t slot = 0; slot < row.size(); ++slot) row[slot] = draw[slot] / total;
  }
}

void refresh_fixed_starts(PathSkeleton& skel, const ModelSpec& spec,
                          const PsiSet& psi) {
  for (std::size_t i = 0; i < skel.num_segments(); ++i) {
    const int k = spec.state_map.form_of(skel.state_of_segment(i));
    const auto& f = spec.forms[static_cast<std::size_t>(k)];
    if (f.start.kind != StartPolicy::Kind::kFixed) continue;
    if (f.kind == FormKind::kEpidemicDecay) continue;  // continuity-anchored
    skel.start_values[i] = resolved_fixed_start(
        f, psi[static_cast<std::size_t>(k)], skel.segment_begin(i));
  }
}

void update_psi(ChainState& state, const ModelSpec& spec, const PointPattern& y,
                const SamplerConfig& cfg, long iteration, bool adapting,
                PsiUpdateStats* stats, Rng& rng) {
  const int K = spec.num_forms();
  const SuffStats ss = sufficient_stats(y, state.skel, spec.state_map, spec.horizon);
  double cur_ll = log_likelihood(y, state.skel, spec, state.psi);
  const double adapt_step = std::pow(static_cast<double>(iteration) + 1.0, -0.6);

  for (int k = 0; k < K; ++k) {
    const auto& f = spec.forms[static_cast<std::size_t>(k)];
    const auto& priors = spec.priors.psi[static_cast<std::size_t>(k)];
    // Exact conjugate draw for a fixed-start constant with a Gamma prior.
    if (f.kind == FormKind::kConstant && f.start.kind == StartPolicy::Kind::kFixed &&
        !priors.empty() && priors[0].kind == PsiPrior::Kind::kGamma) {
      const double shape = priors[0].a + ss.event_counts[static_cast<std::size_t>(k)];
      const double rate = priors[0].b + ss.occupation[static_cast<std::size_t>(k)];
      state.psi[static_cast<std::size_t>(k)][0] = rng.gamma(shape, rate);
      refresh_fixed_starts(state.skel, spec, state.psi);
      cur_ll = log_likelihood(y, state.skel, spec, state.psi);
      continue;
    }
    for (std::size_t p = 0; p < state.psi[static_cast<std::size_t>(k)].size(); ++p) {
      if (priors[p].kind == PsiPrior::Kind::kFixed) continue;
      const double cur = state.psi[static_cast<std::size_t>(k)][p];
      const double cur_lp = priors[p].log_pdf(cur);
      double& ls = state.rw_log_scale[static_cast<std::size_t>(k)][p];
      const double prop = cur + std::exp(ls) * rng.normal();
      bool acc = false;
      const double prop_lp = priors[p].log_pdf(prop);
      if (!is_log_zero(prop_lp)) {
        PsiSet cand = state.psi;
        cand[static_cast<std::size_t>(k)][p] = prop;
        PathSkeleton sk = state.skel;
        refresh_fixed_starts(sk, spec, cand);
        const double prop_ll = log_likelihood(y, sk, spec, cand);
        if (!is_log_zero(prop_ll)) {
          const double log_alpha = (prop_ll + prop_lp) - (cur_ll + cur_lp);
          if (log_alpha >= 0.0 || std::log(rng.uniform()) < log_alpha) {
            acc = true;
            state.psi = std::move(cand);
            state.skel = std::move(sk);
            cur_ll = prop_ll;
          }
        }
      }
      if (stats) {
        ++stats->proposed[static_cast<std::size_t>(k)][p];
        if (acc) ++stats->accepted[static_cast<std::size_t>(k)][p];
      }
      if (adapting)
        ls += adapt_step * ((acc ? 1.0 : 0.0) - cfg.rw_target_accept);
    }
  }
}

bool adapt_partition(ChainState& state, const ModelSpec& spec, double recent_rate,
                     double threshold) {
  if (recent_rate >= threshold) return true;
  const int new_blocks = state.num_blocks() + 1;
  const int K = spec.num_forms();
  std::vector<double> eligible;
  for (const auto& j : state.skel.jumps)
    if (j.state < K) eligible.push_back(j.time);
  if (static_cast<int>(eligible.size()) < new_blocks - 1) return false;
  const auto& ev = state.aug.events;
  if (ev.empty()) return false;

  std::vector<double> chosen;
  std::vector<bool> used(eligible.size(), false);
  for (int l = 1; l < new_blocks; ++l) {
    const auto pos = static_cast<std::size_t>(std::min<long long>(
        static_cast<long long>(ev.size()) - 1,
        std::llround(static_cast<double>(l) * static_cast<double>(ev.size()) /
                     new_blocks)));
    const double target = ev[pos].time;
    std::size_t best = eligible.size();
    double best_d = 0.0;
    for (std::size_t i = 0; i < eligible.size(); ++i) {
      if (used[i]) continue;
      const double d = std::abs(eligible[i] - target);
      // Ties break toward the earlier jump time.
      if (best == eligible.size() || d < best_d) {
        best = i;
        best_d = d;
      }
    }
    used[best] = true;
    chosen.push_back(eligible[best]);
  }
  std::sort(chosen.begin(), chosen.end());
  state.block_bounds = std::move(chosen);
  return true;
}

ChainState init_chain(const PointPattern& y, const ModelSpec& spec,
                      const SamplerConfig& cfg, Rng& rng) {
  ChainState state;
  state.theta = spec.theta;
  state.psi = psi_of(spec);

  const auto& m = spec.state_map;
  bool found = false;
  for (int j = 0; j < m.num_states && !found; ++j) {
    if (!(spec.pi0[static_cast<std::size_t>(j)] > 0.0)) continue;
    const int k = m.form_of(j);
    const auto& f = spec.forms[static_cast<std::size_t>(k)];
    std::vector<double> starts;
    switch (f.start.kind) {
      case StartPolicy::Kind::kFixed:
        starts.push_back(resolved_fixed_start(
            f, state.psi[static_cast<std::size_t>(k)], 0.0));
        break;
      case StartPolicy::Kind::kVaryingDiscrete: {
        const auto& sup = f.start.support;
        starts.push_back(sup[sup.size() / 2]);
        for (double s : sup) starts.push_back(s);
        break;
      }
      case StartPolicy::Kind::kVaryingGamma:
        starts.push_back(f.start.gamma.shape / f.start.gamma.rate);
        break;
    }
    for (double r : starts) {
      PathSkeleton sk;
      sk.v0 = j;
      sk.start_values = {r};
      if (!is_log_zero(log_likelihood(y, sk, spec, state.psi))) {
        state.skel = sk;
        found = true;
        break;
      }
    }
  }
  if (!found)
    throw std::runtime_error(
        "init_chain: no admissible single-segment starting path; adjust initial psi");

  const auto omega = dominating_rates(state.theta, cfg.omega_multiplier);
  state.aug = resample_virtual_jumps(state.skel, m, state.theta, omega, spec.horizon,
                                     rng);
  state.rw_log_scale.resize(state.psi.size());
  for (std::size_t k = 0; k < state.psi.size(); ++k) {
    state.rw_log_scale[k].resize(state.psi[k].size());
    for (std::size_t p = 0; p < state.psi[k].size(); ++p)
      state.rw_log_scale[k][p] =
          std::log(std::max(0.1, 0.25 * std::abs(state.psi[k][p])));
  }
  return state;
}

GibbsResult run_gibbs(const PointPattern& y, const ModelSpec& spec,
                      const SamplerConfig& cfg, Rng& rng) {
  {
    auto v = validate_model(spec);
    if (!v.empty()) throw std::invalid_argument("run_gibbs: invalid model: " + v[0]);
    v = validate_sampler_config(cfg);
    if (!v.empty()) throw std::invalid_argument("run_gibbs: invalid config: " + v[0]);
    if (spec.epidemic_kinds())
      throw std::invalid_argument(
          "run_gibbs: epidemic forms use the dedicated epidemic sampler");
  }
  const long adapt_until = cfg.adapt_until < 0 ? cfg.burn_in : cfg.adapt_until;

  ChainState state = init_chain(y, spec, cfg, rng);
  PsiUpdateStats psi_stats;
  psi_stats.proposed.resize(state.psi.size());
  psi_stats.accepted.resize(state.psi.size());
  for (std::size_t k = 0; k < state.psi.size(); ++k) {
    psi_stats.proposed[k].assign(state.psi[k].size(), 0);
    psi_stats.accepted[k].assign(state.psi[k].size(), 0);
  }

  GibbsResult result;
  long window_prop = 0, window_acc = 0;
  long post_prop = 0, post_acc = 0;
  std::vector<long> block_prop, block_acc;

  for (long iter = 0; iter < cfg.n_iter; ++iter) {
    const bool adapting = iter < adapt_until;
    for (int rep = 0; rep < cfg.ctmc_updates_per_sweep; ++rep) {
      step_virtual(state, spec, cfg.omega_multiplier, rng);
      const int nb = state.num_blocks();
      if (!adapting && block_prop.size() != static_cast<std::size_t>(nb)) {
        block_prop.assign(static_cast<std::size_t>(nb), 0);
        block_acc.assign(static_cast<std::size_t>(nb), 0);
      }
      for (int b = 0; b < nb; ++b) {
        const BlockSpan span = block_span(state, spec, b);
        const BlockPass current = score_block(state, spec, y, span);
        const BlockPass proposal = propose_block(state, spec, y, span, rng);
        bool acc = false;
        if (!proposal.fail &&
            accept_block(current.log_norm_sum, proposal.log_norm_sum, rng)) {
          apply_block(state, spec, span, proposal);
          acc = true;
        }
        ++window_prop;
        window_acc += acc ? 1 : 0;
        if (!adapting) {
          ++post_prop;
          post_acc += acc ? 1 : 0;
          ++block_prop[static_cast<std::size_t>(b)];
          block_acc[static_cast<std::size_t>(b)] += acc ? 1 : 0;
        }
      }
    }
    update_theta(state, spec, y, rng);
    update_psi(state, spec, y, cfg, iter, adapting, &psi_stats, rng);

    if (adapting && (iter + 1) % cfg.adapt_window == 0 && window_prop > 0) {
      const double rate = static_cast<double>(window_acc) / window_prop;
      adapt_partition(state, spec, rate, cfg.adapt_threshold);
      window_prop = window_acc = 0;
    }

    if (iter >= cfg.burn_in && (iter - cfg.burn_in) % cfg.thin == 0) {
      // The traced joint density defines Omega through the current theta.
      state.aug.omega = dominating_rates(state.theta, cfg.omega_multiplier);
      PosteriorSample s;
      s.iteration = iter;
      s.theta = state.theta;
      s.psi = state.psi;
      s.skel = state.skel;
      s.log_lik = log_likelihood(y, state.skel, spec, state.psi);
      s.log_post = log_joint(y, state.aug, state.skel, state.theta, state.psi, spec);
      result.samples.push_back(std::move(s));
    }
  }

  result.final_num_blocks = state.num_blocks();
  result.post_adapt_block_rate =
      post_prop > 0 ? static_cast<double>(post_acc) / post_prop : 0.0;
  for (std::size_t b = 0; b < block_prop.size(); ++b)
    result.acceptance.push_back({"block." + std::to_string(b + 1), block_prop[b],
                                 block_acc[b]});
  for (std::size_t k = 0; k < psi_stats.proposed.size(); ++k)
    for (std::size_t p = 0; p < psi_stats.proposed[k].size(); ++p)
      if (psi_stats.proposed[k][p] > 0)
        result.acceptance.push_back({"psi." + std::to_string(k + 1) + "." +
                                         std::to_string(p + 1),
                                     psi_stats.proposed[k][p],
                                     psi_stats.accepted[k][p]});
  return result;
}

}  // namespace gmmpp

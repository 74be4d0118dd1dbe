#include "gmmpp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gmmpp/util.hpp"

namespace gmmpp {

std::optional<double> ess(std::span<const double> chain) {
  const std::size_t n = chain.size();
  if (n < 10) throw std::invalid_argument("ess: need at least 10 samples");
  const double mean = sample_mean(chain);
  std::vector<double> centered(n);
  for (std::size_t i = 0; i < n; ++i) centered[i] = chain[i] - mean;
  double gamma0 = 0.0;
  for (double x : centered) gamma0 += x * x;
  gamma0 /= static_cast<double>(n);
  if (!(gamma0 > 0.0)) return std::nullopt;

  const auto rho = [&](std::size_t j) {
    double g = 0.0;
    for (std::size_t i = 0; i + j < n; ++i) g += centered[i] * centered[i + j];
    return g / (static_cast<double>(n) * gamma0);
  };

  // Geyer pairs: stop at the first non-positive rho_{2m} + rho_{2m+1}.
  double pair_sum = 0.0;
  for (std::size_t m = 0;; ++m) {
    const std::size_t j0 = 2 * m, j1 = 2 * m + 1;
    if (j1 >= n - 1) break;
    const double g = (j0 == 0 ? 1.0 : rho(j0)) + rho(j1);
    if (g <= 0.0) break;
    pair_sum += g;
  }
  const double tau = std::max(1.0, 2.0 * pair_sum - 1.0);
  return std::min(static_cast<double>(n), static_cast<double>(n) / tau);
}

namespace {

double draw_start_value(const FunctionalForm& f, std::span<const double> psi,
                        double delta, Rng& rng) {
  switch (f.start.kind) {
    case StartPolicy::Kind::kFixed:
      return resolved_fixed_start(f, psi, delta);
    case StartPolicy::Kind::kVaryingDiscrete:
      return f.start.support[static_cast<std::size_t>(
          rng.uniform() * static_cast<double>(f.start.support.size()))];
    case StartPolicy::Kind::kVaryingGamma:
      return rng.gamma(f.start.gamma.shape, f.start.gamma.rate);
  }
  return 0.0;
}

}  // namespace

std::vector<PredictiveDraw> predict(const std::vector<PosteriorSample>& trace,
                                    const ModelSpec& spec, double horizon,
                                    PredictTarget target,
                                    std::span<const double> grid, Rng& rng) {
  if (!(horizon > 0.0)) throw std::invalid_argument("predict: horizon must be > 0");
  if (trace.empty()) throw std::invalid_argument("predict: empty trace");
  const auto& m = spec.state_map;
  const double S = spec.horizon;
  std::vector<PredictiveDraw> out;
  out.reserve(trace.size());
  for (const auto& s : trace) {
    // Continue the final segment past S, then jump per the drawn theta.
    const std::size_t last = s.skel.num_segments() - 1;
    int state = s.skel.state_of_segment(last);
    double delta = s.skel.segment_begin(last);
    double r = s.skel.start_values[last];
    double t = S;
    const double end = S + horizon;
    PredictiveDraw d;
    std::size_t g = 0;
    double lambda_int = 0.0;
    while (t < end) {
      const int k = m.form_of(state);
      const auto& f = spec.forms[static_cast<std::size_t>(k)];
      const auto psi = std::span<const double>(s.psi[static_cast<std::size_t>(k)]);
      const double rate = s.theta.rates[static_cast<std::size_t>(k)];
      const double next = rate > 0.0 ? t + rng.exponential(rate) : end;
      const double seg_end = std::min(next, end);
      lambda_int += integrate_form(f, psi, delta, r, t, seg_end);
      if (target == PredictTarget::kIfPath) {
        // Right-continuity: a grid point at a jump belongs to the next piece.
        const bool final_piece = seg_end >= end;
        while (g < grid.size()) {
          const double gp = grid[g];
          if (gp <= t) {
            ++g;
            continue;
          }
          if (gp < seg_end || (final_piece && gp <= seg_end)) {
            d.if_path.push_back(eval_form(f, psi, delta, r, gp));
            ++g;
          } else {
            break;
          }
        }
      }
      t = seg_end;
      if (next < end) {
        // Pick the next form, then route self-jumps to the companion copy.
        std::vector<double> w(static_cast<std::size_t>(m.num_forms));
        for (int to = 0; to < m.num_forms; ++to)
          w[static_cast<std::size_t>(to)] = s.theta.trans_prob(k, to, m);
        const int to = rng.categorical(w);
        state = (to == k) ? m.self_target(state) : m.entry_state(to);
        delta = next;
        const int k2 = m.form_of(state);
        r = draw_start_value(spec.forms[static_cast<std::size_t>(k2)],
                             s.psi[static_cast<std::size_t>(k2)], delta, rng);
      }
    }
    d.integrated_if = lambda_int;
    if (target == PredictTarget::kEventCount)
      d.event_count = rng.poisson(std::max(0.0, lambda_int));
    out.push_back(std::move(d));
  }
  return out;
}

namespace {

struct Piece {
  double a, b;
  const FunctionalForm* f;
  std::span<const double> psi;
  double delta, r;
};

std::vector<Piece> pieces_of(const PathSkeleton& skel, const PsiSet& psi,
                             const ModelSpec& spec) {
  std::vector<Piece> out;
  for (std::size_t i = 0; i < skel.num_segments(); ++i) {
    const int k = spec.state_map.form_of(skel.state_of_segment(i));
    out.push_back({skel.segment_begin(i), skel.segment_end(i, spec.horizon),
                   &spec.forms[static_cast<std::size_t>(k)],
                   std::span<const double>(psi[static_cast<std::size_t>(k)]),
                   skel.segment_begin(i), skel.start_values[i]});
  }
  return out;
}

bool is_line(const Piece& p) {
  return p.f->kind == FormKind::kConstant || p.f->kind == FormKind::kLinear;
}

// Integral of |difference of two lines| over [a, b] in closed form.
double abs_line_diff_integral(double a, double b, double va, double vb) {
  if ((va >= 0.0) == (vb >= 0.0))
    return std::abs(va + vb) * 0.5 * (b - a);
  const double root = a + (b - a) * va / (va - vb);
  return 0.5 * std::abs(va) * (root - a) + 0.5 * std::abs(vb) * (b - root);
}

}  // namespace

double measure_of_fit(const PathSkeleton& path, const PsiSet& psi,
                      const PathSkeleton& ref_path, const PsiSet& ref_psi,
                      const ModelSpec& spec) {
  const auto p1 = pieces_of(path, psi, spec);
  const auto p2 = pieces_of(ref_path, ref_psi, spec);
  std::vector<double> cuts{0.0, spec.horizon};
  for (const auto& p : p1) cuts.push_back(p.a);
  for (const auto& p : p2) cuts.push_back(p.a);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::size_t i1 = 0, i2 = 0;
  double total = 0.0;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double a = cuts[c], b = cuts[c + 1];
    if (b <= a) continue;
    while (i1 + 1 < p1.size() && p1[i1].b <= a) ++i1;
    while (i2 + 1 < p2.size() && p2[i2].b <= a) ++i2;
    const Piece& q1 = p1[i1];
    const Piece& q2 = p2[i2];
    if (is_line(q1) && is_line(q2)) {
      const double va = eval_form(*q1.f, q1.psi, q1.delta, q1.r, a) -
                        eval_form(*q2.f, q2.psi, q2.delta, q2.r, a);
      const double vb = eval_form(*q1.f, q1.psi, q1.delta, q1.r, b) -
                        eval_form(*q2.f, q2.psi, q2.delta, q2.r, b);
      total += abs_line_diff_integral(a, b, va, vb);
    } else {
      total += adaptive_simpson(
          [&](double s) {
            return std::abs(eval_form(*q1.f, q1.psi, q1.delta, q1.r, s) -
                            eval_form(*q2.f, q2.psi, q2.delta, q2.r, s));
          },
          a, b, 1e-6);
    }
  }
  return total / spec.horizon;
}

std::vector<double> measure_of_fit_trace(const std::vector<PosteriorSample>& trace,
                                         const PathSkeleton& ref_path,
                                         const PsiSet& ref_psi,
                                         const ModelSpec& spec) {
  std::vector<double> out;
  out.reserve(trace.size());
  for (const auto& s : trace)
    out.push_back(measure_of_fit(s.skel, s.psi, ref_path, ref_psi, spec));
  return out;
}

std::vector<std::string> param_names(const ModelSpec& spec) {
  std::vector<std::string> names;
  const int K = spec.num_forms();
  for (int k = 0; k < K; ++k)
    names.push_back("theta_rate." + std::to_string(k + 1));
  for (int k = 0; k < K; ++k)
    for (std::size_t j = 0; j < spec.theta.trans[static_cast<std::size_t>(k)].size(); ++j)
      names.push_back("theta_trans." + std::to_string(k + 1) + "." +
                      std::to_string(j + 1));
  for (int k = 0; k < K; ++k)
    for (std::size_t p = 0; p < spec.forms[static_cast<std::size_t>(k)].psi.size(); ++p)
      names.push_back("psi." + std::to_string(k + 1) + "." + std::to_string(p + 1));
  return names;
}

std::vector<double> param_values(const PosteriorSample& s, const ModelSpec& spec) {
  std::vector<double> vals;
  const int K = spec.num_forms();
  for (int k = 0; k < K; ++k) vals.push_back(s.theta.rates[static_cast<std::size_t>(k)]);
  for (int k = 0; k < K; ++k)
    for (double p : s.theta.trans[static_cast<std::size_t>(k)]) vals.push_back(p);
  for (int k = 0; k < K; ++k)
    for (double p : s.psi[static_cast<std::size_t>(k)]) vals.push_back(p);
  return vals;
}

PosteriorSummary summarize(const std::vector<PosteriorSample>& trace,
                           const ModelSpec& spec, std::span<const double> grid) {
  if (trace.empty()) throw std::invalid_argument("summarize: empty trace");
  PosteriorSummary out;
  const auto names = param_names(spec);
  std::vector<std::vector<double>> cols(names.size());
  for (const auto& s : trace) {
    const auto vals = param_values(s, spec);
    for (std::size_t i = 0; i < vals.size(); ++i) cols[i].push_back(vals[i]);
  }
  for (std::size_t i = 0; i < names.size(); ++i) {
    SummaryRow row;
    row.name = names[i];
    row.mean = sample_mean(cols[i]);
    row.sd = cols[i].size() > 1 ? sample_sd(cols[i]) : 0.0;
    row.lo = sample_quantile(cols[i], 0.025);
    row.hi = sample_quantile(cols[i], 0.975);
    out.params.push_back(std::move(row));
  }
  std::vector<double> buf(trace.size());
  for (double t : grid) {
    for (std::size_t i = 0; i < trace.size(); ++i)
      buf[i] = evaluate(trace[i].skel, spec, trace[i].psi, t);
    out.if_grid.push_back({t, sample_mean(buf), sample_quantile(buf, 0.025),
                           sample_quantile(buf, 0.975)});
  }
  return out;
}

}  // namespace gmmpp

#include "gmmpp/ctmc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gmmpp {

std::vector<std::string> check_augmented(const AugmentedPath& aug, const StateMap& m,
                                         const QParams& q) {
  std::vector<std::string> v;
  for (int k = 0; k < m.num_forms; ++k) {
    const double qk = q.rates[static_cast<std::size_t>(k)];
    const double ok = aug.omega[static_cast<std::size_t>(k)];
    if (qk > 0.0 && !(ok > qk))
      v.push_back("omega must dominate |Q_k| strictly for form " + std::to_string(k + 1));
  }
  double prev_t = 0.0;
  int prev_s = aug.v0;
  for (const auto& e : aug.events) {
    if (!(e.time > prev_t)) v.push_back("candidate times must be strictly increasing");
    if (e.time > aug.horizon) v.push_back("candidate time beyond the horizon");
    if (e.virtual_jump != (e.state == prev_s))
      v.push_back("virtual label inconsistent with the state sequence");
    prev_t = e.time;
    prev_s = e.state;
  }
  return v;
}

std::vector<double> dominating_rates(const QParams& q, double multiplier) {
  std::vector<double> omega(q.rates.size());
  for (std::size_t k = 0; k < q.rates.size(); ++k) omega[k] = multiplier * q.rates[k];
  return omega;
}

PathSkeleton simulate_ctmc(const SquareMatrix& Q, std::span<const double> pi0,
                           double horizon, Rng& rng) {
  PathSkeleton skel;
  std::vector<double> w(pi0.begin(), pi0.end());
  skel.v0 = rng.categorical(w);
  int state = skel.v0;
  double t = 0.0;
  for (;;) {
    const double exit_rate = -Q.at(state, state);
    if (exit_rate <= 0.0) break;
    t += rng.exponential(exit_rate);
    if (t >= horizon) break;
    std::vector<double> row(static_cast<std::size_t>(Q.n));
    for (int j = 0; j < Q.n; ++j) row[static_cast<std::size_t>(j)] = j == state ? 0.0 : Q.at(state, j);
    state = rng.categorical(row);
    skel.jumps.push_back({t, state});
  }
  return skel;
}

SquareMatrix uniformization_transition(const SquareMatrix& Q, const StateMap& m,
                                       std::span<const double> omega) {
  SquareMatrix B(Q.n);
  for (int j = 0; j < Q.n; ++j) {
    const double ok = omega[static_cast<std::size_t>(m.form_of(j))];
    const double exit = -Q.at(j, j);
    if (ok < exit)
      throw std::invalid_argument("uniformization_transition: omega below |Q_j|");
    for (int c = 0; c < Q.n; ++c)
      B.at(j, c) = (j == c ? 1.0 : 0.0) + (ok > 0.0 ? Q.at(j, c) / ok : 0.0);
  }
  return B;
}

AugmentedPath simulate_augmented(const SquareMatrix& Q, const StateMap& m,
                                 std::span<const double> omega,
                                 std::span<const double> pi0, double horizon,
                                 Rng& rng) {
  AugmentedPath aug;
  aug.omega.assign(omega.begin(), omega.end());
  aug.horizon = horizon;
  std::vector<double> w(pi0.begin(), pi0.end());
  aug.v0 = rng.categorical(w);
  const SquareMatrix B = uniformization_transition(Q, m, omega);
  int state = aug.v0;
  double t = 0.0;
  for (;;) {
    const double rate = omega[static_cast<std::size_t>(m.form_of(state))];
    if (rate <= 0.0) break;
    t += rng.exponential(rate);
    if (t >= horizon) break;
    std::vector<double> row(static_cast<std::size_t>(B.n));
    for (int j = 0; j < B.n; ++j) row[static_cast<std::size_t>(j)] = B.at(state, j);
    const int next = rng.categorical(row);
    aug.events.push_back({t, next, next == state});
    state = next;
  }
  return aug;
}

PathSkeleton collapse(const AugmentedPath& aug) {
  PathSkeleton skel;
  skel.v0 = aug.v0;
  for (const auto& e : aug.events)
    if (!e.virtual_jump) skel.jumps.push_back({e.time, e.state});
  return skel;
}

AugmentedPath resample_virtual_jumps(const PathSkeleton& skel, const StateMap& m,
                                     const QParams& q, std::span<const double> omega,
                                     double horizon, Rng& rng) {
  AugmentedPath aug;
  aug.omega.assign(omega.begin(), omega.end());
  aug.horizon = horizon;
  aug.v0 = skel.v0;
  for (std::size_t i = 0; i < skel.num_segments(); ++i) {
    const int state = skel.state_of_segment(i);
    const int k = m.form_of(state);
    const double rate =
        omega[static_cast<std::size_t>(k)] - q.rates[static_cast<std::size_t>(k)];
    const double a = skel.segment_begin(i);
    const double b = skel.segment_end(i, horizon);
    if (rate > 0.0) {
      double t = a;
      for (;;) {
        t += rng.exponential(rate);
        if (t >= b) break;
        aug.events.push_back({t, state, true});
      }
    }
    if (i < skel.jumps.size())
      aug.events.push_back({skel.jumps[i].time, skel.jumps[i].state, false});
  }
  return aug;
}

SquareMatrix matrix_exponential(const SquareMatrix& Q, double t) {
  if (t < 0.0) throw std::invalid_argument("matrix_exponential: negative time");
  const int n = Q.n;
  double norm = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) row += std::abs(Q.at(i, j)) * t;
    norm = std::max(norm, row);
  }
  int squarings = 0;
  double scale = 1.0;
  while (norm * scale > 0.5) {
    scale *= 0.5;
    ++squarings;
  }
  // exp(A) by the series on the scaled matrix, then repeated squaring.
  SquareMatrix A(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A.at(i, j) = Q.at(i, j) * t * scale;
  SquareMatrix result(n), term(n);
  for (int i = 0; i < n; ++i) {
    result.at(i, i) = 1.0;
    term.at(i, i) = 1.0;
  }
  for (int k = 1; k <= 24; ++k) {
    SquareMatrix next(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += term.at(i, l) * A.at(l, j);
        next.at(i, j) = s / k;
      }
    term = next;
    double biggest = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        result.at(i, j) += term.at(i, j);
        biggest = std::max(biggest, std::abs(term.at(i, j)));
      }
    if (biggest < 1e-18) break;
  }
  for (int s = 0; s < squarings; ++s) {
    SquareMatrix sq(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int l = 0; l < n; ++l) acc += result.at(i, l) * result.at(l, j);
        sq.at(i, j) = acc;
      }
    result = sq;
  }
  return result;
}

}  // namespace gmmpp

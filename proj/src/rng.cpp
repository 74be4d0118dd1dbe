#include "gmmpp/rng.hpp"

#include <cmath>
#include <stdexcept>

#include "gmmpp/util.hpp"

namespace gmmpp {

double Rng::gamma(double shape, double rate) {
  if (shape <= 0.0 || rate <= 0.0)
    throw std::invalid_argument("Rng::gamma: non-positive shape or rate");
  if (shape < 1.0) {
    // Boost to shape+1 and scale back (Marsaglia-Tsang trick).
    const double u = uniform();
    return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
  }
  // Marsaglia-Tsang squeeze.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
  }
}

long Poisson_ptrs(Rng& rng, double mean) {
  // Hoermann's PTRS transformed rejection, exact for mean >= 10.
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    double u = rng.uniform() - 0.5;
    double v = rng.uniform();
    double us = 0.5 - std::abs(u);
    double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<long>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        k * std::log(mean) - mean - std::lgamma(k + 1.0))
      return static_cast<long>(k);
  }
}

long Rng::poisson(double mean) {
  if (mean < 0.0) throw std::invalid_argument("Rng::poisson: negative mean");
  if (mean == 0.0) return 0;
  if (mean < 10.0) {
    const double limit = std::exp(-mean);
    long k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > limit);
    return k - 1;
  }
  return Poisson_ptrs(*this, mean);
}

std::vector<double> Rng::dirichlet(std::span<const double> conc) {
  std::vector<double> out(conc.size());
  double total = 0.0;
  for (std::size_t i = 0; i < conc.size(); ++i) {
    out[i] = gamma(conc[i], 1.0);
    total += out[i];
  }
  for (double& x : out) x /= total;
  return out;
}

int Rng::categorical_log(std::span<const double> log_w) {
  double m = kLogZero;
  for (double v : log_w) m = std::max(m, v);
  if (is_log_zero(m))
    throw std::runtime_error("categorical_log: all weights are zero");
  double total = 0.0;
  for (double v : log_w) total += is_log_zero(v) ? 0.0 : std::exp(v - m);
  double u = uniform() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < log_w.size(); ++i) {
    if (is_log_zero(log_w[i])) continue;
    acc += std::exp(log_w[i] - m);
    if (u <= acc) return static_cast<int>(i);
  }
  return static_cast<int>(log_w.size()) - 1;
}

int Rng::categorical(std::span<const double> w) {
  double total = 0.0;
  for (double v : w) total += v;
  double u = uniform() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    acc += w[i];
    if (u <= acc) return static_cast<int>(i);
  }
  return static_cast<int>(w.size()) - 1;
}

}  // namespace gmmpp

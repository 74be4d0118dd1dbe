#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace gmmpp {

// Log of an exactly-zero density. Rejection logic branches on this sentinel
// explicitly instead of letting -inf propagate through arithmetic.
inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

inline bool is_log_zero(double x) { return x == kLogZero; }

inline double log_sum_exp(std::span<const double> logs) {
  double m = kLogZero;
  for (double v : logs) m = std::max(m, v);
  if (is_log_zero(m)) return kLogZero;
  double s = 0.0;
  for (double v : logs)
    if (!is_log_zero(v)) s += std::exp(v - m);
  return m + std::log(s);
}

// Standard normal pdf / cdf.
inline double norm_pdf(double x) {
  static const double inv_sqrt_2pi = 0.3989422804014326779;
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

inline double norm_cdf(double x) {
  return 0.5 * std::erfc(-x * 0.70710678118654752440);
}

// Inverse standard normal cdf: Acklam's rational approximation polished by
// Newton steps on cdf(x) - p.
double norm_quantile(double p);

// Antiderivative of the standard normal cdf: int Phi(u) du = u Phi(u) + phi(u).
inline double norm_cdf_antideriv(double u) { return u * norm_cdf(u) + norm_pdf(u); }

double log_gamma_pdf(double x, double shape, double rate);
double log_normal_pdf(double x, double mean, double sd);

// Adaptive Simpson quadrature; serves as the independent integration route in
// tests and as the fallback in measure-of-fit for non-linear pieces.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol = 1e-10, int max_depth = 40);

// Equal-tailed sample quantile with linear interpolation (sorted copy made).
double sample_quantile(std::vector<double> v, double p);

double sample_mean(std::span<const double> v);
double sample_sd(std::span<const double> v);

// 64-bit FNV-1a over raw bytes; used for input content hashes in manifests.
std::uint64_t fnv1a64(std::span<const char> bytes);

}  // namespace gmmpp

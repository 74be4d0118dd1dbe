#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace gmmpp {

// splitmix64 step; used to derive independent per-chain / per-purpose streams
// from one master seed so that runs are reproducible from the manifest alone.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// All distributions are sampled with our own algorithms on top of mt19937_64.
// Standard-library distributions are implementation-defined, which would tie
// byte-identical replay to one libstdc++ version.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 1) : gen_(seed) {}

  // Uniform on (0,1); never returns 0 or 1 exactly.
  double uniform() {
    const std::uint64_t u = gen_() >> 11;  // 53 bits
    return (static_cast<double>(u) + 0.5) * (1.0 / 9007199254740992.0);
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t next_u64() { return gen_(); }

  double normal() {
    // Marsaglia polar method with a cached spare.
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  double exponential(double rate) { return -std::log(uniform()) / rate; }

  double gamma(double shape, double rate);

  // Expected count given as the mean.
  long poisson(double mean);

  std::vector<double> dirichlet(std::span<const double> conc);

  // Index sampled proportionally to exp(log_w); all-log-zero is the caller's
  // responsibility to handle beforehand.
  int categorical_log(std::span<const double> log_w);

  int categorical(std::span<const double> w);

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace gmmpp

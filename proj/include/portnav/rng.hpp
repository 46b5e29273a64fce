#pragma once

#include <cstdint>

namespace portnav {

// xoshiro256** with explicit bit-to-double conversion. All randomness in the
// project flows through this so that runs are reproducible across compilers
// and standard libraries (std::uniform_real_distribution is not portable).
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform in [0, 1), 53-bit resolution.
  double uniform();
  double uniform(double lo, double hi);

  // Uniform integer in [0, n), n > 0.
  std::uint64_t uniform_int(std::uint64_t n);

  // Standard normal via Box-Muller (no cached spare).
  double normal();

  // Gamma(alpha, 1) via Marsaglia-Tsang, valid for alpha > 0.
  double gamma(double alpha);

  // Stable child seed for an independent stream. Does not advance *this.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream);

 private:
  std::uint64_t s_[4];
};

}  // namespace portnav

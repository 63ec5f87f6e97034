#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace trf {

// Seeded random source. The engine is std::mt19937_64, whose output sequence
// is fixed by the standard; the variates below are derived by hand so that a
// seed produces the same stream under every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Independent stream derived from a root seed and a stream name. Adding a
  // new named consumer never shifts the draws of an existing one.
  static Rng substream(std::uint64_t seed, std::string_view name);

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return p >= 1.0 || (p > 0.0 && uniform() < p); }

  double exponential(double rate);

  double normal();

  double lognormal(double median, double sigma);

  // Uniform integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace trf

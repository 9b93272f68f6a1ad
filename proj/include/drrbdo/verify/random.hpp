#ifndef DRRBDO_VERIFY_RANDOM_HPP
#define DRRBDO_VERIFY_RANDOM_HPP

#include <cstdint>
#include <random>

namespace drrbdo::verify {

std::uint64_t splitmix64(std::uint64_t x);

/// mt19937_64 with its own uniform and Box-Muller normal transforms, so a
/// seed gives the same stream on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream for work item `index`, seeded by splitmix64(seed ^ index).
  static Rng substream(std::uint64_t seed, std::uint64_t index) { return Rng(splitmix64(seed ^ index)); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0;
};

}  // namespace drrbdo::verify

#endif  // DRRBDO_VERIFY_RANDOM_HPP

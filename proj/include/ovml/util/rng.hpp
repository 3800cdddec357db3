#pragma once

#include <cstdint>
#include <random>

namespace ovml::util {

// All randomness in the project flows from one root seed through named
// streams, so any single episode or component is replayable in isolation.
// Stream ids double as documentation of who consumes randomness.
enum class Stream : std::uint64_t {
  EnvReset = 1,      // spawn poses, speeds, vehicle dims, traffic presence
  ActionSample = 2,  // categorical action draws during rollout
  Dropout = 3,       // point dropout in the sensing path
  PolicyInit = 4,    // network weight initialisation
  Shuffle = 5,       // minibatch index shuffles
  TestData = 6,      // randomized test fixtures
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// seed for (root, stream, index); mt19937_64 output is fully specified by the
// standard, and we avoid std::*_distribution (implementation-defined), so the
// byte streams are reproducible everywhere.
inline std::uint64_t derive_seed(std::uint64_t root, Stream stream,
                                 std::uint64_t index = 0) {
  std::uint64_t h = splitmix64(root);
  h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
  h = splitmix64(h ^ index);
  return h;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // uniform in [0, 1)
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // inclusive bounds
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(uniform() * (hi - lo + 1));
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace ovml::util

#pragma once

#include <cstdint>
#include <random>

namespace poscomp {

// SplitMix64 finalizer, used to derive independent engine seeds.
std::uint64_t splitmix64(std::uint64_t x);

// Portable random stream. The engine is std::mt19937_64, whose output
// sequence is fixed by the standard; the transforms below are written out
// by hand because std:: distributions differ between library vendors.
//
// Stream derivation: family i, parameter stream s uses the engine seeded
// with splitmix64(splitmix64(seed ^ splitmix64(i)) + s).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}
  static RandomStream for_family(std::uint64_t seed, std::uint64_t family,
                                 std::uint64_t stream);

  // Uniform on [0, 1) with 53 random bits.
  double uniform01();
  double uniform(double lo, double hi);
  // Box-Muller; one normal per call (the partner value is discarded).
  double normal(double mean, double sd);

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace poscomp

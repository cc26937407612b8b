#pragma once

#include <cstdint>
#include <random>

#include "dykls/types.hpp"

namespace dykls {

/// Seeded uniform generator. mt19937_64 output is fixed by the standard and
/// the [0,1) mapping below uses the top 53 bits, so streams are identical
/// across platforms for a given seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// One draw from uniform[0,1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Vector of m independent uniform[0,1) draws.
  Vec uniform_vec(Eigen::Index m) {
    Vec v(m);
    for (Eigen::Index i = 0; i < m; ++i) v[i] = uniform();
    return v;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace dykls

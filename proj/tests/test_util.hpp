#pragma once

#include <random>

#include "dykls/types.hpp"

namespace dykls::test {

inline std::mt19937& rng() {
  static std::mt19937 gen(12345);
  return gen;
}

inline double uniform(double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng());
}

inline Vec randn(Eigen::Index m, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  Vec v(m);
  for (Eigen::Index i = 0; i < m; ++i) v[i] = d(rng());
  return v;
}

inline Vec randu(Eigen::Index m, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  Vec v(m);
  for (Eigen::Index i = 0; i < m; ++i) v[i] = d(rng());
  return v;
}

/// Random SPD matrix vv' + rI, the experiment family's shape.
inline Mat rand_spd(Eigen::Index m, double ridge_lo = 0.05) {
  const Vec v = randu(m);
  const double r = uniform(ridge_lo, 1.0);
  return v * v.transpose() + r * Mat::Identity(m, m);
}

}  // namespace dykls::test

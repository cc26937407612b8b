#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dykls/errors.hpp"
#include "dykls/types.hpp"

namespace dykls {

/// One sampled row of a solver trace.
struct TraceRecord {
  int n = 0;
  int w = 0;
  double F = 0.0;
  double h = 0.0;
  double gap = 0.0;
  double err = 0.0;
  std::int64_t wall_ns = 0;
};

/// Least-squares line fit of one transformed model.
struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

enum class RateModel { Geometric, InvLinear, InvSqrt, Power };

std::string rate_model_name(RateModel m);

/// Fits on the tail half of a positive series, one per model:
///   geometric:  log y   vs k
///   inv_linear: 1/y     vs k      (O(1/k))
///   inv_sqrt:   y^-1/2  vs k      (O(1/k^2))
///   power:      log y   vs log k
/// best is the highest R^2; near-ties resolve in the order above.
struct RateReport {
  RateFit geometric;
  RateFit inv_linear;
  RateFit inv_sqrt;
  RateFit power;
  RateModel best = RateModel::Geometric;
  int tail_points = 0;

  const RateFit& fit(RateModel m) const;
};

/// Throws DegenerateSeries when the tail half has fewer than 20 points or a
/// nonpositive/nonfinite value.
RateReport rate_fit(const std::vector<std::pair<double, double>>& series);

/// Longest finite positive prefix of a series, cut off when y falls below
/// rel_floor times the running maximum.
std::vector<std::pair<double, double>> positive_prefix(
    const std::vector<std::pair<double, double>>& series,
    double rel_floor = 1e-13);

/// Closed-form bound of the quartic recurrence a_k >= a_{k+1} + theta a_{k+1}^4:
///   a_k <= (a_1^-3 + (k-1) 3 theta (3 theta a_1^3 + 1)^-1)^(-1/3).
double envelope_lemma25(double a1, double theta, int k);

}  // namespace dykls

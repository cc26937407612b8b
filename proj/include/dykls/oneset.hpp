#pragma once

#include <vector>

#include "dykls/functions.hpp"
#include "dykls/geometry.hpp"

namespace dykls {

/// One row of the single-set trace.
struct OneSetTracePoint {
  int k;
  double d2;  // |xbar - x_k|^2
  double g;   // g(x_k)
};

/// State of the single-set outer-approximation solver: x_k is always the
/// projection of xbar onto the supporting halfspace H_k.
struct OneSetState {
  Vec x;
  Halfspace H;
  int k = 0;
  bool converged = false;
};

/// x_0 = xbar, H_0 = whole space.
OneSetState oneset_init(const Vec& xbar);

/// One outer-approximation step: cut at x_k, project xbar onto H_k
/// intersected with the cut, refresh the supporting halfspace. Marks the
/// state converged when g(x_k) <= tol.
OneSetState oneset_step(OneSetState state, const LevelFn& g, const Vec& xbar,
                        double tol = kFeasTol);

struct OneSetResult {
  Vec x;
  std::vector<OneSetTracePoint> trace;
  bool converged = false;
  int iters = 0;
};

/// Runs oneset_step until g(x_k) <= tol or max_iter; the trace records
/// d_k^2 and g(x_k) for every visited iterate.
OneSetResult oneset_run(const LevelFn& g, const Vec& xbar, int max_iter,
                        double tol = kFeasTol);

}  // namespace dykls

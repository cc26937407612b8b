#include "dykls/oneset.hpp"

namespace dykls {

OneSetState oneset_init(const Vec& xbar) {
  return {xbar, Halfspace::whole_space(xbar.size()), 0, false};
}

OneSetState oneset_step(OneSetState state, const LevelFn& g, const Vec& xbar,
                        double tol) {
  if (state.converged) return state;
  if (level_value(g, state.x) <= tol) {
    state.converged = true;
    return state;
  }
  const AffineMinorant cut = linearize(g, state.x);
  const Halfspace c_tilde = cut.level_set();
  Vec x_next = project_two_halfspaces(xbar, state.H, c_tilde);
  state.H = supporting_halfspace(xbar, x_next);
  state.x = std::move(x_next);
  ++state.k;
  return state;
}

OneSetResult oneset_run(const LevelFn& g, const Vec& xbar, int max_iter,
                        double tol) {
  OneSetResult result;
  OneSetState state = oneset_init(xbar);
  for (int it = 0; it < max_iter; ++it) {
    result.trace.push_back(
        {state.k, (xbar - state.x).squaredNorm(), level_value(g, state.x)});
    state = oneset_step(std::move(state), g, xbar, tol);
    if (state.converged) break;
  }
  result.converged = state.converged;
  result.x = std::move(state.x);
  result.iters = state.k;
  return result;
}

}  // namespace dykls

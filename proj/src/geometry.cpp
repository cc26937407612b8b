#include "dykls/geometry.hpp"

#include <cmath>
#include <utility>
#include <vector>

namespace dykls {

namespace {
constexpr double kParallelTol = 1e-14;  // Gram determinant, relative
}  // namespace

Halfspace::Halfspace(Vec normal, double offset)
    : a_(std::move(normal)), b_(offset) {
  degenerate_ = a_.isZero(0.0);
  if (degenerate_ && b_ < 0.0)
    throw std::invalid_argument("halfspace: zero normal with negative offset");
}

Halfspace Halfspace::whole_space(Eigen::Index dim) {
  return Halfspace(Vec::Zero(dim), 0.0);
}

double distance_to_halfspace(const Vec& x, const Halfspace& h) {
  if (h.is_whole_space()) return 0.0;
  const double e = h.excess(x);
  return e <= 0.0 ? 0.0 : e / h.normal().norm();
}

Vec project_halfspace(const Vec& x, const Halfspace& h) {
  if (h.is_whole_space()) return x;
  const double e = h.excess(x);
  if (e <= 0.0) return x;
  return x - (e / h.normal().squaredNorm()) * h.normal();
}

std::pair<double, double> two_cut_multipliers(const Vec& a1, double e1,
                                              const Vec& a2, double e2) {
  const double g11 = a1.squaredNorm();
  const double g22 = a2.squaredNorm();
  const double g12 = a1.dot(a2);
  const double det = g11 * g22 - g12 * g12;

  // Any l >= 0 evaluates its true dual value, so the selection needs no
  // feasibility tolerances. Candidates must be stationary (l'e = l'Gl, the
  // complementary-slackness identity) so the realized point is an exact
  // projection; an ill-conditioned interior solve that fails the identity is
  // dropped in favor of the single-constraint candidates. FP-level ties keep
  // the earlier (smaller active set) candidate.
  double best_l1 = 0.0, best_l2 = 0.0, best_q = 0.0;
  auto consider = [&](double l1, double l2) {
    if (!(l1 >= 0.0) || !(l2 >= 0.0)) return;
    const double lGl =
        l1 * l1 * g11 + 2.0 * l1 * l2 * g12 + l2 * l2 * g22;
    const double le = l1 * e1 + l2 * e2;
    if (std::abs(le - lGl) > 1e-9 * (1.0 + lGl)) return;
    const double q = le - 0.5 * lGl;
    if (q > best_q + 1e-15 * (1.0 + std::abs(best_q))) {
      best_l1 = l1;
      best_l2 = l2;
      best_q = q;
    }
  };
  if (g11 > 0.0) consider(std::max(0.0, e1 / g11), 0.0);
  if (g22 > 0.0) consider(0.0, std::max(0.0, e2 / g22));
  if (det > 0.0) {
    double l1 = (e1 * g22 - e2 * g12) / det;
    double l2 = (e2 * g11 - e1 * g12) / det;
    for (int round = 0; round < 2; ++round) {
      const double r1 = e1 - (g11 * l1 + g12 * l2);
      const double r2 = e2 - (g12 * l1 + g22 * l2);
      l1 += (r1 * g22 - r2 * g12) / det;
      l2 += (r2 * g11 - r1 * g12) / det;
    }
    consider(l1, l2);
  }
  return {best_l1, best_l2};
}

Vec project_two_halfspaces(const Vec& xbar, const Halfspace& h1,
                           const Halfspace& h2) {
  if (h1.is_whole_space()) return project_halfspace(xbar, h2);
  if (h2.is_whole_space()) return project_halfspace(xbar, h1);

  const double e1 = h1.excess(xbar);
  const double e2 = h2.excess(xbar);
  if (e1 <= kFeasTol && e2 <= kFeasTol) return xbar;

  const Vec& a1 = h1.normal();
  const Vec& a2 = h2.normal();
  const double g11 = a1.squaredNorm();
  const double g22 = a2.squaredNorm();
  const double g12 = a1.dot(a2);
  if (g11 * g22 - g12 * g12 <= kParallelTol * g11 * g22 && g12 < 0.0) {
    const double t = std::sqrt(g11 / g22);  // a1 = -t a2
    if (h1.offset() + t * h2.offset() <
        -1e-12 * (1.0 + std::abs(h1.offset()) + t * std::abs(h2.offset())))
      throw InfeasibleIntersection(
          "project_two_halfspaces: opposite parallel normals with "
          "inconsistent offsets");
  }

  const auto [l1, l2] = two_cut_multipliers(a1, e1, a2, e2);
  return xbar - l1 * a1 - l2 * a2;
}

Halfspace supporting_halfspace(const Vec& xbar, const Vec& x) {
  Vec a = xbar - x;
  if (a.isZero(0.0)) return Halfspace::whole_space(x.size());
  const double b = a.dot(x);
  return Halfspace(std::move(a), b);
}

}  // namespace dykls

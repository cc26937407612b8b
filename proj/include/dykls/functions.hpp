#pragma once

#include <optional>
#include <utility>
#include <variant>

#include "dykls/errors.hpp"
#include "dykls/geometry.hpp"
#include "dykls/types.hpp"

namespace dykls {

/// f(x) = 1/2 x'Ax + b'x + c with A symmetric positive definite.
/// Symmetry is checked to 1e-12 and definiteness via Cholesky success;
/// both factorizations (A and I+A) are cached at construction.
class Quadratic {
 public:
  Quadratic(Mat A, Vec b, double c);

  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const { return A_ * x + b_; }

  /// argmin_x 1/2|x-p|^2 + f(x), i.e. the solve (I+A)x = p-b.
  Vec prox(const Vec& p) const;

  /// f*(z) = 1/2 (z-b)'A^{-1}(z-b) - c.
  double conjugate(const Vec& z) const;

  /// Unconstrained minimizer -A^{-1}b.
  Vec minimizer() const;

  /// argmin_x f(x) - <z,x>, i.e. A^{-1}(z-b).
  Vec tilted_minimizer(const Vec& z) const;

  const Mat& A() const { return A_; }
  const Vec& b() const { return b_; }
  double c() const { return c_; }
  Eigen::Index dim() const { return b_.size(); }

 private:
  Mat A_;
  Vec b_;
  double c_;
  Eigen::LLT<Mat> llt_A_;
  Eigen::LLT<Mat> llt_IA_;
};

/// f(x) = max{q1(x), q2(x)}. Subgradient ties (|q1-q2| <= 1e-12) resolve to
/// branch 1 for reproducible traces.
class MaxQuadratic {
 public:
  MaxQuadratic(Quadratic q1, Quadratic q2);

  double value(const Vec& x) const;
  Vec subgradient(const Vec& x) const;

  /// Prox by KKT branch enumeration; the both-active case runs a multiplier
  /// bisection over convex combinations of the branches.
  Vec prox(const Vec& p) const;

  /// f*(z) = <z,x*> - f(x*) via the same branch machinery.
  double conjugate(const Vec& z) const;

  /// (argmin, min) of max{q1,q2}.
  std::pair<Vec, double> minimize() const;

  const Quadratic& q1() const { return q1_; }
  const Quadratic& q2() const { return q2_; }
  Eigen::Index dim() const { return q1_.dim(); }

 private:
  // Minimize max(q1,q2)(x) - <z,x>; returns (x*, attained value).
  std::pair<Vec, double> min_shifted(const Vec& z) const;

  Quadratic q1_, q2_;
};

/// Affine function l(x) = <s,x> + beta; the working surrogate for cuts.
struct AffineMinorant {
  Vec s;
  double beta = 0.0;

  double value(const Vec& x) const { return s.dot(x) + beta; }

  /// {l <= 0} as a halfspace; degenerate whole space when s = 0, beta <= 0.
  Halfspace level_set() const { return Halfspace(s, -beta); }
};

/// The level function of a V5 node: smooth or max-of-two quadratic.
using LevelFn = std::variant<Quadratic, MaxQuadratic>;

double level_value(const LevelFn& g, const Vec& x);
Vec level_subgradient(const LevelFn& g, const Vec& x);
/// (argmin, min) of g.
std::pair<Vec, double> level_minimize(const LevelFn& g);

/// Indicator of {x : g(x) <= 0}. Construction verifies min g < 0.
class LevelSetIndicator {
 public:
  explicit LevelSetIndicator(LevelFn g);

  double g_value(const Vec& x) const { return level_value(g_, x); }
  Vec g_subgradient(const Vec& x) const { return level_subgradient(g_, x); }
  double min_g() const { return min_g_; }
  const LevelFn& g() const { return g_; }
  Eigen::Index dim() const;

 private:
  LevelFn g_;
  double min_g_;
};

/// Indicator of a halfspace.
class HalfspaceIndicator {
 public:
  explicit HalfspaceIndicator(Halfspace h) : h_(std::move(h)) {}
  const Halfspace& halfspace() const { return h_; }

 private:
  Halfspace h_;
};

using ConvexFn = std::variant<Quadratic, MaxQuadratic, AffineMinorant,
                              LevelSetIndicator, HalfspaceIndicator>;

/// Function value; indicators return 0 or +inf using kFeasTol membership.
double eval(const ConvexFn& f, const Vec& x);

/// A subgradient; throws NotSubdifferentiableHere for indicator types.
Vec subgradient(const ConvexFn& f, const Vec& x);

/// Moreau pair: x = prox_f(p), z = p - x.
struct ProxPair {
  Vec x;
  Vec z;
};
ProxPair prox(const ConvexFn& f, const Vec& p);

/// Conjugate value f*(z); +inf outside the domain of f*.
double conjugate_value(const ConvexFn& f, const Vec& z);

/// Tangent affine minorant of a full-domain f at x0:
/// s in df(x0), beta = f(x0) - <s,x0>.
AffineMinorant linearize(const ConvexFn& f, const Vec& x0);
AffineMinorant linearize(const LevelFn& g, const Vec& x0);

}  // namespace dykls

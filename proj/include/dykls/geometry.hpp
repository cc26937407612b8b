#pragma once

#include "dykls/errors.hpp"
#include "dykls/types.hpp"

namespace dykls {

/// Closed halfspace {x : <a,x> <= b}.
///
/// A zero normal with b >= 0 represents the whole space; a zero normal with
/// b < 0 is rejected at construction. The degenerate value is first class so
/// zero-slope cuts need no special casing downstream.
class Halfspace {
 public:
  Halfspace(Vec normal, double offset);

  static Halfspace whole_space(Eigen::Index dim);

  const Vec& normal() const { return a_; }
  double offset() const { return b_; }
  bool is_whole_space() const { return degenerate_; }

  /// Constraint excess <a,x> - b (negative inside).
  double excess(const Vec& x) const { return a_.dot(x) - b_; }

  bool contains(const Vec& x, double tol = kFeasTol) const {
    return excess(x) <= tol;
  }

 private:
  Vec a_;
  double b_;
  bool degenerate_;
};

/// Euclidean distance from x to H: max(0, <a,x>-b)/|a|, 0 for the whole space.
double distance_to_halfspace(const Vec& x, const Halfspace& h);

/// Projection of x onto H (identity on members).
Vec project_halfspace(const Vec& x, const Halfspace& h);

/// Exact projection of xbar onto H1 n H2 by KKT active-set enumeration.
/// Throws InfeasibleIntersection when the normals are opposite parallel and
/// the offsets are inconsistent.
Vec project_two_halfspaces(const Vec& xbar, const Halfspace& h1,
                           const Halfspace& h2);

/// Multipliers of the two-constraint projection QP: maximizes the dual
/// l'e - 1/2 l'G l over l >= 0, where G is the Gram matrix of the normals
/// and e_i the constraint excesses at the projection center. Candidates are
/// the KKT active sets; ties prefer fewer active constraints. The projection
/// itself is then center - l1 a1 - l2 a2.
std::pair<double, double> two_cut_multipliers(const Vec& a1, double e1,
                                              const Vec& a2, double e2);

/// Halfspace {y : <xbar-x, y-x> <= 0}; projecting xbar onto it returns x.
/// Returns the whole space when x == xbar.
Halfspace supporting_halfspace(const Vec& xbar, const Vec& x);

}  // namespace dykls

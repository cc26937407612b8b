#include "dykls/functions.hpp"

#include <cmath>
#include <limits>

namespace dykls {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBranchTieTol = 1e-12;
constexpr double kColinearTol = 1e-8;

// Bisection for the both-active KKT case. x(mu) solves
//   (w I + mu A1 + (1-mu) A2) x = rhs(mu),
// and phi(mu) = q1(x(mu)) - q2(x(mu)) is nonincreasing; callers supply a
// bracket phi(lo) > 0 > phi(hi).
Vec bisect_combination(const Quadratic& q1, const Quadratic& q2, double w,
                       const Vec& shift, double lo, double hi) {
  const Eigen::Index m = q1.dim();
  const Mat I = Mat::Identity(m, m);
  auto solve_at = [&](double mu) -> Vec {
    Mat M = w * I + mu * q1.A() + (1.0 - mu) * q2.A();
    Vec rhs = shift - mu * q1.b() - (1.0 - mu) * q2.b();
    Eigen::LLT<Mat> llt(M);
    if (llt.info() != Eigen::Success)
      throw SolveError("combination solve failed");
    return llt.solve(rhs);
  };
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    const Vec x = solve_at(mid);
    if (q1.value(x) - q2.value(x) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return solve_at(0.5 * (lo + hi));
}

}  // namespace

Quadratic::Quadratic(Mat A, Vec b, double c)
    : A_(std::move(A)), b_(std::move(b)), c_(c) {
  if (A_.rows() != A_.cols() || A_.rows() != b_.size())
    throw std::invalid_argument("quadratic: dimension mismatch");
  const double scale = std::max(1.0, A_.cwiseAbs().maxCoeff());
  if ((A_ - A_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("quadratic: matrix not symmetric");
  A_ = (0.5 * (A_ + A_.transpose())).eval();
  llt_A_.compute(A_);
  if (llt_A_.info() != Eigen::Success)
    throw SolveError("quadratic: matrix not positive definite");
  llt_IA_.compute(Mat::Identity(A_.rows(), A_.cols()) + A_);
  if (llt_IA_.info() != Eigen::Success)
    throw SolveError("quadratic: I+A factorization failed");
}

double Quadratic::value(const Vec& x) const {
  return 0.5 * x.dot(A_ * x) + b_.dot(x) + c_;
}

Vec Quadratic::prox(const Vec& p) const { return llt_IA_.solve(p - b_); }

double Quadratic::conjugate(const Vec& z) const {
  const Vec d = z - b_;
  return 0.5 * d.dot(llt_A_.solve(d)) - c_;
}

Vec Quadratic::minimizer() const { return -llt_A_.solve(b_); }

Vec Quadratic::tilted_minimizer(const Vec& z) const {
  return llt_A_.solve(z - b_);
}

MaxQuadratic::MaxQuadratic(Quadratic q1, Quadratic q2)
    : q1_(std::move(q1)), q2_(std::move(q2)) {
  if (q1_.dim() != q2_.dim())
    throw std::invalid_argument("max-quadratic: branch dimension mismatch");
}

double MaxQuadratic::value(const Vec& x) const {
  return std::max(q1_.value(x), q2_.value(x));
}

Vec MaxQuadratic::subgradient(const Vec& x) const {
  const double v1 = q1_.value(x);
  const double v2 = q2_.value(x);
  if (v1 >= v2 - kBranchTieTol) return q1_.gradient(x);
  return q2_.gradient(x);
}

Vec MaxQuadratic::prox(const Vec& p) const {
  const Vec x1 = q1_.prox(p);
  const double phi1 = q1_.value(x1) - q2_.value(x1);
  const Vec x2 = q2_.prox(p);
  const double phi0 = q1_.value(x2) - q2_.value(x2);

  const Vec* best = nullptr;
  double best_obj = kInf;
  auto consider = [&](const Vec& x) {
    const double obj = 0.5 * (x - p).squaredNorm() + value(x);
    if (obj < best_obj) {
      best = &x;
      best_obj = obj;
    }
  };
  if (phi1 >= -kBranchTieTol) consider(x1);
  if (phi0 <= kBranchTieTol) consider(x2);

  Vec xb;
  if (phi1 < 0.0 && phi0 > 0.0) {
    xb = bisect_combination(q1_, q2_, 1.0, p, 0.0, 1.0);
    consider(xb);
  }
  if (best == nullptr) throw SolveError("max-quadratic prox: no KKT candidate");
  return *best;
}

std::pair<Vec, double> MaxQuadratic::min_shifted(const Vec& z) const {
  // Minimize max(q1,q2)(x) - <z,x>. The shift cancels in the branch
  // comparison q1(x) - q2(x), so branch candidates reuse the cached
  // factorizations of A1 and A2.
  const Vec x1 = q1_.tilted_minimizer(z);
  const double phi1 = q1_.value(x1) - q2_.value(x1);
  const Vec x2 = q2_.tilted_minimizer(z);
  const double phi0 = q1_.value(x2) - q2_.value(x2);

  const Vec* best = nullptr;
  double best_obj = kInf;
  auto consider = [&](const Vec& x) {
    const double obj = value(x) - z.dot(x);
    if (obj < best_obj) {
      best = &x;
      best_obj = obj;
    }
  };
  if (phi1 >= -kBranchTieTol) consider(x1);
  if (phi0 <= kBranchTieTol) consider(x2);

  Vec xb;
  if (phi1 < 0.0 && phi0 > 0.0) {
    xb = bisect_combination(q1_, q2_, 0.0, z, 0.0, 1.0);
    consider(xb);
  }
  if (best == nullptr)
    throw SolveError("max-quadratic minimize: no KKT candidate");
  return {*best, best_obj};
}

std::pair<Vec, double> MaxQuadratic::minimize() const {
  return min_shifted(Vec::Zero(dim()));
}

double MaxQuadratic::conjugate(const Vec& z) const {
  return -min_shifted(z).second;
}

LevelSetIndicator::LevelSetIndicator(LevelFn g) : g_(std::move(g)) {
  min_g_ = level_minimize(g_).second;
  if (!(min_g_ < 0.0))
    throw std::invalid_argument(
        "level-set indicator: min g must be negative (Slater point)");
}

Eigen::Index LevelSetIndicator::dim() const {
  return std::visit([](const auto& q) { return q.dim(); }, g_);
}

double level_value(const LevelFn& g, const Vec& x) {
  return std::visit([&](const auto& q) { return q.value(x); }, g);
}

Vec level_subgradient(const LevelFn& g, const Vec& x) {
  if (const auto* q = std::get_if<Quadratic>(&g)) return q->gradient(x);
  return std::get<MaxQuadratic>(g).subgradient(x);
}

std::pair<Vec, double> level_minimize(const LevelFn& g) {
  if (const auto* q = std::get_if<Quadratic>(&g)) {
    Vec x = q->minimizer();
    return {x, q->value(x)};
  }
  return std::get<MaxQuadratic>(g).minimize();
}

double eval(const ConvexFn& f, const Vec& x) {
  return std::visit(
      [&](const auto& fn) -> double {
        using T = std::decay_t<decltype(fn)>;
        if constexpr (std::is_same_v<T, Quadratic> ||
                      std::is_same_v<T, MaxQuadratic>) {
          return fn.value(x);
        } else if constexpr (std::is_same_v<T, AffineMinorant>) {
          return fn.value(x);
        } else if constexpr (std::is_same_v<T, LevelSetIndicator>) {
          return fn.g_value(x) <= kFeasTol ? 0.0 : kInf;
        } else {
          return fn.halfspace().contains(x) ? 0.0 : kInf;
        }
      },
      f);
}

Vec subgradient(const ConvexFn& f, const Vec& x) {
  return std::visit(
      [&](const auto& fn) -> Vec {
        using T = std::decay_t<decltype(fn)>;
        if constexpr (std::is_same_v<T, Quadratic>) {
          return fn.gradient(x);
        } else if constexpr (std::is_same_v<T, MaxQuadratic>) {
          return fn.subgradient(x);
        } else if constexpr (std::is_same_v<T, AffineMinorant>) {
          return fn.s;
        } else {
          throw NotSubdifferentiableHere(
              "subgradient requested from an indicator function");
        }
      },
      f);
}

ProxPair prox(const ConvexFn& f, const Vec& p) {
  Vec x = std::visit(
      [&](const auto& fn) -> Vec {
        using T = std::decay_t<decltype(fn)>;
        if constexpr (std::is_same_v<T, Quadratic> ||
                      std::is_same_v<T, MaxQuadratic>) {
          return fn.prox(p);
        } else if constexpr (std::is_same_v<T, AffineMinorant>) {
          return p - fn.s;
        } else if constexpr (std::is_same_v<T, HalfspaceIndicator>) {
          return project_halfspace(p, fn.halfspace());
        } else {
          throw SolveError("prox unavailable for level-set indicators");
        }
      },
      f);
  Vec z = p - x;
  return {std::move(x), std::move(z)};
}

double conjugate_value(const ConvexFn& f, const Vec& z) {
  return std::visit(
      [&](const auto& fn) -> double {
        using T = std::decay_t<decltype(fn)>;
        if constexpr (std::is_same_v<T, Quadratic> ||
                      std::is_same_v<T, MaxQuadratic>) {
          return fn.conjugate(z);
        } else if constexpr (std::is_same_v<T, AffineMinorant>) {
          if ((z - fn.s).norm() <= kColinearTol * (1.0 + fn.s.norm()))
            return -fn.beta;
          return kInf;
        } else if constexpr (std::is_same_v<T, HalfspaceIndicator>) {
          const Halfspace& h = fn.halfspace();
          if (h.is_whole_space())
            return z.isZero(kColinearTol) ? 0.0 : kInf;
          const double t = z.dot(h.normal()) / h.normal().squaredNorm();
          if (t < -1e-10) return kInf;
          if ((z - t * h.normal()).norm() > kColinearTol * (1.0 + z.norm()))
            return kInf;
          return std::max(t, 0.0) * h.offset();
        } else {
          throw SolveError("conjugate unavailable for level-set indicators");
        }
      },
      f);
}

AffineMinorant linearize(const ConvexFn& f, const Vec& x0) {
  Vec s = subgradient(f, x0);
  const double beta = eval(f, x0) - s.dot(x0);
  return {std::move(s), beta};
}

AffineMinorant linearize(const LevelFn& g, const Vec& x0) {
  Vec s = level_subgradient(g, x0);
  const double beta = level_value(g, x0) - s.dot(x0);
  return {std::move(s), beta};
}

}  // namespace dykls

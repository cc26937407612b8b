#include <catch2/catch_amalgamated.hpp>

#include "dykls/geometry.hpp"
#include "test_util.hpp"

using namespace dykls;
using dykls::test::randn;
using dykls::test::randu;
using dykls::test::uniform;

namespace {

// Orthonormal basis of the hyperplane <a,y> = b, anchored at its closest
// point to the origin.
struct PlaneFrame {
  Vec anchor;
  Mat basis;  // m x (m-1)
};

PlaneFrame plane_frame(const Halfspace& h) {
  const Vec& a = h.normal();
  const Eigen::Index m = a.size();
  Eigen::HouseholderQR<Mat> qr(a);
  const Mat Q = qr.householderQ();
  PlaneFrame f;
  f.anchor = (h.offset() / a.squaredNorm()) * a;
  f.basis = Q.rightCols(m - 1);
  return f;
}

// Multi-stage grid search for the plane point nearest to x; final_spacing_out
// reports the last grid resolution.
Vec grid_nearest_on_plane(const Vec& x, const Halfspace& h, int stages,
                          double* final_spacing_out = nullptr) {
  const PlaneFrame f = plane_frame(h);
  const Eigen::Index k = f.basis.cols();
  Vec center = Vec::Zero(k);
  double radius = 2.0 * (x - f.anchor).norm() + 1.0;
  Vec best_t = center;
  double best_d2 = std::numeric_limits<double>::max();
  const int side = 21;
  double spacing = 0.0;
  for (int stage = 0; stage < stages; ++stage) {
    spacing = 2.0 * radius / (side - 1);
    Vec t(k), idx(k);
    idx.setZero();
    bool done = false;
    while (!done) {
      for (Eigen::Index j = 0; j < k; ++j)
        t[j] = center[j] - radius + idx[j] * spacing;
      const Vec y = f.anchor + f.basis * t;
      const double d2 = (x - y).squaredNorm();
      if (d2 < best_d2) {
        best_d2 = d2;
        best_t = t;
      }
      // odometer
      done = true;
      for (Eigen::Index j = 0; j < k; ++j) {
        if (idx[j] + 1 < side) {
          idx[j] += 1;
          for (Eigen::Index l = 0; l < j; ++l) idx[l] = 0;
          done = false;
          break;
        }
      }
    }
    center = best_t;
    radius = 2.0 * spacing;
  }
  if (final_spacing_out) *final_spacing_out = spacing;
  return f.anchor + f.basis * best_t;
}

// Projected gradient ascent on the two-constraint dual, independent of the
// active-set enumeration in the implementation.
Vec pg_project_two(const Vec& xbar, const Halfspace& h1, const Halfspace& h2,
                   int iters) {
  const Vec& a1 = h1.normal();
  const Vec& a2 = h2.normal();
  const double g11 = a1.squaredNorm(), g22 = a2.squaredNorm(),
               g12 = a1.dot(a2);
  const double tr = g11 + g22;
  const double det = g11 * g22 - g12 * g12;
  const double lmax = 0.5 * (tr + std::sqrt(std::max(0.0, tr * tr - 4 * det)));
  const double eta = 0.9 / lmax;
  double l1 = 0.0, l2 = 0.0;
  const double e1 = h1.excess(xbar), e2 = h2.excess(xbar);
  for (int it = 0; it < iters; ++it) {
    const double d1 = e1 - (g11 * l1 + g12 * l2);
    const double d2 = e2 - (g12 * l1 + g22 * l2);
    l1 = std::max(0.0, l1 + eta * d1);
    l2 = std::max(0.0, l2 + eta * d2);
  }
  return xbar - l1 * a1 - l2 * a2;
}

}  // namespace

TEST_CASE("halfspace construction and membership") {
  Vec a(2);
  a << 1.0, 0.0;
  Halfspace h(a, 0.0);
  Vec in(2), out(2);
  in << -1.0, 3.0;
  out << 2.0, 3.0;
  CHECK(h.contains(in));
  CHECK_FALSE(h.contains(out));

  CHECK(Halfspace::whole_space(3).is_whole_space());
  CHECK(Halfspace(Vec::Zero(3), 1.0).is_whole_space());
  CHECK_THROWS_AS(Halfspace(Vec::Zero(3), -1.0), std::invalid_argument);
}

TEST_CASE("distance to halfspace") {
  SECTION("inside gives zero") {
    for (int t = 0; t < 20; ++t) {
      const Vec a = randn(5);
      Halfspace h(a, uniform(-1, 1));
      Vec x = randn(5);
      x = project_halfspace(x, h);
      CHECK(distance_to_halfspace(x, h) <= 1e-14);
    }
  }
  SECTION("axis aligned") {
    Vec a(2), x(2);
    a << 1.0, 0.0;
    x << 2.0, 3.0;
    CHECK(distance_to_halfspace(x, Halfspace(a, 0.0)) == Catch::Approx(2.0));
  }
  SECTION("whole space") {
    CHECK(distance_to_halfspace(randn(4), Halfspace::whole_space(4)) == 0.0);
  }
  SECTION("matches grid search over the bounding plane") {
    for (int t = 0; t < 25; ++t) {
      const Eigen::Index m = 3;
      const Vec a = randn(m);
      Halfspace h(a, uniform(-1, 1));
      Vec x = randn(m, 2.0);
      if (h.contains(x)) x = x + 2.0 * (x - project_halfspace(x, h)) + a;
      if (h.contains(x)) continue;
      const Vec y = grid_nearest_on_plane(x, h, 5);
      CHECK(std::abs((x - y).norm() - distance_to_halfspace(x, h)) < 1e-6);
    }
  }
}

TEST_CASE("project onto halfspace") {
  SECTION("identity on members") {
    for (int t = 0; t < 20; ++t) {
      const Vec a = randn(6);
      Halfspace h(a, uniform(-1, 1));
      const Vec x = project_halfspace(randn(6, 3.0), h);
      CHECK((project_halfspace(x, h) - x).norm() <= 1e-14);
    }
  }
  SECTION("axis aligned") {
    Vec a(2), x(2);
    a << 1.0, 0.0;
    x << 2.0, 3.0;
    const Vec p = project_halfspace(x, Halfspace(a, 0.0));
    CHECK(p[0] == Catch::Approx(0.0).margin(1e-15));
    CHECK(p[1] == Catch::Approx(3.0));
  }
  SECTION("result lands on the boundary up to 1e-12 relative") {
    for (int t = 0; t < 50; ++t) {
      const Vec a = randn(8);
      Halfspace h(a, uniform(-2, 2));
      Vec x = randn(8, 3.0);
      if (h.contains(x)) continue;
      const Vec p = project_halfspace(x, h);
      CHECK(std::abs(h.excess(p)) <= 1e-12 * (1.0 + std::abs(h.offset())));
    }
  }
  SECTION("nearest grid point within grid spacing") {
    for (int t = 0; t < 10; ++t) {
      const Eigen::Index m = 3;
      const Vec a = randn(m);
      Halfspace h(a, uniform(-1, 1));
      Vec x = randn(m, 2.0) + a;
      if (h.contains(x)) continue;
      double spacing = 0.0;
      const Vec y = grid_nearest_on_plane(x, h, 1, &spacing);
      CHECK((project_halfspace(x, h) - y).norm() <= 1.5 * spacing);
    }
  }
}

TEST_CASE("projection onto two halfspaces") {
  SECTION("feasible point is fixed") {
    Vec a1(2), a2(2), x(2);
    a1 << 1.0, 0.0;
    a2 << 0.0, 1.0;
    x << -1.0, -1.0;
    const Vec p = project_two_halfspaces(x, Halfspace(a1, 0.0),
                                         Halfspace(a2, 0.0));
    CHECK((p - x).norm() == 0.0);
  }
  SECTION("separable coordinates") {
    Vec a1(2), a2(2), x(2);
    a1 << 1.0, 0.0;
    a2 << 0.0, 1.0;
    x << 1.0, 1.0;
    const Vec p = project_two_halfspaces(x, Halfspace(a1, 0.0),
                                         Halfspace(a2, 0.0));
    CHECK(p.norm() < 1e-14);
  }
  SECTION("agrees with a projected-gradient dual oracle, 50 instances") {
    for (int t = 0; t < 50; ++t) {
      const Eigen::Index m = 10;
      Halfspace h1(randn(m), uniform(-1, 1));
      Halfspace h2(randn(m), uniform(-1, 1));
      const Vec xbar = randn(m, 2.0);
      const Vec mine = project_two_halfspaces(xbar, h1, h2);
      const Vec oracle = pg_project_two(xbar, h1, h2, 200000);
      CHECK((mine - oracle).norm() < 1e-8);
    }
  }
  SECTION("parallel opposite normals: slab projection and infeasibility") {
    Vec a(3);
    a << 1.0, 0.0, 0.0;
    Halfspace upper(a, 1.0);    // x1 <= 1
    Halfspace lower(-a, 0.0);   // x1 >= 0
    Vec x(3);
    x << 4.0, 2.0, 0.0;
    const Vec p = project_two_halfspaces(x, upper, lower);
    CHECK(p[0] == Catch::Approx(1.0));
    CHECK(p[1] == Catch::Approx(2.0));
    CHECK_THROWS_AS(
        project_two_halfspaces(x, Halfspace(a, -1.0), Halfspace(-a, 0.0)),
        InfeasibleIntersection);
  }
  SECTION("whole-space members reduce to single projection") {
    const Vec a = randn(4);
    Halfspace h(a, 0.5);
    const Vec x = randn(4, 2.0);
    const Vec p1 = project_two_halfspaces(x, Halfspace::whole_space(4), h);
    CHECK((p1 - project_halfspace(x, h)).norm() == 0.0);
  }
}

TEST_CASE("supporting halfspace") {
  SECTION("unit offset") {
    Vec xbar(2), x(2);
    xbar << 1.0, 0.0;
    x << 0.0, 0.0;
    const Halfspace h = supporting_halfspace(xbar, x);
    CHECK(h.normal()[0] == Catch::Approx(1.0));
    CHECK(h.offset() == Catch::Approx(0.0).margin(1e-15));
  }
  SECTION("projection round-trip") {
    for (int t = 0; t < 50; ++t) {
      const Vec xbar = randn(7, 2.0);
      const Vec x = randn(7, 2.0);
      if ((xbar - x).norm() < 1e-12) continue;
      const Halfspace h = supporting_halfspace(xbar, x);
      CHECK((project_halfspace(xbar, h) - x).norm() < 1e-12);
    }
  }
  SECTION("coincident points give the whole space") {
    const Vec x = randn(5);
    CHECK(supporting_halfspace(x, x).is_whole_space());
  }
}

TEST_CASE("distance increment inequality on 1e4 random triples") {
  // |xbar-x2|^2 >= |xbar-x1|^2 + d(x1,H2)^2 with x1 = P_H1(xbar),
  // x2 = P_{H1 n H2}(xbar).
  int checked = 0;
  while (checked < 10000) {
    const Eigen::Index m = 1 + (test::rng()() % 8);
    Halfspace h1(randn(m), uniform(-1, 1));
    Halfspace h2(randn(m), uniform(-1, 1));
    const Vec xbar = randn(m, 2.0);
    Vec x2;
    try {
      x2 = project_two_halfspaces(xbar, h1, h2);
    } catch (const InfeasibleIntersection&) {
      continue;
    }
    const Vec x1 = project_halfspace(xbar, h1);
    const double d = distance_to_halfspace(x1, h2);
    REQUIRE((xbar - x2).squaredNorm() >=
            (xbar - x1).squaredNorm() + d * d - 1e-10);
    ++checked;
  }
}

TEST_CASE("plane geometry bound on 1e4 random configurations") {
  // If xhat lies in the supporting halfspace at x, then |x-xhat| <= |xbar-xhat|
  // and d(x, Hhat) >= |x-xhat|^2 / |xbar-xhat|.
  int checked = 0;
  while (checked < 10000) {
    const Eigen::Index m = 2 + (test::rng()() % 6);
    const Vec xbar = randn(m, 2.0);
    const Vec xhat = randn(m, 2.0);
    if ((xbar - xhat).norm() < 1e-8) continue;
    const Vec x = randn(m, 2.0);
    if ((xbar - x).dot(xhat - x) > 0.0) continue;  // xhat must lie in H(x)
    const Halfspace hhat = supporting_halfspace(xbar, xhat);
    REQUIRE((x - xhat).norm() <= (xbar - xhat).norm() + 1e-10);
    REQUIRE(distance_to_halfspace(x, hhat) >=
            (x - xhat).squaredNorm() / (xbar - xhat).norm() - 1e-10);
    ++checked;
  }
}

TEST_CASE("projections are idempotent") {
  for (int t = 0; t < 50; ++t) {
    const Eigen::Index m = 6;
    Halfspace h1(randn(m), uniform(-1, 1));
    Halfspace h2(randn(m), uniform(-1, 1));
    const Vec x = randn(m, 3.0);
    const Vec p1 = project_halfspace(x, h1);
    CHECK((project_halfspace(p1, h1) - p1).norm() <= 1e-12);
    const Vec p2 = project_two_halfspaces(x, h1, h2);
    CHECK((project_two_halfspaces(p2, h1, h2) - p2).norm() <= 1e-12);
  }
}

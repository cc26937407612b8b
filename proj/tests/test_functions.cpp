#include <catch2/catch_amalgamated.hpp>

#include "dykls/functions.hpp"
#include "test_util.hpp"

using namespace dykls;
using dykls::test::rand_spd;
using dykls::test::randn;
using dykls::test::randu;
using dykls::test::uniform;

namespace {

Quadratic rand_quadratic(Eigen::Index m) {
  return Quadratic(rand_spd(m), randn(m), uniform(-1, 1));
}

MaxQuadratic rand_maxquad(Eigen::Index m) {
  return MaxQuadratic(rand_quadratic(m), rand_quadratic(m));
}

// 1-D projected gradient ascent on the segment dual of the prox of a max of
// two quadratics; no branch case analysis anywhere.
Vec pg_prox_maxquad(const MaxQuadratic& f, const Vec& p, int iters) {
  const Eigen::Index m = p.size();
  const Mat I = Mat::Identity(m, m);
  auto x_at = [&](double mu) -> Vec {
    const Mat M = I + mu * f.q1().A() + (1.0 - mu) * f.q2().A();
    const Vec rhs = p - mu * f.q1().b() - (1.0 - mu) * f.q2().b();
    return M.llt().solve(rhs);
  };
  auto grad = [&](double mu) {
    const Vec x = x_at(mu);
    return f.q1().value(x) - f.q2().value(x);
  };
  const double span = std::abs(grad(0.0) - grad(1.0));
  const double eta = 1.0 / std::max(span, 1e-9);
  double mu = 0.5;
  for (int it = 0; it < iters; ++it)
    mu = std::clamp(mu + eta * grad(mu), 0.0, 1.0);
  return x_at(mu);
}

}  // namespace

TEST_CASE("quadratic basics") {
  const Eigen::Index m = 2;
  Quadratic f(Mat::Identity(m, m), Vec::Zero(m), 0.0);
  Vec x(2);
  x << 1.0, 1.0;
  CHECK(f.value(x) == Catch::Approx(1.0));
  Vec g(2);
  g << 2.0, 0.0;
  CHECK((f.gradient(g) - g).norm() < 1e-15);

  Vec p(2);
  p << 2.0, 0.0;
  const ProxPair pr = prox(ConvexFn(f), p);
  CHECK(pr.x[0] == Catch::Approx(1.0));
  CHECK(pr.z[0] == Catch::Approx(1.0));

  Vec z(2);
  z << 1.0, 0.0;
  CHECK(f.conjugate(z) == Catch::Approx(0.5));
}

TEST_CASE("quadratic construction rejects bad matrices") {
  Mat A(2, 2);
  A << 1.0, 0.5, -0.5, 1.0;  // not symmetric
  CHECK_THROWS_AS(Quadratic(A, Vec::Zero(2), 0.0), std::invalid_argument);
  Mat N = -Mat::Identity(2, 2);
  CHECK_THROWS_AS(Quadratic(N, Vec::Zero(2), 0.0), SolveError);
}

TEST_CASE("max-quadratic value and subgradient") {
  SECTION("value equals the branch-wise max on 100 random points") {
    const MaxQuadratic f = rand_maxquad(6);
    for (int t = 0; t < 100; ++t) {
      const Vec x = randn(6, 2.0);
      CHECK(f.value(x) ==
            Catch::Approx(std::max(f.q1().value(x), f.q2().value(x))));
    }
  }
  SECTION("active branch and tie-break to branch 1") {
    Quadratic q1(Mat::Identity(1, 1), Vec::Zero(1), 1.0);
    Quadratic q2(Mat::Identity(1, 1), Vec::Zero(1), 0.0);
    MaxQuadratic f(q1, q2);  // q1 = q2 + 1 everywhere
    Vec x(1);
    x << 3.0;
    CHECK((f.subgradient(x) - q1.gradient(x)).norm() == 0.0);
    MaxQuadratic tie(q2, q2);
    CHECK((tie.subgradient(x) - q2.gradient(x)).norm() == 0.0);
  }
  SECTION("finite differences at smooth points") {
    const MaxQuadratic f = rand_maxquad(5);
    int checked = 0;
    while (checked < 30) {
      const Vec x = randn(5, 2.0);
      if (std::abs(f.q1().value(x) - f.q2().value(x)) <= 1e-3) continue;
      const Vec s = f.subgradient(x);
      for (Eigen::Index j = 0; j < 5; ++j) {
        Vec e = Vec::Zero(5);
        e[j] = 1e-6;
        const double fd = (f.value(x + e) - f.value(x - e)) / 2e-6;
        REQUIRE(std::abs(fd - s[j]) <= 1e-5 * std::max(1.0, std::abs(s[j])));
      }
      ++checked;
    }
  }
}

TEST_CASE("max-quadratic prox agrees with projected-gradient oracle") {
  for (int t = 0; t < 50; ++t) {
    const Eigen::Index m = 6;
    const MaxQuadratic f = rand_maxquad(m);
    const Vec p = randn(m, 2.0);
    const Vec mine = f.prox(p);
    const Vec oracle = pg_prox_maxquad(f, p, 60000);
    REQUIRE((mine - oracle).norm() < 1e-7);
  }
}

TEST_CASE("affine minorant prox and conjugate") {
  const Vec s = randn(4);
  AffineMinorant l{s, 0.7};
  const Vec p = randn(4);
  const ProxPair pr = prox(ConvexFn(l), p);
  CHECK((pr.x - (p - s)).norm() == 0.0);
  CHECK((pr.z - s).norm() <= 1e-15 * (1.0 + s.norm()));
  CHECK(conjugate_value(ConvexFn(l), s) == Catch::Approx(-0.7));
  CHECK(conjugate_value(ConvexFn(l), s + Vec::Ones(4)) ==
        std::numeric_limits<double>::infinity());
}

TEST_CASE("halfspace indicator conjugate") {
  Vec a(2);
  a << 1.0, 0.0;
  HalfspaceIndicator f(Halfspace(a, 2.0));  // {x1 <= 2}
  Vec z(2);
  z << 3.0, 0.0;
  CHECK(conjugate_value(ConvexFn(f), z) == Catch::Approx(6.0));
  Vec bad(2);
  bad << 1.0, 1.0;
  CHECK(conjugate_value(ConvexFn(f), bad) ==
        std::numeric_limits<double>::infinity());
  CHECK(conjugate_value(ConvexFn(f), -a) ==
        std::numeric_limits<double>::infinity());

  HalfspaceIndicator whole(Halfspace::whole_space(2));
  CHECK(conjugate_value(ConvexFn(whole), Vec::Zero(2)) == 0.0);
  CHECK(conjugate_value(ConvexFn(whole), a) ==
        std::numeric_limits<double>::infinity());
}

TEST_CASE("level-set indicator") {
  SECTION("interior point evaluates to zero, exterior to infinity") {
    LevelSetIndicator f(Quadratic(2.0 * Mat::Identity(2, 2), Vec::Zero(2),
                                  -1.0));  // |x|^2 <= 1
    Vec in(2), out(2);
    in << 0.5, 0.0;
    out << 2.0, 0.0;
    CHECK(eval(ConvexFn(f), in) == 0.0);
    CHECK(eval(ConvexFn(f), out) == std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(subgradient(ConvexFn(f), in), NotSubdifferentiableHere);
  }
  SECTION("rejects a level function with nonnegative minimum") {
    CHECK_THROWS_AS(
        LevelSetIndicator(Quadratic(Mat::Identity(2, 2), Vec::Zero(2), 1.0)),
        std::invalid_argument);
  }
  SECTION("max-of-quadratics minimum is computed correctly") {
    // min max(x^2 - 1, (x-2)^2 - 1) in 1-D is at x = 1 with value 0;
    // shifting by -0.5 makes it negative.
    Quadratic q1(2.0 * Mat::Identity(1, 1), Vec::Zero(1), -1.5);
    Vec b2(1);
    b2 << -4.0;
    Quadratic q2(2.0 * Mat::Identity(1, 1), b2, 4.0 - 1.5);
    LevelSetIndicator f(MaxQuadratic(q1, q2));
    CHECK(f.min_g() == Catch::Approx(-0.5).margin(1e-9));
  }
}

TEST_CASE("linearize") {
  SECTION("tangent of a simple quadratic") {
    Quadratic f(Mat::Identity(2, 2), Vec::Zero(2), 0.0);
    Vec x0(2);
    x0 << 1.0, 0.0;
    const AffineMinorant l = linearize(ConvexFn(f), x0);
    CHECK(l.s[0] == Catch::Approx(1.0));
    CHECK(l.beta == Catch::Approx(-0.5));
    CHECK(l.value(x0) == Catch::Approx(f.value(x0)));
  }
  SECTION("minorant property on 1000 random points") {
    const MaxQuadratic g = rand_maxquad(5);
    const Vec x0 = randn(5, 2.0);
    const AffineMinorant l = linearize(LevelFn(g), x0);
    for (int t = 0; t < 1000; ++t) {
      const Vec x = randn(5, 3.0);
      REQUIRE(l.value(x) <= g.value(x) + 1e-10);
    }
  }
  SECTION("level set distance matches g(x0)/|s| for violated points") {
    const Quadratic g = rand_quadratic(6);
    int checked = 0;
    while (checked < 20) {
      const Vec x0 = randn(6, 2.0);
      if (g.value(x0) <= 0.0) continue;
      const AffineMinorant l = linearize(ConvexFn(g), x0);
      const Halfspace h = l.level_set();
      REQUIRE(distance_to_halfspace(x0, h) ==
              Catch::Approx(g.value(x0) / l.s.norm()).epsilon(1e-10));
      ++checked;
    }
  }
}

TEST_CASE("Fenchel-Young equality at subgradient pairs") {
  SECTION("quadratic") {
    const Quadratic f = rand_quadratic(7);
    for (int t = 0; t < 40; ++t) {
      const Vec x = randn(7, 2.0);
      const Vec s = f.gradient(x);
      REQUIRE(std::abs(f.value(x) + f.conjugate(s) - s.dot(x)) <= 1e-9);
    }
  }
  SECTION("max-quadratic") {
    const MaxQuadratic f = rand_maxquad(5);
    for (int t = 0; t < 40; ++t) {
      const Vec x = randn(5, 2.0);
      const Vec s = f.subgradient(x);
      REQUIRE(std::abs(f.value(x) + f.conjugate(s) - s.dot(x)) <= 1e-9);
    }
  }
}

TEST_CASE("Moreau identity for every proximable type") {
  const Eigen::Index m = 6;
  std::vector<ConvexFn> fns;
  fns.emplace_back(rand_quadratic(m));
  fns.emplace_back(rand_maxquad(m));
  fns.emplace_back(AffineMinorant{randn(m), uniform(-1, 1)});
  fns.emplace_back(HalfspaceIndicator(Halfspace(randn(m), uniform(-1, 1))));
  for (const auto& f : fns) {
    for (int t = 0; t < 25; ++t) {
      const Vec p = randn(m, 2.0);
      const ProxPair pr = prox(f, p);
      REQUIRE((pr.x + pr.z - p).norm() <= 1e-12 * (1.0 + p.norm()));
      const double fx = eval(f, pr.x);
      const double fz = conjugate_value(f, pr.z);
      REQUIRE(std::isfinite(fx));
      REQUIRE(std::isfinite(fz));
      REQUIRE(std::abs(fx + fz - pr.z.dot(pr.x)) <= 1e-9);
    }
  }
}

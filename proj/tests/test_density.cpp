#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ewlab/density.hpp"
#include "ewlab/field_ops.hpp"

using namespace ewlab;

TEST_CASE("radial bump closed-form derivatives match finite differences") {
  const RadialBump bump{0.3, 2.0};
  const double eps = 1e-6;
  for (double q : {0.1, 0.5, 1.5, 2.5, 3.5}) {
    const double fd1 = (bump.value_q(q + eps) - bump.value_q(q - eps)) / (2.0 * eps);
    CHECK(bump.d1_q(q) == doctest::Approx(fd1).epsilon(1e-6));
    const double fd2 = (bump.d1_q(q + eps) - bump.d1_q(q - eps)) / (2.0 * eps);
    CHECK(bump.d2_q(q) == doctest::Approx(fd2).epsilon(1e-6));
  }
  // Compact support and maximum at the center.
  CHECK(bump.value_r(2.0) == 0.0);
  CHECK(bump.value_r(5.0) == 0.0);
  CHECK(bump.value_r(0.0) == doctest::Approx(0.3));
}

TEST_CASE("bump jet: gradient and Hessian against finite differences") {
  const RadialBump bump{0.2, 1.7};
  const double x[3] = {0.4, -0.6, 0.3};
  const Jet2 jet = bump.jet(x[0], x[1], x[2]);
  const double eps = 1e-5;
  auto value_at = [&](double a, double b, double c) { return bump.jet(a, b, c).v; };
  for (int a = 0; a < 3; ++a) {
    double xp[3] = {x[0], x[1], x[2]};
    double xm[3] = {x[0], x[1], x[2]};
    xp[a] += eps;
    xm[a] -= eps;
    const double fd = (value_at(xp[0], xp[1], xp[2]) - value_at(xm[0], xm[1], xm[2])) / (2.0 * eps);
    CHECK(jet.g[a] == doctest::Approx(fd).epsilon(1e-7));
    for (int b = 0; b < 3; ++b) {
      double yp[3] = {x[0], x[1], x[2]};
      double ym[3] = {x[0], x[1], x[2]};
      yp[b] += eps;
      ym[b] -= eps;
      const double gfd =
          (bump.jet(yp[0], yp[1], yp[2]).g[a] - bump.jet(ym[0], ym[1], ym[2]).g[a]) / (2.0 * eps);
      CHECK(jet.h[3 * b + a] == doctest::Approx(gfd).epsilon(1e-6));
    }
  }
  // Regular through the origin.
  const Jet2 origin = bump.jet(0.0, 0.0, 0.0);
  CHECK(origin.g[0] == 0.0);
  CHECK(origin.h[0] == doctest::Approx(2.0 * bump.d1_q(0.0)));
}

TEST_CASE("static word enumeration counts") {
  CHECK(enumerate_static_words(0).size() == 1);
  CHECK(enumerate_static_words(1).size() == 8);    // 1 + 7
  CHECK(enumerate_static_words(2).size() == 57);   // 1 + 7 + 49
}

TEST_CASE("static words on the analytic closure match nested finite differences") {
  const RadialBump bump{0.25, 1.9};
  const double x1 = 0.5, x2 = -0.4, x3 = 0.7;
  const double eps = 2e-5;

  auto fd_apply = [&](StaticGen g, const std::function<double(double, double, double)>& f,
                      double a, double b, double c) -> double {
    auto d = [&](int axis) {
      double p[3] = {a, b, c};
      double m[3] = {a, b, c};
      p[axis] += eps;
      m[axis] -= eps;
      return (f(p[0], p[1], p[2]) - f(m[0], m[1], m[2])) / (2.0 * eps);
    };
    switch (g) {
      case StaticGen::Dx1: return d(0);
      case StaticGen::Dx2: return d(1);
      case StaticGen::Dx3: return d(2);
      case StaticGen::Om1: return b * d(2) - c * d(1);
      case StaticGen::Om2: return c * d(0) - a * d(2);
      case StaticGen::Om3: return a * d(1) - b * d(0);
      case StaticGen::Scale0: return a * d(0) + b * d(1) + c * d(2) - f(a, b, c);
    }
    return 0.0;
  };
  auto rho = [&](double a, double b, double c) { return bump.jet(a, b, c).v; };

  // All 49 two-letter words.
  for (int g1 = 0; g1 < kStaticGenCount; ++g1) {
    for (int g2 = 0; g2 < kStaticGenCount; ++g2) {
      const StaticWord w{static_cast<StaticGen>(g1), static_cast<StaticGen>(g2)};
      const double exact = eval_static_word(w, bump, x1, x2, x3);
      auto inner = [&](double a, double b, double c) {
        return fd_apply(static_cast<StaticGen>(g2), rho, a, b, c);
      };
      const double approx = fd_apply(static_cast<StaticGen>(g1), inner, x1, x2, x3);
      CHECK(exact == doctest::Approx(approx).epsilon(5e-4));
    }
  }
  CHECK_THROWS_AS(eval_static_word(StaticWord(3, StaticGen::Dx1), bump, 0, 0, 0),
                  std::invalid_argument);
}

TEST_CASE("rotations annihilate the radial closure exactly") {
  const RadialBump bump{0.3, 2.0};
  for (int l = 0; l < 3; ++l) {
    const StaticWord w{static_cast<StaticGen>(static_cast<int>(StaticGen::Om1) + l)};
    for (double s : {0.3, 0.9, 1.7}) {
      CHECK(std::abs(eval_static_word(w, bump, s, -0.7 * s, 0.4 * s)) <= 1e-16);
    }
  }
}

TEST_CASE("density field: bounds, support, policy") {
  const Grid g = Grid::make(8.0, 33, 2);
  const DensityField rho = DensityField::make(g, 0.05, 2.0);
  CHECK(rho.rho_tilde.at(g.center_index(), g.center_index(), g.center_index()) ==
        doctest::Approx(0.05));
  // rho = 1 + rho_tilde >= 1 for the nonnegative bump; vanishes for r >= R.
  double mn = 1e9;
  for (int i = g.ghost; i < g.ghost + g.points; ++i)
    for (int j = g.ghost; j < g.ghost + g.points; ++j)
      for (int k = g.ghost; k < g.ghost + g.points; ++k) mn = std::min(mn, rho.rho_full.at(i, j, k));
  CHECK(mn >= 0.5);
  CHECK(rho.rho_tilde.at(g.ghost, g.ghost, g.ghost) == 0.0);

  CHECK_THROWS_AS(DensityField::make(g, 0.5, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(DensityField::make(g, 0.6, 2.0), std::invalid_argument);
}

TEST_CASE("weighted assumption check: zero density, amplitude scaling") {
  const Grid g = Grid::make(8.0, 33, 2);
  const DensityField zero = DensityField::make(g, 0.0, 2.0);
  CHECK(density_assumption_check(zero, g, 2) == 0.0);

  const DensityField a1 = DensityField::make(g, 0.02, 2.0);
  const DensityField a2 = DensityField::make(g, 0.04, 2.0);
  const double n1 = density_assumption_check(a1, g, 2);
  const double n2 = density_assumption_check(a2, g, 2);
  CHECK(n2 == doctest::Approx(2.0 * n1).epsilon(1e-12));
  CHECK(n1 > 0.0);

  CHECK_THROWS_AS(density_assumption_check(a1, g, 3), std::invalid_argument);

  // The unweighted companion norm is positive and scales the same way.
  CHECK(density_lambda_norm(a2, g, 3) ==
        doctest::Approx(2.0 * density_lambda_norm(a1, g, 3)).epsilon(1e-12));
}

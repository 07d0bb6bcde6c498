#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ewlab/field_ops.hpp"
#include "ewlab/grid.hpp"
#include "ewlab/rng.hpp"

using namespace ewlab;

namespace {

constexpr double kPi = std::numbers::pi;

// Max interior error of a scalar field against an analytic function.
double interior_max_error(const ScalarField& f,
                          const std::function<double(double, double, double)>& ref) {
  const Grid& g = f.grid();
  double m = 0.0;
  for (int i = g.ghost; i < g.ghost + g.points; ++i)
    for (int j = g.ghost; j < g.ghost + g.points; ++j)
      for (int k = g.ghost; k < g.ghost + g.points; ++k) {
        m = std::max(m, std::abs(f.at(i, j, k) - ref(g.coord(i), g.coord(j), g.coord(k))));
      }
  return m;
}

VectorField3 random_field(const Grid& g, std::uint64_t seed) {
  VectorField3 u(g);
  Rng rng(seed);
  for (int c = 0; c < 3; ++c) {
    double* p = u.data(c);
    for (std::size_t q = 0; q < u.size_per_comp(); ++q) p[q] = rng.next_symmetric();
  }
  return u;
}

}  // namespace

TEST_CASE("grid construction and spacing") {
  const Grid g = Grid::make(1.0, 3, 2);
  CHECK(g.spacing == doctest::Approx(1.0));
  // Origin is exactly a node; corners land on +-1.
  CHECK(g.coord(g.center_index()) == 0.0);
  CHECK(g.coord(g.ghost) == doctest::Approx(-1.0));
  CHECK(g.coord(g.ghost + 2) == doctest::Approx(1.0));

  const Grid g2 = Grid::make(8.0, 65, 2);
  CHECK(g2.spacing == doctest::Approx(0.25));

  CHECK_THROWS_AS(Grid::make(1.0, 4, 2), std::invalid_argument);   // even n
  CHECK_THROWS_AS(Grid::make(-1.0, 5, 2), std::invalid_argument);  // bad length
  CHECK_THROWS_AS(Grid::make(1.0, 5, 1), std::invalid_argument);   // thin ghosts
}

TEST_CASE("first derivative: constants and affine fields are exact") {
  const Grid g = Grid::make(1.0, 9, 2);
  ScalarField c(g);
  c.fill([](double, double, double) { return 3.25; });
  const ScalarField dc = partial_derivative(c, 1);
  CHECK(sup_norm(dc) == 0.0);

  ScalarField lin(g);
  lin.fill([](double x, double, double) { return x; });
  const ScalarField dl = partial_derivative(lin, 1);
  CHECK(interior_max_error(dl, [](double, double, double) { return 1.0; }) <= 1e-15);
}

TEST_CASE("first derivative converges at order 2 on a smooth field") {
  // Oracle: analytic derivative of sin(2 pi x / L).
  const double length = 1.0;
  std::vector<double> errs;
  for (int n : {17, 33, 65}) {
    const Grid g = Grid::make(length, n, 2);
    ScalarField f(g);
    f.fill([&](double x, double, double) { return std::sin(2.0 * kPi * x / length); });
    const ScalarField df = partial_derivative(f, 1);
    errs.push_back(interior_max_error(df, [&](double x, double, double) {
      return (2.0 * kPi / length) * std::cos(2.0 * kPi * x / length);
    }));
  }
  for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
    const double order = std::log2(errs[i] / errs[i + 1]);
    CHECK(order == doctest::Approx(2.0).epsilon(0.1));  // 2.0 +- 0.2
  }
}

TEST_CASE("divergence: affine and rotational fields are exact") {
  const Grid g = Grid::make(1.0, 9, 2);
  VectorField3 id(g);
  id.fill([](double x, double y, double z) { return std::array<double, 3>{x, y, z}; });
  const ScalarField d = divergence(id);
  CHECK(interior_max_error(d, [](double, double, double) { return 3.0; }) <= 1e-14);

  VectorField3 rot(g);
  rot.fill([](double x, double y, double) { return std::array<double, 3>{-y, x, 0.0}; });
  CHECK(sup_norm(divergence(rot)) <= 1e-15);
}

TEST_CASE("divergence of x f(r) matches 3f + r f'") {
  // Symbolic oracle: with f = G(r^2), div(x f) = 3 G + 2 r^2 G'.
  const double radius = 0.8;
  const double r2 = radius * radius;
  auto gq = [&](double q) {
    if (q >= r2) return 0.0;
    const double w = 1.0 - q / r2;
    return w * w * w * w;
  };
  auto gq_d = [&](double q) {
    if (q >= r2) return 0.0;
    const double w = 1.0 - q / r2;
    return -4.0 * w * w * w / r2;
  };
  std::vector<double> errs;
  for (int n : {17, 33, 65}) {
    const Grid g = Grid::make(1.0, n, 2);
    VectorField3 u(g);
    u.fill([&](double x, double y, double z) {
      const double f = gq(x * x + y * y + z * z);
      return std::array<double, 3>{x * f, y * f, z * f};
    });
    const ScalarField d = divergence(u);
    errs.push_back(interior_max_error(d, [&](double x, double y, double z) {
      const double q = x * x + y * y + z * z;
      return 3.0 * gq(q) + 2.0 * q * gq_d(q);
    }));
  }
  CHECK(std::log2(errs[1] / errs[2]) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("elastic operator: plane profiles select the two wave speeds") {
  const double c1 = 2.0, c2 = 1.0;
  // 1-D analytic oracle: u = e2 phi(x1) gives A u = c2^2 e2 phi'', u = e1 phi
  // gives c1^2 e1 phi''; phi = (1 - s^2)^4 on |s| < 1.
  auto phi = [](double s) {
    if (std::abs(s) >= 1.0) return 0.0;
    const double w = 1.0 - s * s;
    return w * w * w * w;
  };
  auto phi_dd = [](double s) {
    if (std::abs(s) >= 1.0) return 0.0;
    const double w = 1.0 - s * s;
    return -8.0 * w * w * w + 48.0 * s * s * w * w;
  };
  for (int shear = 0; shear <= 1; ++shear) {
    std::vector<double> errs;
    for (int n : {33, 65}) {
      const Grid g = Grid::make(2.0, n, 2);
      VectorField3 u(g);
      const int comp = shear ? 1 : 0;
      u.fill([&](double x, double, double) {
        std::array<double, 3> val{0.0, 0.0, 0.0};
        val[static_cast<std::size_t>(comp)] = phi(x);
        return val;
      });
      const VectorField3 au = elastic_operator(u, c1, c2);
      const double speed2 = shear ? c2 * c2 : c1 * c1;
      double m = 0.0;
      for (int i = g.ghost; i < g.ghost + g.points; ++i)
        for (int j = g.ghost; j < g.ghost + g.points; ++j)
          for (int k = g.ghost; k < g.ghost + g.points; ++k) {
            m = std::max(m, std::abs(au.at(comp, i, j, k) - speed2 * phi_dd(g.coord(i))));
            for (int c = 0; c < 3; ++c) {
              if (c != comp) m = std::max(m, std::abs(au.at(c, i, j, k)));
            }
          }
      errs.push_back(m);
    }
    CHECK(std::log2(errs[0] / errs[1]) == doctest::Approx(2.0).epsilon(0.15));
  }
  CHECK_THROWS_AS(elastic_operator(VectorField3(Grid::make(1.0, 9, 2)), 1.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("norms: constants, zero field, refined-grid quadrature oracle") {
  const Grid g = Grid::make(1.0, 33, 2);
  ScalarField one(g);
  one.fill([](double, double, double) { return 1.0; });
  // Volume of [-1,1]^3 with h^3 node weights: the open-cell quadrature
  // undercounts the boundary layer by O(h).
  CHECK(l2_norm(one) * l2_norm(one) == doctest::Approx(8.0).epsilon(0.1));

  const ScalarField zero(g);
  CHECK(l2_norm(zero) == 0.0);
  CHECK(sup_norm(zero) == 0.0);

  // Gaussian-type bump: compare against a refined-grid reference.
  auto bump = [](double x, double y, double z) {
    return std::exp(-4.0 * (x * x + y * y + z * z));
  };
  ScalarField b(g);
  b.fill(bump);
  const Grid gref = Grid::make(1.0, 129, 2);
  ScalarField bref(gref);
  bref.fill(bump);
  CHECK(l2_norm(b) == doctest::Approx(l2_norm(bref)).epsilon(1e-3));
}

TEST_CASE("derivative linearity on random fields") {
  const Grid g = Grid::make(1.0, 17, 2);
  const VectorField3 f = random_field(g, 11);
  const VectorField3 h = random_field(g, 12);
  VectorField3 combo = scaled(f, 0.75);
  axpy(-1.5, h, combo);
  const VectorField3 d_combo = partial_derivative(combo, 2);
  VectorField3 expect = scaled(partial_derivative(f, 2), 0.75);
  axpy(-1.5, partial_derivative(h, 2), expect);
  CHECK(sup_norm(subtract(d_combo, expect)) <= 1e-13);
}

TEST_CASE("quadrature determinism: identical inputs give identical sums") {
  const Grid g = Grid::make(1.0, 33, 2);
  const VectorField3 f = random_field(g, 99);
  const double n1 = l2_norm(f);
  const double n2 = l2_norm(f);
  CHECK(n1 == n2);
  const ScalarField w = radius_field(g);
  CHECK(weighted_l2(f, w) == weighted_l2(f, w));
}

TEST_CASE("non-finite data is rejected") {
  const Grid g = Grid::make(1.0, 9, 2);
  ScalarField f(g);
  CHECK_THROWS_AS(f.fill([](double, double, double) { return std::nan(""); }), std::runtime_error);
}

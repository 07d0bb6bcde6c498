#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ewlab/density.hpp"
#include "ewlab/gamma.hpp"
#include "ewlab/material_params.hpp"
#include "ewlab/tensor.hpp"

namespace ewlab {

/// Analytic space-time field u(t, x1, x2, x3) used as a commutation test
/// subject.
using SpaceTimeField = std::function<std::array<double, 3>(double, double, double, double)>;

/// Discrete residual of one identity across a joint (h, dt) refinement.
struct ResidualSeries {
  std::string name;
  std::vector<double> residuals;  // coarse to fine
  std::vector<double> orders;     // log2(res[i] / res[i+1])
  bool exact = false;             // every residual at or below the exactness floor

  double min_order() const;
  // Converging at second order, or already at rounding level.
  bool satisfied(double min_order_required) const;
};

struct RefinementSpec {
  std::vector<int> grid_points{25, 49, 97};  // halving h; joint dt halving
  double half_width = 8.0;
  int ghost = 4;      // deep enough for third-order stencil compositions
  double dt0 = 0.1;   // coarsest-level time step
  double t_center = 0.25;
  int window_half_width = 3;
  MaterialParams mat;
  double exact_floor = 1e-12;

  static RefinementSpec with_levels(int levels);
};

// Residuals of the commutation identities of the generators with the linear
// wave operator L = d_t^2 - A:
//   d L u = L d u (all four derivatives),
//   Rot L u = L Rot u,
//   S L u = L S u - 2 L u,
//   S d_t^2 u = d_t^2 S u - 2 d_t^2 u.
std::vector<ResidualSeries> verify_commutators(const SpaceTimeField& u, const RefinementSpec& spec);

// Residuals of the product rules for the quadratic form N and the density
// term rho * d_t^2 u:
//   d N(u,v) = N(d u, v) + N(u, d v),
//   Rot N(u,v) = N(Rot u, v) + N(u, Rot v)   (requires rotation-invariant B),
//   S N(u,v) = N(S u, v) + N(u, S v) - 2 N(u,v),
//   d(rho w) = (d rho) w + rho d w, and the rotation/scaling analogues.
std::vector<ResidualSeries> verify_leibniz_N(const CoefTensor& b, const SpaceTimeField& u,
                                             const SpaceTimeField& v, const RadialBump& rho,
                                             const RefinementSpec& spec);

// Smooth compactly supported test fields with generic component structure.
SpaceTimeField standard_test_field(double amplitude, double support_radius);
SpaceTimeField companion_test_field(double amplitude, double support_radius);
// Space-time quadratic; every stencil in the identities is exact on it.
SpaceTimeField quadratic_test_field();

}  // namespace ewlab

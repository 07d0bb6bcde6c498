#pragma once

#include <array>
#include <vector>

#include "ewlab/grid.hpp"

namespace ewlab {

/// Value, gradient and Hessian of a scalar function at one point.
struct Jet2 {
  double v = 0.0;
  std::array<double, 3> g{};
  std::array<double, 9> h{};  // row-major
};

/// Smooth compactly supported radial bump a * exp(1 - 1/(1 - (r/R)^2)) for
/// r < R, identically zero outside. Written in q = r^2 so the closed-form
/// derivatives stay regular through the origin.
struct RadialBump {
  double amplitude = 1.0;
  double radius = 1.0;

  double value_q(double q) const;   // G(q)
  double d1_q(double q) const;      // dG/dq
  double d2_q(double q) const;      // d2G/dq2
  double value_r(double r) const { return value_q(r * r); }
  Jet2 jet(double x1, double x2, double x3) const;
};

/// Perturbed density rho = 1 + rho_tilde with rho_tilde a radial bump;
/// carries grid samples plus the analytic closure used by the weighted-norm
/// assumption check.
struct DensityField {
  RadialBump profile;       // amplitude = the bump height (0 for homogeneous)
  ScalarField rho_tilde;    // samples of the perturbation
  ScalarField rho_full;     // 1 + rho_tilde

  static DensityField make(const Grid& g, double amplitude, double support_radius);
  double amplitude() const { return profile.amplitude; }
  double support_radius() const { return profile.radius; }
  bool homogeneous() const { return profile.amplitude == 0.0; }
};

// Time-independent generator alphabet: gradients, rotations (scalar action,
// no component mixing) and the shifted radial scaling r d_r - 1.
enum class StaticGen : int { Dx1 = 0, Dx2, Dx3, Om1, Om2, Om3, Scale0 };
inline constexpr int kStaticGenCount = 7;
using StaticWord = std::vector<StaticGen>;

std::vector<StaticWord> enumerate_static_words(int max_len);

// Exact evaluation of a static word applied to the analytic bump at a point;
// supports words of length <= 2 (the desk-scale cap).
double eval_static_word(const StaticWord& w, const RadialBump& bump, double x1, double x2,
                        double x3);

// max over |alpha| <= k_max of || <r> Lambda^alpha rho_tilde ||_L2 using the
// analytic closure and grid quadrature. k_max <= 2.
double density_assumption_check(const DensityField& rho, const Grid& g, int k_max);

// Companion unweighted norm sum_{|alpha|<=k-1} ||Lambda^alpha rho_tilde||_L2
// (the variant without the <r> weight), same analytic route.
double density_lambda_norm(const DensityField& rho, const Grid& g, int k);

}  // namespace ewlab

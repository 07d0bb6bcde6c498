#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ewlab/gamma.hpp"
#include "ewlab/grid.hpp"
#include "ewlab/material_params.hpp"
#include "ewlab/tensor.hpp"

namespace ewlab {

/// Orthogonal projections onto the radial direction (paired with the fast
/// pressure speed c1) and its complement (shear, c2).
enum class Projection : int { Radial = 1, Transverse = 2 };

// P_radial u = (x/r)(x/r . u); P_transverse u = u - P_radial u. At nodes with
// r < h/2 the convention is P_radial u = 0.
VectorField3 project(Projection a, const VectorField3& u);

// Pointwise (1 + (c_a t - r)^2)^{1/2} for a in {1, 2}.
ScalarField weight_field(int a, double t, const Grid& g, const MaterialParams& mat);

// Generalized energy: (1/2) sum over words |alpha| <= k-1 of
// int |d_t W u|^2 + c2^2 |grad W u|^2 + (c1^2 - c2^2)(div W u)^2.
double energy_E(int k, const TimeWindow& w, const MaterialParams& mat);

// Weighted energy: sum over a, beta, l and words |alpha| <= k-2 of
// || <c_a t - r> P_a d_beta d_l W u ||_L2.
double energy_X(int k, const TimeWindow& w, const MaterialParams& mat);

// E_k plus the cubic correction sum int Ntilde(W u, W u, u).
double energy_E_tilde(int k, const TimeWindow& w, const CoefTensor& b, const MaterialParams& mat);

// E_tilde plus the density correction sum int rho_tilde |d_t W u|^2.
double energy_E_hat(int k, const TimeWindow& w, const CoefTensor& b, const ScalarField& rho_tilde,
                    const MaterialParams& mat);

/// Max over interior nodes (and admissible words) of the left-hand side of
/// each pointwise estimate divided by its right-hand side:
///   r41: <r>^1/2 |W u|            vs E_k^1/2          (orders |alpha|+2 <= k)
///   r42: <r> |d W u|              vs E_k^1/2          (|alpha|+3 <= k)
///   r43: <r><c_a t-r>^1/2 |P_a d W u|    vs E_k^1/2 + X_k  (|alpha|+3 <= k)
///   r44: <r><c_a t-r> |P_a d grad W u|   vs X_k        (|alpha|+4 <= k)
/// A ratio with no admissible word, or 0/0, reports 0.
struct SobolevRatios {
  double r41 = 0.0, r42 = 0.0, r43 = 0.0, r44 = 0.0;
};
SobolevRatios sobolev_ratio_report(int k, const TimeWindow& w, const MaterialParams& mat);

// X_2 / (E_2^1/2 + t ||L u||_L2) with L u = d_t^2 u - A u discrete.
double lemma_x2_ratio(const TimeWindow& w, const MaterialParams& mat);

// Small-data form of the weighted second-time-derivative bound:
// sum_{a, |alpha| <= k-2} || <c_a t - r> P_a d_t^2 W u || / E_k^{1/2}.
double lemma_dt2_ratio(int k, const TimeWindow& w, const MaterialParams& mat);

// Least-squares slope of log E against log <t> over the second half of the
// series. Requires >= 8 samples.
double growth_exponent_fit(const std::vector<std::pair<double, double>>& series);

// max over the series of E(t) / E(first entry); 1 for an identically zero
// series.
double boundedness_ratio(const std::vector<double>& series);

/// One row of the per-time diagnostics emitted during a run.
struct EnergyReport {
  double t = 0.0;
  double e1 = 0.0, e2 = 0.0, e3 = 0.0;
  double x2 = 0.0, x3 = 0.0;
  double etilde3 = 0.0, ehat3 = 0.0;
  double r41 = 0.0, r42 = 0.0, r43 = 0.0, r44 = 0.0;
  double x2_deficit = 0.0, dt2_deficit = 0.0;

  static std::string csv_header();
  std::string csv_row() const;
};

// Computes every report quantity the window supports in a single pass over
// the word tree. Quantities whose temporal stencil exceeds the window are
// reported as 0.
EnergyReport analyze_window(const TimeWindow& w, const CoefTensor& b, const ScalarField& rho_tilde,
                            const MaterialParams& mat, int k_report);

}  // namespace ewlab

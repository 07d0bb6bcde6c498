#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ewlab/grid.hpp"

namespace ewlab {

/// The 3^6 = 729 real coefficients of the quadratic nonlinearity
/// N^i(u,v) = B[i,j,k][l,m,n] d_l(d_m u^j d_n v^k), stored flat in
/// lexicographic (i,j,k,l,m,n) order with 0-based indices.
class CoefTensor {
 public:
  static constexpr int kRank = 3;
  static constexpr int kSize = 729;

  CoefTensor() : b_{} {}

  static std::size_t flat(int i, int j, int k, int l, int m, int n) {
    return static_cast<std::size_t>(((((i * 3 + j) * 3 + k) * 3 + l) * 3 + m) * 3 + n);
  }
  double& at(int i, int j, int k, int l, int m, int n) { return b_[flat(i, j, k, l, m, n)]; }
  double at(int i, int j, int k, int l, int m, int n) const { return b_[flat(i, j, k, l, m, n)]; }
  double* data() { return b_.data(); }
  const double* data() const { return b_.data(); }

  double frobenius_norm() const;
  double max_abs() const;
  bool is_zero() const;
  CoefTensor scaled(double s) const;

  // JSON array of the 729 entries plus a schema version tag.
  std::string to_json() const;
  static CoefTensor from_json(const std::string& text);

 private:
  std::array<double, kSize> b_;
};

// Projection onto the symmetry relations B[ijk|lmn] = B[jik|mln] = B[ikj|lnm]
// (full permutation symmetry of the three (upper,lower) index pairs). Exact:
// every orbit receives one shared value, so the deficit of the result is 0
// and the map is bitwise idempotent.
CoefTensor symmetrize(const CoefTensor& b);

// Max violation of the two symmetry relations over all 729 entries.
double symmetry_deficit(const CoefTensor& b);

/// Deterministic direction samples on the unit sphere plus orthogonal pairs.
struct SphereSampler {
  std::vector<std::array<double, 3>> directions;                      // |w| = 1
  std::vector<std::pair<std::array<double, 3>, std::array<double, 3>>> pairs;  // (eta, w), eta._|_w

  // Fibonacci-sphere directions; `pairs_per_direction` tangent vectors each.
  static SphereSampler make(int n_directions, int pairs_per_direction);
};

// Max over sampled w of |B w^6| (self-interaction of the radial family).
double radial_null_deficit(const CoefTensor& b, const SphereSampler& s);
// Max over sampled orthogonal (eta, w) of |B eta^3 w^3|.
double transverse_null_deficit(const CoefTensor& b, const SphereSampler& s);

struct NullTensorOptions {
  int construction_directions = 240;
  int construction_pairs_per_direction = 2;  // 480 pairs
  int verify_directions = 480;
  int verify_pairs_per_direction = 2;
  double tolerance = 1e-10;
};

// Draws a random tensor from `seed`, symmetrizes, projects it onto the
// intersection of the two null-condition constraint sets by least squares,
// re-symmetrizes, and verifies the deficits on an independent denser sampler.
// Throws if the verification deficits exceed the tolerance.
CoefTensor make_null_tensor(std::uint64_t seed, const NullTensorOptions& opt = {});

// Random entries in [-scale, scale], symmetrized; generally not null.
CoefTensor random_symmetric_tensor(std::uint64_t seed, double scale = 1.0);

// Rotation-invariant tensors: the symmetrized delta-pairing basis and an
// exact nonzero member satisfying both null conditions (every isotropic
// tensor is transverse-null; radial-null reduces to a zero coefficient sum).
std::vector<CoefTensor> isotropic_symmetric_basis();
CoefTensor isotropic_null_tensor();
CoefTensor isotropic_generic_tensor();

// N^i(u,v) = B[ijk|lmn] d_l(d_m u^j d_n v^k) in conservative form: the nine
// gradient products are formed first, the outer derivative is applied last.
VectorField3 apply_N(const CoefTensor& b, const VectorField3& u, const VectorField3& v);

// Pointwise trilinear contraction B[ijk|lmn] d_l u^i d_m v^j d_n w^k.
ScalarField apply_N_tilde(const CoefTensor& b, const VectorField3& u, const VectorField3& v,
                          const VectorField3& w);

}  // namespace ewlab

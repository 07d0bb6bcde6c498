#include "ewlab/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>
#include <json.hpp>

#include "ewlab/field_ops.hpp"
#include "ewlab/rng.hpp"

namespace ewlab {

namespace {

// The two relations generate the full permutation group S3 acting on the
// index pairs (i,l), (j,m), (k,n).
constexpr int kPairPerms[6][3] = {{0, 1, 2}, {1, 0, 2}, {0, 2, 1},
                                  {2, 1, 0}, {1, 2, 0}, {2, 0, 1}};

struct IndexTuple {
  int up[3];
  int lo[3];
};

IndexTuple decode(std::size_t f) {
  IndexTuple t{};
  t.lo[2] = static_cast<int>(f % 3); f /= 3;
  t.lo[1] = static_cast<int>(f % 3); f /= 3;
  t.lo[0] = static_cast<int>(f % 3); f /= 3;
  t.up[2] = static_cast<int>(f % 3); f /= 3;
  t.up[1] = static_cast<int>(f % 3); f /= 3;
  t.up[0] = static_cast<int>(f % 3);
  return t;
}

std::size_t encode(const IndexTuple& t) {
  return CoefTensor::flat(t.up[0], t.up[1], t.up[2], t.lo[0], t.lo[1], t.lo[2]);
}

std::size_t permute_pairs(std::size_t f, const int* perm) {
  const IndexTuple t = decode(f);
  IndexTuple r{};
  for (int p = 0; p < 3; ++p) {
    r.up[p] = t.up[perm[p]];
    r.lo[p] = t.lo[perm[p]];
  }
  return encode(r);
}

}  // namespace

double CoefTensor::frobenius_norm() const {
  double s = 0.0;
  for (double v : b_) s += v * v;
  return std::sqrt(s);
}

double CoefTensor::max_abs() const {
  double m = 0.0;
  for (double v : b_) m = std::max(m, std::abs(v));
  return m;
}

bool CoefTensor::is_zero() const { return max_abs() == 0.0; }

CoefTensor CoefTensor::scaled(double s) const {
  CoefTensor out = *this;
  for (auto& v : out.b_) v *= s;
  return out;
}

std::string CoefTensor::to_json() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["entries"] = std::vector<double>(b_.begin(), b_.end());
  return j.dump();
}

CoefTensor CoefTensor::from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  if (!j.contains("schema_version") || j.at("schema_version").get<int>() != 1) {
    throw std::invalid_argument("CoefTensor::from_json: unsupported schema version");
  }
  const auto entries = j.at("entries").get<std::vector<double>>();
  if (entries.size() != static_cast<std::size_t>(kSize)) {
    throw std::invalid_argument("CoefTensor::from_json: expected 729 entries");
  }
  CoefTensor out;
  std::copy(entries.begin(), entries.end(), out.data());
  return out;
}

CoefTensor symmetrize(const CoefTensor& b) {
  CoefTensor out;
  std::array<bool, CoefTensor::kSize> done{};
  for (std::size_t f = 0; f < CoefTensor::kSize; ++f) {
    if (done[f]) continue;
    std::array<std::size_t, 6> orbit{};
    int count = 0;
    for (const auto& perm : kPairPerms) {
      const std::size_t img = permute_pairs(f, perm);
      bool seen = false;
      for (int q = 0; q < count; ++q) {
        if (orbit[static_cast<std::size_t>(q)] == img) { seen = true; break; }
      }
      if (!seen) orbit[static_cast<std::size_t>(count++)] = img;
    }
    std::sort(orbit.begin(), orbit.begin() + count);
    bool all_equal = true;
    const double first = b.data()[orbit[0]];
    for (int q = 1; q < count; ++q) {
      if (b.data()[orbit[static_cast<std::size_t>(q)]] != first) { all_equal = false; break; }
    }
    double value = first;
    if (!all_equal) {
      double s = 0.0;
      for (int q = 0; q < count; ++q) s += b.data()[orbit[static_cast<std::size_t>(q)]];
      value = s / static_cast<double>(count);
    }
    for (int q = 0; q < count; ++q) {
      out.data()[orbit[static_cast<std::size_t>(q)]] = value;
      done[orbit[static_cast<std::size_t>(q)]] = true;
    }
  }
  return out;
}

double symmetry_deficit(const CoefTensor& b) {
  // Relation 1 swaps pairs (i,l)<->(j,m); relation 2 swaps (j,m)<->(k,n).
  double m = 0.0;
  for (std::size_t f = 0; f < CoefTensor::kSize; ++f) {
    const double v = b.data()[f];
    m = std::max(m, std::abs(v - b.data()[permute_pairs(f, kPairPerms[1])]));
    m = std::max(m, std::abs(v - b.data()[permute_pairs(f, kPairPerms[2])]));
  }
  return m;
}

SphereSampler SphereSampler::make(int n_directions, int pairs_per_direction) {
  if (n_directions < 1) throw std::invalid_argument("SphereSampler: need at least one direction");
  SphereSampler s;
  s.directions.reserve(static_cast<std::size_t>(n_directions));
  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  for (int i = 0; i < n_directions; ++i) {
    const double z = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(n_directions);
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = 2.0 * std::numbers::pi * static_cast<double>(i) / golden;
    s.directions.push_back({rho * std::cos(phi), rho * std::sin(phi), z});
  }
  auto dot = [](const std::array<double, 3>& a, const std::array<double, 3>& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
  };
  auto cross = [](const std::array<double, 3>& a, const std::array<double, 3>& b) {
    return std::array<double, 3>{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
                                 a[0] * b[1] - a[1] * b[0]};
  };
  auto normalize = [&](std::array<double, 3> a) {
    const double n = std::sqrt(dot(a, a));
    return std::array<double, 3>{a[0] / n, a[1] / n, a[2] / n};
  };
  for (std::size_t d = 0; d < s.directions.size(); ++d) {
    const auto& w = s.directions[d];
    // Tangent frame from the least-aligned coordinate axis.
    int axis = 0;
    if (std::abs(w[1]) < std::abs(w[axis])) axis = 1;
    if (std::abs(w[2]) < std::abs(w[axis])) axis = 2;
    std::array<double, 3> e{0.0, 0.0, 0.0};
    e[static_cast<std::size_t>(axis)] = 1.0;
    const auto t1 = normalize(cross(e, w));
    const auto t2 = cross(w, t1);
    for (int p = 0; p < pairs_per_direction; ++p) {
      const double ang = std::numbers::pi * (static_cast<double>(p) + 0.5) /
                             static_cast<double>(pairs_per_direction) +
                         0.7548776662 * static_cast<double>(d);
      std::array<double, 3> eta{std::cos(ang) * t1[0] + std::sin(ang) * t2[0],
                                std::cos(ang) * t1[1] + std::sin(ang) * t2[1],
                                std::cos(ang) * t1[2] + std::sin(ang) * t2[2]};
      // Two Gram-Schmidt sweeps keep |eta.w| at rounding level.
      for (int sweep = 0; sweep < 2; ++sweep) {
        const double c = dot(eta, w);
        eta[0] -= c * w[0];
        eta[1] -= c * w[1];
        eta[2] -= c * w[2];
        eta = normalize(eta);
      }
      s.pairs.emplace_back(eta, w);
    }
  }
  return s;
}

namespace {

// Contracts the six tensor slots against unit vectors, last index first.
// `first3` weights the (i,j,k) slots and `last3` the (l,m,n) slots.
double contract6(const CoefTensor& b, const std::array<double, 3>& first3,
                 const std::array<double, 3>& last3) {
  std::array<double, 243> t5;
  const double* src = b.data();
  for (int p = 0; p < 243; ++p) {
    t5[static_cast<std::size_t>(p)] =
        src[3 * p] * last3[0] + src[3 * p + 1] * last3[1] + src[3 * p + 2] * last3[2];
  }
  std::array<double, 81> t4;
  for (int p = 0; p < 81; ++p) {
    t4[static_cast<std::size_t>(p)] = t5[static_cast<std::size_t>(3 * p)] * last3[0] +
                                      t5[static_cast<std::size_t>(3 * p + 1)] * last3[1] +
                                      t5[static_cast<std::size_t>(3 * p + 2)] * last3[2];
  }
  std::array<double, 27> t3;
  for (int p = 0; p < 27; ++p) {
    t3[static_cast<std::size_t>(p)] = t4[static_cast<std::size_t>(3 * p)] * last3[0] +
                                      t4[static_cast<std::size_t>(3 * p + 1)] * last3[1] +
                                      t4[static_cast<std::size_t>(3 * p + 2)] * last3[2];
  }
  std::array<double, 9> t2;
  for (int p = 0; p < 9; ++p) {
    t2[static_cast<std::size_t>(p)] = t3[static_cast<std::size_t>(3 * p)] * first3[0] +
                                      t3[static_cast<std::size_t>(3 * p + 1)] * first3[1] +
                                      t3[static_cast<std::size_t>(3 * p + 2)] * first3[2];
  }
  std::array<double, 3> t1;
  for (int p = 0; p < 3; ++p) {
    t1[static_cast<std::size_t>(p)] = t2[static_cast<std::size_t>(3 * p)] * first3[0] +
                                      t2[static_cast<std::size_t>(3 * p + 1)] * first3[1] +
                                      t2[static_cast<std::size_t>(3 * p + 2)] * first3[2];
  }
  return t1[0] * first3[0] + t1[1] * first3[1] + t1[2] * first3[2];
}

}  // namespace

double radial_null_deficit(const CoefTensor& b, const SphereSampler& s) {
  double m = 0.0;
  for (const auto& w : s.directions) m = std::max(m, std::abs(contract6(b, w, w)));
  return m;
}

double transverse_null_deficit(const CoefTensor& b, const SphereSampler& s) {
  double m = 0.0;
  for (const auto& [eta, w] : s.pairs) m = std::max(m, std::abs(contract6(b, eta, w)));
  return m;
}

CoefTensor random_symmetric_tensor(std::uint64_t seed, double scale) {
  Rng rng(seed);
  CoefTensor b;
  for (std::size_t f = 0; f < CoefTensor::kSize; ++f) b.data()[f] = scale * rng.next_symmetric();
  return symmetrize(b);
}

namespace {

void fill_constraint_row(Eigen::MatrixXd& c, Eigen::Index row, const std::array<double, 3>& first3,
                         const std::array<double, 3>& last3) {
  std::size_t f = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        const double up = first3[static_cast<std::size_t>(i)] *
                          first3[static_cast<std::size_t>(j)] * first3[static_cast<std::size_t>(k)];
        for (int l = 0; l < 3; ++l)
          for (int m = 0; m < 3; ++m)
            for (int n = 0; n < 3; ++n, ++f) {
              c(row, static_cast<Eigen::Index>(f)) =
                  up * last3[static_cast<std::size_t>(l)] * last3[static_cast<std::size_t>(m)] *
                  last3[static_cast<std::size_t>(n)];
            }
      }
}

}  // namespace

CoefTensor make_null_tensor(std::uint64_t seed, const NullTensorOptions& opt) {
  const CoefTensor start = random_symmetric_tensor(seed, 1.0);

  const SphereSampler sampler =
      SphereSampler::make(opt.construction_directions, opt.construction_pairs_per_direction);
  const Eigen::Index rows =
      static_cast<Eigen::Index>(sampler.directions.size() + sampler.pairs.size());
  Eigen::MatrixXd c(rows, CoefTensor::kSize);
  Eigen::Index row = 0;
  for (const auto& w : sampler.directions) fill_constraint_row(c, row++, w, w);
  for (const auto& [eta, w] : sampler.pairs) fill_constraint_row(c, row++, eta, w);

  Eigen::VectorXd b0(CoefTensor::kSize);
  for (std::size_t f = 0; f < CoefTensor::kSize; ++f) b0(static_cast<Eigen::Index>(f)) = start.data()[f];

  // Minimal-norm solution of C x = C b0 is the projection of b0 onto the
  // constraint row space; subtracting it lands in the null space.
  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(c);
  const Eigen::VectorXd x = cod.solve(c * b0);
  CoefTensor out;
  for (std::size_t f = 0; f < CoefTensor::kSize; ++f)
    out.data()[f] = b0(static_cast<Eigen::Index>(f)) - x(static_cast<Eigen::Index>(f));
  out = symmetrize(out);

  const SphereSampler verify =
      SphereSampler::make(opt.verify_directions, opt.verify_pairs_per_direction);
  const double rd = radial_null_deficit(out, verify);
  const double td = transverse_null_deficit(out, verify);
  if (rd > opt.tolerance || td > opt.tolerance) {
    throw std::runtime_error(
        "make_null_tensor: verification deficit exceeds tolerance (insufficient sampling)");
  }
  return out;
}

namespace {

// All 15 ways to pair the six index slots {i,j,k,l,m,n} with deltas.
constexpr int kPairings[15][6] = {
    // stored as three slot pairs (a0,b0, a1,b1, a2,b2), slots 0..5 = i,j,k,l,m,n
    {0, 1, 2, 3, 4, 5}, {0, 1, 2, 4, 3, 5}, {0, 1, 2, 5, 3, 4},
    {0, 2, 1, 3, 4, 5}, {0, 2, 1, 4, 3, 5}, {0, 2, 1, 5, 3, 4},
    {0, 3, 1, 2, 4, 5}, {0, 3, 1, 4, 2, 5}, {0, 3, 1, 5, 2, 4},
    {0, 4, 1, 2, 3, 5}, {0, 4, 1, 3, 2, 5}, {0, 4, 1, 5, 2, 3},
    {0, 5, 1, 2, 3, 4}, {0, 5, 1, 3, 2, 4}, {0, 5, 1, 4, 2, 3}};

CoefTensor pairing_tensor(const int* p) {
  CoefTensor t;
  for (std::size_t f = 0; f < CoefTensor::kSize; ++f) {
    const IndexTuple d = decode(f);
    const int slots[6] = {d.up[0], d.up[1], d.up[2], d.lo[0], d.lo[1], d.lo[2]};
    const bool match = slots[p[0]] == slots[p[1]] && slots[p[2]] == slots[p[3]] &&
                       slots[p[4]] == slots[p[5]];
    t.data()[f] = match ? 1.0 : 0.0;
  }
  return t;
}

}  // namespace

std::vector<CoefTensor> isotropic_symmetric_basis() {
  std::vector<CoefTensor> basis;
  for (const auto& p : kPairings) {
    CoefTensor t = symmetrize(pairing_tensor(p));
    bool dup = false;
    for (const auto& q : basis) {
      bool equal = true;
      for (std::size_t f = 0; f < CoefTensor::kSize; ++f) {
        if (q.data()[f] != t.data()[f]) { equal = false; break; }
      }
      if (equal) { dup = true; break; }
    }
    if (!dup) basis.push_back(std::move(t));
  }
  return basis;
}

CoefTensor isotropic_null_tensor() {
  // delta(i,l)delta(j,m)delta(k,n) contracts to |w|^6 on the radial form and
  // to (eta.w)^3 on the transverse one; the symmetrized cross pattern below
  // contracts to |w|^6 and (eta.eta)(w.w)(eta.w). Their difference vanishes
  // on both.
  const int diag[6] = {0, 3, 1, 4, 2, 5};
  const int cross[6] = {0, 1, 3, 4, 2, 5};
  const CoefTensor t1 = symmetrize(pairing_tensor(diag));
  const CoefTensor t2 = symmetrize(pairing_tensor(cross));
  CoefTensor out;
  for (std::size_t f = 0; f < CoefTensor::kSize; ++f) out.data()[f] = t1.data()[f] - t2.data()[f];
  return out;
}

CoefTensor isotropic_generic_tensor() {
  const int diag[6] = {0, 3, 1, 4, 2, 5};
  const int cross[6] = {0, 1, 3, 4, 2, 5};
  const CoefTensor t1 = symmetrize(pairing_tensor(diag));
  const CoefTensor t2 = symmetrize(pairing_tensor(cross));
  CoefTensor out;
  for (std::size_t f = 0; f < CoefTensor::kSize; ++f)
    out.data()[f] = t1.data()[f] + 0.5 * t2.data()[f];
  return out;
}

VectorField3 apply_N(const CoefTensor& b, const VectorField3& u, const VectorField3& v) {
  if (!u.grid().same_layout(v.grid())) throw std::invalid_argument("apply_N: grid mismatch");
  const Grid& g = u.grid();
  const int a = g.alloc_per_axis();

  std::array<VectorField3, 3> du;  // du[m].comp(j) = d_{m+1} u^j
  std::array<VectorField3, 3> dv;
  for (int m = 0; m < 3; ++m) {
    du[static_cast<std::size_t>(m)] = partial_derivative(u, m + 1);
    dv[static_cast<std::size_t>(m)] = partial_derivative(v, m + 1);
  }

  // s[i*3+l] = sum_{jkmn} B[ijk|lmn] (d_m u^j)(d_n v^k), pointwise.
  std::array<ScalarField, 9> s;
  for (auto& f : s) f = ScalarField(g);
  const double* bb = b.data();
  for (int i = 1; i < a - 1; ++i) {
    for (int j = 1; j < a - 1; ++j) {
      const std::size_t row = g.flat(i, j, 0);
      for (int k = 1; k < a - 1; ++k) {
        const std::size_t p = row + static_cast<std::size_t>(k);
        double pu[3][3], qv[3][3];  // pu[m][j], qv[n][k]
        for (int m = 0; m < 3; ++m)
          for (int c = 0; c < 3; ++c) {
            pu[m][c] = du[static_cast<std::size_t>(m)].data(c)[p];
            qv[m][c] = dv[static_cast<std::size_t>(m)].data(c)[p];
          }
        double r[3][3][3][3];  // r[j][k][m][n]
        for (int cj = 0; cj < 3; ++cj)
          for (int ck = 0; ck < 3; ++ck)
            for (int m = 0; m < 3; ++m)
              for (int n = 0; n < 3; ++n) r[cj][ck][m][n] = pu[m][cj] * qv[n][ck];
        double t[3][3] = {};  // t[i][l]
        std::size_t f = 0;
        for (int ci = 0; ci < 3; ++ci)
          for (int cj = 0; cj < 3; ++cj)
            for (int ck = 0; ck < 3; ++ck)
              for (int l = 0; l < 3; ++l)
                for (int m = 0; m < 3; ++m)
                  for (int n = 0; n < 3; ++n, ++f) t[ci][l] += bb[f] * r[cj][ck][m][n];
        for (int ci = 0; ci < 3; ++ci)
          for (int l = 0; l < 3; ++l) s[static_cast<std::size_t>(ci * 3 + l)].data()[p] = t[ci][l];
      }
    }
  }

  VectorField3 out(g);
  for (int ci = 0; ci < 3; ++ci) {
    for (int l = 0; l < 3; ++l) {
      const ScalarField d = partial_derivative(s[static_cast<std::size_t>(ci * 3 + l)], l + 1);
      const double* src = d.data();
      double* dst = out.data(ci);
      for (std::size_t q = 0; q < out.size_per_comp(); ++q) dst[q] += src[q];
    }
  }
  ensure_finite(out, "apply_N");
  return out;
}

ScalarField apply_N_tilde(const CoefTensor& b, const VectorField3& u, const VectorField3& v,
                          const VectorField3& w) {
  if (!u.grid().same_layout(v.grid()) || !u.grid().same_layout(w.grid())) {
    throw std::invalid_argument("apply_N_tilde: grid mismatch");
  }
  const Grid& g = u.grid();
  const int a = g.alloc_per_axis();
  std::array<VectorField3, 3> du, dv, dw;
  for (int m = 0; m < 3; ++m) {
    du[static_cast<std::size_t>(m)] = partial_derivative(u, m + 1);
    dv[static_cast<std::size_t>(m)] = partial_derivative(v, m + 1);
    dw[static_cast<std::size_t>(m)] = partial_derivative(w, m + 1);
  }
  ScalarField out(g);
  const double* bb = b.data();
  for (int i = 1; i < a - 1; ++i) {
    for (int j = 1; j < a - 1; ++j) {
      const std::size_t row = g.flat(i, j, 0);
      for (int k = 1; k < a - 1; ++k) {
        const std::size_t p = row + static_cast<std::size_t>(k);
        double gu[3][3], gv[3][3], gw[3][3];  // g*[axis][comp]
        for (int m = 0; m < 3; ++m)
          for (int c = 0; c < 3; ++c) {
            gu[m][c] = du[static_cast<std::size_t>(m)].data(c)[p];
            gv[m][c] = dv[static_cast<std::size_t>(m)].data(c)[p];
            gw[m][c] = dw[static_cast<std::size_t>(m)].data(c)[p];
          }
        double acc = 0.0;
        std::size_t f = 0;
        for (int ci = 0; ci < 3; ++ci)
          for (int cj = 0; cj < 3; ++cj)
            for (int ck = 0; ck < 3; ++ck)
              for (int l = 0; l < 3; ++l)
                for (int m = 0; m < 3; ++m)
                  for (int n = 0; n < 3; ++n, ++f)
                    acc += bb[f] * gu[l][ci] * gv[m][cj] * gw[n][ck];
        out.data()[p] = acc;
      }
    }
  }
  ensure_finite(out, "apply_N_tilde");
  return out;
}

}  // namespace ewlab

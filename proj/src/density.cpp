#include "ewlab/density.hpp"

#include <cmath>
#include <stdexcept>

#include "ewlab/field_ops.hpp"

namespace ewlab {

double RadialBump::value_q(double q) const {
  const double r2 = radius * radius;
  if (q >= r2 || amplitude == 0.0) return 0.0;
  const double w = 1.0 - q / r2;
  return amplitude * std::exp(1.0 - 1.0 / w);
}

double RadialBump::d1_q(double q) const {
  const double r2 = radius * radius;
  if (q >= r2 || amplitude == 0.0) return 0.0;
  const double w = 1.0 - q / r2;
  return -value_q(q) / (r2 * w * w);
}

double RadialBump::d2_q(double q) const {
  const double r2 = radius * radius;
  if (q >= r2 || amplitude == 0.0) return 0.0;
  const double w = 1.0 - q / r2;
  const double g = value_q(q);
  return g / (r2 * r2 * w * w * w * w) - 2.0 * g / (r2 * r2 * w * w * w);
}

Jet2 RadialBump::jet(double x1, double x2, double x3) const {
  const double q = x1 * x1 + x2 * x2 + x3 * x3;
  Jet2 j;
  j.v = value_q(q);
  const double g1 = d1_q(q);
  const double g2 = d2_q(q);
  const double x[3] = {x1, x2, x3};
  for (int a = 0; a < 3; ++a) j.g[static_cast<std::size_t>(a)] = 2.0 * x[a] * g1;
  for (int a = 0; a < 3; ++a) {
    for (int c = 0; c < 3; ++c) {
      double v = 4.0 * x[a] * x[c] * g2;
      if (a == c) v += 2.0 * g1;
      j.h[static_cast<std::size_t>(3 * a + c)] = v;
    }
  }
  return j;
}

DensityField DensityField::make(const Grid& g, double amplitude, double support_radius) {
  if (amplitude < 0.0) throw std::invalid_argument("DensityField: amplitude must be >= 0");
  if (!(support_radius > 0.0)) throw std::invalid_argument("DensityField: support radius must be positive");
  if (amplitude >= 0.5) {
    throw std::invalid_argument("DensityField: amplitude must stay below 1/2 (density bound policy)");
  }
  DensityField d;
  d.profile = RadialBump{amplitude, support_radius};
  d.rho_tilde = ScalarField(g);
  d.rho_tilde.fill([&](double x, double y, double z) {
    return d.profile.value_q(x * x + y * y + z * z);
  });
  d.rho_full = ScalarField(g);
  d.rho_full.fill([&](double x, double y, double z) {
    return 1.0 + d.profile.value_q(x * x + y * y + z * z);
  });
  return d;
}

std::vector<StaticWord> enumerate_static_words(int max_len) {
  if (max_len < 0) throw std::invalid_argument("enumerate_static_words: negative length");
  std::vector<StaticWord> words;
  words.push_back({});
  std::vector<StaticWord> prev = words;
  for (int len = 1; len <= max_len; ++len) {
    std::vector<StaticWord> cur;
    for (int g = 0; g < kStaticGenCount; ++g) {
      for (const auto& tail : prev) {
        StaticWord w;
        w.reserve(static_cast<std::size_t>(len));
        w.push_back(static_cast<StaticGen>(g));
        for (auto t : tail) w.push_back(t);
        cur.push_back(std::move(w));
      }
    }
    for (auto& w : cur) words.push_back(w);
    prev = std::move(cur);
  }
  return words;
}

namespace {

// First-order operator sum_j c_j(x) d_j + c0 with affine coefficients:
// c_j(x) = sum_a lin[a][j] x_a + cst[j].
struct GenOp {
  double lin[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  double cst[3] = {0, 0, 0};
  double c0 = 0.0;

  double coef(int j, const double* x) const {
    return lin[0][j] * x[0] + lin[1][j] * x[1] + lin[2][j] * x[2] + cst[j];
  }
  // d_i c_j, constant for affine coefficients.
  double dcoef(int i, int j) const { return lin[i][j]; }
};

GenOp op_for(StaticGen g) {
  GenOp op;
  switch (g) {
    case StaticGen::Dx1: op.cst[0] = 1.0; break;
    case StaticGen::Dx2: op.cst[1] = 1.0; break;
    case StaticGen::Dx3: op.cst[2] = 1.0; break;
    case StaticGen::Om1:  // x2 d3 - x3 d2
      op.lin[1][2] = 1.0;
      op.lin[2][1] = -1.0;
      break;
    case StaticGen::Om2:  // x3 d1 - x1 d3
      op.lin[2][0] = 1.0;
      op.lin[0][2] = -1.0;
      break;
    case StaticGen::Om3:  // x1 d2 - x2 d1
      op.lin[0][1] = 1.0;
      op.lin[1][0] = -1.0;
      break;
    case StaticGen::Scale0:  // x . grad - 1
      op.lin[0][0] = 1.0;
      op.lin[1][1] = 1.0;
      op.lin[2][2] = 1.0;
      op.c0 = -1.0;
      break;
  }
  return op;
}

double apply_value(const GenOp& op, const double* x, double v, const std::array<double, 3>& g) {
  double s = op.c0 * v;
  for (int j = 0; j < 3; ++j) s += op.coef(j, x) * g[static_cast<std::size_t>(j)];
  return s;
}

}  // namespace

double eval_static_word(const StaticWord& w, const RadialBump& bump, double x1, double x2,
                        double x3) {
  if (w.size() > 2) {
    throw std::invalid_argument("eval_static_word: analytic closure supports |alpha| <= 2");
  }
  const double x[3] = {x1, x2, x3};
  const Jet2 jet = bump.jet(x1, x2, x3);
  if (w.empty()) return jet.v;
  if (w.size() == 1) return apply_value(op_for(w[0]), x, jet.v, jet.g);

  // Rightmost letter acts first: build the 1-jet of (inner rho) then apply
  // the leftmost letter to it.
  const GenOp inner = op_for(w[1]);
  const double inner_v = apply_value(inner, x, jet.v, jet.g);
  std::array<double, 3> inner_g{};
  for (int i = 0; i < 3; ++i) {
    double s = inner.c0 * jet.g[static_cast<std::size_t>(i)];
    for (int j = 0; j < 3; ++j) {
      s += inner.dcoef(i, j) * jet.g[static_cast<std::size_t>(j)] +
           inner.coef(j, x) * jet.h[static_cast<std::size_t>(3 * i + j)];
    }
    inner_g[static_cast<std::size_t>(i)] = s;
  }
  return apply_value(op_for(w[0]), x, inner_v, inner_g);
}

namespace {

double word_weighted_l2(const DensityField& rho, const Grid& g, const StaticWord& w,
                        bool weighted) {
  const int lo = g.ghost;
  const int hi = g.ghost + g.points;
  double s = 0.0;
  for (int i = lo; i < hi; ++i) {
    const double x1 = g.coord(i);
    for (int j = lo; j < hi; ++j) {
      const double x2 = g.coord(j);
      for (int k = lo; k < hi; ++k) {
        const double x3 = g.coord(k);
        const double v = eval_static_word(w, rho.profile, x1, x2, x3);
        const double wt = weighted ? 1.0 + (x1 * x1 + x2 * x2 + x3 * x3) : 1.0;
        s += wt * v * v;  // <r>^2 = 1 + r^2
      }
    }
  }
  return std::sqrt(s * g.cell_volume());
}

}  // namespace

double density_assumption_check(const DensityField& rho, const Grid& g, int k_max) {
  if (k_max < 0 || k_max > 2) {
    throw std::invalid_argument("density_assumption_check: supported word length is 0..2");
  }
  double m = 0.0;
  for (const auto& w : enumerate_static_words(k_max)) {
    m = std::max(m, word_weighted_l2(rho, g, w, /*weighted=*/true));
  }
  return m;
}

double density_lambda_norm(const DensityField& rho, const Grid& g, int k) {
  if (k < 1 || k > 3) throw std::invalid_argument("density_lambda_norm: supported k is 1..3");
  double s = 0.0;
  for (const auto& w : enumerate_static_words(k - 1)) {
    s += word_weighted_l2(rho, g, w, /*weighted=*/false);
  }
  return s;
}

}  // namespace ewlab

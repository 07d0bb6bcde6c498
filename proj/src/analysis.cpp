#include "ewlab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "ewlab/field_ops.hpp"

namespace ewlab {

VectorField3 project(Projection a, const VectorField3& u) {
  const Grid& g = u.grid();
  VectorField3 out(g);
  const int n = g.alloc_per_axis();
  const double* u1 = u.data(0);
  const double* u2 = u.data(1);
  const double* u3 = u.data(2);
  double* o1 = out.data(0);
  double* o2 = out.data(1);
  double* o3 = out.data(2);
  const double half_h = 0.5 * g.spacing;
  for (int i = 0; i < n; ++i) {
    const double x1 = g.coord(i);
    for (int j = 0; j < n; ++j) {
      const double x2 = g.coord(j);
      const std::size_t row = g.flat(i, j, 0);
      for (int k = 0; k < n; ++k) {
        const double x3 = g.coord(k);
        const std::size_t p = row + static_cast<std::size_t>(k);
        const double r = std::sqrt(x1 * x1 + x2 * x2 + x3 * x3);
        double p1 = 0.0, p2 = 0.0, p3 = 0.0;
        if (r >= half_h) {
          const double n1 = x1 / r, n2 = x2 / r, n3 = x3 / r;
          const double s = n1 * u1[p] + n2 * u2[p] + n3 * u3[p];
          p1 = n1 * s;
          p2 = n2 * s;
          p3 = n3 * s;
        }
        if (a == Projection::Radial) {
          o1[p] = p1;
          o2[p] = p2;
          o3[p] = p3;
        } else {
          o1[p] = u1[p] - p1;
          o2[p] = u2[p] - p2;
          o3[p] = u3[p] - p3;
        }
      }
    }
  }
  return out;
}

ScalarField weight_field(int a, double t, const Grid& g, const MaterialParams& mat) {
  if (a != 1 && a != 2) throw std::invalid_argument("weight_field: projection label must be 1 or 2");
  const double c = mat.speed(a);
  ScalarField out(g);
  out.fill([&](double x, double y, double z) {
    const double d = c * t - std::sqrt(x * x + y * y + z * z);
    return std::sqrt(1.0 + d * d);
  });
  return out;
}

namespace {

double safe_ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

double sq(double v) { return v * v; }

// h^3 * sum over interior of w * |u|^2 (weight not squared).
double integral_weighted_sq(const VectorField3& u, const ScalarField& w) {
  const Grid& g = u.grid();
  const int lo = g.ghost, hi = g.ghost + g.points;
  const double* a = u.data(0);
  const double* b = u.data(1);
  const double* c = u.data(2);
  const double* q = w.data();
  double s = 0.0;
  for (int i = lo; i < hi; ++i)
    for (int j = lo; j < hi; ++j) {
      const std::size_t row = g.flat(i, j, 0);
      for (int k = lo; k < hi; ++k) {
        const std::size_t p = row + static_cast<std::size_t>(k);
        s += q[p] * (a[p] * a[p] + b[p] * b[p] + c[p] * c[p]);
      }
    }
  return s * g.cell_volume();
}

// max over interior of w(x) |u(x)|, optionally skipping the origin node
// (where the projection convention applies).
double weighted_sup(const VectorField3& u, const ScalarField& w, bool exclude_origin) {
  const Grid& g = u.grid();
  const int lo = g.ghost, hi = g.ghost + g.points;
  const int center = g.center_index();
  const double* a = u.data(0);
  const double* b = u.data(1);
  const double* c = u.data(2);
  const double* q = w.data();
  double m = 0.0;
  for (int i = lo; i < hi; ++i)
    for (int j = lo; j < hi; ++j) {
      const std::size_t row = g.flat(i, j, 0);
      for (int k = lo; k < hi; ++k) {
        if (exclude_origin && i == center && j == center && k == center) continue;
        const std::size_t p = row + static_cast<std::size_t>(k);
        const double v = std::sqrt(a[p] * a[p] + b[p] * b[p] + c[p] * c[p]);
        m = std::max(m, q[p] * v);
      }
    }
  return m;
}

ScalarField divergence_from_grads(const std::array<VectorField3, 3>& grads) {
  const Grid& g = grads[0].grid();
  ScalarField out(g);
  double* o = out.data();
  const double* d1 = grads[0].data(0);
  const double* d2 = grads[1].data(1);
  const double* d3 = grads[2].data(2);
  for (std::size_t p = 0; p < out.size(); ++p) o[p] = d1[p] + d2[p] + d3[p];
  return out;
}

struct PassRequest {
  int k = 3;
  bool want_x = false;
  bool want_tilde = false;
  bool want_hat = false;
  bool want_sobolev = false;
  bool want_dt2 = false;
  const CoefTensor* b = nullptr;
  const ScalarField* rho = nullptr;
};

struct PassResult {
  std::array<double, 3> e_by_len{};
  std::array<double, 3> x_by_len{};
  std::array<double, 3> dt2_by_len{};
  std::array<double, 3> hat_by_len{};
  double tilde_corr = 0.0;
  double sup41 = 0.0, sup42 = 0.0, sup43 = 0.0, sup44 = 0.0;

  double e_up_to(int k) const {
    double s = 0.0;
    for (int l = 0; l < k && l < 3; ++l) s += e_by_len[static_cast<std::size_t>(l)];
    return s;
  }
  double x_up_to(int k) const {
    double s = 0.0;
    for (int l = 0; l + 1 < k && l < 3; ++l) s += x_by_len[static_cast<std::size_t>(l)];
    return s;
  }
};

class WordPass {
 public:
  WordPass(const TimeWindow& base, const MaterialParams& mat, const PassRequest& req)
      : base_(base), mat_(mat), req_(req) {
    const Grid& g = base.grid();
    const double t = base.t_center();
    if (req_.want_x || req_.want_dt2 || req_.want_sobolev) {
      for (int a = 1; a <= 2; ++a) cone_[static_cast<std::size_t>(a - 1)] = weight_field(a, t, g, mat);
    }
    if (req_.want_sobolev) {
      wr_half_ = ScalarField(g);
      wr_half_.fill([](double x, double y, double z) {
        return std::pow(1.0 + x * x + y * y + z * z, 0.25);
      });
      wr_ = ScalarField(g);
      wr_.fill([](double x, double y, double z) { return std::sqrt(1.0 + x * x + y * y + z * z); });
      for (int a = 0; a < 2; ++a) {
        const std::size_t ia = static_cast<std::size_t>(a);
        cone_half_[ia] = ScalarField(g);
        double* dst = cone_half_[ia].data();
        const double* src = cone_[ia].data();
        const double* wr = wr_.data();
        for (std::size_t p = 0; p < cone_half_[ia].size(); ++p) dst[p] = wr[p] * std::sqrt(src[p]);
        cone_full_[ia] = multiply(wr_, cone_[ia]);
      }
    }
    if (req_.want_tilde) {
      tfields_.assign(81, ScalarField(g));
    }
  }

  PassResult run() {
    recurse(0, base_);
    if (req_.want_tilde) finish_tilde();
    return res_;
  }

 private:
  void recurse(int depth, const TimeWindow& w) {
    process(depth, w);
    if (depth < req_.k - 1) {
      for (int g = 0; g < kGenCount; ++g) {
        recurse(depth + 1, apply_generator(static_cast<Gen>(g), w));
      }
    }
  }

  void process(int depth, const TimeWindow& w) {
    const std::size_t len = static_cast<std::size_t>(depth);
    const VectorField3& wc = w.center_level();
    const VectorField3 wt = time_derivative_center(w);
    std::array<VectorField3, 3> grads;
    for (int axis = 0; axis < 3; ++axis) {
      grads[static_cast<std::size_t>(axis)] = partial_derivative(wc, axis + 1);
    }
    const ScalarField div = divergence_from_grads(grads);

    double grad2 = 0.0;
    for (const auto& gfield : grads) grad2 += sq(l2_norm(gfield));
    res_.e_by_len[len] += 0.5 * (sq(l2_norm(wt)) + mat_.c2 * mat_.c2 * grad2 +
                                 (mat_.c1 * mat_.c1 - mat_.c2 * mat_.c2) * sq(l2_norm(div)));

    if (depth == 0) {
      base_grads_ = grads;
      base_center_ = &w.center_level();
    }

    if (req_.want_hat) {
      res_.hat_by_len[len] += integral_weighted_sq(wt, *req_.rho);
    }

    if (req_.want_tilde) {
      // T[(l,i)(m,j)] += d_l W^i d_m W^j, contracted against B at the end.
      for (int a = 0; a < 9; ++a) {
        const double* fa = grads[static_cast<std::size_t>(a / 3)].data(a % 3);
        for (int b = 0; b < 9; ++b) {
          const double* fb = grads[static_cast<std::size_t>(b / 3)].data(b % 3);
          double* t = tfields_[static_cast<std::size_t>(a * 9 + b)].data();
          const std::size_t n = tfields_[static_cast<std::size_t>(a * 9 + b)].size();
          for (std::size_t p = 0; p < n; ++p) t[p] += fa[p] * fb[p];
        }
      }
    }

    const bool second_derivs = (req_.want_x && depth <= req_.k - 2) ||
                               (req_.want_sobolev && depth <= req_.k - 4);
    std::array<VectorField3, 3> dwt;
    std::array<std::array<VectorField3, 3>, 3> d2;  // d2[l][b] = d_b d_l W
    if (second_derivs) {
      for (int l = 0; l < 3; ++l) {
        dwt[static_cast<std::size_t>(l)] = partial_derivative(wt, l + 1);
        for (int b = 0; b < 3; ++b) {
          d2[static_cast<std::size_t>(l)][static_cast<std::size_t>(b)] =
              partial_derivative(grads[static_cast<std::size_t>(l)], b + 1);
        }
      }
    }

    if (req_.want_x && depth <= req_.k - 2) {
      for (int a = 1; a <= 2; ++a) {
        const ScalarField& wgt = cone_[static_cast<std::size_t>(a - 1)];
        const Projection proj = static_cast<Projection>(a);
        for (int l = 0; l < 3; ++l) {
          res_.x_by_len[len] += weighted_l2(project(proj, dwt[static_cast<std::size_t>(l)]), wgt);
          for (int b = 0; b < 3; ++b) {
            res_.x_by_len[len] += weighted_l2(
                project(proj, d2[static_cast<std::size_t>(l)][static_cast<std::size_t>(b)]), wgt);
          }
        }
      }
    }

    if (req_.want_dt2 && depth <= req_.k - 2 && w.levels.size() >= 3) {
      const VectorField3 wtt = second_time_derivative_center(w);
      for (int a = 1; a <= 2; ++a) {
        res_.dt2_by_len[len] += weighted_l2(project(static_cast<Projection>(a), wtt),
                                            cone_[static_cast<std::size_t>(a - 1)]);
      }
    }

    if (req_.want_sobolev) {
      if (depth <= req_.k - 2) {
        res_.sup41 = std::max(res_.sup41, weighted_sup(wc, wr_half_, false));
      }
      if (depth <= req_.k - 3) {
        res_.sup42 = std::max(res_.sup42, weighted_sup(wt, wr_, false));
        for (const auto& gfield : grads) {
          res_.sup42 = std::max(res_.sup42, weighted_sup(gfield, wr_, false));
        }
        for (int a = 1; a <= 2; ++a) {
          const ScalarField& wgt = cone_half_[static_cast<std::size_t>(a - 1)];
          const Projection proj = static_cast<Projection>(a);
          res_.sup43 = std::max(res_.sup43, weighted_sup(project(proj, wt), wgt, true));
          for (const auto& gfield : grads) {
            res_.sup43 = std::max(res_.sup43, weighted_sup(project(proj, gfield), wgt, true));
          }
        }
      }
      if (depth <= req_.k - 4) {
        for (int a = 1; a <= 2; ++a) {
          const ScalarField& wgt = cone_full_[static_cast<std::size_t>(a - 1)];
          const Projection proj = static_cast<Projection>(a);
          for (int l = 0; l < 3; ++l) {
            res_.sup44 =
                std::max(res_.sup44, weighted_sup(project(proj, dwt[static_cast<std::size_t>(l)]), wgt, true));
            for (int b = 0; b < 3; ++b) {
              res_.sup44 = std::max(
                  res_.sup44,
                  weighted_sup(project(proj, d2[static_cast<std::size_t>(l)][static_cast<std::size_t>(b)]),
                               wgt, true));
            }
          }
        }
      }
    }
  }

  void finish_tilde() {
    const Grid& g = base_.grid();
    const int lo = g.ghost, hi = g.ghost + g.points;
    const double* bb = req_.b->data();
    const double* gu[3][3];  // gu[n][k] = d_n u^k of the base state
    for (int n = 0; n < 3; ++n)
      for (int c = 0; c < 3; ++c) gu[n][c] = base_grads_[static_cast<std::size_t>(n)].data(c);
    const double* tf[81];
    for (int q = 0; q < 81; ++q) tf[q] = tfields_[static_cast<std::size_t>(q)].data();
    double acc = 0.0;
    for (int i = lo; i < hi; ++i)
      for (int j = lo; j < hi; ++j) {
        const std::size_t row = g.flat(i, j, 0);
        for (int k = lo; k < hi; ++k) {
          const std::size_t p = row + static_cast<std::size_t>(k);
          double local = 0.0;
          std::size_t f = 0;
          for (int ci = 0; ci < 3; ++ci)
            for (int cj = 0; cj < 3; ++cj)
              for (int ck = 0; ck < 3; ++ck)
                for (int l = 0; l < 3; ++l)
                  for (int m = 0; m < 3; ++m)
                    for (int n = 0; n < 3; ++n, ++f) {
                      local += bb[f] * tf[(l * 3 + ci) * 9 + (m * 3 + cj)][p] * gu[n][ck][p];
                    }
          acc += local;
        }
      }
    res_.tilde_corr = acc * g.cell_volume();
  }

  const TimeWindow& base_;
  const MaterialParams& mat_;
  PassRequest req_;
  PassResult res_;
  std::array<ScalarField, 2> cone_;
  std::array<ScalarField, 2> cone_half_;
  std::array<ScalarField, 2> cone_full_;
  ScalarField wr_, wr_half_;
  std::vector<ScalarField> tfields_;
  std::array<VectorField3, 3> base_grads_;
  const VectorField3* base_center_ = nullptr;
};

int window_half_width(const TimeWindow& w) { return w.center(); }

void require_family(int k, const TimeWindow& w, int min_half_width, const char* what) {
  if (k < 1 || k > kMaxWordLen + 1) {
    throw std::invalid_argument(std::string(what) + ": unsupported k");
  }
  if (window_half_width(w) < min_half_width) {
    throw std::invalid_argument(std::string(what) + ": window too short for requested k");
  }
}

}  // namespace

double energy_E(int k, const TimeWindow& w, const MaterialParams& mat) {
  require_family(k, w, k, "energy_E");
  PassRequest req;
  req.k = k;
  return WordPass(w, mat, req).run().e_up_to(k);
}

double energy_X(int k, const TimeWindow& w, const MaterialParams& mat) {
  if (k < 2) throw std::invalid_argument("energy_X: k must be >= 2");
  require_family(k, w, k - 1, "energy_X");
  PassRequest req;
  req.k = k;
  req.want_x = true;
  return WordPass(w, mat, req).run().x_up_to(k);
}

double energy_E_tilde(int k, const TimeWindow& w, const CoefTensor& b, const MaterialParams& mat) {
  require_family(k, w, k, "energy_E_tilde");
  PassRequest req;
  req.k = k;
  req.want_tilde = !b.is_zero();
  req.b = &b;
  const PassResult res = WordPass(w, mat, req).run();
  return res.e_up_to(k) + res.tilde_corr;
}

double energy_E_hat(int k, const TimeWindow& w, const CoefTensor& b, const ScalarField& rho_tilde,
                    const MaterialParams& mat) {
  require_family(k, w, k, "energy_E_hat");
  PassRequest req;
  req.k = k;
  req.want_tilde = !b.is_zero();
  req.b = &b;
  req.want_hat = true;
  req.rho = &rho_tilde;
  const PassResult res = WordPass(w, mat, req).run();
  double hat = 0.0;
  for (int l = 0; l < k; ++l) hat += res.hat_by_len[static_cast<std::size_t>(l)];
  return res.e_up_to(k) + res.tilde_corr + hat;
}

SobolevRatios sobolev_ratio_report(int k, const TimeWindow& w, const MaterialParams& mat) {
  if (k < 2) throw std::invalid_argument("sobolev_ratio_report: k too small to admit any word");
  require_family(k, w, k, "sobolev_ratio_report");
  PassRequest req;
  req.k = k;
  req.want_x = true;
  req.want_sobolev = true;
  const PassResult res = WordPass(w, mat, req).run();
  const double ek_half = std::sqrt(res.e_up_to(k));
  const double xk = res.x_up_to(k);
  SobolevRatios r;
  r.r41 = safe_ratio(res.sup41, ek_half);
  r.r42 = safe_ratio(res.sup42, ek_half);
  r.r43 = safe_ratio(res.sup43, ek_half + xk);
  r.r44 = safe_ratio(res.sup44, xk);
  return r;
}

double lemma_x2_ratio(const TimeWindow& w, const MaterialParams& mat) {
  require_family(2, w, 2, "lemma_x2_ratio");
  PassRequest req;
  req.k = 2;
  req.want_x = true;
  const PassResult res = WordPass(w, mat, req).run();
  VectorField3 lu = second_time_derivative_center(w);
  axpy(-1.0, elastic_operator(w.center_level(), mat.c1, mat.c2), lu);
  const double den = std::sqrt(res.e_up_to(2)) + w.t_center() * l2_norm(lu);
  return safe_ratio(res.x_up_to(2), den);
}

double lemma_dt2_ratio(int k, const TimeWindow& w, const MaterialParams& mat) {
  require_family(k, w, k, "lemma_dt2_ratio");
  PassRequest req;
  req.k = k;
  req.want_dt2 = true;
  const PassResult res = WordPass(w, mat, req).run();
  double lhs = 0.0;
  for (int l = 0; l + 1 < k; ++l) lhs += res.dt2_by_len[static_cast<std::size_t>(l)];
  return safe_ratio(lhs, std::sqrt(res.e_up_to(k)));
}

double growth_exponent_fit(const std::vector<std::pair<double, double>>& series) {
  if (series.size() < 8) throw std::invalid_argument("growth_exponent_fit: need at least 8 samples");
  const double t_mid = 0.5 * (series.front().first + series.back().first);
  std::vector<std::pair<double, double>> pts;
  for (const auto& [t, e] : series) {
    if (t >= t_mid) pts.emplace_back(t, e);
  }
  if (pts.size() < 2) pts.assign(series.end() - 2, series.end());
  for (const auto& [t, e] : pts) {
    if (!(e > 0.0)) return 0.0;  // nothing growing
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(pts.size());
  for (const auto& [t, e] : pts) {
    const double x = 0.5 * std::log1p(t * t);  // log <t>
    const double y = std::log(e);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double var = sxx - sx * sx / n;
  if (var <= 0.0) return 0.0;
  return (sxy - sx * sy / n) / var;
}

double boundedness_ratio(const std::vector<double>& series) {
  if (series.empty()) return 1.0;
  const double base = series.front();
  double mx = 0.0;
  for (double v : series) mx = std::max(mx, v);
  if (base <= 0.0) {
    return mx <= 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  }
  return mx / base;
}

std::string EnergyReport::csv_header() {
  return "t,E1,E2,E3,X2,X3,Etilde3,Ehat3,ratio_41,ratio_42,ratio_43,ratio_44,x2_deficit,"
         "dt2_deficit";
}

std::string EnergyReport::csv_row() const {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                "%.17g",
                t, e1, e2, e3, x2, x3, etilde3, ehat3, r41, r42, r43, r44, x2_deficit, dt2_deficit);
  return std::string(buf);
}

EnergyReport analyze_window(const TimeWindow& w, const CoefTensor& b, const ScalarField& rho_tilde,
                            const MaterialParams& mat, int k_report) {
  EnergyReport rep;
  rep.t = w.t_center();
  const int m = w.center();
  const int k_active = std::min({kMaxWordLen + 1, k_report, m});
  if (k_active < 1) return rep;

  PassRequest req;
  req.k = k_active;
  req.want_x = k_active >= 2;
  req.want_tilde = k_active >= 3 && !b.is_zero();
  req.b = &b;
  req.want_hat = k_active >= 3;
  req.rho = &rho_tilde;
  req.want_sobolev = k_active >= 2;
  req.want_dt2 = k_active >= 2;
  const PassResult res = WordPass(w, mat, req).run();

  rep.e1 = res.e_up_to(1);
  if (k_active >= 2) {
    rep.e2 = res.e_up_to(2);
    rep.x2 = res.x_up_to(2);
  }
  if (k_active >= 3) {
    rep.e3 = res.e_up_to(3);
    rep.x3 = res.x_up_to(3);
    rep.etilde3 = rep.e3 + res.tilde_corr;
    double hat = 0.0;
    for (int l = 0; l < 3; ++l) hat += res.hat_by_len[static_cast<std::size_t>(l)];
    rep.ehat3 = rep.etilde3 + hat;
  }

  if (k_active >= 2) {
    const double ek_half = std::sqrt(res.e_up_to(k_active));
    const double xk = res.x_up_to(k_active);
    rep.r41 = safe_ratio(res.sup41, ek_half);
    rep.r42 = safe_ratio(res.sup42, ek_half);
    rep.r43 = safe_ratio(res.sup43, ek_half + xk);
    rep.r44 = safe_ratio(res.sup44, xk);

    VectorField3 lu = second_time_derivative_center(w);
    axpy(-1.0, elastic_operator(w.center_level(), mat.c1, mat.c2), lu);
    const double den = std::sqrt(res.e_up_to(2)) + w.t_center() * l2_norm(lu);
    rep.x2_deficit = safe_ratio(res.x_up_to(2), den);

    double dt2_lhs = 0.0;
    for (int l = 0; l + 1 < k_active; ++l) dt2_lhs += res.dt2_by_len[static_cast<std::size_t>(l)];
    rep.dt2_deficit = safe_ratio(dt2_lhs, ek_half);
  }
  return rep;
}

}  // namespace ewlab

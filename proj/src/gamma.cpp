#include "ewlab/gamma.hpp"

#include <cmath>
#include <stdexcept>

#include "ewlab/field_ops.hpp"

namespace ewlab {

namespace {

// The fixed antisymmetric component-mixing matrices paired with the angular
// momentum operators: rotation of the target components.
constexpr double kMix[3][3][3] = {
    {{0, 0, 0}, {0, 0, 1}, {0, -1, 0}},
    {{0, 0, -1}, {0, 0, 0}, {1, 0, 0}},
    {{0, 1, 0}, {-1, 0, 0}, {0, 0, 0}},
};

// Angular momentum Omega_l = (x ^ grad)_l as the two axes it differentiates:
// Omega_l f = x[a] d_b f - x[b] d_a f.
constexpr int kOmegaAxisA[3] = {1, 2, 0};
constexpr int kOmegaAxisB[3] = {2, 0, 1};

void check_rotation_index(int l) {
  if (l < 1 || l > 3) throw std::invalid_argument("rotation generator index must be 1..3");
}

// out += coef(x[axis_coord]) * d_axis f for one component array.
void add_coord_times_derivative(const Grid& g, const double* f, double* out, int deriv_axis,
                                int coord_axis, double sign) {
  const int a = g.alloc_per_axis();
  const double inv2h = sign / (2.0 * g.spacing);
  const std::ptrdiff_t strides[3] = {static_cast<std::ptrdiff_t>(a) * a, a, 1};
  const std::ptrdiff_t s = strides[deriv_axis];
  const int ilo = (deriv_axis == 0) ? 1 : 0, ihi = (deriv_axis == 0) ? a - 1 : a;
  const int jlo = (deriv_axis == 1) ? 1 : 0, jhi = (deriv_axis == 1) ? a - 1 : a;
  const int klo = (deriv_axis == 2) ? 1 : 0, khi = (deriv_axis == 2) ? a - 1 : a;
  for (int i = ilo; i < ihi; ++i) {
    for (int j = jlo; j < jhi; ++j) {
      const std::size_t row = g.flat(i, j, 0);
      const double cij = (coord_axis == 0) ? g.coord(i) : (coord_axis == 1) ? g.coord(j) : 0.0;
      for (int k = klo; k < khi; ++k) {
        const std::size_t p = row + static_cast<std::size_t>(k);
        const double c = (coord_axis == 2) ? g.coord(k) : cij;
        out[p] += c * (f[p + s] - f[p - s]) * inv2h;
      }
    }
  }
}

}  // namespace

std::vector<GenWord> enumerate_words(int k, int max_len) {
  if (k < 1) throw std::invalid_argument("enumerate_words: k must be >= 1");
  if (k - 1 > max_len) throw std::invalid_argument("enumerate_words: word length above supported cap");
  std::vector<GenWord> words;
  words.push_back({});
  std::vector<GenWord> prev = words;
  for (int len = 1; len <= k - 1; ++len) {
    std::vector<GenWord> cur;
    for (int g = 0; g < kGenCount; ++g) {
      for (const auto& tail : prev) {
        GenWord w;
        w.reserve(static_cast<std::size_t>(len));
        w.push_back(static_cast<Gen>(g));
        for (auto t : tail) w.push_back(t);
        cur.push_back(std::move(w));
      }
    }
    for (auto& w : cur) words.push_back(w);
    prev = std::move(cur);
  }
  return words;
}

int temporal_order(const GenWord& w) {
  int n = 0;
  for (Gen g : w) {
    if (g == Gen::Dt || g == Gen::Scale) ++n;
  }
  return n;
}

TimeWindow TimeWindow::sample(
    const Grid& g, double t_center, double dt, int m,
    const std::function<std::array<double, 3>(double, double, double, double)>& u) {
  if (m < 0 || !(dt > 0.0)) throw std::invalid_argument("TimeWindow::sample: bad window spec");
  TimeWindow w;
  w.dt = dt;
  w.t_front = t_center - dt * static_cast<double>(m);
  w.levels.reserve(static_cast<std::size_t>(2 * m + 1));
  for (int i = 0; i <= 2 * m; ++i) {
    const double t = w.time_at(i);
    VectorField3 lev(g);
    lev.fill([&](double x1, double x2, double x3) { return u(t, x1, x2, x3); });
    w.levels.push_back(std::move(lev));
  }
  return w;
}

VectorField3 rotation_generator(int l, const VectorField3& u) {
  check_rotation_index(l);
  const Grid& g = u.grid();
  VectorField3 out(g);
  const int aa = kOmegaAxisA[l - 1];
  const int bb = kOmegaAxisB[l - 1];
  for (int c = 0; c < 3; ++c) {
    add_coord_times_derivative(g, u.data(c), out.data(c), bb, aa, 1.0);
    add_coord_times_derivative(g, u.data(c), out.data(c), aa, bb, -1.0);
  }
  // Component mixing.
  for (int c = 0; c < 3; ++c) {
    double* o = out.data(c);
    for (int q = 0; q < 3; ++q) {
      const double m = kMix[l - 1][c][q];
      if (m == 0.0) continue;
      const double* src = u.data(q);
      for (std::size_t p = 0; p < u.size_per_comp(); ++p) o[p] += m * src[p];
    }
  }
  ensure_finite(out, "rotation_generator");
  return out;
}

VectorField3 radial_scaling_minus_identity(const VectorField3& u) {
  const Grid& g = u.grid();
  VectorField3 out(g);
  for (int c = 0; c < 3; ++c) {
    for (int axis = 0; axis < 3; ++axis) {
      add_coord_times_derivative(g, u.data(c), out.data(c), axis, axis, 1.0);
    }
    double* o = out.data(c);
    const double* src = u.data(c);
    for (std::size_t p = 0; p < u.size_per_comp(); ++p) o[p] -= src[p];
  }
  ensure_finite(out, "radial_scaling_minus_identity");
  return out;
}

ScalarField rotation_generator_scalar(int l, const ScalarField& f) {
  check_rotation_index(l);
  const Grid& g = f.grid();
  ScalarField out(g);
  add_coord_times_derivative(g, f.data(), out.data(), kOmegaAxisB[l - 1], kOmegaAxisA[l - 1], 1.0);
  add_coord_times_derivative(g, f.data(), out.data(), kOmegaAxisA[l - 1], kOmegaAxisB[l - 1], -1.0);
  ensure_finite(out, "rotation_generator_scalar");
  return out;
}

ScalarField radial_scaling_minus_identity_scalar(const ScalarField& f) {
  const Grid& g = f.grid();
  ScalarField out(g);
  for (int axis = 0; axis < 3; ++axis) {
    add_coord_times_derivative(g, f.data(), out.data(), axis, axis, 1.0);
  }
  double* o = out.data();
  const double* src = f.data();
  for (std::size_t p = 0; p < f.size(); ++p) o[p] -= src[p];
  ensure_finite(out, "radial_scaling_minus_identity_scalar");
  return out;
}

namespace {

void require_levels(const TimeWindow& w, const char* what) {
  if (w.levels.size() < 3) {
    throw std::invalid_argument(std::string(what) + ": window too short for temporal stencil");
  }
}

}  // namespace

TimeWindow time_derivative(const TimeWindow& w) {
  require_levels(w, "time_derivative");
  TimeWindow out;
  out.dt = w.dt;
  out.t_front = w.t_front + w.dt;
  const double inv2dt = 1.0 / (2.0 * w.dt);
  for (std::size_t i = 1; i + 1 < w.levels.size(); ++i) {
    VectorField3 lev = subtract(w.levels[i + 1], w.levels[i - 1]);
    scale(inv2dt, lev);
    out.levels.push_back(std::move(lev));
  }
  return out;
}

TimeWindow second_time_derivative(const TimeWindow& w) {
  require_levels(w, "second_time_derivative");
  TimeWindow out;
  out.dt = w.dt;
  out.t_front = w.t_front + w.dt;
  const double invdt2 = 1.0 / (w.dt * w.dt);
  for (std::size_t i = 1; i + 1 < w.levels.size(); ++i) {
    VectorField3 lev = w.levels[i + 1];
    axpy(-2.0, w.levels[i], lev);
    axpy(1.0, w.levels[i - 1], lev);
    scale(invdt2, lev);
    out.levels.push_back(std::move(lev));
  }
  return out;
}

VectorField3 time_derivative_center(const TimeWindow& w) {
  require_levels(w, "time_derivative_center");
  const std::size_t c = static_cast<std::size_t>(w.center());
  VectorField3 out = subtract(w.levels[c + 1], w.levels[c - 1]);
  scale(1.0 / (2.0 * w.dt), out);
  return out;
}

VectorField3 second_time_derivative_center(const TimeWindow& w) {
  require_levels(w, "second_time_derivative_center");
  const std::size_t c = static_cast<std::size_t>(w.center());
  VectorField3 out = w.levels[c + 1];
  axpy(-2.0, w.levels[c], out);
  axpy(1.0, w.levels[c - 1], out);
  scale(1.0 / (w.dt * w.dt), out);
  return out;
}

TimeWindow apply_generator(Gen g, const TimeWindow& w) {
  switch (g) {
    case Gen::Dt:
      return time_derivative(w);
    case Gen::Dx1:
    case Gen::Dx2:
    case Gen::Dx3: {
      TimeWindow out;
      out.dt = w.dt;
      out.t_front = w.t_front;
      const int axis = static_cast<int>(g) - static_cast<int>(Gen::Dx1) + 1;
      for (const auto& lev : w.levels) out.levels.push_back(partial_derivative(lev, axis));
      return out;
    }
    case Gen::Om1:
    case Gen::Om2:
    case Gen::Om3: {
      TimeWindow out;
      out.dt = w.dt;
      out.t_front = w.t_front;
      const int l = static_cast<int>(g) - static_cast<int>(Gen::Om1) + 1;
      for (const auto& lev : w.levels) out.levels.push_back(rotation_generator(l, lev));
      return out;
    }
    case Gen::Scale: {
      require_levels(w, "scaling generator");
      TimeWindow out;
      out.dt = w.dt;
      out.t_front = w.t_front + w.dt;
      const double inv2dt = 1.0 / (2.0 * w.dt);
      for (std::size_t i = 1; i + 1 < w.levels.size(); ++i) {
        const double t = w.time_at(static_cast<int>(i));
        VectorField3 lev = subtract(w.levels[i + 1], w.levels[i - 1]);
        scale(t * inv2dt, lev);
        axpy(1.0, radial_scaling_minus_identity(w.levels[i]), lev);
        out.levels.push_back(std::move(lev));
      }
      return out;
    }
  }
  throw std::logic_error("apply_generator: unknown generator");
}

TimeWindow apply_word(const GenWord& w, const TimeWindow& base) {
  TimeWindow cur = base;
  for (std::size_t p = w.size(); p-- > 0;) cur = apply_generator(w[p], cur);
  return cur;
}

VectorField3 apply_static_gen(StaticGen g, const VectorField3& u) {
  switch (g) {
    case StaticGen::Dx1: return partial_derivative(u, 1);
    case StaticGen::Dx2: return partial_derivative(u, 2);
    case StaticGen::Dx3: return partial_derivative(u, 3);
    case StaticGen::Om1: return rotation_generator(1, u);
    case StaticGen::Om2: return rotation_generator(2, u);
    case StaticGen::Om3: return rotation_generator(3, u);
    case StaticGen::Scale0: return radial_scaling_minus_identity(u);
  }
  throw std::logic_error("apply_static_gen: unknown generator");
}

VectorField3 apply_static_word(const StaticWord& w, const VectorField3& u) {
  if (w.empty()) return u;
  VectorField3 cur = apply_static_gen(w.back(), u);
  for (std::size_t p = w.size() - 1; p-- > 0;) cur = apply_static_gen(w[p], cur);
  return cur;
}

ScalarField apply_static_word_scalar(const StaticWord& w, const ScalarField& f) {
  ScalarField cur = f;
  for (std::size_t p = w.size(); p-- > 0;) {
    switch (w[p]) {
      case StaticGen::Dx1: cur = partial_derivative(cur, 1); break;
      case StaticGen::Dx2: cur = partial_derivative(cur, 2); break;
      case StaticGen::Dx3: cur = partial_derivative(cur, 3); break;
      case StaticGen::Om1: cur = rotation_generator_scalar(1, cur); break;
      case StaticGen::Om2: cur = rotation_generator_scalar(2, cur); break;
      case StaticGen::Om3: cur = rotation_generator_scalar(3, cur); break;
      case StaticGen::Scale0: cur = radial_scaling_minus_identity_scalar(cur); break;
    }
  }
  return cur;
}

double initial_data_norm(const VectorField3& f, const VectorField3& g, int k) {
  if (k < 1 || k - 1 > kMaxWordLen) {
    throw std::invalid_argument("initial_data_norm: k outside supported word length");
  }
  if (!f.grid().same_layout(g.grid())) throw std::invalid_argument("initial_data_norm: grid mismatch");
  double s = 0.0;
  for (const auto& w : enumerate_static_words(k - 1)) {
    const VectorField3 wf = apply_static_word(w, f);
    s += l2_norm(wf);
    double grad2 = 0.0;
    for (int axis = 1; axis <= 3; ++axis) {
      const double n = l2_norm(partial_derivative(wf, axis));
      grad2 += n * n;
    }
    s += std::sqrt(grad2);
    s += l2_norm(apply_static_word(w, g));
  }
  return s;
}

}  // namespace ewlab

#include "ewlab/field_ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ewlab {

namespace {

void check_axis(int axis) {
  if (axis < 1 || axis > 3) throw std::invalid_argument("derivative axis must be 1, 2 or 3");
}

std::ptrdiff_t axis_stride(const Grid& g, int axis) {
  const std::ptrdiff_t a = g.alloc_per_axis();
  switch (axis) {
    case 1: return a * a;
    case 2: return a;
    default: return 1;
  }
}

// Writes (f[p+s] - f[p-s]) / (2h) into out wherever the stencil fits.
void centered_diff(const double* f, double* out, const Grid& g, int axis) {
  const int a = g.alloc_per_axis();
  const std::ptrdiff_t s = axis_stride(g, axis);
  const double inv2h = 1.0 / (2.0 * g.spacing);
  const int ilo = (axis == 1) ? 1 : 0, ihi = (axis == 1) ? a - 1 : a;
  const int jlo = (axis == 2) ? 1 : 0, jhi = (axis == 2) ? a - 1 : a;
  const int klo = (axis == 3) ? 1 : 0, khi = (axis == 3) ? a - 1 : a;
  for (int i = ilo; i < ihi; ++i) {
    for (int j = jlo; j < jhi; ++j) {
      const std::size_t row = g.flat(i, j, 0);
      for (int k = klo; k < khi; ++k) {
        const std::size_t p = row + static_cast<std::size_t>(k);
        out[p] = (f[p + s] - f[p - s]) * inv2h;
      }
    }
  }
}

}  // namespace

ScalarField partial_derivative(const ScalarField& f, int axis) {
  check_axis(axis);
  ScalarField out(f.grid());
  centered_diff(f.data(), out.data(), f.grid(), axis);
  ensure_finite(out, "partial_derivative");
  return out;
}

VectorField3 partial_derivative(const VectorField3& u, int axis) {
  check_axis(axis);
  VectorField3 out(u.grid());
  for (int c = 0; c < 3; ++c) centered_diff(u.data(c), out.data(c), u.grid(), axis);
  ensure_finite(out, "partial_derivative");
  return out;
}

ScalarField divergence(const VectorField3& u) {
  const Grid& g = u.grid();
  ScalarField out(g);
  const int a = g.alloc_per_axis();
  const double inv2h = 1.0 / (2.0 * g.spacing);
  const std::ptrdiff_t s1 = axis_stride(g, 1), s2 = axis_stride(g, 2);
  const double* u1 = u.data(0);
  const double* u2 = u.data(1);
  const double* u3 = u.data(2);
  double* o = out.data();
  // Each term is shaved along its own axis only, so the sum is valid on
  // the full [1, a-2]^3 block and beyond where individual terms fit.
  for (int i = 1; i < a - 1; ++i) {
    for (int j = 1; j < a - 1; ++j) {
      const std::size_t row = g.flat(i, j, 0);
      for (int k = 1; k < a - 1; ++k) {
        const std::size_t p = row + static_cast<std::size_t>(k);
        o[p] = ((u1[p + s1] - u1[p - s1]) + (u2[p + s2] - u2[p - s2]) +
                (u3[p + 1] - u3[p - 1])) *
               inv2h;
      }
    }
  }
  ensure_finite(out, "divergence");
  return out;
}

VectorField3 gradient(const ScalarField& f) {
  VectorField3 out(f.grid());
  for (int axis = 1; axis <= 3; ++axis) {
    centered_diff(f.data(), out.data(axis - 1), f.grid(), axis);
  }
  ensure_finite(out, "gradient");
  return out;
}

VectorField3 vector_laplacian(const VectorField3& u) {
  const Grid& g = u.grid();
  VectorField3 out(g);
  const int a = g.alloc_per_axis();
  const double invh2 = 1.0 / (g.spacing * g.spacing);
  const std::ptrdiff_t s1 = axis_stride(g, 1), s2 = axis_stride(g, 2);
  for (int c = 0; c < 3; ++c) {
    const double* f = u.data(c);
    double* o = out.data(c);
    for (int i = 1; i < a - 1; ++i) {
      for (int j = 1; j < a - 1; ++j) {
        const std::size_t row = g.flat(i, j, 0);
        for (int k = 1; k < a - 1; ++k) {
          const std::size_t p = row + static_cast<std::size_t>(k);
          o[p] = (f[p + s1] + f[p - s1] + f[p + s2] + f[p - s2] + f[p + 1] + f[p - 1] -
                  6.0 * f[p]) *
                 invh2;
        }
      }
    }
  }
  ensure_finite(out, "vector_laplacian");
  return out;
}

VectorField3 elastic_operator(const VectorField3& u, double c1, double c2) {
  if (!(c1 > 0.0) || !(c2 > 0.0) || !(c1 * c1 > (4.0 / 3.0) * c2 * c2)) {
    throw std::invalid_argument("elastic_operator: requires c1 > 0, c2 > 0, c1^2 > (4/3) c2^2");
  }
  VectorField3 out = vector_laplacian(u);
  scale(c2 * c2, out);
  const VectorField3 gd = gradient(divergence(u));
  axpy(c1 * c1 - c2 * c2, gd, out);
  return out;
}

namespace {

template <class Accum>
void interior_reduce(const Grid& g, Accum&& acc) {
  const int lo = g.ghost;
  const int hi = g.ghost + g.points;
  for (int i = lo; i < hi; ++i) {
    for (int j = lo; j < hi; ++j) {
      const std::size_t row = g.flat(i, j, 0);
      for (int k = lo; k < hi; ++k) acc(row + static_cast<std::size_t>(k));
    }
  }
}

}  // namespace

double l2_norm(const ScalarField& f) {
  double s = 0.0;
  const double* p = f.data();
  interior_reduce(f.grid(), [&](std::size_t q) { s += p[q] * p[q]; });
  return std::sqrt(s * f.grid().cell_volume());
}

double l2_norm(const VectorField3& u) {
  double s = 0.0;
  const double* a = u.data(0);
  const double* b = u.data(1);
  const double* c = u.data(2);
  interior_reduce(u.grid(), [&](std::size_t q) { s += a[q] * a[q] + b[q] * b[q] + c[q] * c[q]; });
  return std::sqrt(s * u.grid().cell_volume());
}

double sup_norm(const ScalarField& f) {
  double m = 0.0;
  const double* p = f.data();
  interior_reduce(f.grid(), [&](std::size_t q) { m = std::max(m, std::abs(p[q])); });
  return m;
}

double sup_norm(const VectorField3& u) {
  double m2 = 0.0;
  const double* a = u.data(0);
  const double* b = u.data(1);
  const double* c = u.data(2);
  interior_reduce(u.grid(), [&](std::size_t q) {
    m2 = std::max(m2, a[q] * a[q] + b[q] * b[q] + c[q] * c[q]);
  });
  return std::sqrt(m2);
}

double weighted_l2(const ScalarField& f, const ScalarField& w) {
  if (!f.grid().same_layout(w.grid())) throw std::invalid_argument("weighted_l2: grid mismatch");
  double s = 0.0;
  const double* p = f.data();
  const double* q = w.data();
  interior_reduce(f.grid(), [&](std::size_t i) {
    const double t = p[i] * q[i];
    s += t * t;
  });
  return std::sqrt(s * f.grid().cell_volume());
}

double weighted_l2(const VectorField3& u, const ScalarField& w) {
  if (!u.grid().same_layout(w.grid())) throw std::invalid_argument("weighted_l2: grid mismatch");
  double s = 0.0;
  const double* a = u.data(0);
  const double* b = u.data(1);
  const double* c = u.data(2);
  const double* q = w.data();
  interior_reduce(u.grid(), [&](std::size_t i) {
    s += q[i] * q[i] * (a[i] * a[i] + b[i] * b[i] + c[i] * c[i]);
  });
  return std::sqrt(s * u.grid().cell_volume());
}

double integrate(const ScalarField& f) {
  double s = 0.0;
  const double* p = f.data();
  interior_reduce(f.grid(), [&](std::size_t q) { s += p[q]; });
  return s * f.grid().cell_volume();
}

void axpy(double a, const ScalarField& x, ScalarField& y) {
  if (!x.grid().same_layout(y.grid())) throw std::invalid_argument("axpy: grid mismatch");
  const double* px = x.data();
  double* py = y.data();
  for (std::size_t i = 0; i < x.size(); ++i) py[i] += a * px[i];
}

void axpy(double a, const VectorField3& x, VectorField3& y) {
  if (!x.grid().same_layout(y.grid())) throw std::invalid_argument("axpy: grid mismatch");
  for (int c = 0; c < 3; ++c) {
    const double* px = x.data(c);
    double* py = y.data(c);
    for (std::size_t i = 0; i < x.size_per_comp(); ++i) py[i] += a * px[i];
  }
}

void scale(double a, ScalarField& x) {
  double* p = x.data();
  for (std::size_t i = 0; i < x.size(); ++i) p[i] *= a;
}

void scale(double a, VectorField3& x) {
  for (int c = 0; c < 3; ++c) {
    double* p = x.data(c);
    for (std::size_t i = 0; i < x.size_per_comp(); ++i) p[i] *= a;
  }
}

ScalarField subtract(const ScalarField& a, const ScalarField& b) {
  ScalarField out = a;
  axpy(-1.0, b, out);
  return out;
}

VectorField3 subtract(const VectorField3& a, const VectorField3& b) {
  VectorField3 out = a;
  axpy(-1.0, b, out);
  return out;
}

VectorField3 add(const VectorField3& a, const VectorField3& b) {
  VectorField3 out = a;
  axpy(1.0, b, out);
  return out;
}

VectorField3 scaled(const VectorField3& a, double s) {
  VectorField3 out = a;
  scale(s, out);
  return out;
}

VectorField3 multiply(const ScalarField& s, const VectorField3& u) {
  if (!s.grid().same_layout(u.grid())) throw std::invalid_argument("multiply: grid mismatch");
  VectorField3 out(u.grid());
  const double* w = s.data();
  for (int c = 0; c < 3; ++c) {
    const double* p = u.data(c);
    double* o = out.data(c);
    for (std::size_t i = 0; i < u.size_per_comp(); ++i) o[i] = w[i] * p[i];
  }
  return out;
}

ScalarField multiply(const ScalarField& a, const ScalarField& b) {
  if (!a.grid().same_layout(b.grid())) throw std::invalid_argument("multiply: grid mismatch");
  ScalarField out(a.grid());
  const double* pa = a.data();
  const double* pb = b.data();
  double* o = out.data();
  for (std::size_t i = 0; i < a.size(); ++i) o[i] = pa[i] * pb[i];
  return out;
}

ScalarField radius_field(const Grid& g) {
  ScalarField out(g);
  out.fill([](double x, double y, double z) { return std::sqrt(x * x + y * y + z * z); });
  return out;
}

}  // namespace ewlab

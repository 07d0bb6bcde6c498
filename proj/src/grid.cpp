#include "ewlab/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace ewlab {

Grid Grid::make(double half_width, int points, int ghost) {
  if (!(half_width > 0.0)) throw std::invalid_argument("grid: half_width must be positive");
  if (points < 3) throw std::invalid_argument("grid: need at least 3 points per axis");
  if (points % 2 == 0) throw std::invalid_argument("grid: points per axis must be odd");
  if (ghost < 2) throw std::invalid_argument("grid: need at least 2 ghost layers");
  Grid g;
  g.half_width = half_width;
  g.points = points;
  g.ghost = ghost;
  g.spacing = 2.0 * half_width / static_cast<double>(points - 1);
  return g;
}

void ScalarField::fill(const std::function<double(double, double, double)>& f) {
  const int a = grid_.alloc_per_axis();
  std::size_t p = 0;
  for (int i = 0; i < a; ++i) {
    const double x1 = grid_.coord(i);
    for (int j = 0; j < a; ++j) {
      const double x2 = grid_.coord(j);
      for (int k = 0; k < a; ++k, ++p) {
        v_[p] = f(x1, x2, grid_.coord(k));
      }
    }
  }
  ensure_finite(*this, "ScalarField::fill");
}

void ScalarField::set_zero() { v_.assign(v_.size(), 0.0); }

void VectorField3::fill(const std::function<std::array<double, 3>(double, double, double)>& f) {
  const int a = grid_.alloc_per_axis();
  std::size_t p = 0;
  for (int i = 0; i < a; ++i) {
    const double x1 = grid_.coord(i);
    for (int j = 0; j < a; ++j) {
      const double x2 = grid_.coord(j);
      for (int k = 0; k < a; ++k, ++p) {
        const std::array<double, 3> val = f(x1, x2, grid_.coord(k));
        v_[0][p] = val[0];
        v_[1][p] = val[1];
        v_[2][p] = val[2];
      }
    }
  }
  ensure_finite(*this, "VectorField3::fill");
}

void VectorField3::set_zero() {
  for (auto& c : v_) c.assign(c.size(), 0.0);
}

namespace {
bool span_finite(const double* p, std::size_t n) {
  for (std::size_t q = 0; q < n; ++q) {
    if (!std::isfinite(p[q])) return false;
  }
  return true;
}
}  // namespace

void ensure_finite(const ScalarField& f, const char* what) {
  if (!span_finite(f.data(), f.size())) {
    throw std::runtime_error(std::string("non-finite value detected in ") + what);
  }
}

void ensure_finite(const VectorField3& f, const char* what) {
  if (!all_finite(f)) {
    throw std::runtime_error(std::string("non-finite value detected in ") + what);
  }
}

bool all_finite(const VectorField3& f) {
  for (int c = 0; c < 3; ++c) {
    if (!span_finite(f.data(c), f.size_per_comp())) return false;
  }
  return true;
}

}  // namespace ewlab

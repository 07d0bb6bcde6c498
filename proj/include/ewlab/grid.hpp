#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

namespace ewlab {

/// Uniform Cartesian grid over the cube [-L, L]^3.
///
/// The per-axis node count is odd so the origin is exactly a grid node.
/// `ghost` extra layers surround the interior on every side; stencils of
/// combined radius <= ghost stay exact for fields sampled with ghost values.
struct Grid {
  double half_width = 1.0;
  int points = 9;
  int ghost = 2;
  double spacing = 0.25;

  // Validates: points odd and >= 3, half_width > 0, ghost >= 2.
  static Grid make(double half_width, int points, int ghost = 2);

  int alloc_per_axis() const { return points + 2 * ghost; }
  std::size_t alloc_total() const {
    const std::size_t a = static_cast<std::size_t>(alloc_per_axis());
    return a * a * a;
  }
  // Allocated index of the origin node.
  int center_index() const { return ghost + (points - 1) / 2; }
  // Physical coordinate of allocated index `a` (origin lands exactly on 0).
  double coord(int a) const { return (a - center_index()) * spacing; }
  bool is_interior(int a) const { return a >= ghost && a < ghost + points; }
  std::size_t flat(int i, int j, int k) const {
    const std::size_t a = static_cast<std::size_t>(alloc_per_axis());
    return (static_cast<std::size_t>(i) * a + static_cast<std::size_t>(j)) * a +
           static_cast<std::size_t>(k);
  }
  double cell_volume() const { return spacing * spacing * spacing; }
  bool same_layout(const Grid& o) const {
    return points == o.points && ghost == o.ghost && half_width == o.half_width;
  }
};

/// One real value per node (interior + ghosts), zero-initialized.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const Grid& g) : grid_(g), v_(g.alloc_total(), 0.0) {}

  const Grid& grid() const { return grid_; }
  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }
  std::size_t size() const { return v_.size(); }
  double& at(int i, int j, int k) { return v_[grid_.flat(i, j, k)]; }
  double at(int i, int j, int k) const { return v_[grid_.flat(i, j, k)]; }

  // Samples `f(x1,x2,x3)` at every node, ghosts included.
  void fill(const std::function<double(double, double, double)>& f);
  void set_zero();

 private:
  Grid grid_;
  std::vector<double> v_;
};

/// Three scalar components per node, component-major storage.
class VectorField3 {
 public:
  VectorField3() = default;
  explicit VectorField3(const Grid& g) : grid_(g) {
    for (auto& c : v_) c.assign(g.alloc_total(), 0.0);
  }

  const Grid& grid() const { return grid_; }
  double* data(int c) { return v_[static_cast<std::size_t>(c)].data(); }
  const double* data(int c) const { return v_[static_cast<std::size_t>(c)].data(); }
  std::size_t size_per_comp() const { return v_[0].size(); }
  double& at(int c, int i, int j, int k) { return v_[static_cast<std::size_t>(c)][grid_.flat(i, j, k)]; }
  double at(int c, int i, int j, int k) const { return v_[static_cast<std::size_t>(c)][grid_.flat(i, j, k)]; }

  void fill(const std::function<std::array<double, 3>(double, double, double)>& f);
  void set_zero();

 private:
  Grid grid_;
  std::array<std::vector<double>, 3> v_;
};

// Throws std::runtime_error when a non-finite value is present.
void ensure_finite(const ScalarField& f, const char* what);
void ensure_finite(const VectorField3& f, const char* what);
bool all_finite(const VectorField3& f);

}  // namespace ewlab

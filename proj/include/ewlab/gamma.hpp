#pragma once

#include <vector>

#include "ewlab/density.hpp"
#include "ewlab/grid.hpp"

namespace ewlab {

/// The eight generators, in the fixed enumeration order used everywhere:
/// time derivative, three space derivatives, three rotations (angular
/// momentum plus component mixing), and the shifted scaling t d_t + r d_r - 1.
enum class Gen : int { Dt = 0, Dx1, Dx2, Dx3, Om1, Om2, Om3, Scale };
inline constexpr int kGenCount = 8;

using GenWord = std::vector<Gen>;

// Longest word supported by default (desk scale).
inline constexpr int kMaxWordLen = 2;

// All words of length <= k-1 over the eight generators, lexicographic in the
// enumeration order. Count is sum_{j<=k-1} 8^j. Rejects k-1 > max_len.
std::vector<GenWord> enumerate_words(int k, int max_len = kMaxWordLen);

// Number of Dt/Scale letters (each consumes one temporal stencil level).
int temporal_order(const GenWord& w);

/// A sliding window of equally spaced time levels of a vector field; always
/// holds an odd number of levels and is evaluated at the middle one.
/// Temporal operators shrink the window by one level at each end.
struct TimeWindow {
  double dt = 0.0;
  double t_front = 0.0;  // time of levels.front()
  std::vector<VectorField3> levels;

  int center() const { return static_cast<int>(levels.size() - 1) / 2; }
  double time_at(int i) const { return t_front + dt * static_cast<double>(i); }
  double t_center() const { return time_at(center()); }
  const VectorField3& center_level() const { return levels[static_cast<std::size_t>(center())]; }
  const Grid& grid() const { return levels.front().grid(); }

  // Samples an analytic space-time field u(t, x1, x2, x3) on 2m+1 levels
  // centered at t_center.
  static TimeWindow sample(const Grid& g, double t_center, double dt, int m,
                           const std::function<std::array<double, 3>(double, double, double,
                                                                     double)>& u);
};

// Single-level spatial generator actions.
VectorField3 rotation_generator(int l, const VectorField3& u);  // Omega_l I + U_l, l in 1..3
VectorField3 radial_scaling_minus_identity(const VectorField3& u);  // x.grad u - u

// Scalar variants (rotations act without the component-mixing matrices).
ScalarField rotation_generator_scalar(int l, const ScalarField& f);
ScalarField radial_scaling_minus_identity_scalar(const ScalarField& f);

// Centered temporal derivatives; require >= 3 levels.
TimeWindow time_derivative(const TimeWindow& w);
TimeWindow second_time_derivative(const TimeWindow& w);

// Same stencils evaluated at the window center only.
VectorField3 time_derivative_center(const TimeWindow& w);
VectorField3 second_time_derivative_center(const TimeWindow& w);

TimeWindow apply_generator(Gen g, const TimeWindow& w);
// Letters act rightmost-first: the first listed letter is applied last.
TimeWindow apply_word(const GenWord& w, const TimeWindow& base);

// Static (time-independent) generator actions on grid fields; used for the
// initial-data norm. Rotations carry the component-mixing matrices.
VectorField3 apply_static_gen(StaticGen g, const VectorField3& u);
VectorField3 apply_static_word(const StaticWord& w, const VectorField3& u);
ScalarField apply_static_word_scalar(const StaticWord& w, const ScalarField& f);

// sum_{|alpha| <= k-1} ( ||L^a f|| + ||grad L^a f|| + ||L^a g|| ) over the
// seven static generators; the norm of the initial-data space.
double initial_data_norm(const VectorField3& f, const VectorField3& g, int k);

}  // namespace ewlab

#pragma once

#include <deque>
#include <string>
#include <vector>

#include "ewlab/analysis.hpp"
#include "ewlab/density.hpp"
#include "ewlab/gamma.hpp"
#include "ewlab/grid.hpp"
#include "ewlab/material_params.hpp"
#include "ewlab/tensor.hpp"

namespace ewlab {

/// Compactly supported initial displacement and velocity.
struct CauchyData {
  VectorField3 u0;
  VectorField3 u1;
  double support_radius = 0.0;
  double eps_measured = 0.0;  // initial-data norm at order k-2
};

enum class DataProfile { Bump, ShearPacket, PressurePacket };

CauchyData make_cauchy_data(DataProfile profile, double amplitude, double support_radius,
                            const Grid& g, int k, const MaterialParams& mat);

enum class PacketKind { Shear, Pressure };

/// Plane packet d * phi(x.n - c t) traveling along n = e1; an exact solution
/// of the constant-density linear system. Grid data is windowed transversely
/// so it is compactly supported; the window choice keeps the causal core of
/// the numerical solution equal to the pure slab profile.
struct PlanePacket {
  PacketKind kind = PacketKind::Shear;
  MaterialParams mat;
  double amplitude = 0.01;
  double width = 1.5;          // slab profile support: |x1| < width at t = 0
  double window_flat = 4.5;    // transverse radius where the window is 1
  double window_outer = 5.5;   // transverse radius where the window reaches 0
  std::array<double, 3> dir{0.0, 1.0, 0.0};  // displacement direction

  double speed() const { return kind == PacketKind::Pressure ? mat.c1 : mat.c2; }
  double support_radius() const;

  // C5 bump (1 - (s/w)^2)^6 and derivatives.
  double profile(double s) const;
  double profile_d1(double s) const;
  double profile_d2(double s) const;
  double window(double transverse_r) const;  // C2 quintic step from 1 to 0

  // Pure slab solution (no window).
  std::array<double, 3> exact(double t, double x1, double x2, double x3) const;
  // Windowed initial data sampled on the grid.
  CauchyData initial_data(const Grid& g, int k) const;
  // Radius of the transverse cylinder on which the numerical solution must
  // agree with the slab solution at time t (flat window core minus the
  // fastest causal cone).
  double comparison_radius(double t) const { return window_flat - mat.c1 * t; }
};

// Validates the direction/kind pairing (shear transverse, pressure parallel).
PlanePacket make_plane_packet(PacketKind kind, const MaterialParams& mat, double amplitude,
                              double width, double window_flat, double window_outer,
                              const std::array<double, 3>& displacement_dir);
PlanePacket make_plane_packet(PacketKind kind, const MaterialParams& mat, double amplitude,
                              double width, double window_flat, double window_outer);

/// Full configuration of a time-integration run.
struct RunConfig {
  Grid grid;
  MaterialParams mat;
  CoefTensor tensor;
  DensityField density;
  CauchyData data;
  double cfl = 0.5;
  double horizon = 0.0;  // <= 0 selects 0.95 * max_horizon()
  int report_stride = 8;
  int k_report = 3;

  // Finite propagation speed bound: waves never reach the boundary.
  double max_horizon() const;
  int window_half_width() const { return k_report >= 2 ? k_report + 1 : 1; }
  void validate() const;
};

// dt = cfl * h * sqrt(min rho) / (c1 * sqrt(3)).
double cfl_dt(const Grid& g, const MaterialParams& mat, const ScalarField& rho_full, double cfl);

// Taylor start preserving the second-order accuracy of the leapfrog.
VectorField3 first_step(const VectorField3& u0, const VectorField3& u1, double dt,
                        const RunConfig& cfg);

// One leapfrog update: next = 2 curr - prev + dt^2 (A curr + N(curr,curr)) / rho.
VectorField3 leapfrog_step(const VectorField3& prev, const VectorField3& curr, double dt,
                           const RunConfig& cfg);

struct RunResult {
  std::vector<EnergyReport> reports;
  bool aborted = false;
  std::string abort_reason;
  int steps_completed = 0;
  double dt = 0.0;
  double final_time = 0.0;
  bool sentinel_tripped = false;
  TimeWindow final_window;
};

// Integrates to the horizon, emitting a report every `report_stride` steps
// once the sliding window is full. Instability (non-finite or diverging
// fields) and boundary contamination abort the run with a diagnostic rather
// than throwing; configuration errors throw.
RunResult run(const RunConfig& cfg);

// max |u| over the two interior shells adjacent to the ghost layers.
double boundary_shell_max(const VectorField3& u);

// Checkpoint: one JSON header line, then raw little-endian doubles for each
// level (component-major, interior plus ghosts).
void write_checkpoint(const std::string& path, const TimeWindow& w);
TimeWindow read_checkpoint(const std::string& path, const Grid& g);

}  // namespace ewlab

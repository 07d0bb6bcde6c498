#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ewlab/commutation_checks.hpp"
#include "ewlab/solver.hpp"

namespace ewlab {

/// JSON-loadable simulation configuration with embedded physical defaults.
struct SimConfig {
  double half_width = 8.0;
  int points = 65;
  int ghost = 2;
  MaterialParams mat{2.0, 1.0};
  std::string tensor_kind = "generic";  // zero|generic|null|isotropic_null|isotropic_generic
  std::uint64_t tensor_seed = 7;
  double tensor_scale = 1.0;
  double density_amplitude = 0.05;
  double density_radius = 2.0;
  std::string data_profile = "bump";  // bump|shear_packet|pressure_packet
  double data_amplitude = 0.01;
  double data_radius = 2.0;
  double cfl = 0.5;
  double horizon = 1.5;  // <= 0: auto (0.95 of the admissible maximum)
  int report_stride = 4;
  int k_report = 3;

  std::string to_json() const;
  static SimConfig from_json(const std::string& text);
  static SimConfig load(const std::string& path);
};

CoefTensor build_tensor(const SimConfig& cfg);
RunConfig build_run_config(const SimConfig& cfg);

/// One named PASS/FAIL gate backed by numbers stored in the summary.
struct Criterion {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  std::string relation;  // "<=", ">=", "==", "in" (documentation only)
  bool pass = false;
};

struct ExperimentResult {
  std::string experiment;
  bool pass = false;
  std::vector<Criterion> criteria;
  std::string details_json;  // extra numbers backing the verdicts

  void write_summary(const std::string& out_dir) const;
  void print_verdicts() const;
};

// Subcommand bodies. Every experiment is deterministic in (arguments, seed)
// and writes its artifacts under out_dir (created if missing).
ExperimentResult check_tensor_experiment(bool want_null, std::uint64_t seed,
                                         const std::string& out_dir);
ExperimentResult verify_commutators_experiment(int levels, const std::string& out_dir);
ExperimentResult convergence_experiment(int levels, const std::string& out_dir);
ExperimentResult simulate_experiment(const SimConfig& cfg, const std::string& out_dir);
ExperimentResult theorem1_experiment(const SimConfig& cfg, const std::string& out_dir);
ExperimentResult theorem2_experiment(const SimConfig& cfg, const std::string& out_dir);

// Helpers shared with the acceptance suite.
void write_text_file(const std::string& path, const std::string& text);
void write_report_csv(const std::string& path, const std::vector<EnergyReport>& reports);
double max_over_reports(const std::vector<EnergyReport>& reports, double EnergyReport::*field);

}  // namespace ewlab

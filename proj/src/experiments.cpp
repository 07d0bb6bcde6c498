#include "ewlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ewlab {

namespace {

nlohmann::json criteria_json(const std::vector<Criterion>& criteria) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : criteria) {
    arr.push_back({{"name", c.name},
                   {"value", c.value},
                   {"threshold", c.threshold},
                   {"relation", c.relation},
                   {"pass", c.pass}});
  }
  return arr;
}

Criterion make_le(const std::string& name, double value, double threshold) {
  return Criterion{name, value, threshold, "<=", value <= threshold};
}

Criterion make_ge(const std::string& name, double value, double threshold) {
  return Criterion{name, value, threshold, ">=", value >= threshold};
}

Criterion make_flag(const std::string& name, bool ok) {
  return Criterion{name, ok ? 1.0 : 0.0, 1.0, "==", ok};
}

bool all_pass(const std::vector<Criterion>& criteria) {
  for (const auto& c : criteria) {
    if (!c.pass) return false;
  }
  return true;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string SimConfig::to_json() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["grid"] = {{"half_width", half_width}, {"points", points}, {"ghost", ghost}};
  j["material"] = {{"c1", mat.c1}, {"c2", mat.c2}};
  j["tensor"] = {{"kind", tensor_kind}, {"seed", tensor_seed}, {"scale", tensor_scale}};
  j["density"] = {{"amplitude", density_amplitude}, {"support_radius", density_radius}};
  j["data"] = {{"profile", data_profile},
               {"amplitude", data_amplitude},
               {"support_radius", data_radius}};
  j["cfl"] = cfl;
  j["horizon"] = horizon;
  j["report_stride"] = report_stride;
  j["k_report"] = k_report;
  return j.dump(2);
}

SimConfig SimConfig::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config parse error: ") + e.what());
  }
  SimConfig cfg;
  try {
    if (j.contains("schema_version") && j.at("schema_version").get<int>() != 1) {
      throw std::invalid_argument("config: unsupported schema_version");
    }
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      if (g.contains("half_width")) cfg.half_width = g.at("half_width").get<double>();
      if (g.contains("points")) cfg.points = g.at("points").get<int>();
      if (g.contains("ghost")) cfg.ghost = g.at("ghost").get<int>();
    }
    if (j.contains("material")) {
      const auto& m = j.at("material");
      if (m.contains("c1")) cfg.mat.c1 = m.at("c1").get<double>();
      if (m.contains("c2")) cfg.mat.c2 = m.at("c2").get<double>();
    }
    if (j.contains("tensor")) {
      const auto& t = j.at("tensor");
      if (t.contains("kind")) cfg.tensor_kind = t.at("kind").get<std::string>();
      if (t.contains("seed")) cfg.tensor_seed = t.at("seed").get<std::uint64_t>();
      if (t.contains("scale")) cfg.tensor_scale = t.at("scale").get<double>();
    }
    if (j.contains("density")) {
      const auto& d = j.at("density");
      if (d.contains("amplitude")) cfg.density_amplitude = d.at("amplitude").get<double>();
      if (d.contains("support_radius")) cfg.density_radius = d.at("support_radius").get<double>();
    }
    if (j.contains("data")) {
      const auto& d = j.at("data");
      if (d.contains("profile")) cfg.data_profile = d.at("profile").get<std::string>();
      if (d.contains("amplitude")) cfg.data_amplitude = d.at("amplitude").get<double>();
      if (d.contains("support_radius")) cfg.data_radius = d.at("support_radius").get<double>();
    }
    if (j.contains("cfl")) cfg.cfl = j.at("cfl").get<double>();
    if (j.contains("horizon")) cfg.horizon = j.at("horizon").get<double>();
    if (j.contains("report_stride")) cfg.report_stride = j.at("report_stride").get<int>();
    if (j.contains("k_report")) cfg.k_report = j.at("k_report").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config field error: ") + e.what());
  }
  return cfg;
}

SimConfig SimConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config file not found: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

CoefTensor build_tensor(const SimConfig& cfg) {
  if (cfg.tensor_kind == "zero") return CoefTensor{};
  if (cfg.tensor_kind == "generic") {
    return random_symmetric_tensor(cfg.tensor_seed, cfg.tensor_scale);
  }
  if (cfg.tensor_kind == "null") return make_null_tensor(cfg.tensor_seed).scaled(cfg.tensor_scale);
  if (cfg.tensor_kind == "isotropic_null") return isotropic_null_tensor().scaled(cfg.tensor_scale);
  if (cfg.tensor_kind == "isotropic_generic") {
    return isotropic_generic_tensor().scaled(cfg.tensor_scale);
  }
  throw std::invalid_argument("unknown tensor kind: " + cfg.tensor_kind);
}

RunConfig build_run_config(const SimConfig& cfg) {
  RunConfig rc;
  rc.grid = Grid::make(cfg.half_width, cfg.points, cfg.ghost);
  rc.mat = cfg.mat;
  rc.mat.validate();
  rc.tensor = build_tensor(cfg);
  rc.density = DensityField::make(rc.grid, cfg.density_amplitude, cfg.density_radius);
  DataProfile profile = DataProfile::Bump;
  if (cfg.data_profile == "bump") {
    profile = DataProfile::Bump;
  } else if (cfg.data_profile == "shear_packet") {
    profile = DataProfile::ShearPacket;
  } else if (cfg.data_profile == "pressure_packet") {
    profile = DataProfile::PressurePacket;
  } else {
    throw std::invalid_argument("unknown data profile: " + cfg.data_profile);
  }
  rc.data = make_cauchy_data(profile, cfg.data_amplitude, cfg.data_radius, rc.grid, cfg.k_report,
                             rc.mat);
  rc.cfl = cfg.cfl;
  rc.horizon = cfg.horizon;
  rc.report_stride = cfg.report_stride;
  rc.k_report = cfg.k_report;
  rc.validate();
  return rc;
}

void ExperimentResult::write_summary(const std::string& out_dir) const {
  nlohmann::json j;
  j["experiment"] = experiment;
  j["pass"] = pass;
  j["criteria"] = criteria_json(criteria);
  if (!details_json.empty()) j["details"] = nlohmann::json::parse(details_json);
  write_text_file(out_dir + "/summary.json", j.dump(2) + "\n");
}

void ExperimentResult::print_verdicts() const {
  for (const auto& c : criteria) {
    std::cout << (c.pass ? "PASS" : "FAIL") << " " << experiment << "/" << c.name
              << " value=" << fmt(c.value) << " " << c.relation << " threshold=" << fmt(c.threshold)
              << "\n";
  }
  std::cout << "RESULT " << experiment << ": " << (pass ? "PASS" : "FAIL") << "\n";
}

void write_text_file(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

void write_report_csv(const std::string& path, const std::vector<EnergyReport>& reports) {
  std::ostringstream ss;
  ss << EnergyReport::csv_header() << "\n";
  for (const auto& r : reports) ss << r.csv_row() << "\n";
  write_text_file(path, ss.str());
}

double max_over_reports(const std::vector<EnergyReport>& reports, double EnergyReport::*field) {
  double m = 0.0;
  for (const auto& r : reports) m = std::max(m, r.*field);
  return m;
}

ExperimentResult check_tensor_experiment(bool want_null, std::uint64_t seed,
                                         const std::string& out_dir) {
  ExperimentResult res;
  res.experiment = want_null ? "check-tensor(null)" : "check-tensor";
  CoefTensor b = want_null ? make_null_tensor(seed) : random_symmetric_tensor(seed, 1.0);
  write_text_file(out_dir + "/tensor.json", b.to_json() + "\n");

  // Independent sampler, an order of magnitude denser than construction.
  const SphereSampler dense = SphereSampler::make(2400, 2);
  const double sym = symmetry_deficit(b);
  const double rad = radial_null_deficit(b, dense);
  const double tra = transverse_null_deficit(b, dense);

  res.criteria.push_back(make_le("symmetry_deficit", sym, 0.0));
  if (want_null) {
    res.criteria.push_back(make_le("radial_null_deficit", rad, 1e-10));
    res.criteria.push_back(make_le("transverse_null_deficit", tra, 1e-10));
  }
  nlohmann::json details;
  details["seed"] = seed;
  details["frobenius_norm"] = b.frobenius_norm();
  details["radial_null_deficit"] = rad;
  details["transverse_null_deficit"] = tra;
  details["verification_directions"] = dense.directions.size();
  details["verification_pairs"] = dense.pairs.size();
  res.details_json = details.dump();
  res.pass = all_pass(res.criteria);
  res.write_summary(out_dir);
  return res;
}

namespace {

void append_series_csv(std::ostringstream& ss, const std::vector<ResidualSeries>& series,
                       const std::vector<int>& grid_points) {
  for (const auto& s : series) {
    for (std::size_t l = 0; l < s.residuals.size(); ++l) {
      ss << s.name << "," << grid_points[l] << "," << fmt(s.residuals[l]) << ",";
      ss << (l > 0 ? fmt(s.orders[l - 1]) : std::string("")) << "\n";
    }
  }
}

nlohmann::json series_json(const std::vector<ResidualSeries>& series) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& s : series) {
    arr.push_back({{"name", s.name},
                   {"residuals", s.residuals},
                   {"orders", s.orders},
                   {"exact", s.exact},
                   {"min_order", s.min_order()}});
  }
  return arr;
}

}  // namespace

ExperimentResult verify_commutators_experiment(int levels, const std::string& out_dir) {
  ExperimentResult res;
  res.experiment = "verify-commutators";
  const RefinementSpec spec = RefinementSpec::with_levels(levels);

  const SpaceTimeField u = standard_test_field(0.5, 5.0);
  const SpaceTimeField v = companion_test_field(0.5, 5.0);
  const CoefTensor b_iso = isotropic_generic_tensor();
  const RadialBump rho{0.1, 2.5};

  const auto commutators = verify_commutators(u, spec);
  const auto leibniz = verify_leibniz_N(b_iso, u, v, rho, spec);

  // Exactness on a space-time quadratic: single level suffices.
  RefinementSpec quad_spec = spec;
  quad_spec.grid_points = {spec.grid_points.front()};
  const auto quad_comm = verify_commutators(quadratic_test_field(), quad_spec);
  const auto quad_leib =
      verify_leibniz_N(b_iso, quadratic_test_field(), quadratic_test_field(), rho, quad_spec);

  std::ostringstream csv;
  csv << "identity,points,residual,observed_order\n";
  append_series_csv(csv, commutators, spec.grid_points);
  append_series_csv(csv, leibniz, spec.grid_points);
  write_text_file(out_dir + "/residuals.csv", csv.str());

  for (const auto& s : commutators) {
    res.criteria.push_back(s.exact ? make_flag(s.name + "_exact", true)
                                   : make_ge(s.name + "_order", s.min_order(), 1.8));
  }
  for (const auto& s : leibniz) {
    res.criteria.push_back(s.exact ? make_flag(s.name + "_exact", true)
                                   : make_ge(s.name + "_order", s.min_order(), 1.8));
  }
  for (const auto& s : quad_comm) {
    double worst = 0.0;
    for (double r : s.residuals) worst = std::max(worst, r);
    res.criteria.push_back(make_le(s.name + "_quadratic_residual", worst, 1e-12));
  }
  for (const auto& s : quad_leib) {
    double worst = 0.0;
    for (double r : s.residuals) worst = std::max(worst, r);
    res.criteria.push_back(make_le(s.name + "_quadratic_residual", worst, 1e-12));
  }

  nlohmann::json details;
  details["grid_points"] = spec.grid_points;
  details["commutators"] = series_json(commutators);
  details["leibniz"] = series_json(leibniz);
  details["quadratic_commutators"] = series_json(quad_comm);
  details["quadratic_leibniz"] = series_json(quad_leib);
  res.details_json = details.dump();
  res.pass = all_pass(res.criteria);
  res.write_summary(out_dir);
  return res;
}

namespace {

double packet_l2_error(const VectorField3& u, const PlanePacket& p, double t, double radius) {
  const Grid& g = u.grid();
  const int lo = g.ghost, hi = g.ghost + g.points;
  double s = 0.0;
  for (int i = lo; i < hi; ++i) {
    const double x1 = g.coord(i);
    for (int j = lo; j < hi; ++j) {
      const double x2 = g.coord(j);
      for (int k = lo; k < hi; ++k) {
        const double x3 = g.coord(k);
        if (x2 * x2 + x3 * x3 > radius * radius) continue;
        const auto ex = p.exact(t, x1, x2, x3);
        for (int c = 0; c < 3; ++c) {
          const double d = u.at(c, i, j, k) - ex[static_cast<std::size_t>(c)];
          s += d * d;
        }
      }
    }
  }
  return std::sqrt(s * g.cell_volume());
}

double fit_packet_speed(const VectorField3& u, const PlanePacket& p, double t, double radius) {
  const Grid& g = u.grid();
  const int lo = g.ghost, hi = g.ghost + g.points;
  auto correlation = [&](double tau) {
    double s = 0.0;
    for (int i = lo; i < hi; ++i) {
      const double x1 = g.coord(i);
      for (int j = lo; j < hi; ++j) {
        const double x2 = g.coord(j);
        for (int k = lo; k < hi; ++k) {
          const double x3 = g.coord(k);
          if (x2 * x2 + x3 * x3 > radius * radius) continue;
          double along = 0.0;
          for (int c = 0; c < 3; ++c) along += p.dir[static_cast<std::size_t>(c)] * u.at(c, i, j, k);
          s += along * p.profile(x1 - tau);
        }
      }
    }
    return s;
  };
  const double tau0 = p.speed() * t;
  const double half_span = 0.4;
  const double step = g.spacing / 8.0;
  double best_tau = tau0;
  double best_val = -1e300;
  const int nsteps = static_cast<int>(std::floor(2.0 * half_span / step));
  for (int s = 0; s <= nsteps; ++s) {
    const double tau = tau0 - half_span + step * static_cast<double>(s);
    const double val = correlation(tau);
    if (val > best_val) {
      best_val = val;
      best_tau = tau;
    }
  }
  // Parabolic refinement around the scan peak.
  const double cm = correlation(best_tau - step);
  const double cp = correlation(best_tau + step);
  const double denom = cm - 2.0 * best_val + cp;
  double tau_star = best_tau;
  if (denom < 0.0) tau_star = best_tau + 0.5 * step * (cm - cp) / denom;
  return tau_star / t;
}

struct PacketRun {
  double error = 0.0;
  double fitted_speed = 0.0;
  bool aborted = false;
  bool sentinel = false;
  double final_time = 0.0;
};

PacketRun run_packet_level(PacketKind kind, int points, double horizon, bool fit_speed) {
  const MaterialParams mat{2.0, 1.0};
  const Grid grid = Grid::make(8.0, points, 2);
  const PlanePacket packet = make_plane_packet(kind, mat, 0.01, 1.5, 4.5, 5.5);

  RunConfig rc;
  rc.grid = grid;
  rc.mat = mat;
  rc.tensor = CoefTensor{};
  rc.density = DensityField::make(grid, 0.0, 1.0);
  rc.data = packet.initial_data(grid, 1);
  rc.cfl = 0.5;
  rc.horizon = horizon;
  rc.report_stride = 1 << 20;  // no reports needed
  rc.k_report = 1;

  const RunResult rr = run(rc);
  PacketRun out;
  out.aborted = rr.aborted;
  out.sentinel = rr.sentinel_tripped;
  out.final_time = rr.final_time;
  if (!rr.aborted && !rr.final_window.levels.empty()) {
    const VectorField3& final_state = rr.final_window.levels.back();
    const double radius = packet.comparison_radius(rr.final_time) - 0.2;
    out.error = packet_l2_error(final_state, packet, rr.final_time, radius);
    if (fit_speed) out.fitted_speed = fit_packet_speed(final_state, packet, rr.final_time, radius);
  }
  return out;
}

}  // namespace

ExperimentResult convergence_experiment(int levels, const std::string& out_dir) {
  ExperimentResult res;
  res.experiment = "convergence";
  if (levels < 2) throw std::invalid_argument("convergence: need at least 2 levels");
  std::vector<int> points;
  int n = 33;
  for (int l = 0; l < levels; ++l) {
    points.push_back(n);
    n = 2 * (n - 1) + 1;
  }
  // Horizon admissible at the coarsest grid, shared by every level.
  const double horizon = 0.6;

  std::ostringstream csv;
  csv << "kind,points,h,error,observed_order,fitted_speed,exact_speed\n";
  nlohmann::json details;
  bool any_sentinel = false;
  bool any_abort = false;

  for (const PacketKind kind : {PacketKind::Shear, PacketKind::Pressure}) {
    const std::string kind_name = kind == PacketKind::Shear ? "shear" : "pressure";
    const double exact_speed = kind == PacketKind::Shear ? 1.0 : 2.0;
    std::vector<double> errors;
    double fitted_speed = 0.0;
    for (std::size_t l = 0; l < points.size(); ++l) {
      const bool finest = l + 1 == points.size();
      const PacketRun pr = run_packet_level(kind, points[static_cast<std::size_t>(l)], horizon, finest);
      any_sentinel = any_sentinel || pr.sentinel;
      any_abort = any_abort || pr.aborted;
      errors.push_back(pr.error);
      if (finest) fitted_speed = pr.fitted_speed;
      const double h = 16.0 / static_cast<double>(points[l] - 1);
      const std::string order =
          l > 0 ? fmt(std::log2(errors[l - 1] / errors[l])) : std::string("");
      csv << kind_name << "," << points[l] << "," << fmt(h) << "," << fmt(pr.error) << "," << order
          << "," << (finest ? fmt(fitted_speed) : std::string("")) << "," << fmt(exact_speed)
          << "\n";
    }
    std::vector<double> orders;
    for (std::size_t l = 0; l + 1 < errors.size(); ++l) {
      orders.push_back(std::log2(errors[l] / errors[l + 1]));
    }
    double min_order = orders.empty() ? 0.0 : *std::min_element(orders.begin(), orders.end());
    double max_order = orders.empty() ? 0.0 : *std::max_element(orders.begin(), orders.end());
    res.criteria.push_back(make_ge(kind_name + "_order_min", min_order, 1.8));
    res.criteria.push_back(make_le(kind_name + "_order_max", max_order, 2.2));
    res.criteria.push_back(
        make_le(kind_name + "_speed_error", std::abs(fitted_speed / exact_speed - 1.0), 0.01));
    details[kind_name] = {{"errors", errors}, {"orders", orders}, {"fitted_speed", fitted_speed}};
  }

  // Linear energy conservation on the default bump configuration.
  {
    SimConfig lin;
    lin.tensor_kind = "zero";
    lin.density_amplitude = 0.0;
    lin.data_radius = 2.5;
    lin.cfl = 0.4;
    lin.k_report = 1;
    lin.report_stride = 8;
    const RunConfig rc = build_run_config(lin);
    const RunResult rr = run(rc);
    any_sentinel = any_sentinel || rr.sentinel_tripped;
    any_abort = any_abort || rr.aborted;
    double drift = 0.0;
    if (!rr.reports.empty()) {
      const double base = rr.reports.front().e1;
      for (const auto& rep : rr.reports) {
        drift = std::max(drift, std::abs(rep.e1 - base) / base);
      }
    }
    res.criteria.push_back(make_le("linear_e1_drift", drift, 1e-3));
    details["linear_e1_drift"] = drift;
    details["linear_reports"] = rr.reports.size();
  }

  res.criteria.push_back(make_flag("no_sentinel_trip", !any_sentinel));
  res.criteria.push_back(make_flag("all_runs_completed", !any_abort));

  write_text_file(out_dir + "/convergence.csv", csv.str());
  res.details_json = details.dump();
  res.pass = all_pass(res.criteria);
  res.write_summary(out_dir);
  return res;
}

ExperimentResult simulate_experiment(const SimConfig& cfg, const std::string& out_dir) {
  ExperimentResult res;
  res.experiment = "simulate";
  const RunConfig rc = build_run_config(cfg);
  const RunResult rr = run(rc);
  write_report_csv(out_dir + "/report.csv", rr.reports);
  if (!rr.final_window.levels.empty()) {
    write_checkpoint(out_dir + "/checkpoint.bin", rr.final_window);
  }
  res.criteria.push_back(make_flag("completed", !rr.aborted));
  res.criteria.push_back(make_flag("no_sentinel_trip", !rr.sentinel_tripped));
  nlohmann::json details;
  details["config"] = nlohmann::json::parse(cfg.to_json());
  details["dt"] = rr.dt;
  details["steps"] = rr.steps_completed;
  details["final_time"] = rr.final_time;
  details["reports"] = rr.reports.size();
  if (rr.aborted) details["abort_reason"] = rr.abort_reason;
  res.details_json = details.dump();
  res.pass = all_pass(res.criteria);
  res.write_summary(out_dir);
  return res;
}

namespace {

struct RatioStability {
  std::string name;
  double coarse = 0.0;
  double fine = 0.0;
  bool stable(double factor) const {
    if (coarse <= 1e-14 && fine <= 1e-14) return true;
    if (coarse <= 0.0 || fine <= 0.0) return false;
    const double r = fine / coarse;
    return r <= factor && r >= 1.0 / factor;
  }
};

std::vector<RatioStability> ratio_stability(const std::vector<EnergyReport>& coarse,
                                            const std::vector<EnergyReport>& fine) {
  const std::pair<std::string, double EnergyReport::*> fields[] = {
      {"ratio_41", &EnergyReport::r41},       {"ratio_42", &EnergyReport::r42},
      {"ratio_43", &EnergyReport::r43},       {"ratio_44", &EnergyReport::r44},
      {"x2_deficit", &EnergyReport::x2_deficit}, {"dt2_deficit", &EnergyReport::dt2_deficit}};
  std::vector<RatioStability> out;
  for (const auto& [name, field] : fields) {
    RatioStability rs;
    rs.name = name;
    rs.coarse = max_over_reports(coarse, field);
    rs.fine = max_over_reports(fine, field);
    out.push_back(rs);
  }
  return out;
}

double equivalence_band(const std::vector<EnergyReport>& reports, double* lo, double* hi) {
  *lo = 1.0;
  *hi = 1.0;
  for (const auto& r : reports) {
    if (r.e3 > 0.0) {
      const double q = r.ehat3 / r.e3;
      *lo = std::min(*lo, q);
      *hi = std::max(*hi, q);
    }
  }
  return *hi;
}

}  // namespace

ExperimentResult theorem1_experiment(const SimConfig& cfg, const std::string& out_dir) {
  ExperimentResult res;
  res.experiment = "theorem1-proxy";

  const RunConfig rc_fine = build_run_config(cfg);
  SimConfig coarse_cfg = cfg;
  coarse_cfg.points = (cfg.points - 1) / 2 + 1;
  const RunConfig rc_coarse_probe = build_run_config(coarse_cfg);
  const double shared_horizon =
      cfg.horizon > 0.0 ? cfg.horizon : 0.95 * rc_coarse_probe.max_horizon();
  SimConfig fine_cfg = cfg;
  fine_cfg.horizon = shared_horizon;
  coarse_cfg.horizon = shared_horizon;

  const RunResult fine = run(build_run_config(fine_cfg));
  const RunResult coarse = run(build_run_config(coarse_cfg));
  write_report_csv(out_dir + "/report.csv", fine.reports);
  write_report_csv(out_dir + "/report_coarse.csv", coarse.reports);

  res.criteria.push_back(make_flag("completed", !fine.aborted && !coarse.aborted));

  const double eps_fit = build_run_config(fine_cfg).data.eps_measured;
  const Grid fine_grid = Grid::make(cfg.half_width, cfg.points, cfg.ghost);
  const DensityField density = DensityField::make(fine_grid, cfg.density_amplitude, cfg.density_radius);
  const double delta_fit = density_assumption_check(density, fine_grid, 2);

  double slope = 0.0;
  bool fit_ok = false;
  if (!fine.aborted && fine.reports.size() >= 8) {
    std::vector<std::pair<double, double>> series;
    for (const auto& r : fine.reports) series.emplace_back(r.t, r.e3);
    slope = growth_exponent_fit(series);
    fit_ok = true;
  }
  res.criteria.push_back(make_flag("enough_samples", fit_ok));
  res.criteria.push_back(make_le("growth_slope", slope, eps_fit + delta_fit + 0.1));

  double eq_lo = 1.0, eq_hi = 1.0;
  equivalence_band(fine.reports, &eq_lo, &eq_hi);
  res.criteria.push_back(make_ge("ehat_over_e_min", eq_lo, 0.8));
  res.criteria.push_back(make_le("ehat_over_e_max", eq_hi, 1.2));

  nlohmann::json stability = nlohmann::json::array();
  for (const auto& rs : ratio_stability(coarse.reports, fine.reports)) {
    res.criteria.push_back(make_flag(rs.name + "_refinement_stable", rs.stable(2.0)));
    stability.push_back({{"name", rs.name}, {"coarse", rs.coarse}, {"fine", rs.fine}});
  }

  nlohmann::json details;
  details["eps_fit"] = eps_fit;
  details["delta_fit"] = delta_fit;
  details["growth_slope"] = slope;
  details["slope_gate"] = eps_fit + delta_fit + 0.1;
  details["ehat_over_e"] = {{"min", eq_lo}, {"max", eq_hi}};
  details["ratio_stability"] = stability;
  details["fine_reports"] = fine.reports.size();
  details["coarse_reports"] = coarse.reports.size();
  if (fine.aborted) details["abort_reason"] = fine.abort_reason;
  res.details_json = details.dump();
  res.pass = all_pass(res.criteria);
  res.write_summary(out_dir);
  return res;
}

ExperimentResult theorem2_experiment(const SimConfig& cfg, const std::string& out_dir) {
  ExperimentResult res;
  res.experiment = "theorem2-proxy";

  SimConfig gen_cfg = cfg;
  gen_cfg.tensor_kind = "generic";
  const CoefTensor b_gen = build_tensor(gen_cfg);
  CoefTensor b_null = make_null_tensor(cfg.tensor_seed + 1);
  const double nn = b_null.frobenius_norm();
  if (nn > 0.0) b_null = b_null.scaled(b_gen.frobenius_norm() / nn);

  RunConfig rc_gen = build_run_config(gen_cfg);
  RunConfig rc_null = rc_gen;
  rc_null.tensor = b_null;

  const RunResult run_gen = run(rc_gen);
  const RunResult run_null = run(rc_null);
  write_report_csv(out_dir + "/report_generic.csv", run_gen.reports);
  write_report_csv(out_dir + "/report_null.csv", run_null.reports);

  res.criteria.push_back(make_flag("completed", !run_gen.aborted && !run_null.aborted));

  auto e1_ratio = [](const std::vector<EnergyReport>& reports) {
    std::vector<double> series;
    for (const auto& r : reports) series.push_back(r.e1);
    return boundedness_ratio(series);
  };
  const double ratio_gen = run_gen.reports.empty() ? 1.0 : e1_ratio(run_gen.reports);
  const double ratio_null = run_null.reports.empty() ? 1.0 : e1_ratio(run_null.reports);

  res.criteria.push_back(make_le("null_ratio_vs_generic", ratio_null, ratio_gen));
  res.criteria.push_back(make_le("null_ratio_bound", ratio_null, 4.0));

  double lo_n = 1.0, hi_n = 1.0, lo_g = 1.0, hi_g = 1.0;
  equivalence_band(run_null.reports, &lo_n, &hi_n);
  equivalence_band(run_gen.reports, &lo_g, &hi_g);
  res.criteria.push_back(make_ge("ehat_over_e_min", std::min(lo_n, lo_g), 0.8));
  res.criteria.push_back(make_le("ehat_over_e_max", std::max(hi_n, hi_g), 1.2));

  nlohmann::json details;
  details["e1_ratio_null"] = ratio_null;
  details["e1_ratio_generic"] = ratio_gen;
  details["tensor_norm"] = b_gen.frobenius_norm();
  details["ehat_over_e_null"] = {{"min", lo_n}, {"max", hi_n}};
  details["ehat_over_e_generic"] = {{"min", lo_g}, {"max", hi_g}};
  if (run_gen.aborted) details["abort_reason_generic"] = run_gen.abort_reason;
  if (run_null.aborted) details["abort_reason_null"] = run_null.abort_reason;
  res.details_json = details.dump();
  res.pass = all_pass(res.criteria);
  res.write_summary(out_dir);
  return res;
}

}  // namespace ewlab

#include "ewlab/commutation_checks.hpp"

#include <cmath>
#include <stdexcept>

#include "ewlab/field_ops.hpp"

namespace ewlab {

double ResidualSeries::min_order() const {
  if (orders.empty()) return 0.0;
  double m = orders.front();
  for (double o : orders) m = std::min(m, o);
  return m;
}

bool ResidualSeries::satisfied(double min_order_required) const {
  return exact || min_order() >= min_order_required;
}

RefinementSpec RefinementSpec::with_levels(int levels) {
  if (levels < 2) throw std::invalid_argument("RefinementSpec: need at least 2 levels");
  RefinementSpec spec;
  spec.grid_points.clear();
  int n = 25;
  for (int l = 0; l < levels; ++l) {
    spec.grid_points.push_back(n);
    n = 2 * (n - 1) + 1;
  }
  return spec;
}

namespace {

// L u = d_t^2 u - A u as a window (one level lost at each end).
TimeWindow wave_operator(const TimeWindow& w, const MaterialParams& mat) {
  TimeWindow out = second_time_derivative(w);
  for (std::size_t i = 0; i < out.levels.size(); ++i) {
    axpy(-1.0, elastic_operator(w.levels[i + 1], mat.c1, mat.c2), out.levels[i]);
  }
  return out;
}

TimeWindow map_levels(const TimeWindow& w,
                      const std::function<VectorField3(const VectorField3&)>& f) {
  TimeWindow out;
  out.dt = w.dt;
  out.t_front = w.t_front;
  for (const auto& lev : w.levels) out.levels.push_back(f(lev));
  return out;
}

double center_residual(const TimeWindow& a, const TimeWindow& b) {
  return l2_norm(subtract(a.center_level(), b.center_level()));
}

struct SeriesBuilder {
  std::vector<ResidualSeries> series;

  void add(const std::string& name, std::size_t level_count) {
    ResidualSeries s;
    s.name = name;
    s.residuals.assign(level_count, 0.0);
    series.push_back(std::move(s));
  }
  void record(const std::string& name, std::size_t level, double value) {
    for (auto& s : series) {
      if (s.name == name) {
        s.residuals[level] = std::max(s.residuals[level], value);
        return;
      }
    }
    throw std::logic_error("SeriesBuilder: unknown series " + name);
  }
  void finish(double exact_floor) {
    for (auto& s : series) {
      s.exact = true;
      for (double r : s.residuals) {
        if (r > exact_floor) s.exact = false;
      }
      s.orders.clear();
      for (std::size_t i = 0; i + 1 < s.residuals.size(); ++i) {
        const double c = s.residuals[i];
        const double f = s.residuals[i + 1];
        s.orders.push_back(f > 0.0 ? std::log2(c / f) : 0.0);
      }
    }
  }
};

}  // namespace

std::vector<ResidualSeries> verify_commutators(const SpaceTimeField& u,
                                               const RefinementSpec& spec) {
  spec.mat.validate();
  SeriesBuilder out;
  const std::size_t nlev = spec.grid_points.size();
  out.add("commute_dt", nlev);
  out.add("commute_dx", nlev);
  out.add("commute_rotation", nlev);
  out.add("commute_scaling", nlev);
  out.add("commute_scaling_dt2", nlev);

  for (std::size_t lev = 0; lev < nlev; ++lev) {
    const Grid g = Grid::make(spec.half_width, spec.grid_points[lev], spec.ghost);
    const double dt = spec.dt0 / std::pow(2.0, static_cast<double>(lev));
    const TimeWindow base = TimeWindow::sample(g, spec.t_center, dt, spec.window_half_width, u);
    const TimeWindow lu = wave_operator(base, spec.mat);

    // d L u = L d u.
    {
      const TimeWindow a = apply_generator(Gen::Dt, lu);
      const TimeWindow b = wave_operator(apply_generator(Gen::Dt, base), spec.mat);
      out.record("commute_dt", lev, center_residual(a, b));
    }
    for (int axis = 0; axis < 3; ++axis) {
      const Gen gax = static_cast<Gen>(static_cast<int>(Gen::Dx1) + axis);
      const TimeWindow a = apply_generator(gax, lu);
      const TimeWindow b = wave_operator(apply_generator(gax, base), spec.mat);
      out.record("commute_dx", lev, center_residual(a, b));
    }
    // Rot L u = L Rot u.
    for (int l = 0; l < 3; ++l) {
      const Gen grot = static_cast<Gen>(static_cast<int>(Gen::Om1) + l);
      const TimeWindow a = apply_generator(grot, lu);
      const TimeWindow b = wave_operator(apply_generator(grot, base), spec.mat);
      out.record("commute_rotation", lev, center_residual(a, b));
    }
    // S L u = L S u - 2 L u.
    {
      const TimeWindow a = apply_generator(Gen::Scale, lu);
      const TimeWindow b = wave_operator(apply_generator(Gen::Scale, base), spec.mat);
      VectorField3 rhs = b.center_level();
      axpy(-2.0, lu.center_level(), rhs);
      out.record("commute_scaling", lev, l2_norm(subtract(a.center_level(), rhs)));
    }
    // S d_t^2 u = d_t^2 S u - 2 d_t^2 u.
    {
      const TimeWindow dtt = second_time_derivative(base);
      const TimeWindow a = apply_generator(Gen::Scale, dtt);
      const TimeWindow b = second_time_derivative(apply_generator(Gen::Scale, base));
      VectorField3 rhs = b.center_level();
      axpy(-2.0, dtt.center_level(), rhs);
      out.record("commute_scaling_dt2", lev, l2_norm(subtract(a.center_level(), rhs)));
    }
  }
  out.finish(spec.exact_floor);
  return out.series;
}

std::vector<ResidualSeries> verify_leibniz_N(const CoefTensor& b, const SpaceTimeField& u,
                                             const SpaceTimeField& v, const RadialBump& rho,
                                             const RefinementSpec& spec) {
  spec.mat.validate();
  SeriesBuilder out;
  const std::size_t nlev = spec.grid_points.size();
  out.add("leibniz_N_dt", nlev);
  out.add("leibniz_N_dx", nlev);
  out.add("leibniz_N_rotation", nlev);
  out.add("leibniz_N_scaling", nlev);
  out.add("leibniz_rho_dt", nlev);
  out.add("leibniz_rho_dx", nlev);
  out.add("leibniz_rho_rotation", nlev);
  out.add("leibniz_rho_scaling", nlev);

  for (std::size_t lev = 0; lev < nlev; ++lev) {
    const Grid g = Grid::make(spec.half_width, spec.grid_points[lev], spec.ghost);
    const double dt = spec.dt0 / std::pow(2.0, static_cast<double>(lev));
    const TimeWindow wu = TimeWindow::sample(g, spec.t_center, dt, spec.window_half_width, u);
    const TimeWindow wv = TimeWindow::sample(g, spec.t_center, dt, spec.window_half_width, v);

    auto n_of = [&](const TimeWindow& a, const TimeWindow& c) {
      TimeWindow outw;
      outw.dt = a.dt;
      outw.t_front = a.t_front;
      for (std::size_t i = 0; i < a.levels.size(); ++i) {
        outw.levels.push_back(apply_N(b, a.levels[i], c.levels[i]));
      }
      return outw;
    };
    // Windows must share level times when combined; temporal generators keep
    // symmetric centers so pairing i-th levels stays aligned after trimming.
    auto trim_to = [](const TimeWindow& a, std::size_t target) {
      TimeWindow outw;
      outw.dt = a.dt;
      const std::size_t drop = (a.levels.size() - target) / 2;
      outw.t_front = a.t_front + outw.dt * static_cast<double>(drop);
      for (std::size_t i = drop; i < drop + target; ++i) outw.levels.push_back(a.levels[i]);
      return outw;
    };

    const TimeWindow nuv = n_of(wu, wv);

    // Temporal rule.
    {
      const TimeWindow lhs = time_derivative(nuv);
      const TimeWindow ut = time_derivative(wu);
      const TimeWindow vt = time_derivative(wv);
      TimeWindow rhs = n_of(ut, trim_to(wv, ut.levels.size()));
      const TimeWindow rhs2 = n_of(trim_to(wu, vt.levels.size()), vt);
      for (std::size_t i = 0; i < rhs.levels.size(); ++i) axpy(1.0, rhs2.levels[i], rhs.levels[i]);
      out.record("leibniz_N_dt", lev, center_residual(lhs, rhs));
    }
    // Spatial rules.
    for (int axis = 0; axis < 3; ++axis) {
      const Gen gax = static_cast<Gen>(static_cast<int>(Gen::Dx1) + axis);
      const TimeWindow lhs = apply_generator(gax, nuv);
      TimeWindow rhs = n_of(apply_generator(gax, wu), wv);
      const TimeWindow rhs2 = n_of(wu, apply_generator(gax, wv));
      for (std::size_t i = 0; i < rhs.levels.size(); ++i) axpy(1.0, rhs2.levels[i], rhs.levels[i]);
      out.record("leibniz_N_dx", lev, center_residual(lhs, rhs));
    }
    // Rotation rules (meaningful when B is rotation-invariant).
    for (int l = 0; l < 3; ++l) {
      const Gen grot = static_cast<Gen>(static_cast<int>(Gen::Om1) + l);
      const TimeWindow lhs = apply_generator(grot, nuv);
      TimeWindow rhs = n_of(apply_generator(grot, wu), wv);
      const TimeWindow rhs2 = n_of(wu, apply_generator(grot, wv));
      for (std::size_t i = 0; i < rhs.levels.size(); ++i) axpy(1.0, rhs2.levels[i], rhs.levels[i]);
      out.record("leibniz_N_rotation", lev, center_residual(lhs, rhs));
    }
    // Scaling rule: S N(u,v) = N(S u, v) + N(u, S v) - 2 N(u,v).
    {
      const TimeWindow lhs = apply_generator(Gen::Scale, nuv);
      const TimeWindow su = apply_generator(Gen::Scale, wu);
      const TimeWindow sv = apply_generator(Gen::Scale, wv);
      TimeWindow rhs = n_of(su, trim_to(wv, su.levels.size()));
      const TimeWindow rhs2 = n_of(trim_to(wu, sv.levels.size()), sv);
      for (std::size_t i = 0; i < rhs.levels.size(); ++i) axpy(1.0, rhs2.levels[i], rhs.levels[i]);
      VectorField3 want = rhs.center_level();
      axpy(-2.0, nuv.center_level(), want);
      out.record("leibniz_N_scaling", lev, l2_norm(subtract(lhs.center_level(), want)));
    }

    // Density rules with w = d_t^2 u.
    ScalarField rho_samples(g);
    rho_samples.fill([&](double x, double y, double z) {
      return rho.value_q(x * x + y * y + z * z);
    });
    const TimeWindow dtt = second_time_derivative(wu);
    auto rho_times = [&](const TimeWindow& a) {
      return map_levels(a, [&](const VectorField3& f) { return multiply(rho_samples, f); });
    };
    const TimeWindow rho_w = rho_times(dtt);
    // d_t(rho w) = rho d_t w: time-independent density, exact stencil identity.
    {
      const TimeWindow lhs = time_derivative(rho_w);
      const TimeWindow rhs = rho_times(time_derivative(dtt));
      out.record("leibniz_rho_dt", lev, center_residual(lhs, rhs));
    }
    // d_a(rho w) = (d_a rho) w + rho d_a w.
    for (int axis = 0; axis < 3; ++axis) {
      const ScalarField drho = partial_derivative(rho_samples, axis + 1);
      const VectorField3 lhs =
          partial_derivative(rho_w.center_level(), axis + 1);
      VectorField3 rhs = multiply(drho, dtt.center_level());
      axpy(1.0, multiply(rho_samples, partial_derivative(dtt.center_level(), axis + 1)), rhs);
      out.record("leibniz_rho_dx", lev, l2_norm(subtract(lhs, rhs)));
    }
    // Rot_l(rho w) = (Om_l rho) w + rho Rot_l w (scalar rotation on rho).
    for (int l = 1; l <= 3; ++l) {
      const VectorField3 lhs = rotation_generator(l, rho_w.center_level());
      VectorField3 rhs = multiply(rotation_generator_scalar(l, rho_samples), dtt.center_level());
      axpy(1.0, multiply(rho_samples, rotation_generator(l, dtt.center_level())), rhs);
      out.record("leibniz_rho_rotation", lev, l2_norm(subtract(lhs, rhs)));
    }
    // S(rho w) = (x.grad rho) w + rho S w.
    {
      const TimeWindow lhs = apply_generator(Gen::Scale, rho_w);
      const TimeWindow sw = apply_generator(Gen::Scale, dtt);
      ScalarField xgrad_rho = radial_scaling_minus_identity_scalar(rho_samples);
      axpy(1.0, rho_samples, xgrad_rho);  // x.grad rho = (r d_r - 1) rho + rho
      VectorField3 rhs = multiply(xgrad_rho, dtt.center_level());
      axpy(1.0, multiply(rho_samples, sw.center_level()), rhs);
      out.record("leibniz_rho_scaling", lev, l2_norm(subtract(lhs.center_level(), rhs)));
    }
  }
  out.finish(spec.exact_floor);
  return out.series;
}

SpaceTimeField standard_test_field(double amplitude, double support_radius) {
  const RadialBump bump{1.0, support_radius};
  return [=](double t, double x1, double x2, double x3) -> std::array<double, 3> {
    const double q = x1 * x1 + x2 * x2 + x3 * x3;
    const double base = bump.value_q(q);
    const double r = support_radius;
    // Low-degree polynomial factors break the rotational symmetry of the
    // amplitude so every generator acts nontrivially.
    const double p1 = 1.0 + 0.4 * x1 / r + 0.2 * x2 * x3 / (r * r);
    const double p2 = 0.8 - 0.3 * x2 / r + 0.25 * x1 * x1 / (r * r);
    const double p3 = 0.6 + 0.5 * x3 / r - 0.15 * x1 * x2 / (r * r);
    return {amplitude * base * p1 * std::cos(1.3 * t + 0.2),
            amplitude * base * p2 * std::cos(0.9 * t - 0.4),
            amplitude * base * p3 * std::sin(1.1 * t + 0.1)};
  };
}

SpaceTimeField companion_test_field(double amplitude, double support_radius) {
  const RadialBump bump{1.0, 0.85 * support_radius};
  return [=](double t, double x1, double x2, double x3) -> std::array<double, 3> {
    const double q = x1 * x1 + x2 * x2 + x3 * x3;
    const double base = bump.value_q(q);
    const double r = support_radius;
    const double p1 = 0.7 - 0.2 * x3 / r + 0.3 * x1 * x2 / (r * r);
    const double p2 = 1.1 + 0.35 * x1 / r - 0.1 * x3 * x3 / (r * r);
    const double p3 = 0.9 - 0.45 * x2 / r + 0.2 * x1 * x3 / (r * r);
    return {amplitude * base * p1 * std::sin(0.7 * t + 0.6),
            amplitude * base * p2 * std::cos(1.7 * t),
            amplitude * base * p3 * std::cos(0.5 * t - 0.3)};
  };
}

SpaceTimeField quadratic_test_field() {
  return [](double t, double x1, double x2, double x3) -> std::array<double, 3> {
    return {0.3 * t * t + 0.2 * x1 * x2 - 0.1 * x3 * x3 + 0.4 * t * x1 + 0.05 * x2,
            -0.2 * t * t + 0.15 * x1 * x3 + 0.25 * x2 * x2 - 0.3 * t * x3 + 0.1,
            0.1 * t * x2 - 0.35 * x1 * x1 + 0.2 * x2 * x3 + 0.05 * t * t - 0.2 * x1};
  };
}

}  // namespace ewlab

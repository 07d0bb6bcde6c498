#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ewlab/analysis.hpp"
#include "ewlab/experiments.hpp"
#include "ewlab/field_ops.hpp"
#include "ewlab/grid.hpp"
#include "ewlab/solver.hpp"
#include "ewlab/tensor.hpp"

namespace py = pybind11;
using namespace ewlab;

namespace {

// Fields cross the boundary as (3, n, n, n) / (n, n, n) arrays over the
// allocated nodes (interior plus ghosts), matching the native layout.
py::array_t<double> scalar_to_numpy(const ScalarField& f) {
  const int a = f.grid().alloc_per_axis();
  py::array_t<double> out({a, a, a});
  std::copy(f.data(), f.data() + f.size(), out.mutable_data());
  return out;
}

py::array_t<double> vector_to_numpy(const VectorField3& u) {
  const int a = u.grid().alloc_per_axis();
  py::array_t<double> out({3, a, a, a});
  for (int c = 0; c < 3; ++c) {
    std::copy(u.data(c), u.data(c) + u.size_per_comp(), out.mutable_data() + c * u.size_per_comp());
  }
  return out;
}

VectorField3 vector_from_numpy(const Grid& g, const py::array_t<double>& arr) {
  const auto buf = arr.request();
  const std::size_t a = static_cast<std::size_t>(g.alloc_per_axis());
  if (buf.ndim != 4 || buf.shape[0] != 3 || static_cast<std::size_t>(buf.shape[1]) != a ||
      static_cast<std::size_t>(buf.shape[2]) != a || static_cast<std::size_t>(buf.shape[3]) != a) {
    throw std::invalid_argument("expected array of shape (3, n+2g, n+2g, n+2g)");
  }
  VectorField3 out(g);
  const auto view = arr.unchecked<4>();
  for (int c = 0; c < 3; ++c) {
    double* dst = out.data(c);
    std::size_t p = 0;
    for (std::size_t i = 0; i < a; ++i)
      for (std::size_t j = 0; j < a; ++j)
        for (std::size_t k = 0; k < a; ++k, ++p)
          dst[p] = view(c, static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(j),
                        static_cast<py::ssize_t>(k));
  }
  ensure_finite(out, "vector_from_numpy");
  return out;
}

std::vector<double> tensor_to_list(const CoefTensor& b) {
  return std::vector<double>(b.data(), b.data() + CoefTensor::kSize);
}

CoefTensor tensor_from_list(const std::vector<double>& entries) {
  if (entries.size() != CoefTensor::kSize) {
    throw std::invalid_argument("expected 729 tensor entries");
  }
  CoefTensor b;
  std::copy(entries.begin(), entries.end(), b.data());
  return b;
}

py::dict result_to_dict(const ExperimentResult& res) {
  py::dict d;
  d["experiment"] = res.experiment;
  d["pass"] = res.pass;
  py::list crit;
  for (const auto& c : res.criteria) {
    py::dict cd;
    cd["name"] = c.name;
    cd["value"] = c.value;
    cd["threshold"] = c.threshold;
    cd["relation"] = c.relation;
    cd["pass"] = c.pass;
    crit.append(cd);
  }
  d["criteria"] = crit;
  d["details_json"] = res.details_json;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Numerical laboratory for inhomogeneous compressible elastic waves";

  py::class_<Grid>(m, "Grid")
      .def(py::init([](double half_width, int points, int ghost) {
             return Grid::make(half_width, points, ghost);
           }),
           py::arg("half_width"), py::arg("points"), py::arg("ghost") = 2)
      .def_readonly("half_width", &Grid::half_width)
      .def_readonly("points", &Grid::points)
      .def_readonly("ghost", &Grid::ghost)
      .def_readonly("spacing", &Grid::spacing)
      .def_property_readonly("alloc_per_axis", &Grid::alloc_per_axis)
      .def("coord", &Grid::coord);

  // Field operations on numpy arrays.
  m.def("sample_vector_field",
        [](const Grid& g, const std::function<std::array<double, 3>(double, double, double)>& f) {
          VectorField3 u(g);
          u.fill(f);
          return vector_to_numpy(u);
        },
        py::arg("grid"), py::arg("func"), "Sample f(x1,x2,x3) -> (u1,u2,u3) on all nodes");
  m.def("partial_derivative",
        [](const Grid& g, const py::array_t<double>& u, int axis) {
          return vector_to_numpy(partial_derivative(vector_from_numpy(g, u), axis));
        },
        py::arg("grid"), py::arg("u"), py::arg("axis"));
  m.def("divergence",
        [](const Grid& g, const py::array_t<double>& u) {
          return scalar_to_numpy(divergence(vector_from_numpy(g, u)));
        },
        py::arg("grid"), py::arg("u"));
  m.def("elastic_operator",
        [](const Grid& g, const py::array_t<double>& u, double c1, double c2) {
          return vector_to_numpy(elastic_operator(vector_from_numpy(g, u), c1, c2));
        },
        py::arg("grid"), py::arg("u"), py::arg("c1"), py::arg("c2"));
  m.def("l2_norm",
        [](const Grid& g, const py::array_t<double>& u) { return l2_norm(vector_from_numpy(g, u)); },
        py::arg("grid"), py::arg("u"));
  m.def("sup_norm",
        [](const Grid& g, const py::array_t<double>& u) { return sup_norm(vector_from_numpy(g, u)); },
        py::arg("grid"), py::arg("u"));
  m.def("project_radial",
        [](const Grid& g, const py::array_t<double>& u) {
          return vector_to_numpy(project(Projection::Radial, vector_from_numpy(g, u)));
        },
        py::arg("grid"), py::arg("u"));

  // Tensor algebra.
  m.def("symmetrize",
        [](const std::vector<double>& b) { return tensor_to_list(symmetrize(tensor_from_list(b))); });
  m.def("symmetry_deficit",
        [](const std::vector<double>& b) { return symmetry_deficit(tensor_from_list(b)); });
  m.def("null_deficits",
        [](const std::vector<double>& b, int directions, int pairs_per_direction) {
          const SphereSampler s = SphereSampler::make(directions, pairs_per_direction);
          const CoefTensor t = tensor_from_list(b);
          return py::make_tuple(radial_null_deficit(t, s), transverse_null_deficit(t, s));
        },
        py::arg("entries"), py::arg("directions") = 480, py::arg("pairs_per_direction") = 2);
  m.def("make_null_tensor",
        [](std::uint64_t seed) { return tensor_to_list(make_null_tensor(seed)); }, py::arg("seed"));
  m.def("random_symmetric_tensor",
        [](std::uint64_t seed, double scale) {
          return tensor_to_list(random_symmetric_tensor(seed, scale));
        },
        py::arg("seed"), py::arg("scale") = 1.0);
  m.def("isotropic_null_tensor", []() { return tensor_to_list(isotropic_null_tensor()); });
  m.def("tensor_to_json", [](const std::vector<double>& b) { return tensor_from_list(b).to_json(); });
  m.def("tensor_from_json",
        [](const std::string& text) { return tensor_to_list(CoefTensor::from_json(text)); });

  // Experiments.
  m.def("default_config_json", []() { return SimConfig().to_json(); });
  m.def("check_tensor",
        [](bool want_null, std::uint64_t seed, const std::string& out_dir) {
          return result_to_dict(check_tensor_experiment(want_null, seed, out_dir));
        },
        py::arg("want_null") = true, py::arg("seed") = 7, py::arg("out_dir") = "out");
  m.def("verify_commutators",
        [](int levels, const std::string& out_dir) {
          return result_to_dict(verify_commutators_experiment(levels, out_dir));
        },
        py::arg("levels") = 3, py::arg("out_dir") = "out");
  m.def("convergence",
        [](int levels, const std::string& out_dir) {
          return result_to_dict(convergence_experiment(levels, out_dir));
        },
        py::arg("levels") = 3, py::arg("out_dir") = "out");
  m.def("simulate",
        [](const std::string& config_json, const std::string& out_dir) {
          const SimConfig cfg =
              config_json.empty() ? SimConfig{} : SimConfig::from_json(config_json);
          return result_to_dict(simulate_experiment(cfg, out_dir));
        },
        py::arg("config_json") = "", py::arg("out_dir") = "out");
  m.def("theorem1_proxy",
        [](const std::string& config_json, const std::string& out_dir) {
          const SimConfig cfg =
              config_json.empty() ? SimConfig{} : SimConfig::from_json(config_json);
          return result_to_dict(theorem1_experiment(cfg, out_dir));
        },
        py::arg("config_json") = "", py::arg("out_dir") = "out");
  m.def("theorem2_proxy",
        [](const std::string& config_json, const std::string& out_dir) {
          const SimConfig cfg =
              config_json.empty() ? SimConfig{} : SimConfig::from_json(config_json);
          return result_to_dict(theorem2_experiment(cfg, out_dir));
        },
        py::arg("config_json") = "", py::arg("out_dir") = "out");
}

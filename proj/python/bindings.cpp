#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ndjac/charts.hpp"
#include "ndjac/error.hpp"
#include "ndjac/io.hpp"
#include "ndjac/measures.hpp"
#include "ndjac/random.hpp"
#include "ndjac/verify.hpp"

namespace py = pybind11;
using namespace ndjac;

namespace {

// Matrices cross the boundary as float arrays of shape (rows, cols, beta).
py::array_t<double> to_array(const Mat& a) {
  py::array_t<double> out({a.rows(), a.cols(), static_cast<std::size_t>(a.beta())});
  auto v = out.mutable_unchecked<3>();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const auto e = a.entry(i, j);
      for (int k = 0; k < a.beta(); ++k) v(i, j, k) = e[static_cast<std::size_t>(k)];
    }
  }
  return out;
}

Mat from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
  if (arr.ndim() == 2) {
    auto v = arr.unchecked<2>();
    Mat a(Algebra::Real, v.shape(0), v.shape(1));
    for (py::ssize_t i = 0; i < v.shape(0); ++i) {
      for (py::ssize_t j = 0; j < v.shape(1); ++j) a.entry(i, j)[0] = v(i, j);
    }
    return a;
  }
  if (arr.ndim() != 3) throw Error(Errc::ShapeMismatch, "expected an array of shape (rows, cols) or (rows, cols, beta)");
  auto v = arr.unchecked<3>();
  Mat a(algebra_from_beta(static_cast<int>(v.shape(2))), v.shape(0), v.shape(1));
  for (py::ssize_t i = 0; i < v.shape(0); ++i) {
    for (py::ssize_t j = 0; j < v.shape(1); ++j) {
      for (py::ssize_t k = 0; k < v.shape(2); ++k) a.entry(i, j)[k] = v(i, j, k);
    }
  }
  return a;
}

py::object to_python(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

TaskSpec task_from(const std::string& theorem, const py::kwargs& kw) {
  TaskSpec t;
  t.theorem = factor_kind_from_string(theorem);
  for (auto [key, value] : kw) {
    const std::string k = py::str(key);
    if (k == "engine") t.engine = engine_from_string(value.cast<std::string>());
    else if (k == "demo") t.demo = value.cast<bool>();
    else if (k == "beta") t.beta = value.cast<int>();
    else if (k == "m") t.m = value.cast<std::size_t>();
    else if (k == "n") t.n = value.cast<std::size_t>();
    else if (k == "q") t.q = value.cast<std::size_t>();
    else if (k == "b_source") t.b_source = b_source_from_string(value.cast<std::string>());
    else if (k == "b_matrix") {
      t.b_matrix = from_array(value.cast<py::array_t<double, py::array::c_style | py::array::forcecast>>());
      t.b_source = BSource::File;
    } else if (k == "trials") t.trials = value.cast<std::size_t>();
    else if (k == "points") t.points = value.cast<std::size_t>();
    else if (k == "functions") t.functions = value.cast<std::size_t>();
    else if (k == "step") t.step = value.cast<double>();
    else if (k == "lambda_lo") t.lambda_lo = value.cast<double>();
    else if (k == "lambda_hi") t.lambda_hi = value.cast<double>();
    else if (k == "gap") t.gap = value.cast<double>();
    else if (k == "rtol") t.rtol = value.cast<double>();
    else if (k == "atol") t.atol = value.cast<double>();
    else if (k == "ztol") t.ztol = value.cast<double>();
    else if (k == "cv_tol") t.cv_tol = value.cast<double>();
    else if (k == "seed") t.seed = value.cast<std::uint64_t>();
    else throw Error(Errc::InvalidInput, "unknown task field '" + k + "'");
  }
  return t;
}

}  // namespace

PYBIND11_MODULE(_ndjac, m) {
  m.doc() = "Jacobians of matrix factorisations over the real normed division algebras";
  m.attr("__version__") = kVersion;
  py::register_exception<Error>(m, "Error");

  m.def("tau", &tau, py::arg("beta"), py::arg("q"));
  m.def("mv_gamma_log", &mv_gamma_log, py::arg("m"), py::arg("beta"), py::arg("a"));
  m.def("stiefel_volume_log", &stiefel_volume_log, py::arg("m"), py::arg("n"), py::arg("beta"));
  m.def(
      "factor_log",
      [](const std::string& kind, int beta, int m, int n, int q, std::vector<double> d, std::vector<double> lambda,
         std::vector<double> delta, std::vector<double> t_diag, std::optional<double> det_b,
         std::optional<double> det_t1, std::optional<double> det_l1, std::optional<double> det_s11) {
        const FactorInput in{beta, m, n, q, d, lambda, delta, t_diag, det_b, det_t1, det_l1, det_s11};
        return factor_log(factor_kind_from_string(kind), in);
      },
      py::arg("kind"), py::kw_only(), py::arg("beta") = 1, py::arg("m") = 0, py::arg("n") = 0, py::arg("q") = 0,
      py::arg("d") = std::vector<double>{}, py::arg("lambda_") = std::vector<double>{},
      py::arg("delta") = std::vector<double>{}, py::arg("t_diag") = std::vector<double>{},
      py::arg("det_b") = py::none(), py::arg("det_t1") = py::none(), py::arg("det_l1") = py::none(),
      py::arg("det_s11") = py::none());

  m.def("sdet", [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a) { return sdet(from_array(a)); });
  m.def(
      "sample_stiefel",
      [](std::size_t n, std::size_t q, int beta, std::uint64_t seed) {
        Rng rng = substream(seed, stable_hash("sample-stiefel"), 0);
        return to_array(sample_stiefel_uniform(n, q, algebra_from_beta(beta), rng));
      },
      py::arg("n"), py::arg("q"), py::arg("beta") = 1, py::arg("seed") = 0);
  m.def(
      "hausdorff_density_psd",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& s, std::size_t q, double step) {
        const Mat a = from_array(s);
        return hausdorff_density(extract_psd(a, q, choose_pivot_psd(a, q)), step);
      },
      py::arg("s"), py::arg("q"), py::arg("step") = 1e-5);
  m.def(
      "verify",
      [](const std::string& theorem, std::size_t jobs, const py::kwargs& kw) {
        const TaskSpec t = task_from(theorem, kw);
        Report r;
        {
          py::gil_scoped_release release;
          r = run_task(t, jobs);
        }
        return to_python(r.to_json());
      },
      py::arg("theorem"), py::kw_only(), py::arg("jobs") = 1);
  m.def(
      "verify_all",
      [](const std::string& preset, std::uint64_t seed, std::size_t jobs) {
        SuiteResult s;
        {
          py::gil_scoped_release release;
          s = verify_all(preset, seed, jobs);
        }
        return to_python(s.json);
      },
      py::arg("preset") = "desk", py::arg("seed") = 42, py::arg("jobs") = 1);
}

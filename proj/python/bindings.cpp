#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "bmit/baselines.hpp"
#include "bmit/bayes.hpp"
#include "bmit/multires.hpp"
#include "bmit/report.hpp"
#include "bmit/synth.hpp"

namespace py = pybind11;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using CountArray = py::array_t<std::int64_t, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const DoubleArray& a) {
  if (a.ndim() != 1) throw std::invalid_argument("expected a one-dimensional array");
  return {a.data(), a.data() + a.size()};
}

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::object to_python(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

bmit::ContingencyTable table_from(const CountArray& counts) {
  if (counts.ndim() == 2) {
    return bmit::ContingencyTable::from_counts(
        static_cast<std::size_t>(counts.shape(0)), static_cast<std::size_t>(counts.shape(1)),
        {counts.data(), counts.data() + counts.size()});
  }
  if (counts.ndim() == 3) {
    // (slices, rows, cols) maps directly onto the slice-major layout.
    return bmit::ContingencyTable::from_counts(
        static_cast<std::size_t>(counts.shape(1)), static_cast<std::size_t>(counts.shape(2)),
        {counts.data(), counts.data() + counts.size()}, {static_cast<std::size_t>(counts.shape(0))});
  }
  throw std::invalid_argument("expected a 2-D (rows, cols) or 3-D (slices, rows, cols) table");
}

py::dict run_multires(const DoubleArray& x, const DoubleArray& y, std::vector<DoubleArray> cond,
                      double prior, double hyper, std::size_t window, double std_threshold,
                      std::optional<std::size_t> max_iterations, std::size_t cond_cap,
                      bool cond_in_pt, std::size_t threads) {
  std::vector<bmit::Column> cols;
  cols.push_back({"x", bmit::ColumnKind::continuous(), to_vector(x)});
  cols.push_back({"y", bmit::ColumnKind::continuous(), to_vector(y)});
  bmit::AxisVars vars{"x", "y", {}};
  for (std::size_t k = 0; k < cond.size(); ++k) {
    const std::string name = "c" + std::to_string(k);
    cols.push_back({name, bmit::ColumnKind::continuous(), to_vector(cond[k])});
    vars.cond.push_back(name);
  }
  const bmit::Dataset data(std::move(cols));

  bmit::TestConfig cfg;
  cfg.prior_independence = prior;
  cfg.hyper = hyper;
  cfg.window = window;
  cfg.std_threshold = std_threshold;
  cfg.max_iterations = max_iterations;
  cfg.cond_candidate_cap = cond_cap;
  cfg.cond_in_pt = cond_in_pt;
  cfg.threads = threads;

  bmit::IndependenceResult result;
  {
    py::gil_scoped_release release;
    result = bmit::multires_test(data, vars, cfg);
  }
  py::list trace;
  for (const auto& rec : result.trace) trace.append(to_python(bmit::trace_record_json(rec, vars)));
  py::dict out;
  out["posterior_independence"] = result.posterior_independence;
  out["p_max"] = result.p_max;
  out["t_star"] = result.t_star;
  out["independent"] = result.independent;
  out["grid"] = to_python(bmit::boundaries_json(result.boundaries, vars));
  out["trace"] = trace;
  return out;
}

}  // namespace

PYBIND11_MODULE(_bmit, m) {
  m.doc() = "Bayesian multiresolution independence test";

  py::register_exception<bmit::DataError>(m, "DataError", PyExc_ValueError);

  m.def(
      "log_upsilon",
      [](std::vector<std::int64_t> counts, std::vector<double> hyper) {
        return bmit::log_upsilon(counts, hyper);
      },
      py::arg("counts"), py::arg("hyper"),
      "Log Dirichlet-multinomial probability of an ordered sample with the given cell counts.");

  m.def(
      "polya_urn_loglik",
      [](std::vector<std::size_t> sequence, std::vector<double> hyper) {
        return bmit::polya_urn_loglik(sequence, hyper);
      },
      py::arg("sequence"), py::arg("hyper"));

  m.def(
      "posterior_independence_fixed",
      [](const CountArray& table, double prior, double hyper) {
        const auto t = table_from(table);
        return bmit::posterior_independence_fixed(
            t, bmit::DirichletPrior::uniform(t.rows(), t.cols(), hyper), prior);
      },
      py::arg("table"), py::arg("prior") = 0.5, py::arg("hyper") = 1.0);

  m.def(
      "posterior_conditional_fixed",
      [](const CountArray& table, double prior, double hyper) {
        const auto t = table_from(table);
        return bmit::posterior_conditional_fixed(
            t, bmit::DirichletPrior::uniform(t.rows(), t.cols(), hyper), prior);
      },
      py::arg("table"), py::arg("prior") = 0.5, py::arg("hyper") = 1.0,
      "Product over slices of a (slices, rows, cols) table.");

  m.def(
      "spearman",
      [](const DoubleArray& x, const DoubleArray& y) { return bmit::spearman(to_vector(x), to_vector(y)); },
      py::arg("x"), py::arg("y"));
  m.def(
      "kendall_tau",
      [](const DoubleArray& x, const DoubleArray& y) { return bmit::kendall_tau(to_vector(x), to_vector(y)); },
      py::arg("x"), py::arg("y"));

  m.def("multires_test", &run_multires, py::arg("x"), py::arg("y"),
        py::arg("cond") = std::vector<DoubleArray>{}, py::arg("prior") = 0.5, py::arg("hyper") = 1.0,
        py::arg("window") = 3, py::arg("std_threshold") = 1e-3, py::arg("max_iterations") = py::none(),
        py::arg("cond_cap") = 256, py::arg("cond_in_pt") = true, py::arg("threads") = 0,
        "Greedy multiresolution test; returns a dict with the posterior, decision, grid and trace.");

  m.def(
      "synth",
      [](const std::string& family, std::size_t n, std::uint64_t seed, double noise) {
        bmit::SynthSpec spec{bmit::parse_family(family), n, seed, noise};
        const auto data = bmit::generate(spec);
        const auto& xs = data.column("x").values;
        const auto& ys = data.column("y").values;
        return py::make_tuple(to_array(xs), to_array(ys));
      },
      py::arg("family"), py::arg("n"), py::arg("seed") = 0, py::arg("noise") = 0.1);
}

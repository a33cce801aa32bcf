#include "pbf/curves.hpp"
#include "pbf/errors.hpp"
#include "pbf/harness.hpp"
#include "pbf/permute.hpp"
#include "pbf/spectrum.hpp"
#include "pbf/statistic.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace pbf;

namespace {

std::optional<GridSpec> make_grid(const std::optional<std::vector<double>>& points,
                                  const std::string& rule) {
  if (!points) return std::nullopt;
  return GridSpec(*points, parse_quadrature(rule));
}

GramMatrix as_gram(const Eigen::MatrixXd& values) {
  if (values.rows() != values.cols()) throw InvalidArgument("Gram matrix must be square");
  return GramMatrix{values};
}

Labels as_labels(const std::vector<int>& labels) {
  Labels out;
  out.reserve(labels.size());
  for (int v : labels) {
    if (v != 0 && v != 1) throw InvalidArgument("labels must be 0 or 1");
    out.push_back(static_cast<std::uint8_t>(v));
  }
  return out;
}

py::dict result_dict(const TestResult& r) {
  py::dict d;
  d["zeta_hat"] = r.zeta_hat;
  d["scaled"] = r.scaled;
  d["p_value"] = r.p_value;
  d["B"] = r.b_used;
  d["mode"] = std::string(to_string(r.mode));
  d["phi"] = std::string(to_string(r.phi));
  d["n"] = r.n;
  d["m"] = r.m;
  d["seed"] = r.seed;
  if (r.replicate_stats) d["replicate_stats"] = *r.replicate_stats;
  return d;
}

ScenarioConfig make_config(const py::dict& settings) {
  ScenarioConfig c;
  for (const auto& [key, value] : settings) {
    const std::string k = py::str(key);
    std::string v;
    if (py::isinstance<py::bool_>(value))
      v = value.cast<bool>() ? "true" : "false";
    else if (py::isinstance<py::list>(value) || py::isinstance<py::tuple>(value)) {
      for (const auto& item : value) v += (v.empty() ? "" : ",") + std::string(py::str(item));
    } else {
      v = py::str(value);
    }
    set_config_value(c, k, v);
  }
  validate(c);
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Projected Baringhaus-Franz two-sample test for functional data";

  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def(
      "gram",
      [](const Eigen::MatrixXd& rows, const std::string& repr,
         const std::optional<std::vector<double>>& grid, const std::string& rule) {
        const Representation kind = parse_representation(repr);
        std::optional<GridSpec> spec = make_grid(grid, rule);
        if (kind == Representation::Grid && !spec)
          spec = GridSpec::equispaced(static_cast<std::size_t>(rows.cols()), 0.0, 1.0,
                                      parse_quadrature(rule));
        return gram(rows, kind, spec ? &*spec : nullptr).values;
      },
      py::arg("rows"), py::arg("repr") = "grid", py::arg("grid") = py::none(),
      py::arg("rule") = "trapezoid", "Pairwise inner products of the rows.");

  m.def(
      "pbf_statistic",
      [](const Eigen::MatrixXd& g, const std::vector<int>& labels, const std::string& phi) {
        const StatisticValue v = pbf_statistic(as_gram(g), as_labels(labels), parse_phi(phi));
        return py::make_tuple(v.zeta_hat, v.scaled);
      },
      py::arg("gram"), py::arg("labels"), py::arg("phi") = "l2",
      "Returns (zeta_hat, scaled) from a Gram matrix and 0/1 labels.");

  m.def(
      "pbf_statistic_oracle",
      [](const Eigen::MatrixXd& g, const std::vector<int>& labels, const std::string& phi) {
        return pbf_statistic_oracle(as_gram(g), as_labels(labels), parse_phi(phi));
      },
      py::arg("gram"), py::arg("labels"), py::arg("phi") = "l2");

  m.def(
      "permutation_test",
      [](const Eigen::MatrixXd& g, const std::vector<int>& labels, const std::string& phi,
         std::size_t b, std::uint64_t seed, unsigned threads, bool keep_replicates) {
        PermutationOptions opts;
        opts.threads = threads;
        opts.keep_replicates = keep_replicates;
        const GramMatrix gm = as_gram(g);
        const Labels l = as_labels(labels);
        TestResult r;
        {
          py::gil_scoped_release release;
          r = permutation_test(gm, l, parse_phi(phi), b, seed, opts);
        }
        return result_dict(r);
      },
      py::arg("gram"), py::arg("labels"), py::arg("phi") = "l2", py::arg("B") = 500,
      py::arg("seed") = 1, py::arg("threads") = 1, py::arg("keep_replicates") = false);

  m.def(
      "spectrum_estimate",
      [](const Eigen::MatrixXd& g, const std::string& phi, double lambda_ratio) {
        return spectrum_estimate(as_gram(g), parse_phi(phi), lambda_ratio).eigenvalues;
      },
      py::arg("gram"), py::arg("phi") = "l2", py::arg("lambda_ratio") = 0.5,
      "Nonincreasing eigenvalues of the estimated limit kernel.");

  m.def(
      "sample_limit_law",
      [](const std::vector<double>& eigenvalues, std::size_t draws, std::uint64_t seed,
         const std::optional<std::vector<double>>& shift) {
        KernelSpectrum spec;
        spec.eigenvalues = eigenvalues;
        return sample_limit_law(spec, draws, seed, shift);
      },
      py::arg("eigenvalues"), py::arg("draws"), py::arg("seed") = 1, py::arg("shift") = py::none());

  m.def(
      "draw_scenario",
      [](const py::dict& settings, std::size_t rep) {
        const FunctionalSample s = draw_scenario(make_config(settings), rep);
        std::vector<int> labels(s.labels().begin(), s.labels().end());
        py::object grid = py::none();
        if (s.grid()) grid = py::cast(s.grid()->points());
        return py::make_tuple(s.data(), labels, std::string(to_string(s.kind())), grid);
      },
      py::arg("settings"), py::arg("rep") = 0,
      "Returns (rows, labels, repr, grid) for one replication of a scenario.");

  m.def(
      "run_power",
      [](const py::dict& settings) {
        const ScenarioConfig c = make_config(settings);
        PowerEstimate est;
        {
          py::gil_scoped_release release;
          est = run_power(c);
        }
        py::dict out;
        for (const PhiPower& p : est.per_phi) {
          py::dict row;
          row["rejections"] = p.rejections;
          row["rate"] = p.rate;
          row["stderr"] = p.stderr_;
          out[py::str(std::string(to_string(p.phi)))] = row;
        }
        return out;
      },
      py::arg("settings"), "Rejection rates per phi for a simulation scenario.");
}

#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "frontier_rd/cli.hpp"
#include "frontier_rd/diagnostics.hpp"
#include "frontier_rd/error.hpp"
#include "frontier_rd/kv_config.hpp"
#include "frontier_rd/rd_design.hpp"
#include "frontier_rd/report.hpp"
#include "frontier_rd/settlement_data.hpp"
#include "frontier_rd/synthetic_dgp.hpp"

namespace py = pybind11;
using namespace frontier_rd;

namespace {

linreg::Problem make_problem(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                             const std::vector<std::string>& names,
                             const std::vector<long long>& cluster,
                             const std::optional<std::vector<long long>>& fe) {
  linreg::Problem p;
  p.outcome = y;
  p.controls = x;
  p.control_names = names;
  if (p.control_names.empty()) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) p.control_names.push_back("x" + std::to_string(j + 1));
  }
  if (static_cast<Eigen::Index>(p.control_names.size()) != x.cols()) {
    throw InputError("names must match the number of columns");
  }
  if (static_cast<Eigen::Index>(cluster.size()) != y.size()) throw InputError("cluster length differs from y");
  p.cluster = linreg::GroupIndex::from_codes(cluster);
  if (fe) {
    if (static_cast<Eigen::Index>(fe->size()) != y.size()) throw InputError("fe length differs from y");
    p.fixed_effect = linreg::GroupIndex::from_codes(*fe);
  }
  return p;
}

std::string fit_to_json(const linreg::FitResult& fit) {
  auto j = report::fit_json(fit);
  report::Json v = report::Json::array();
  for (Eigen::Index r = 0; r < fit.vcov.rows(); ++r) {
    report::Json row = report::Json::array();
    for (Eigen::Index c = 0; c < fit.vcov.cols(); ++c) row.push_back(fit.vcov(r, c));
    v.push_back(std::move(row));
  }
  j["vcov"] = std::move(v);
  return j.dump();
}

dgp::DgpParams params_from_text(const std::string& text) {
  return dgp::DgpParams::from_config(KeyValueConfig::parse_string(text, "<python>"));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multi-threshold fuzzy regression discontinuity core";
  m.attr("__version__") = std::string(cli::kVersion);
  py::register_exception<Error>(m, "FrontierError", PyExc_RuntimeError);

  m.def("normalize", [](double population, double density, double nonag) {
    const auto r = design::normalize(population, density, nonag, design::DesignConfig{});
    return std::make_tuple(r.r_p, r.r_d, r.r_n);
  }, py::arg("population"), py::arg("density"), py::arg("nonag_share"));

  m.def("frontier_distance", [](double r_p, double r_d, double r_n, double tau) {
    return design::frontier_distance(r_p, r_d, r_n, tau);
  }, py::arg("r_p"), py::arg("r_d"), py::arg("r_n"), py::arg("tau") = 0.05);

  m.def("_ols", [](const Eigen::VectorXd& y, const Eigen::MatrixXd& x, const std::vector<std::string>& names,
                   const std::vector<long long>& cluster, const std::optional<std::vector<long long>>& fe) {
    return fit_to_json(linreg::ols(make_problem(y, x, names, cluster, fe)));
  });

  m.def("_tsls", [](const Eigen::VectorXd& y, const Eigen::VectorXd& d, const Eigen::VectorXd& z,
                    const Eigen::MatrixXd& x, const std::vector<std::string>& names,
                    const std::vector<long long>& cluster, const std::optional<std::vector<long long>>& fe) {
    auto p = make_problem(y, x, names, cluster, fe);
    p.endogenous_name = "d";
    p.endogenous = d;
    p.instrument_name = "z";
    p.instrument = z;
    const auto fit = linreg::tsls(p);
    return std::make_pair(fit_to_json(fit), linreg::partial_r2(p));
  });

  m.def("_mccrary", [](const std::vector<double>& running, double cutoff, bool jackknife) {
    diag::DensityTestOptions o;
    if (jackknife) o.variance = diag::DensityVariance::jackknife;
    return report::density_json("x", diag::mccrary_test(running, cutoff, o), true).dump();
  });

  m.def("_binned_scatter", [](const std::vector<double>& x, const std::vector<double>& y, int n_bins,
                              int fit_degree) {
    std::ostringstream out;
    report::write_binned_csv(diag::binned_scatter(x, y, n_bins, fit_degree), out);
    return out.str();
  });

  m.def("_generate_csv", [](const std::string& config_text) {
    std::ostringstream out;
    data::write_snapshot(dgp::generate(params_from_text(config_text)), out);
    return out.str();
  });

  m.def("_replicate", [](const std::string& config_text, int reps, const std::string& estimator,
                         const std::string& outcome, int threads, bool records) {
    dgp::EstimatorSpec spec;
    spec.kind = dgp::parse_estimator_kind(estimator);
    spec.outcome = outcome;
    py::gil_scoped_release release;
    return report::monte_carlo_json(dgp::replicate(params_from_text(config_text), reps, spec, threads),
                                    records)
        .dump();
  });

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code;
    {
      py::gil_scoped_release release;
      code = cli::run(args, out, err);
    }
    return std::make_tuple(code, out.str(), err.str());
  }, py::arg("args"), "Runs the frontier-rd command line; returns (exit_code, stdout, stderr).");
}

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "gaussex/asymptotics.hpp"
#include "gaussex/config.hpp"
#include "gaussex/constants.hpp"
#include "gaussex/error.hpp"
#include "gaussex/field_models.hpp"
#include "gaussex/harness.hpp"
#include "gaussex/records.hpp"
#include "gaussex/sampler.hpp"

namespace py = pybind11;
using namespace gaussex;

namespace {

py::object to_python(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

Exec exec_for(unsigned threads) { return Exec{threads, 256}; }

GridSpec interval_grid(double lo, double hi, double mesh) { return GridSpec::interval(lo, hi, mesh); }

}  // namespace

PYBIND11_MODULE(_gaussex, m) {
  m.doc() = "Gaussian extremes: covariance kernels, exact sampling, Pickands-type constants and tail asymptotics";
  m.attr("__version__") = software_version();

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<UsageError>(m, "UsageError", base.ptr());
  py::register_exception<ModelError>(m, "ModelError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<NotPositiveDefinite>(m, "NotPositiveDefinite", base.ptr());

  m.def("fbm_covariance", &fbm_covariance, py::arg("alpha"), py::arg("s"), py::arg("t"));
  m.def("subfbm_covariance", &subfbm_covariance, py::arg("alpha"), py::arg("s"), py::arg("t"));
  m.def("psi", &psi, py::arg("u"), "standard normal survival function");

  m.def(
      "covariance_matrix",
      [](const std::string& kernel, double alpha, double lo, double hi, double mesh) {
        return build_covariance_matrix(self_similar_kernel(kernel, alpha), interval_grid(lo, hi, mesh));
      },
      py::arg("kernel"), py::arg("alpha"), py::arg("lo"), py::arg("hi"), py::arg("mesh"));

  m.def(
      "sample_paths",
      [](const std::string& kernel, double alpha, double lo, double hi, double mesh, std::size_t n_reps,
         std::uint64_t seed, unsigned threads) {
        const auto batch = sample_paths(self_similar_kernel(kernel, alpha), interval_grid(lo, hi, mesh), n_reps, seed,
                                        exec_for(threads));
        return Eigen::MatrixXd(batch.values);
      },
      py::arg("kernel"), py::arg("alpha"), py::arg("lo"), py::arg("hi"), py::arg("mesh"), py::arg("n_reps"),
      py::arg("seed"), py::arg("threads") = 1, "n_reps x points matrix of paths on lo, lo + mesh, ..., hi");

  m.def(
      "pickands",
      [](double alpha, double lambda, double mesh, std::size_t n_reps, std::uint64_t seed, bool extrapolated,
         unsigned threads) {
        return to_python(to_json(pickands_estimate(alpha, lambda, mesh, n_reps, seed, extrapolated, exec_for(threads))));
      },
      py::arg("alpha"), py::arg("lam"), py::arg("mesh"), py::arg("n_reps"), py::arg("seed"),
      py::arg("extrapolated") = false, py::arg("threads") = 1);

  m.def(
      "piterbarg",
      [](double alpha, double b, double horizon, double mesh, std::size_t n_reps, std::uint64_t seed,
         unsigned threads) {
        return to_python(to_json(piterbarg_estimate(alpha, b, horizon, mesh, n_reps, seed, exec_for(threads))));
      },
      py::arg("alpha"), py::arg("b"), py::arg("horizon"), py::arg("mesh"), py::arg("n_reps"), py::arg("seed"),
      py::arg("threads") = 1);

  m.def(
      "h_w",
      [](std::size_t n, std::vector<double> weights, double lambda, double mesh, std::size_t n_reps,
         std::uint64_t seed, unsigned threads) {
        const PerfTableSpec spec(n, 1.0, std::move(weights));
        return to_python(to_json(hw_estimate(spec, lambda, mesh, n_reps, seed, exec_for(threads))));
      },
      py::arg("n"), py::arg("weights"), py::arg("lam"), py::arg("mesh"), py::arg("n_reps"), py::arg("seed"),
      py::arg("threads") = 1);

  m.def(
      "known_constant",
      [](const std::string& kind, double alpha, double b) {
        return lookup_known(constant_kind_from_string(kind), alpha, b);
      },
      py::arg("kind"), py::arg("alpha"), py::arg("b") = 0.0);

  m.def(
      "perf_formula",
      [](std::size_t n, double alpha, std::vector<double> weights) {
        return to_python(to_json(perf_table_formula(PerfTableSpec(n, alpha, std::move(weights)))));
      },
      py::arg("n"), py::arg("alpha"), py::arg("weights"));

  m.def(
      "chi_formula",
      [](std::size_t n, double alpha, double a, double b, std::optional<double> p_const) {
        ModelConfig mc;
        mc.kind = "chi";
        mc.n = n;
        mc.alpha = alpha;
        mc.a = a;
        mc.b = b;
        mc.p_const = p_const;
        return to_python(to_json(build_formula(mc)));
      },
      py::arg("n"), py::arg("alpha"), py::arg("a"), py::arg("b"), py::arg("p_const") = py::none());

  m.def(
      "wilson_interval",
      [](std::size_t k, std::size_t n) {
        const auto w = wilson_interval(k, n);
        return py::make_tuple(w.lo, w.hi);
      },
      py::arg("k"), py::arg("n"));

  m.def(
      "config_hash", [](const std::string& text) { return config_hash(parse_config(text)); }, py::arg("text"));
  m.def(
      "normalize_config", [](const std::string& text) { return format_config(parse_config(text)); },
      py::arg("text"), "canonical text form of a TOML experiment config");

  m.def(
      "compare",
      [](const std::string& text, std::optional<std::size_t> n_reps, std::optional<std::vector<double>> u,
         unsigned threads) {
        auto cfg = parse_config(text);
        if (n_reps) cfg.run.n_reps = *n_reps;
        if (u) cfg.run.u = *u;
        std::vector<ConstantEstimate> used;
        const auto formula = build_formula(cfg.model, &used);
        auto rec = ratio_table(build_model(cfg.model), formula, cfg.run.u, build_grid(cfg), cfg.run.n_reps,
                               cfg.run.seed, exec_for(threads));
        rec.config_hash = config_hash(cfg);
        rec.constants = used;
        return to_python(to_json(rec));
      },
      py::arg("config_text"), py::arg("n_reps") = py::none(), py::arg("u") = py::none(), py::arg("threads") = 1,
      "empirical versus asymptotic ratio table for a TOML experiment config");
}

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "infmmala/config.hpp"
#include "infmmala/diagnostics.hpp"
#include "infmmala/errors.hpp"
#include "infmmala/model.hpp"
#include "infmmala/rng.hpp"
#include "infmmala/sampler.hpp"
#include "infmmala/tridiag.hpp"

namespace py = pybind11;

using namespace infmmala;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Semi-implicit manifold MCMC for diffusion paths observed with error";

  py::register_exception<Error>(m, "Error");

  py::class_<Rng>(m, "Rng")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("uniform", &Rng::uniform)
      .def("normal", &Rng::normal);
  m.def("derive_seed", &derive_seed, py::arg("base"), py::arg("stream"));

  py::class_<SymTridiag>(m, "SymTridiag")
      .def(py::init<std::vector<double>, std::vector<double>>(), py::arg("diag"), py::arg("off"))
      .def_readonly("diag", &SymTridiag::diag)
      .def_readonly("off", &SymTridiag::off)
      .def("n", &SymTridiag::n);
  py::class_<CholBidiag>(m, "CholBidiag")
      .def_readonly("d", &CholBidiag::d)
      .def_readonly("e", &CholBidiag::e)
      .def("n", &CholBidiag::n);
  m.def("cholesky", &cholesky);
  m.def("solve",
        [](const CholBidiag& f, const std::vector<double>& b) { return solve(f, b); });
  m.def("log_det", &log_det);
  m.def("matvec",
        [](const SymTridiag& a, const std::vector<double>& v) { return matvec(a, v); });
  m.def("quad_form", [](const SymTridiag& a, const std::vector<double>& v,
                        const std::vector<double>& w) { return quad_form(a, v, w); });

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init([](int n, double delta, double x_star) {
             return GridSpec{n, delta, x_star};
           }),
           py::arg("N"), py::arg("delta"), py::arg("x_star"))
      .def_readonly("N", &GridSpec::N)
      .def_readonly("delta", &GridSpec::delta)
      .def_readonly("x_star", &GridSpec::x_star)
      .def("horizon", &GridSpec::horizon);

  py::class_<Path>(m, "Path")
      .def(py::init<GridSpec, std::vector<double>>(), py::arg("grid"), py::arg("values"))
      .def_readonly("grid", &Path::grid)
      .def_readonly("values", &Path::values)
      .def("at", &Path::at, py::arg("j"));

  py::class_<ObservationSet>(m, "ObservationSet")
      .def(py::init([](std::vector<int> indices, std::vector<double> values, double sigma2) {
             ObservationSet obs;
             obs.indices = std::move(indices);
             obs.values = std::move(values);
             obs.sigma2 = sigma2;
             return obs;
           }),
           py::arg("indices"), py::arg("values"), py::arg("sigma2"))
      .def_readonly("indices", &ObservationSet::indices)
      .def_readonly("values", &ObservationSet::values)
      .def_readonly("sigma2", &ObservationSet::sigma2);

  py::class_<DriftFn>(m, "DriftFn")
      .def_static("affine", &DriftFn::affine, py::arg("c0"), py::arg("c1"))
      .def_readonly("c0", &DriftFn::c0)
      .def_readonly("c1", &DriftFn::c1)
      .def("__call__", &DriftFn::operator())
      .def("deriv", &DriftFn::deriv);

  py::class_<ObsMap>(m, "ObsMap")
      .def_static("identity", &ObsMap::identity)
      .def_static("power32", &ObsMap::power32)
      .def_static("constant", &ObsMap::constant, py::arg("value"))
      .def_static("by_name", &ObsMap::by_name, py::arg("name"))
      .def("value", &ObsMap::value)
      .def("deriv", &ObsMap::deriv)
      .def("inverse", &ObsMap::inverse)
      .def("invertible", &ObsMap::invertible)
      .def("name", &ObsMap::name);

  py::class_<ModelFunctions>(m, "ModelFunctions")
      .def(py::init([](DriftFn drift, ObsMap obs_map) {
             return ModelFunctions{drift, obs_map};
           }),
           py::arg("drift"), py::arg("obs_map"))
      .def_readonly("drift", &ModelFunctions::drift)
      .def_readonly("obs_map", &ModelFunctions::obs_map);

  py::class_<Potential>(m, "Potential")
      .def_readonly("total", &Potential::total)
      .def_readonly("obs", &Potential::obs)
      .def_readonly("girsanov", &Potential::girsanov);

  py::class_<DiffusionTarget>(m, "DiffusionTarget")
      .def(py::init<GridSpec, ObservationSet, ModelFunctions>(), py::arg("grid"), py::arg("obs"),
           py::arg("fns"))
      .def_property_readonly("grid", [](const DiffusionTarget& t) { return t.grid(); })
      .def_property_readonly("obs", [](const DiffusionTarget& t) { return t.obs(); })
      .def_property_readonly("prior_precision",
                             [](const DiffusionTarget& t) { return t.prior_precision(); });

  m.def("build_prior_precision", &build_prior_precision, py::arg("grid"));
  m.def("phi", &phi, py::arg("target"), py::arg("x"));
  m.def("grad_phi", &grad_phi, py::arg("target"), py::arg("x"));
  m.def("metric_tensor", &metric_tensor, py::arg("target"), py::arg("x"));
  m.def("simulate_path", &simulate_path, py::arg("grid"), py::arg("drift"), py::arg("rng"));
  m.def(
      "simulate_observations",
      [](const Path& x, std::vector<int> indices, const ObsMap& f, double sigma2, Rng& rng) {
        return simulate_observations(x, std::move(indices), f, sigma2, rng);
      },
      py::arg("x"), py::arg("indices"), py::arg("obs_map"), py::arg("sigma2"), py::arg("rng"));
  m.def(
      "brownian_bridge_fill",
      [](const GridSpec& grid, const std::vector<int>& idx, const std::vector<double>& vals,
         Rng& rng) { return brownian_bridge_fill(grid, idx, vals, rng); },
      py::arg("grid"), py::arg("pin_indices"), py::arg("pin_values"), py::arg("rng"));

  m.def("qv_estimate", &qv_estimate, py::arg("x"));
  m.def(
      "trace_indices",
      [](const GridSpec& grid, const std::vector<double>& times) {
        return trace_indices(grid, times);
      },
      py::arg("grid"), py::arg("times"));
  m.def(
      "exact_gaussian_posterior",
      [](const DiffusionTarget& t) {
        const GaussianPosterior p = exact_gaussian_posterior(t);
        return py::make_tuple(p.mean, p.marginal_var);
      },
      py::arg("target"));

  py::class_<ProposalCoeffs>(m, "ProposalCoeffs")
      .def_static("from_step", &ProposalCoeffs::from_step, py::arg("h"))
      .def_readonly("h", &ProposalCoeffs::h)
      .def_readonly("a_keep", &ProposalCoeffs::a_keep)
      .def_readonly("a_drift", &ProposalCoeffs::a_drift)
      .def_readonly("a_noise", &ProposalCoeffs::a_noise);

  py::enum_<MetricMode>(m, "MetricMode")
      .value("Fisher", MetricMode::Fisher)
      .value("PriorOnly", MetricMode::PriorOnly);

  py::class_<ChainState>(m, "ChainState")
      .def_readonly("x", &ChainState::x)
      .def_readonly("phi", &ChainState::phi)
      .def_readonly("s", &ChainState::s)
      .def_readonly("logdet_g", &ChainState::logdet_g);
  m.def("make_chain_state", &make_chain_state, py::arg("target"), py::arg("x"), py::arg("mode"));
  m.def("log_accept_ratio", &log_accept_ratio, py::arg("target"), py::arg("state"),
        py::arg("cand"), py::arg("h"));

  py::class_<StepRecord>(m, "StepRecord")
      .def_readonly("accepted", &StepRecord::accepted)
      .def_readonly("log_ratio", &StepRecord::log_ratio)
      .def_readonly("acc_prob", &StepRecord::acc_prob)
      .def_readonly("qve_proposed", &StepRecord::qve_proposed)
      .def_readonly("metric_failure", &StepRecord::metric_failure);

  m.def(
      "step_inf_mmala",
      [](const DiffusionTarget& t, const ChainState& state, const ProposalCoeffs& c, Rng& rng) {
        StepResult r = step_inf_mmala(t, state, c, rng);
        return py::make_tuple(std::move(r.state), r.record);
      },
      py::arg("target"), py::arg("state"), py::arg("coeffs"), py::arg("rng"));
  m.def(
      "step_inf_mala",
      [](const DiffusionTarget& t, const ChainState& state, const ProposalCoeffs& c, Rng& rng) {
        StepResult r = step_inf_mala(t, state, c, rng);
        return py::make_tuple(std::move(r.state), r.record);
      },
      py::arg("target"), py::arg("state"), py::arg("coeffs"), py::arg("rng"));
  m.def(
      "step_mmala",
      [](const DiffusionTarget& t, const ChainState& state, double h, Rng& rng) {
        StepResult r = step_mmala(t, state, h, rng);
        return py::make_tuple(std::move(r.state), r.record);
      },
      py::arg("target"), py::arg("state"), py::arg("h"), py::arg("rng"));

  py::class_<InitStrategy>(m, "InitStrategy")
      .def_static("prior", &InitStrategy::prior)
      .def_static("flat_bridge", &InitStrategy::flat_bridge, py::arg("value"))
      .def_static("data_pinned", &InitStrategy::data_pinned);
  m.def("init_path", &init_path, py::arg("strategy"), py::arg("target"), py::arg("rng"));

  py::class_<ChainSummary>(m, "ChainSummary")
      .def_readonly("n_steps", &ChainSummary::n_steps)
      .def_readonly("acceptance_rate", &ChainSummary::acceptance_rate)
      .def_readonly("metric_failures", &ChainSummary::metric_failures)
      .def_readonly("traces", &ChainSummary::traces)
      .def_readonly("qve_series", &ChainSummary::qve_series)
      .def_readonly("coord_mean", &ChainSummary::coord_mean)
      .def_readonly("coord_var", &ChainSummary::coord_var);

  m.def(
      "run_chain",
      [](const DiffusionTarget& t, const std::string& algo, double h, long long iters,
         const InitStrategy& init, std::uint64_t seed, std::vector<int> trace_idx) {
        RunHooks hooks;
        hooks.trace_idx = std::move(trace_idx);
        return run_chain(t, algo_from_name(algo), h, iters, init, seed, hooks);
      },
      py::arg("target"), py::arg("algo"), py::arg("h"), py::arg("iters"), py::arg("init"),
      py::arg("seed"), py::arg("trace_idx") = std::vector<int>{},
      py::call_guard<py::gil_scoped_release>());

  m.def("preset_config_names", [] { return std::vector<std::string>{"fig1", "fig2", "mesh"}; });
}

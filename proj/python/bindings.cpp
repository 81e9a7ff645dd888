#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "altphase/altmin.hpp"
#include "altphase/harness.hpp"
#include "altphase/linalg.hpp"
#include "altphase/measurements.hpp"
#include "altphase/oracles.hpp"
#include "altphase/random.hpp"

namespace py = pybind11;
using namespace altphase;

namespace {

// Round-trips through text so Python sees plain dicts and lists.
py::object to_python(const nlohmann::json& doc) {
    return py::module_::import("json").attr("loads")(doc.dump());
}

std::shared_ptr<MeasurementOperator> gaussian_operator(Eigen::Index n, Eigen::Index m, std::uint64_t seed) {
    Rng rng(seed);
    return std::make_shared<DenseOperator>(sample_gaussian_operator(n, m, rng));
}

std::shared_ptr<MeasurementOperator> masked_dft_operator(Eigen::Index n, Eigen::Index filters,
                                                         std::uint64_t seed) {
    Rng rng(seed);
    return std::make_shared<MaskedDftOperator>(build_masked_dft_operator(n, filters, rng));
}

TrialConfig trial_config(const std::string& model, const std::string& algo, Eigen::Index n,
                         Eigen::Index m, Eigen::Index k, double sigma, double threshold,
                         const AltMinConfig& solver) {
    TrialConfig c;
    c.model = parse_model(model);
    c.algo = parse_algorithm(algo);
    c.n = n;
    c.m = m;
    c.k = k;
    c.sigma = sigma;
    c.success_threshold = threshold;
    c.solver = solver;
    return c;
}

SweepOptions sweep_options(std::size_t trials, std::uint64_t seed, std::size_t threads) {
    SweepOptions o;
    o.trials = trials;
    o.master_seed = seed;
    o.threads = threads;
    return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Phase retrieval by alternating minimization";
    m.attr("__version__") = std::string(kToolVersion);

    m.def("phase", py::overload_cast<const ComplexVector&>(&phase), py::arg("v"),
          "Elementwise z / |z|, with 1 at zero");
    m.def("dist", &dist, py::arg("x1"), py::arg("x2"),
          "Sine of the angle between two complex directions");
    m.def(
        "align_global_phase",
        [](const ComplexVector& x, const ComplexVector& reference) {
            return align_global_phase(x, reference).aligned;
        },
        py::arg("x"), py::arg("reference"));

    py::class_<MeasurementOperator, std::shared_ptr<MeasurementOperator>>(m, "MeasurementOperator")
        .def_property_readonly("n", &MeasurementOperator::n)
        .def_property_readonly("m", &MeasurementOperator::m)
        .def_property_readonly("model", [](const MeasurementOperator& op) { return std::string(to_string(op.model())); })
        .def("forward", &MeasurementOperator::forward, py::arg("x"))
        .def("adjoint", &MeasurementOperator::adjoint, py::arg("r"))
        .def("matrix", [](const MeasurementOperator& op) -> std::optional<ComplexMatrix> {
            if (const ComplexMatrix* a = op.matrix()) return *a;
            return std::nullopt;
        });
    py::class_<DenseOperator, MeasurementOperator, std::shared_ptr<DenseOperator>>(m, "DenseOperator")
        .def(py::init<ComplexMatrix>(), py::arg("a"));
    py::class_<MaskedDftOperator, MeasurementOperator, std::shared_ptr<MaskedDftOperator>>(m, "MaskedDftOperator")
        .def(py::init<ComplexMatrix>(), py::arg("masks"))
        .def_property_readonly("masks", &MaskedDftOperator::masks);

    m.def("gaussian_operator", &gaussian_operator, py::arg("n"), py::arg("m"), py::arg("seed") = 0);
    m.def("masked_dft_operator", &masked_dft_operator, py::arg("n"), py::arg("filters"), py::arg("seed") = 0);
    m.def("measure", &measure, py::arg("op"), py::arg("x"));
    m.def(
        "measure_noisy",
        [](const MeasurementOperator& op, const ComplexVector& x, double sigma, std::uint64_t seed) {
            Rng rng(seed);
            return measure_noisy(op, x, sigma, rng);
        },
        py::arg("op"), py::arg("x"), py::arg("sigma"), py::arg("seed") = 0);

    py::class_<ProblemInstance>(m, "ProblemInstance")
        .def_readonly("x_star", &ProblemInstance::x_star)
        .def_readonly("y", &ProblemInstance::y)
        .def_property_readonly("op", [](const ProblemInstance& p) { return std::const_pointer_cast<MeasurementOperator>(p.op); })
        .def("to_json", [](const ProblemInstance& p) { return to_python(to_json(p)); });
    m.def(
        "generate_instance",
        [](const std::string& model, Eigen::Index n, Eigen::Index m, double sigma, Eigen::Index sparsity,
           std::uint64_t seed) {
            InstanceSpec spec;
            spec.model = parse_model(model);
            spec.n = n;
            spec.m = m;
            spec.sigma = sigma;
            spec.sparsity = sparsity;
            spec.seed = seed;
            return generate_instance(spec);
        },
        py::arg("model") = "gaussian", py::arg("n") = 16, py::arg("m") = 128, py::arg("sigma") = 0.0,
        py::arg("sparsity") = 0, py::arg("seed") = 0);

    py::class_<AltMinConfig>(m, "AltMinConfig")
        .def(py::init<>())
        .def_readwrite("max_iters", &AltMinConfig::max_iters)
        .def_readwrite("conv_tol", &AltMinConfig::conv_tol)
        .def_readwrite("ls_tol", &AltMinConfig::ls_tol)
        .def_readwrite("ls_max_iters", &AltMinConfig::ls_max_iters)
        .def_readwrite("adaptive_ls_tol", &AltMinConfig::adaptive_ls_tol)
        .def_readwrite("epsilon", &AltMinConfig::epsilon)
        .def_readwrite("partition_constant", &AltMinConfig::partition_constant)
        .def_readwrite("init_seed", &AltMinConfig::init_seed)
        .def_property(
            "power_tol", [](const AltMinConfig& c) { return c.power.tol; },
            [](AltMinConfig& c, double tol) { c.power.tol = tol; });

    py::class_<RecoveryTrace>(m, "RecoveryTrace")
        .def_readonly("iterates_dist", &RecoveryTrace::iterates_dist)
        .def_readonly("residuals", &RecoveryTrace::residuals)
        .def_readonly("objective_before", &RecoveryTrace::objective_before)
        .def_readonly("objective_after", &RecoveryTrace::objective_after)
        .def_readonly("ls_iterations", &RecoveryTrace::ls_iterations)
        .def_readonly("final_estimate", &RecoveryTrace::final_estimate)
        .def_readonly("iterations_used", &RecoveryTrace::iterations_used)
        .def_readonly("converged", &RecoveryTrace::converged)
        .def_readonly("support", &RecoveryTrace::support)
        .def("to_json", [](const RecoveryTrace& t) { return to_python(to_json(t)); });

    m.def("spectral_init", &spectral_init, py::arg("op"), py::arg("y"), py::arg("config") = AltMinConfig{});
    m.def("altmin_phase", &altmin_phase, py::arg("op"), py::arg("y"), py::arg("config") = AltMinConfig{},
          py::arg("ground_truth") = std::nullopt);
    m.def("altmin_phase_from", &altmin_phase_from, py::arg("op"), py::arg("y"), py::arg("x0"),
          py::arg("config") = AltMinConfig{}, py::arg("ground_truth") = std::nullopt);
    m.def("altmin_phase_resampled", &altmin_phase_resampled, py::arg("a"), py::arg("y"),
          py::arg("config") = AltMinConfig{}, py::arg("ground_truth") = std::nullopt);
    m.def("sparse_altmin_phase", &sparse_altmin_phase, py::arg("a"), py::arg("y"), py::arg("k"),
          py::arg("config") = AltMinConfig{}, py::arg("ground_truth") = std::nullopt);
    m.def("resample_iterations", &resample_iterations, py::arg("epsilon"), py::arg("partition_constant") = 1.5);
    m.def("support_statistic", &support_statistic, py::arg("a"), py::arg("y"));
    m.def("top_k_indices", &top_k_indices, py::arg("values"), py::arg("k"));

    m.def(
        "f_beta", [](double beta, std::size_t nodes) { return oracles::f_beta(beta, {nodes}); },
        py::arg("beta"), py::arg("node_count") = 4096);
    m.def(
        "f_beta_derivative",
        [](double beta, std::size_t nodes) { return oracles::f_beta_derivative(beta, {nodes}); },
        py::arg("beta"), py::arg("node_count") = 4096);
    m.def("support_expectation", &oracles::support_expectation, py::arg("xj"));
    m.def("phase_perturbation_check", &oracles::phase_perturbation_check, py::arg("w"));
    m.def(
        "expected_u_monte_carlo",
        [](double alpha, std::size_t samples, std::uint64_t seed) {
            oracles::MonteCarloSpec mc;
            mc.samples = samples;
            mc.seed = seed;
            const auto e = oracles::expected_u_monte_carlo(alpha, mc);
            return py::dict(py::arg("mean") = e.mean, py::arg("stderr_real") = e.stderr_real,
                            py::arg("stderr_imag") = e.stderr_imag, py::arg("samples") = e.samples);
        },
        py::arg("alpha"), py::arg("samples") = 1'000'000, py::arg("seed") = 0);
    m.def(
        "validate_lemmas",
        [](std::uint64_t seed, std::size_t mc_samples, std::size_t fuzz_samples) {
            oracles::LemmaSuiteOptions o;
            o.seed = seed;
            o.mc_samples = mc_samples;
            o.fuzz_samples = fuzz_samples;
            return to_python(oracles::to_json(oracles::validate_lemmas(o)));
        },
        py::arg("seed") = oracles::LemmaSuiteOptions{}.seed, py::arg("mc_samples") = 1'000'000,
        py::arg("fuzz_samples") = 100'000);

    m.def(
        "run_trial",
        [](std::uint64_t seed, const std::string& model, const std::string& algo, Eigen::Index n,
           Eigen::Index m, Eigen::Index k, double sigma, double threshold, const AltMinConfig& solver) {
            return to_python(to_json(run_trial(trial_config(model, algo, n, m, k, sigma, threshold, solver), seed)));
        },
        py::arg("seed") = 0, py::arg("model") = "gaussian", py::arg("algo") = "altmin", py::arg("n") = 16,
        py::arg("m") = 128, py::arg("k") = 0, py::arg("sigma") = 0.0, py::arg("threshold") = 1e-2,
        py::arg("config") = AltMinConfig{});
    m.def(
        "min_measurements_search",
        [](Eigen::Index n, Eigen::Index m_start, Eigen::Index m_step, Eigen::Index m_max, std::size_t trials,
           std::uint64_t seed, const std::string& model, const std::string& algo, std::size_t threads) {
            const TrialConfig c = trial_config(model, algo, n, std::max(n, m_start), 0, 0.0, 1e-2, {});
            return to_python(to_json(min_measurements_search(c, m_start, m_step, m_max,
                                                             sweep_options(trials, seed, threads))));
        },
        py::arg("n"), py::arg("m_start"), py::arg("m_step"), py::arg("m_max"), py::arg("trials") = 20,
        py::arg("seed") = 0, py::arg("model") = "gaussian", py::arg("algo") = "altmin", py::arg("threads") = 0);
    m.def(
        "noise_sweep",
        [](Eigen::Index n, Eigen::Index m, std::vector<double> sigmas, std::size_t trials, std::uint64_t seed,
           std::size_t threads) {
            const TrialConfig c = trial_config("gaussian", "altmin", n, m, 0, 0.0, 1e-2, {});
            return to_python(to_json(noise_sweep(c, std::move(sigmas), sweep_options(trials, seed, threads))));
        },
        py::arg("n"), py::arg("m"), py::arg("sigmas"), py::arg("trials") = 20, py::arg("seed") = 0,
        py::arg("threads") = 0);
}

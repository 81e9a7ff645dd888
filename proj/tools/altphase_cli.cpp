// altphase: phase-retrieval experiments from the command line.
//
//   altphase recover --n 64 --m 384
//   altphase sweep-m --n 16 --trials 20 --format csv --out sweep.csv
//   altphase sweep-noise --n 64 --m 384 --sigmas 0 0.05 0.1 0.2
//   altphase validate-lemmas --format json
//   altphase bench --ns 16 32 64 128 --m-factor 6
//
// Exit codes: 0 success, 1 invalid configuration or I/O failure, 2 a lemma check failed.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "altphase/harness.hpp"
#include "altphase/oracles.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitLemmaFailure = 2;

struct Options {
    std::string model = "gaussian";
    std::string algo = "altmin";
    long n = 16;
    long m = 128;
    long k = 0;
    double sigma = 0.0;
    std::uint64_t seed = 0;
    std::size_t trials = 20;
    std::size_t threads = 0;
    std::string format = "csv";
    std::string out;
    double threshold = 1e-2;
    std::size_t max_iters = 100;
    double epsilon = 1e-3;
    double partition_constant = 1.5;
    bool adaptive_ls = false;

    long m_start = 0;
    long m_step = 0;
    long m_max = 0;
    std::vector<double> sigmas{0.0, 0.05, 0.1, 0.2};
    std::vector<long> ns{16, 32, 64, 128};
    double m_factor = 6.0;
    std::size_t mc_samples = 1'000'000;
    std::size_t fuzz_samples = 100'000;
};

altphase::TrialConfig trial_config(const Options& o) {
    altphase::TrialConfig c;
    try {
        c.model = altphase::parse_model(o.model);
    } catch (const altphase::InvalidArgument&) {
        throw altphase::ConfigError("model", "expected gaussian or masked-dft");
    }
    c.algo = altphase::parse_algorithm(o.algo);
    c.n = o.n;
    c.m = o.m;
    c.k = o.k;
    c.sigma = o.sigma;
    c.success_threshold = o.threshold;
    c.solver.max_iters = o.max_iters;
    c.solver.epsilon = o.epsilon;
    c.solver.partition_constant = o.partition_constant;
    c.solver.adaptive_ls_tol = o.adaptive_ls;
    return c;
}

altphase::SweepOptions sweep_options(const Options& o) {
    altphase::SweepOptions s;
    s.trials = o.trials;
    s.master_seed = o.seed;
    s.threads = o.threads;
    return s;
}

void write_text(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

void write_report(const altphase::SweepReport& report, const Options& o) {
    const auto format = altphase::parse_report_format(o.format);
    if (o.out.empty()) {
        std::cout << (format == altphase::ReportFormat::csv ? altphase::to_csv(report)
                                                             : altphase::to_json(report).dump(2) + "\n");
        return;
    }
    altphase::emit_report(report, format, o.out);
}

int run_recover(const Options& o) {
    const altphase::TrialRun run = altphase::run_trial_with_trace(trial_config(o), o.seed);
    nlohmann::json doc = {
        {"result", altphase::to_json(run.result)},
        {"trace", altphase::to_json(run.trace)},
        {"instance", altphase::to_json(run.instance)},
    };
    write_text(doc.dump(2) + "\n", o.out);
    return kExitOk;
}

int run_sweep_m(const Options& o) {
    const altphase::TrialConfig c = trial_config(o);
    const long start = o.m_start > 0 ? o.m_start : o.n;
    const long step = o.m_step > 0 ? o.m_step : std::max(1L, o.n / 2);
    const long stop = o.m_max > 0 ? o.m_max : 10 * o.n;
    const auto report = altphase::min_measurements_search(c, start, step, stop, sweep_options(o));
    write_report(report, o);
    if (!report.found_index) std::cerr << "no m in [" << start << ", " << stop << "] reached the target\n";
    return kExitOk;
}

int run_sweep_noise(const Options& o) {
    write_report(altphase::noise_sweep(trial_config(o), o.sigmas, sweep_options(o)), o);
    return kExitOk;
}

int run_bench(const Options& o) {
    std::vector<Eigen::Index> ns(o.ns.begin(), o.ns.end());
    write_report(altphase::timing_bench(trial_config(o), ns, o.m_factor, sweep_options(o)), o);
    return kExitOk;
}

int run_validate_lemmas(const Options& o) {
    altphase::oracles::LemmaSuiteOptions suite;
    suite.seed = o.seed == 0 ? suite.seed : o.seed;
    suite.mc_samples = o.mc_samples;
    suite.fuzz_samples = o.fuzz_samples;
    suite.threads = o.threads;
    const auto checks = altphase::oracles::validate_lemmas(suite);

    bool all = true;
    for (const auto& c : checks) all = all && c.passed;
    if (o.format == "json") {
        write_text(altphase::oracles::to_json(checks).dump(2) + "\n", o.out);
    } else {
        std::ostringstream table;
        for (const auto& c : checks)
            table << (c.passed ? "PASS  " : "FAIL  ") << std::left << std::setw(40) << c.name
                  << std::setprecision(8) << c.value << "  (bound " << c.bound << ")  " << c.detail << '\n';
        write_text(table.str(), o.out);
    }
    return all ? kExitOk : kExitLemmaFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Phase retrieval by alternating minimization: experiments and checks"};
    app.set_config("--config", "", "TOML/INI file with option values (command-line flags take precedence)");
    app.require_subcommand(1);
    app.fallthrough();

    Options o;
    app.add_option("--n", o.n, "Signal dimension");
    app.add_option("--m", o.m, "Number of measurements");
    app.add_option("--model", o.model, "Measurement model")->check(CLI::IsMember({"gaussian", "masked-dft"}));
    app.add_option("--algo", o.algo, "Recovery algorithm")
        ->check(CLI::IsMember({"altmin", "altmin-resampled", "sparse"}));
    app.add_option("--k", o.k, "Sparsity of the ground truth (sparse algorithm)");
    app.add_option("--sigma", o.sigma, "Measurement noise level");
    app.add_option("--seed", o.seed, "Master seed");
    app.add_option("--trials", o.trials, "Trials per sweep point");
    app.add_option("--threads", o.threads, "Worker threads (0 = all cores)");
    app.add_option("--format", o.format, "Report format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--out", o.out, "Output path (default: stdout)");
    app.add_option("--threshold", o.threshold, "Success threshold on the aligned l2 error");
    app.add_option("--max-iters", o.max_iters, "Maximum alternating-minimization iterations");
    app.add_option("--epsilon", o.epsilon, "Target accuracy of the resampled variant");
    app.add_option("--partition-constant", o.partition_constant, "c in t0 = ceil(c log(1/eps))");
    app.add_flag("--adaptive-ls", o.adaptive_ls, "Loosen inner least-squares tolerance far from convergence");
    app.add_option("--m-start", o.m_start, "sweep-m: first m (default n)");
    app.add_option("--m-step", o.m_step, "sweep-m: increment (default n/2)");
    app.add_option("--m-max", o.m_max, "sweep-m: last m (default 10n)");
    app.add_option("--sigmas", o.sigmas, "sweep-noise: noise levels");
    app.add_option("--ns", o.ns, "bench: dimensions");
    app.add_option("--m-factor", o.m_factor, "bench: m = m_factor * n");
    app.add_option("--mc-samples", o.mc_samples, "validate-lemmas: Monte-Carlo samples");
    app.add_option("--fuzz-samples", o.fuzz_samples, "validate-lemmas: fuzz samples");

    auto* recover = app.add_subcommand("recover", "Recover one instance and print the trace as JSON");
    auto* sweep_m = app.add_subcommand("sweep-m", "Linear search for the smallest m reaching 80% success");
    auto* sweep_noise = app.add_subcommand("sweep-noise", "Mean aligned error per noise level");
    auto* lemmas = app.add_subcommand("validate-lemmas", "Numerical checks of the supporting lemmas");
    auto* bench = app.add_subcommand("bench", "Wall time per trial across dimensions");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalid;
    }

    try {
        if (*recover) return run_recover(o);
        if (*sweep_m) return run_sweep_m(o);
        if (*sweep_noise) return run_sweep_noise(o);
        if (*lemmas) return run_validate_lemmas(o);
        if (*bench) return run_bench(o);
    } catch (const altphase::InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    }
    return kExitInvalid;
}

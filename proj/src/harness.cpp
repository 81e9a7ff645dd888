#include "altphase/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <exception>
#include <mutex>
#include <thread>

namespace altphase {

std::string_view to_string(Algorithm algo) noexcept {
    switch (algo) {
        case Algorithm::altmin: return "altmin";
        case Algorithm::altmin_resampled: return "altmin-resampled";
        case Algorithm::sparse: return "sparse";
    }
    return "unknown";
}

Algorithm parse_algorithm(std::string_view tag) {
    if (tag == "altmin") return Algorithm::altmin;
    if (tag == "altmin-resampled") return Algorithm::altmin_resampled;
    if (tag == "sparse") return Algorithm::sparse;
    throw ConfigError("algo", "unknown algorithm '" + std::string(tag) + "'");
}

void validate(const TrialConfig& c) {
    if (c.n < 1) throw ConfigError("n", "must be >= 1");
    if (c.m < c.n) throw ConfigError("m", "must be >= n (got m = " + std::to_string(c.m) +
                                              ", n = " + std::to_string(c.n) + ")");
    if (c.model == Model::masked_dft && c.m % c.n != 0)
        throw ConfigError("m", "masked-dft needs m to be a multiple of n");
    if (c.model == Model::masked_dft && c.algo != Algorithm::altmin)
        throw ConfigError("algo", "resampled and sparse variants need the dense gaussian model");
    if (!(c.sigma >= 0.0) || !std::isfinite(c.sigma)) throw ConfigError("sigma", "must be finite and >= 0");
    if (!(c.success_threshold > 0.0)) throw ConfigError("threshold", "must be positive");
    if (c.algo == Algorithm::sparse && (c.k < 1 || c.k > c.n))
        throw ConfigError("k", "sparse algorithm needs 1 <= k <= n");
    if (c.k < 0 || c.k > c.n) throw ConfigError("k", "must lie in [0, n]");
    try {
        validate(c.solver);
    } catch (const InvalidArgument& e) {
        throw ConfigError("solver", e.what());
    }
    if (c.algo != Algorithm::altmin) {
        const std::size_t t0 = resample_iterations(c.solver.epsilon, c.solver.partition_constant);
        if (static_cast<std::size_t>(c.m) < t0 + 1)
            throw ConfigError("m", "resampling needs at least t0 + 1 = " + std::to_string(t0 + 1) +
                                       " measurements");
    }
}

nlohmann::json to_json(const TrialConfig& c) {
    return {
        {"model", std::string(to_string(c.model))},
        {"algo", std::string(to_string(c.algo))},
        {"n", c.n},
        {"m", c.m},
        {"k", c.k},
        {"sigma", c.sigma},
        {"success_threshold", c.success_threshold},
        {"max_iters", c.solver.max_iters},
        {"conv_tol", c.solver.conv_tol},
        {"ls_tol", c.solver.ls_tol},
        {"adaptive_ls_tol", c.solver.adaptive_ls_tol},
        {"epsilon", c.solver.epsilon},
        {"partition_constant", c.solver.partition_constant},
        {"power_tol", c.solver.power.tol},
    };
}

nlohmann::json to_json(const TrialResult& r) {
    return {
        {"seed", r.seed},
        {"n", r.n},
        {"m", r.m},
        {"model", std::string(to_string(r.model))},
        {"algo", std::string(to_string(r.algo))},
        {"sigma", r.sigma},
        {"success", r.success},
        {"error_l2", r.error_l2},
        {"dist_final", r.dist_final},
        {"iterations", r.iterations},
        {"wall_time_ms", r.wall_time_ms},
    };
}

TrialRun run_trial_with_trace(const TrialConfig& config, std::uint64_t seed) {
    validate(config);
    InstanceSpec spec;
    spec.model = config.model;
    spec.n = config.n;
    spec.m = config.m;
    spec.sigma = config.sigma;
    spec.sparsity = config.k;
    spec.seed = seed;

    TrialRun run{{}, {}, generate_instance(spec)};
    const ProblemInstance& inst = run.instance;
    AltMinConfig solver = config.solver;
    solver.init_seed = derive_seed(seed, {3});

    const auto start = std::chrono::steady_clock::now();
    switch (config.algo) {
        case Algorithm::altmin:
            run.trace = altmin_phase(*inst.op, inst.y, solver, inst.x_star);
            break;
        case Algorithm::altmin_resampled:
            run.trace = altmin_phase_resampled(*inst.op->matrix(), inst.y, solver, inst.x_star);
            break;
        case Algorithm::sparse:
            run.trace = sparse_altmin_phase(*inst.op->matrix(), inst.y, config.k, solver, inst.x_star);
            break;
    }
    const auto stop = std::chrono::steady_clock::now();

    TrialResult& r = run.result;
    r.seed = seed;
    r.n = config.n;
    r.m = config.m;
    r.model = config.model;
    r.algo = config.algo;
    r.sigma = config.sigma;
    const ComplexVector& estimate = run.trace.final_estimate;
    r.error_l2 = (align_global_phase(estimate, inst.x_star).aligned - inst.x_star).norm();
    r.dist_final = estimate.squaredNorm() == 0.0 ? 1.0 : dist(estimate, inst.x_star);
    r.success = r.error_l2 < config.success_threshold;
    r.iterations = run.trace.iterations_used;
    r.wall_time_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    return run;
}

TrialResult run_trial(const TrialConfig& config, std::uint64_t seed) {
    return run_trial_with_trace(config, seed).result;
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t trial) noexcept {
    return derive_seed(master, {trial});
}

std::vector<TrialResult> run_trials(const TrialConfig& config, const SweepOptions& options) {
    validate(config);
    if (options.trials < 1) throw ConfigError("trials", "must be >= 1");
    std::vector<TrialResult> results(options.trials);
    std::size_t threads = options.threads == 0 ? std::thread::hardware_concurrency() : options.threads;
    threads = std::clamp<std::size_t>(threads, 1, options.trials);

    const auto work = [&](std::size_t worker) {
        for (std::size_t t = worker; t < options.trials; t += threads)
            results[t] = run_trial(config, trial_seed(options.master_seed, t));
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        std::exception_ptr failure;
        std::mutex failure_mutex;
        for (std::size_t w = 0; w < threads; ++w)
            pool.emplace_back([&, w] {
                try {
                    work(w);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            });
        for (auto& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);
    }
    return results;
}

namespace {

SweepRow summarize(double param, const std::vector<TrialResult>& results) {
    SweepRow row;
    row.param = param;
    for (const TrialResult& r : results) {
        row.success_rate += r.success ? 1.0 : 0.0;
        row.mean_error += r.error_l2;
        row.mean_wall_time_ms += r.wall_time_ms;
    }
    const auto count = static_cast<double>(results.size());
    row.success_rate /= count;
    row.mean_error /= count;
    row.mean_wall_time_ms /= count;
    return row;
}

nlohmann::json base_metadata(const TrialConfig& config, const SweepOptions& options) {
    return {
        {"config", to_json(config)},
        {"tool_version", std::string(kToolVersion)},
        {"master_seed", options.master_seed},
        {"trials", options.trials},
        {"target_success_rate", options.target_success_rate},
    };
}

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

SweepReport min_measurements_search(const TrialConfig& config, Eigen::Index m_start,
                                    Eigen::Index m_step, Eigen::Index m_max,
                                    const SweepOptions& options) {
    if (m_start < config.n) throw ConfigError("m_start", "must be >= n");
    if (m_step < 1) throw ConfigError("m_step", "must be >= 1");
    if (m_max < m_start) throw ConfigError("m_max", "must be >= m_start");
    if (options.trials < 1) throw ConfigError("trials", "must be >= 1");

    SweepReport report;
    report.swept = "m";
    report.metadata = base_metadata(config, options);
    report.metadata["m_start"] = m_start;
    report.metadata["m_step"] = m_step;
    report.metadata["m_max"] = m_max;

    for (Eigen::Index m = m_start; m <= m_max; m += m_step) {
        TrialConfig at = config;
        at.m = m;
        report.rows.push_back(summarize(static_cast<double>(m), run_trials(at, options)));
        if (report.rows.back().success_rate >= options.target_success_rate) {
            report.found_index = report.rows.size() - 1;
            break;
        }
    }
    report.metadata["found"] = report.found_index.has_value();
    return report;
}

SweepReport noise_sweep(const TrialConfig& config, std::vector<double> sigmas, const SweepOptions& options) {
    if (sigmas.empty()) throw ConfigError("sigmas", "need at least one noise level");
    for (double s : sigmas)
        if (!(s >= 0.0) || !std::isfinite(s)) throw ConfigError("sigmas", "noise levels must be finite and >= 0");
    std::sort(sigmas.begin(), sigmas.end());

    SweepReport report;
    report.swept = "sigma";
    report.metadata = base_metadata(config, options);
    report.metadata["sigmas"] = sigmas;
    for (std::size_t p = 0; p < sigmas.size(); ++p) {
        TrialConfig at = config;
        at.sigma = sigmas[p];
        report.rows.push_back(summarize(sigmas[p], run_trials(at, options)));
    }
    return report;
}

SweepReport timing_bench(const TrialConfig& config, std::vector<Eigen::Index> ns, double m_factor,
                         const SweepOptions& options) {
    if (ns.empty()) throw ConfigError("ns", "need at least one dimension");
    if (!(m_factor >= 1.0)) throw ConfigError("m_factor", "must be >= 1");
    std::sort(ns.begin(), ns.end());

    SweepReport report;
    report.swept = "n";
    report.metadata = base_metadata(config, options);
    report.metadata["m_factor"] = m_factor;
    for (std::size_t p = 0; p < ns.size(); ++p) {
        TrialConfig at = config;
        at.n = ns[p];
        at.m = static_cast<Eigen::Index>(std::llround(m_factor * static_cast<double>(ns[p])));
        if (at.model == Model::masked_dft) at.m = std::max<Eigen::Index>(1, at.m / at.n) * at.n;
        if (at.k > at.n) at.k = at.n;
        report.rows.push_back(summarize(static_cast<double>(ns[p]), run_trials(at, options)));
    }
    return report;
}

ReportFormat parse_report_format(std::string_view tag) {
    if (tag == "csv") return ReportFormat::csv;
    if (tag == "json") return ReportFormat::json;
    throw ConfigError("format", "expected csv or json");
}

std::string to_csv(const SweepReport& report) {
    std::string out = "param,success_rate,mean_error,mean_wall_time_ms\n";
    for (const SweepRow& r : report.rows) {
        out += format_number(r.param) + ',' + format_number(r.success_rate) + ',' +
               format_number(r.mean_error) + ',' + format_number(r.mean_wall_time_ms) + '\n';
    }
    return out;
}

nlohmann::json to_json(const SweepReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const SweepRow& r : report.rows)
        rows.push_back({{"param", r.param},
                        {"success_rate", r.success_rate},
                        {"mean_error", r.mean_error},
                        {"mean_wall_time_ms", r.mean_wall_time_ms}});
    nlohmann::json doc = {{"swept", report.swept}, {"rows", std::move(rows)}, {"metadata", report.metadata}};
    doc["found_index"] = report.found_index ? nlohmann::json(*report.found_index) : nlohmann::json(nullptr);
    return doc;
}

SweepReport report_from_json(const nlohmann::json& doc) {
    SweepReport report;
    try {
        report.swept = doc.at("swept").get<std::string>();
        for (const auto& r : doc.at("rows"))
            report.rows.push_back({r.at("param").get<double>(), r.at("success_rate").get<double>(),
                                   r.at("mean_error").get<double>(), r.at("mean_wall_time_ms").get<double>()});
        if (doc.contains("found_index") && !doc.at("found_index").is_null())
            report.found_index = doc.at("found_index").get<std::size_t>();
        report.metadata = doc.value("metadata", nlohmann::json::object());
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("report json: ") + e.what());
    }
    return report;
}

void emit_report(const SweepReport& report, ReportFormat format, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    if (format == ReportFormat::csv)
        out << to_csv(report);
    else
        out << to_json(report).dump(2) << '\n';
    out.flush();
    if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

}  // namespace altphase

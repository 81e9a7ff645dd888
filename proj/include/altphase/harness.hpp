#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "altphase/altmin.hpp"
#include "altphase/errors.hpp"
#include "altphase/measurements.hpp"

namespace altphase {

inline constexpr std::string_view kToolVersion = "0.1.0";

enum class Algorithm { altmin, altmin_resampled, sparse };

std::string_view to_string(Algorithm algo) noexcept;
/// "altmin", "altmin-resampled" or "sparse".
Algorithm parse_algorithm(std::string_view tag);

/// Invalid experiment configuration; the message names the offending field.
class ConfigError : public InvalidArgument {
public:
    ConfigError(const std::string& field, const std::string& message)
        : InvalidArgument("config field '" + field + "': " + message), field_(field) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct TrialConfig {
    Model model = Model::gaussian;
    Algorithm algo = Algorithm::altmin;
    Eigen::Index n = 16;
    Eigen::Index m = 128;
    // sparsity of x*; required by the sparse algorithm, 0 = dense otherwise
    Eigen::Index k = 0;
    double sigma = 0.0;
    double success_threshold = 1e-2;
    AltMinConfig solver{};
};

void validate(const TrialConfig& config);
nlohmann::json to_json(const TrialConfig& config);

struct TrialResult {
    std::uint64_t seed = 0;
    Eigen::Index n = 0;
    Eigen::Index m = 0;
    Model model = Model::gaussian;
    Algorithm algo = Algorithm::altmin;
    double sigma = 0.0;
    bool success = false;
    double error_l2 = 0.0;   // || aligned(x_hat) - x* ||
    double dist_final = 0.0;
    std::size_t iterations = 0;
    double wall_time_ms = 0.0;
};

nlohmann::json to_json(const TrialResult& result);

/// Samples an instance from `seed`, runs the configured algorithm and scores
/// the phase-aligned estimate. Deterministic in (config, seed) apart from
/// wall_time_ms.
TrialResult run_trial(const TrialConfig& config, std::uint64_t seed);

/// Trial plus the full recovery trace, for single-instance inspection.
struct TrialRun {
    TrialResult result;
    RecoveryTrace trace;
    ProblemInstance instance;
};
TrialRun run_trial_with_trace(const TrialConfig& config, std::uint64_t seed);

struct SweepRow {
    double param = 0.0;
    double success_rate = 0.0;
    double mean_error = 0.0;
    double mean_wall_time_ms = 0.0;

    friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct SweepReport {
    std::string swept;  // name of the swept parameter
    std::vector<SweepRow> rows;
    // index of the first row reaching the success target (minimum-m search)
    std::optional<std::size_t> found_index;
    nlohmann::json metadata = nlohmann::json::object();

    friend bool operator==(const SweepReport&, const SweepReport&) = default;
};

struct SweepOptions {
    std::size_t trials = 20;
    std::uint64_t master_seed = 0;
    std::size_t threads = 0;  // 0 = hardware concurrency
    double target_success_rate = 0.8;
};

/// Seed of trial `trial`. Every sweep point reuses the same trial seeds, so
/// points differ only in the swept parameter.
std::uint64_t trial_seed(std::uint64_t master, std::size_t trial) noexcept;

/// Runs trials 0..trials-1 concurrently; results are returned in trial order.
std::vector<TrialResult> run_trials(const TrialConfig& config, const SweepOptions& options);

/// Linear scan m = m_start, m_start + m_step, ... <= m_max, stopping at the
/// first m whose success rate reaches the target.
SweepReport min_measurements_search(const TrialConfig& config, Eigen::Index m_start,
                                    Eigen::Index m_step, Eigen::Index m_max,
                                    const SweepOptions& options = {});

/// Mean aligned error per noise level; rows sorted by sigma.
SweepReport noise_sweep(const TrialConfig& config, std::vector<double> sigmas,
                        const SweepOptions& options = {});

/// Wall time per trial for each n with m = round(m_factor * n).
SweepReport timing_bench(const TrialConfig& config, std::vector<Eigen::Index> ns, double m_factor,
                         const SweepOptions& options = {});

enum class ReportFormat { csv, json };
ReportFormat parse_report_format(std::string_view tag);

/// Header `param,success_rate,mean_error,mean_wall_time_ms`, one line per row.
std::string to_csv(const SweepReport& report);
nlohmann::json to_json(const SweepReport& report);
SweepReport report_from_json(const nlohmann::json& doc);

/// Throws std::runtime_error naming the path on I/O failure.
void emit_report(const SweepReport& report, ReportFormat format, const std::filesystem::path& path);

}  // namespace altphase

// Acceptance suite: one [PASS]/[FAIL] line per criterion, detail lines indented
// below it. Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "altphase/altmin.hpp"
#include "altphase/harness.hpp"
#include "altphase/linalg.hpp"
#include "altphase/measurements.hpp"
#include "altphase/oracles.hpp"
#include "altphase/random.hpp"
#include "naive_oracles.hpp"

using namespace altphase;
namespace naive = altphase::testing;

namespace {

constexpr std::size_t kSeeds = 20;
constexpr std::uint64_t kMasterSeed = 0;

// 1. noiseless Gaussian recovery
constexpr Eigen::Index kRecoveryN = 64;
constexpr Eigen::Index kRecoveryM = 6 * kRecoveryN;
constexpr double kRecoveryRate = 0.8;
constexpr double kRecoveryThreshold = 1e-2;
constexpr double kRecoverySeconds = 30.0;

// 2. geometric decay of the resampled variant
constexpr Eigen::Index kDecayN = 8;
constexpr Eigen::Index kDecayBlock = 320;
constexpr double kDecayEpsilon = 1e-3;
constexpr double kDecayRatio = 0.9;
constexpr std::size_t kDecayMinSeeds = 18;
constexpr double kDecaySeconds = 60.0;
// dist at roundoff level carries no contraction information
constexpr double kDecayFloor = 1e-12;

// 3. spectral initialization
constexpr Eigen::Index kInitN = 8;
constexpr Eigen::Index kInitM = 800;
constexpr double kInitDist = 0.3;
constexpr std::size_t kInitMinSeeds = 18;
constexpr double kInitOracleDist = 1e-6;
constexpr double kInitPowerTol = 1e-10;

// 4. sparse support recovery
constexpr Eigen::Index kSparseK = 5;
constexpr Eigen::Index kSparseN = 200;
constexpr std::size_t kSparseMinSeeds = 18;

// 5. lemma suite
constexpr std::size_t kFuzzSamples = 100'000;
constexpr std::size_t kMcSamples = 1'000'000;
constexpr double kFZeroTol = 1e-12;
constexpr double kFPrimeZeroTol = 1e-6;
constexpr double kSmallBetaSlope = 0.55;
constexpr double kExpectedUAlpha = 0.995;
constexpr double kExpectedUFactor = 1.1;
constexpr double kSupportTol = 1e-12;

// 6. solver oracles
constexpr std::size_t kCgnrInstances = 50;
constexpr double kCgnrTol = 1e-8;
constexpr double kDftTol = 1e-10;
constexpr double kAdjointTol = 1e-10;
constexpr int kAdjointProbes = 100;

// 8. noise trend
constexpr Eigen::Index kNoiseN = 64;
constexpr Eigen::Index kNoiseM = 6 * kNoiseN;
constexpr std::size_t kMaxInversions = 1;

struct Outcome {
    bool passed = false;
    std::string summary;
    std::vector<std::string> details;
};

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

SweepOptions sweep_options(std::uint64_t master) {
    SweepOptions o;
    o.trials = kSeeds;
    o.master_seed = master;
    return o;
}

Outcome noiseless_recovery() {
    TrialConfig c;
    c.n = kRecoveryN;
    c.m = kRecoveryM;
    c.success_threshold = kRecoveryThreshold;
    const auto start = std::chrono::steady_clock::now();
    const std::vector<TrialResult> results = run_trials(c, sweep_options(kMasterSeed));
    const double elapsed = seconds_since(start);

    std::size_t successes = 0;
    double worst_success = 0.0;
    for (const TrialResult& r : results) {
        if (r.success) {
            ++successes;
            worst_success = std::max(worst_success, r.error_l2);
        }
    }
    const double rate = static_cast<double>(successes) / static_cast<double>(results.size());
    Outcome o;
    o.passed = rate >= kRecoveryRate && elapsed < kRecoverySeconds;
    o.summary = std::to_string(successes) + "/" + std::to_string(results.size()) +
                " trials with aligned error < 1e-2 (need rate >= 0.8), " + fmt("%.1f", elapsed) +
                " s (limit 30 s)";
    o.details.push_back("largest error among successes " + fmt("%.2e", worst_success));
    for (const TrialResult& r : results)
        if (!r.success)
            o.details.push_back("failed trial seed " + std::to_string(r.seed) + ": error " +
                                fmt("%.3g", r.error_l2) + " after " + std::to_string(r.iterations) +
                                " iterations");
    return o;
}

Outcome geometric_decay() {
    const std::size_t t0 = resample_iterations(kDecayEpsilon, AltMinConfig{}.partition_constant);
    AltMinConfig config;
    config.epsilon = kDecayEpsilon;

    const auto start = std::chrono::steady_clock::now();
    std::size_t good = 0;
    double worst = 0.0;
    double worst_final = 0.0;
    for (std::size_t s = 0; s < kSeeds; ++s) {
        InstanceSpec spec;
        spec.n = kDecayN;
        spec.m = kDecayBlock * static_cast<Eigen::Index>(t0 + 1);
        spec.seed = trial_seed(kMasterSeed, s);
        const ProblemInstance inst = generate_instance(spec);
        config.init_seed = derive_seed(spec.seed, {3});
        const RecoveryTrace trace = altmin_phase_resampled(*inst.op->matrix(), inst.y, config, inst.x_star);

        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t t = 0; t + 1 < trace.iterates_dist.size(); ++t) {
            if (trace.iterates_dist[t] <= kDecayFloor) continue;
            sum += trace.iterates_dist[t + 1] / trace.iterates_dist[t];
            ++count;
        }
        const double mean_ratio = count == 0 ? 0.0 : sum / static_cast<double>(count);
        if (mean_ratio <= kDecayRatio) ++good;
        worst = std::max(worst, mean_ratio);
        worst_final = std::max(worst_final, trace.iterates_dist.back());
    }
    const double elapsed = seconds_since(start);
    Outcome o;
    o.passed = good >= kDecayMinSeeds && elapsed < kDecaySeconds;
    o.summary = std::to_string(good) + "/" + std::to_string(kSeeds) +
                " seeds with mean dist ratio <= 0.9 (need >= 18), " + fmt("%.1f", elapsed) +
                " s (limit 60 s)";
    o.details.push_back("t0 = " + std::to_string(t0) + ", blocks of " + std::to_string(kDecayBlock) +
                        " columns, largest mean ratio " + fmt("%.3f", worst) + ", largest final dist " +
                        fmt("%.2e", worst_final));
    return o;
}

Outcome spectral_init_quality() {
    AltMinConfig config;
    config.power.tol = kInitPowerTol;
    std::size_t close = 0;
    std::size_t oracle_agree = 0;
    double worst_dist = 0.0;
    double worst_oracle = 0.0;
    for (std::size_t s = 0; s < kSeeds; ++s) {
        InstanceSpec spec;
        spec.n = kInitN;
        spec.m = kInitM;
        spec.seed = trial_seed(kMasterSeed, s);
        const ProblemInstance inst = generate_instance(spec);
        config.init_seed = derive_seed(spec.seed, {3});
        const ComplexVector x0 = spectral_init(*inst.op, inst.y, config);
        const double d = dist(x0, inst.x_star);
        const double oracle = dist(x0, naive::explicit_top_eigenvector(*inst.op->matrix(), inst.y));
        if (d < kInitDist) ++close;
        if (oracle <= kInitOracleDist) ++oracle_agree;
        worst_dist = std::max(worst_dist, d);
        worst_oracle = std::max(worst_oracle, oracle);
    }
    Outcome o;
    o.passed = close >= kInitMinSeeds && oracle_agree == kSeeds;
    o.summary = std::to_string(close) + "/" + std::to_string(kSeeds) +
                " seeds with dist(x0, x*) < 0.3 (need >= 18); " + std::to_string(oracle_agree) + "/" +
                std::to_string(kSeeds) + " agree with the explicit eigendecomposition to 1e-6";
    o.details.push_back("largest dist(x0, x*) " + fmt("%.3f", worst_dist) +
                        ", largest dist to oracle eigenvector " + fmt("%.2e", worst_oracle));
    return o;
}

Outcome sparse_support() {
    const auto m = static_cast<Eigen::Index>(
        std::ceil(5.0 * kSparseK * kSparseK * std::log(static_cast<double>(kSparseN))));
    std::size_t exact = 0;
    std::size_t partial = 0;
    double gap_sum = 0.0;
    for (std::size_t s = 0; s < kSeeds; ++s) {
        Rng rng(trial_seed(kMasterSeed, s));
        const DenseOperator op = sample_gaussian_operator(kSparseN, m, rng);

        std::vector<Eigen::Index> order(static_cast<std::size_t>(kSparseN));
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        std::shuffle(order.begin(), order.end(), rng);
        std::vector<Eigen::Index> support(order.begin(), order.begin() + kSparseK);
        std::sort(support.begin(), support.end());
        ComplexVector x = ComplexVector::Zero(kSparseN);
        for (Eigen::Index j : support) x(j) = ((rng() & 1U) ? 1.0 : -1.0) / std::sqrt(double(kSparseK));

        const RealVector y = measure(op, x);
        const RecoveryTrace trace = sparse_altmin_phase(*op.matrix(), y, kSparseK, {}, x);
        if (trace.support && *trace.support == support) ++exact;

        const RealVector z = support_statistic(*op.matrix(), y);
        double on = z(support[0]);
        for (Eigen::Index j : support) on = std::min(on, z(j));
        double off = 0.0;
        for (Eigen::Index j = 0; j < kSparseN; ++j)
            if (!std::binary_search(support.begin(), support.end(), j)) off = std::max(off, z(j));
        gap_sum += (on - off) / static_cast<double>(m);
        std::size_t hits = 0;
        for (Eigen::Index j : *trace.support) hits += std::binary_search(support.begin(), support.end(), j);
        if (hits >= static_cast<std::size_t>(kSparseK) - 1) ++partial;
    }
    Outcome o;
    o.passed = exact >= kSparseMinSeeds;
    o.summary = std::to_string(exact) + "/" + std::to_string(kSeeds) +
                " seeds with exact support (need >= 18) at k = 5, n = 200, m = " + std::to_string(m);
    o.details.push_back(std::to_string(partial) + "/" + std::to_string(kSeeds) +
                        " seeds recover at least k - 1 support indices");
    o.details.push_back("mean (min on-support Z - max off-support Z) / m = " +
                        fmt("%.4f", gap_sum / static_cast<double>(kSeeds)) +
                        " (negative: the smallest on-support statistic loses to the largest of the " +
                        std::to_string(kSparseN - kSparseK) + " off-support ones)");
    return o;
}

Outcome lemma_suite() {
    using namespace altphase::oracles;
    Outcome o;
    bool all = true;
    const auto note = [&](bool ok, const std::string& text) {
        all = all && ok;
        o.details.push_back(std::string(ok ? "ok    " : "FAIL  ") + text);
    };

    Rng rng(derive_seed(kMasterSeed, {5, 0}));
    std::uniform_real_distribution<double> log_scale(-6.0, 3.0);
    std::size_t violations = 0;
    for (std::size_t i = 0; i < kFuzzSamples; ++i)
        if (!phase_perturbation_check(standard_complex_normal(rng) * std::pow(10.0, log_scale(rng)))) ++violations;
    note(violations == 0, "|Ph(1+w) - 1| <= 2|w| on 1e5 random w: " + std::to_string(violations) + " violations");

    const double f0 = f_beta(0.0);
    note(std::abs(f0) <= kFZeroTol, "F(0) = " + fmt("%.3e", f0));
    const double fp0 = f_beta_derivative(0.0);
    note(std::abs(fp0 - 0.5) <= kFPrimeZeroTol, "F'(0) = " + fmt("%.12f", fp0));

    double worst_slope = 0.0;
    for (int i = 1; i <= 50; ++i) {
        const double beta = 0.001 * i;
        worst_slope = std::max(worst_slope, std::abs(f_beta(beta)) / beta);
    }
    note(worst_slope <= kSmallBetaSlope, "max |F(b)|/b on b in [0.001, 0.05] = " + fmt("%.6f", worst_slope));

    MonteCarloSpec mc;
    mc.samples = kMcSamples;
    mc.seed = derive_seed(kMasterSeed, {5, 1});
    const MonteCarloEstimate eu = expected_u_monte_carlo(kExpectedUAlpha, mc);
    const double bound = kExpectedUFactor * std::sqrt(1.0 - kExpectedUAlpha * kExpectedUAlpha);
    note(std::abs(eu.mean) <= bound,
         "|E[U]| at alpha = 0.995 = " + fmt("%.5f", std::abs(eu.mean)) + " <= " + fmt("%.5f", bound));

    const double s0 = support_expectation(0.0);
    const double s1 = support_expectation(1.0);
    note(std::abs(s0 - 2.0 / std::numbers::pi) <= kSupportTol, "support expectation at 0 = " + fmt("%.15f", s0));
    note(std::abs(s1 - 1.0) <= kSupportTol, "support expectation at 1 = " + fmt("%.15f", s1));

    o.passed = all;
    o.summary = all ? "all 7 lemma checks hold" : "at least one lemma check failed";
    return o;
}

double adjoint_mismatch(const MeasurementOperator& op, Rng& rng) {
    const ComplexVector u = standard_complex_normal(rng, op.n());
    const ComplexVector v = standard_complex_normal(rng, op.m());
    const ComplexVector fu = op.forward(u);
    const ComplexVector av = op.adjoint(v);
    return std::abs(fu.dot(v) - u.dot(av)) / (fu.norm() * v.norm());
}

Outcome solver_oracles() {
    Rng rng(derive_seed(kMasterSeed, {6}));

    double worst_cgnr = 0.0;
    std::uniform_int_distribution<int> dim(1, 32);
    for (std::size_t i = 0; i < kCgnrInstances; ++i) {
        const Eigen::Index n = dim(rng);
        const Eigen::Index m = n + std::uniform_int_distribution<Eigen::Index>(0, 3 * n)(rng);
        const ComplexMatrix f = standard_complex_normal(rng, m, n);
        const ComplexVector b = standard_complex_normal(rng, m);
        const LinearMap fwd = [&f](const ComplexVector& x) { return ComplexVector(f * x); };
        const LinearMap adj = [&f](const ComplexVector& r) { return ComplexVector(f.adjoint() * r); };
        const ComplexVector direct = naive::normal_equations_solve(f, b);
        const CgnrResult cg = cgnr_least_squares(fwd, adj, b, static_cast<std::size_t>(n));
        worst_cgnr = std::max(worst_cgnr, (cg.x - direct).norm() / direct.norm());
    }

    double worst_dft = 0.0;
    double worst_adjoint = 0.0;
    for (Eigen::Index n : {1, 2, 3, 7, 8, 15, 16, 30, 31, 48, 63, 64}) {
        for (Eigen::Index filters : {1, 2, 5}) {
            const MaskedDftOperator op = build_masked_dft_operator(n, filters, rng);
            const ComplexVector x = standard_complex_normal(rng, n);
            const ComplexVector slow = naive::naive_masked_forward(op.masks(), x);
            worst_dft = std::max(worst_dft, (op.forward(x) - slow).norm() / slow.norm());
            for (int p = 0; p < kAdjointProbes; ++p) worst_adjoint = std::max(worst_adjoint, adjoint_mismatch(op, rng));
        }
        const DenseOperator dense = sample_gaussian_operator(n, 6 * n, rng);
        for (int p = 0; p < kAdjointProbes; ++p) worst_adjoint = std::max(worst_adjoint, adjoint_mismatch(dense, rng));
    }

    Outcome o;
    o.passed = worst_cgnr <= kCgnrTol && worst_dft <= kDftTol && worst_adjoint <= kAdjointTol;
    o.summary = "CGNR vs normal equations " + fmt("%.2e", worst_cgnr) + " (<= 1e-8), masked DFT vs direct DFT " +
                fmt("%.2e", worst_dft) + " (<= 1e-10), adjoint probes " + fmt("%.2e", worst_adjoint) +
                " (<= 1e-10)";
    o.details.push_back(std::to_string(kCgnrInstances) +
                        " least-squares instances with n <= 32; masked DFT for n in [1, 64], 1 to 5 masks; " +
                        std::to_string(kAdjointProbes) + " probes per operator, dense and masked");
    return o;
}

std::string without_timing(const std::string& csv) {
    std::istringstream in(csv);
    std::string out;
    for (std::string line; std::getline(in, line);) out += line.substr(0, line.rfind(',')) + "\n";
    return out;
}

Outcome determinism() {
    TrialConfig c;
    c.n = 16;
    c.m = 128;
    SweepOptions options;
    options.trials = 8;
    options.master_seed = 4242;

    const std::vector<std::function<SweepReport()>> sweeps = {
        [&] { return min_measurements_search(c, 16, 8, 96, options); },
        [&] { return noise_sweep(c, {0.0, 0.05, 0.1}, options); },
        [&] { return timing_bench(c, {8, 16}, 6.0, options); },
    };
    const char* names[] = {"sweep-m", "sweep-noise", "bench"};
    Outcome o;
    o.passed = true;
    for (std::size_t i = 0; i < sweeps.size(); ++i) {
        const std::string first = without_timing(to_csv(sweeps[i]()));
        const std::string second = without_timing(to_csv(sweeps[i]()));
        const bool same = first == second;
        o.passed = o.passed && same;
        o.details.push_back(std::string(same ? "identical  " : "DIFFERENT  ") + names[i]);
    }
    o.summary = o.passed ? "reruns with the same master seed give identical CSV apart from timing"
                         : "a rerun produced different CSV";
    return o;
}

Outcome noise_trend() {
    TrialConfig c;
    c.n = kNoiseN;
    c.m = kNoiseM;
    const SweepReport report = noise_sweep(c, {0.0, 0.05, 0.1, 0.2}, sweep_options(kMasterSeed));
    std::size_t inversions = 0;
    std::string row_text;
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        if (i > 0 && report.rows[i].mean_error < report.rows[i - 1].mean_error) ++inversions;
        row_text += (i ? ", " : "") + fmt("%.2f", report.rows[i].param) + " -> " +
                    fmt("%.3g", report.rows[i].mean_error);
    }
    Outcome o;
    o.passed = inversions <= kMaxInversions;
    o.summary = std::to_string(inversions) + " adjacent inversions in mean error over sigma (allowed <= 1)";
    o.details.push_back("sigma -> mean error: " + row_text);
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        Outcome (*run)();
    };
    const Criterion criteria[] = {
        {1, "noiseless gaussian recovery, n = 64, m = 6n", noiseless_recovery},
        {2, "geometric decay, resampled variant, n = 8", geometric_decay},
        {3, "spectral initialization quality, n = 8, m = 800", spectral_init_quality},
        {4, "sparse support recovery, k = 5, n = 200", sparse_support},
        {5, "lemma suite", lemma_suite},
        {6, "solver oracles", solver_oracles},
        {7, "sweep determinism", determinism},
        {8, "noise trend, n = 64, m = 6n", noise_trend},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.passed = false;
            o.summary = std::string("exception: ") + e.what();
        }
        const double elapsed = seconds_since(start);
        std::printf("[%s] %d %s: %s\n", o.passed ? "PASS" : "FAIL", c.id, c.name, o.summary.c_str());
        for (const std::string& d : o.details) std::printf("         %s\n", d.c_str());
        std::printf("         (%.1f s)\n", elapsed);
        std::fflush(stdout);
        if (!o.passed) ++failures;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures, std::size(criteria));
    return failures == 0 ? 0 : 1;
}

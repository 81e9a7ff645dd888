#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "altphase/linalg.hpp"

namespace altphase::oracles {

/// Periodic trapezoid rule on [-pi, pi).
struct QuadratureSpec {
    std::size_t node_count = 4096;  // even, >= 16
};

struct MonteCarloSpec {
    std::size_t samples = 1'000'000;
    std::uint64_t seed = 0;
    // Independent RNG streams, each derived from `seed`; results depend on the
    // shard count but not on the number of worker threads.
    std::size_t shards = 8;
    std::size_t threads = 0;  // 0 = hardware concurrency
};

struct MonteCarloEstimate {
    Complex mean;
    double stderr_real = 0.0;
    double stderr_imag = 0.0;
    std::size_t samples = 0;
};

/// F(beta) = (1/2pi) int (cos t + beta) / (1 + beta^2 + 2 beta cos t)^{1/2} dt,
/// 0 <= beta < 1.
double f_beta(double beta, const QuadratureSpec& quad = {});

/// F'(beta) = (1/2pi) int sin^2 t / (1 + beta^2 + 2 beta cos t)^{3/2} dt,
/// 0 <= beta < 1.
double f_beta_derivative(double beta, const QuadratureSpec& quad = {});

/// Sample mean of U = |w1| w2 (Ph(1 + sqrt(1 - alpha^2) conj(w2) / (alpha |w1|)) - 1)
/// over standard complex Gaussian pairs; alpha in (0, 1].
MonteCarloEstimate expected_u_monte_carlo(double alpha, const MonteCarloSpec& mc = {});

/// |Ph(1 + w) - 1| <= 2 |w|, with Ph(0) = 1.
bool phase_perturbation_check(Complex w);

/// (2/pi) (sqrt(1 - x^2) + x asin x), x in [0, 1].
double support_expectation(double xj);

/// Sample mean of |g1| |x g1 + sqrt(1 - x^2) g2| for independent real N(0, 1)
/// g1, g2, i.e. E|a_j y| for a real Gaussian row and unit x* with x*_j = x.
MonteCarloEstimate support_expectation_monte_carlo(double xj, const MonteCarloSpec& mc = {});

/// Monte-Carlo estimates of E|a|^4 and E|a|^2 |b|^2 for independent standard
/// complex Gaussians a, b (diagonal of the expected initialization matrix).
struct InitDiagonal {
    MonteCarloEstimate leading;    // E|a|^4
    MonteCarloEstimate offleading; // E|a|^2 |b|^2
    double ratio() const { return leading.mean.real() / offleading.mean.real(); }
};
InitDiagonal init_matrix_diagonal_monte_carlo(const MonteCarloSpec& mc = {});

struct LemmaCheck {
    std::string name;
    bool passed = false;
    double value = 0.0;
    double bound = 0.0;
    std::string detail;
};

struct LemmaSuiteOptions {
    std::uint64_t seed = 20130616;
    std::size_t fuzz_samples = 100'000;
    std::size_t mc_samples = 1'000'000;
    std::size_t threads = 0;
};

/// Runs every numerical check on the appendix identities and inequalities.
std::vector<LemmaCheck> validate_lemmas(const LemmaSuiteOptions& options = {});

nlohmann::json to_json(const std::vector<LemmaCheck>& checks);

}  // namespace altphase::oracles

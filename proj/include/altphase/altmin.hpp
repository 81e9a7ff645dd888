#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "altphase/linalg.hpp"
#include "altphase/measurements.hpp"

namespace altphase {

struct AltMinConfig {
    std::size_t max_iters = 100;
    // Stop when |r_{t+1} - r_t| < conv_tol * ||y|| (r = magnitude residual).
    double conv_tol = 1e-10;
    // Inner least-squares solver.
    double ls_tol = 1e-10;
    std::size_t ls_max_iters = 500;
    // Loosen the inner tolerance to max(ls_tol, 0.1 * relative residual) while
    // far from convergence.
    bool adaptive_ls_tol = false;
    // Target accuracy and constant c of the resampled variant: t0 = ceil(c log(1/eps)).
    double epsilon = 1e-3;
    double partition_constant = 1.5;
    // Spectral initialization.
    PowerIterationOptions power{};
    std::uint64_t init_seed = 0;
};

/// Throws InvalidArgument when a tolerance is not positive or max_iters is 0.
void validate(const AltMinConfig& config);

struct RecoveryTrace {
    // dist(x^t, x*) for t = 0..iterations_used; empty without ground truth
    std::vector<double> iterates_dist;
    // || |forward(x^t)| - y || for t = 0..iterations_used
    std::vector<double> residuals;
    // least-squares objective ||forward(x) - c^{t+1} .* y|| at x = x^t and x = x^{t+1}
    std::vector<double> objective_before;
    std::vector<double> objective_after;
    std::vector<std::size_t> ls_iterations;
    ComplexVector final_estimate;
    std::size_t iterations_used = 0;
    bool converged = false;
    std::optional<std::vector<Eigen::Index>> support;
};

nlohmann::json to_json(const RecoveryTrace& trace);

/// Unit-norm top eigenvector of S = (1/m) sum_i y_i^2 a_i a_i^H, computed
/// matrix-free by power iteration. Throws InvalidArgument if y is all zero.
ComplexVector spectral_init(const MeasurementOperator& op, const RealVector& y,
                            const AltMinConfig& config = {});

/// Alternating minimization from an explicit starting point.
RecoveryTrace altmin_phase_from(const MeasurementOperator& op, const RealVector& y,
                                const ComplexVector& x0, const AltMinConfig& config = {},
                                const std::optional<ComplexVector>& ground_truth = std::nullopt);

/// Spectral initialization followed by alternating minimization over all
/// measurements.
RecoveryTrace altmin_phase(const MeasurementOperator& op, const RealVector& y,
                           const AltMinConfig& config = {},
                           const std::optional<ComplexVector>& ground_truth = std::nullopt);

/// t0 = ceil(c * log(1 / epsilon)); epsilon must lie in (0, 1].
std::size_t resample_iterations(double epsilon, double partition_constant);

struct ColumnBlock {
    Eigen::Index start = 0;
    Eigen::Index count = 0;
};

/// Splits m columns into `blocks` contiguous disjoint blocks of equal size;
/// the remainder of m / blocks goes to block 0.
std::vector<ColumnBlock> partition_columns(Eigen::Index m, std::size_t blocks);

/// Alternating minimization with a fresh block of measurements per iteration.
/// Block 0 feeds the spectral initializer, block t+1 iteration t. Runs all t0
/// iterations.
RecoveryTrace altmin_phase_resampled(const ComplexMatrix& a, const RealVector& y,
                                     const AltMinConfig& config = {},
                                     const std::optional<ComplexVector>& ground_truth = std::nullopt);

/// Z_j = sum_i |a_{ji}| y_i, summed in increasing i.
RealVector support_statistic(const ComplexMatrix& a, const RealVector& y);

/// Indices of the k largest entries, ascending; ties go to the lower index.
std::vector<Eigen::Index> top_k_indices(const RealVector& values, Eigen::Index k);

/// Support detection by `support_statistic`, then the resampled solver on the
/// k selected rows; entries outside the support are zero.
RecoveryTrace sparse_altmin_phase(const ComplexMatrix& a, const RealVector& y, Eigen::Index k,
                                  const AltMinConfig& config = {},
                                  const std::optional<ComplexVector>& ground_truth = std::nullopt);

}  // namespace altphase

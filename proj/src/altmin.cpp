#include "altphase/altmin.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "altphase/errors.hpp"

namespace altphase {

namespace {

void check_measurements(const RealVector& y, Eigen::Index m, const char* who) {
    if (y.size() != m)
        throw DimensionError(std::string(who) + ": y has length " + std::to_string(y.size()) +
                             ", expected " + std::to_string(m));
    if (!y.allFinite() || (y.array() < 0.0).any())
        throw InvalidArgument(std::string(who) + ": y must be finite and nonnegative");
}

double magnitude_residual(const ComplexVector& ax, const RealVector& y) {
    return (ax.cwiseAbs() - y).norm();
}

// Embeds an iterate into the ground truth's coordinates for dist bookkeeping.
using Embedding = std::function<ComplexVector(const ComplexVector&)>;

ComplexVector identity_embedding(const ComplexVector& x) {
    return x;
}

ComplexVector spectral_init_impl(const MeasurementOperator& op, const RealVector& y,
                                 const AltMinConfig& config) {
    const RealVector weights = y.cwiseAbs2() / static_cast<double>(op.m());
    const LinearMap apply = [&op, &weights](const ComplexVector& v) {
        ComplexVector r = op.forward(v);
        r.array() *= weights.array().cast<Complex>();
        return op.adjoint(r);
    };
    Rng rng(derive_seed(config.init_seed, {0x1417}));
    const ComplexVector start = standard_complex_normal(rng, op.n());
    const PowerIterationResult eig =
        power_iteration(apply, static_cast<std::size_t>(op.n()), start, config.power);
    return eig.vector;
}

struct Step {
    ComplexVector x;
    std::size_t ls_iterations = 0;
    double objective_before = 0.0;
    double objective_after = 0.0;
};

// One alternating step: phases from the current iterate, then least squares.
Step altmin_step(const MeasurementOperator& op, const RealVector& y, const ComplexVector& x,
                 const ComplexVector& ax, double ls_tol, const AltMinConfig& config,
                 std::size_t iteration) {
    ComplexVector target = phase(ax);
    target.array() *= y.array().cast<Complex>();

    CgnrOptions cg;
    cg.tol = ls_tol;
    cg.max_iters = config.ls_max_iters;
    Step step;
    try {
        CgnrResult ls = cgnr_least_squares(op.forward_map(), op.adjoint_map(), target,
                                           static_cast<std::size_t>(op.n()), cg, x);
        step.x = std::move(ls.x);
        step.ls_iterations = ls.iterations;
    } catch (const NumericalError& e) {
        throw NumericalError("altmin iteration " + std::to_string(iteration) + ": " + e.what());
    }
    step.objective_before = (ax - target).norm();
    step.objective_after = (op.forward(step.x) - target).norm();
    return step;
}

void record_dist(RecoveryTrace& trace, const std::optional<ComplexVector>& truth,
                 const Embedding& embed, const ComplexVector& x) {
    if (!truth) return;
    const ComplexVector full = embed(x);
    trace.iterates_dist.push_back(full.squaredNorm() == 0.0 ? 1.0 : dist(full, *truth));
}

RecoveryTrace resampled_core(const ComplexMatrix& a, const RealVector& y, const AltMinConfig& config,
                             const std::optional<ComplexVector>& truth, const Embedding& embed) {
    const std::size_t t0 = resample_iterations(config.epsilon, config.partition_constant);
    if (a.cols() < static_cast<Eigen::Index>(t0 + 1))
        throw InvalidArgument("altmin_phase_resampled: m = " + std::to_string(a.cols()) +
                              " is smaller than t0 + 1 = " + std::to_string(t0 + 1) + " blocks");
    const std::vector<ColumnBlock> blocks = partition_columns(a.cols(), t0 + 1);

    const auto block_op = [&](std::size_t b) {
        return DenseOperator(a.middleCols(blocks[b].start, blocks[b].count));
    };
    const auto block_y = [&](std::size_t b) {
        return RealVector(y.segment(blocks[b].start, blocks[b].count));
    };

    RecoveryTrace trace;
    ComplexVector x;
    {
        const DenseOperator op0 = block_op(0);
        const RealVector y0 = block_y(0);
        x = spectral_init_impl(op0, y0, config);
        trace.residuals.push_back(magnitude_residual(op0.forward(x), y0));
    }
    record_dist(trace, truth, embed, x);

    for (std::size_t t = 0; t < t0; ++t) {
        const DenseOperator op = block_op(t + 1);
        const RealVector yb = block_y(t + 1);
        const ComplexVector ax = op.forward(x);
        double ls_tol = config.ls_tol;
        if (config.adaptive_ls_tol && yb.norm() > 0.0)
            ls_tol = std::max(config.ls_tol, 0.1 * magnitude_residual(ax, yb) / yb.norm());
        Step step = altmin_step(op, yb, x, ax, ls_tol, config, t);
        x = std::move(step.x);
        trace.objective_before.push_back(step.objective_before);
        trace.objective_after.push_back(step.objective_after);
        trace.ls_iterations.push_back(step.ls_iterations);
        trace.residuals.push_back(magnitude_residual(op.forward(x), yb));
        record_dist(trace, truth, embed, x);
    }
    trace.iterations_used = t0;
    trace.converged = true;
    trace.final_estimate = std::move(x);
    return trace;
}

}  // namespace

void validate(const AltMinConfig& config) {
    if (config.max_iters == 0) throw InvalidArgument("config: max_iters must be >= 1");
    if (!(config.conv_tol > 0.0)) throw InvalidArgument("config: conv_tol must be positive");
    if (!(config.ls_tol > 0.0)) throw InvalidArgument("config: ls_tol must be positive");
    if (config.ls_max_iters == 0) throw InvalidArgument("config: ls_max_iters must be >= 1");
    if (!(config.epsilon > 0.0) || config.epsilon > 1.0)
        throw InvalidArgument("config: epsilon must lie in (0, 1]");
    if (!(config.partition_constant > 0.0))
        throw InvalidArgument("config: partition_constant must be positive");
    if (config.power.max_iters == 0 || !(config.power.tol > 0.0))
        throw InvalidArgument("config: power iteration needs max_iters >= 1 and tol > 0");
}

nlohmann::json to_json(const RecoveryTrace& trace) {
    std::vector<double> estimate;
    estimate.reserve(static_cast<std::size_t>(2 * trace.final_estimate.size()));
    for (const Complex& c : trace.final_estimate) {
        estimate.push_back(c.real());
        estimate.push_back(c.imag());
    }
    nlohmann::json doc = {
        {"iterates_dist", trace.iterates_dist},
        {"residuals", trace.residuals},
        {"objective_before", trace.objective_before},
        {"objective_after", trace.objective_after},
        {"ls_iterations", trace.ls_iterations},
        {"final_estimate", std::move(estimate)},
        {"iterations_used", trace.iterations_used},
        {"converged", trace.converged},
    };
    if (trace.support) doc["support"] = *trace.support;
    return doc;
}

ComplexVector spectral_init(const MeasurementOperator& op, const RealVector& y,
                            const AltMinConfig& config) {
    validate(config);
    check_measurements(y, op.m(), "spectral_init");
    if (y.isZero(0.0)) throw InvalidArgument("spectral_init: all measurements are zero");
    return spectral_init_impl(op, y, config);
}

RecoveryTrace altmin_phase_from(const MeasurementOperator& op, const RealVector& y,
                                const ComplexVector& x0, const AltMinConfig& config,
                                const std::optional<ComplexVector>& ground_truth) {
    validate(config);
    check_measurements(y, op.m(), "altmin_phase");
    if (op.m() < op.n()) throw InvalidArgument("altmin_phase: need m >= n measurements");
    if (x0.size() != op.n()) throw DimensionError("altmin_phase: x0 has wrong length");
    if (ground_truth && ground_truth->size() != op.n())
        throw DimensionError("altmin_phase: ground truth has wrong length");

    const double y_norm = y.norm();
    RecoveryTrace trace;
    ComplexVector x = x0;
    ComplexVector ax = op.forward(x);
    trace.residuals.push_back(magnitude_residual(ax, y));
    record_dist(trace, ground_truth, identity_embedding, x);

    for (std::size_t t = 0; t < config.max_iters; ++t) {
        double ls_tol = config.ls_tol;
        if (config.adaptive_ls_tol && y_norm > 0.0)
            ls_tol = std::max(config.ls_tol, 0.1 * trace.residuals.back() / y_norm);
        Step step = altmin_step(op, y, x, ax, ls_tol, config, t);
        x = std::move(step.x);
        ax = op.forward(x);
        trace.objective_before.push_back(step.objective_before);
        trace.objective_after.push_back(step.objective_after);
        trace.ls_iterations.push_back(step.ls_iterations);
        const double previous = trace.residuals.back();
        trace.residuals.push_back(magnitude_residual(ax, y));
        record_dist(trace, ground_truth, identity_embedding, x);
        trace.iterations_used = t + 1;
        if (std::abs(trace.residuals.back() - previous) < config.conv_tol * y_norm) {
            trace.converged = true;
            break;
        }
    }
    trace.final_estimate = std::move(x);
    return trace;
}

RecoveryTrace altmin_phase(const MeasurementOperator& op, const RealVector& y,
                           const AltMinConfig& config,
                           const std::optional<ComplexVector>& ground_truth) {
    const ComplexVector x0 = spectral_init(op, y, config);
    return altmin_phase_from(op, y, x0, config, ground_truth);
}

std::size_t resample_iterations(double epsilon, double partition_constant) {
    if (!(epsilon > 0.0) || epsilon > 1.0) throw InvalidArgument("epsilon must lie in (0, 1]");
    if (!(partition_constant > 0.0)) throw InvalidArgument("partition constant must be positive");
    return static_cast<std::size_t>(std::ceil(partition_constant * std::log(1.0 / epsilon)));
}

std::vector<ColumnBlock> partition_columns(Eigen::Index m, std::size_t blocks) {
    if (blocks == 0) throw InvalidArgument("partition_columns: need at least one block");
    const auto b = static_cast<Eigen::Index>(blocks);
    if (m < b) throw InvalidArgument("partition_columns: fewer columns than blocks");
    const Eigen::Index size = m / b;
    const Eigen::Index extra = m % b;
    std::vector<ColumnBlock> out;
    out.reserve(blocks);
    out.push_back({0, size + extra});
    for (Eigen::Index i = 1; i < b; ++i) out.push_back({extra + i * size, size});
    return out;
}

RecoveryTrace altmin_phase_resampled(const ComplexMatrix& a, const RealVector& y,
                                     const AltMinConfig& config,
                                     const std::optional<ComplexVector>& ground_truth) {
    validate(config);
    if (a.rows() < 1 || a.cols() < 1) throw InvalidArgument("altmin_phase_resampled: empty matrix");
    check_measurements(y, a.cols(), "altmin_phase_resampled");
    if (ground_truth && ground_truth->size() != a.rows())
        throw DimensionError("altmin_phase_resampled: ground truth has wrong length");
    if (y.isZero(0.0)) throw InvalidArgument("altmin_phase_resampled: all measurements are zero");
    return resampled_core(a, y, config, ground_truth, identity_embedding);
}

RealVector support_statistic(const ComplexMatrix& a, const RealVector& y) {
    if (y.size() != a.cols()) throw DimensionError("support_statistic: y length differs from m");
    RealVector z(a.rows());
    for (Eigen::Index j = 0; j < a.rows(); ++j) {
        double sum = 0.0;
        for (Eigen::Index i = 0; i < a.cols(); ++i) sum += std::abs(a(j, i)) * y(i);
        z(j) = sum;
    }
    return z;
}

std::vector<Eigen::Index> top_k_indices(const RealVector& values, Eigen::Index k) {
    if (k < 0 || k > values.size()) throw InvalidArgument("top_k_indices: k out of range");
    std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&values](Eigen::Index l, Eigen::Index r) { return values(l) > values(r); });
    order.resize(static_cast<std::size_t>(k));
    std::sort(order.begin(), order.end());
    return order;
}

RecoveryTrace sparse_altmin_phase(const ComplexMatrix& a, const RealVector& y, Eigen::Index k,
                                  const AltMinConfig& config,
                                  const std::optional<ComplexVector>& ground_truth) {
    validate(config);
    if (k < 1 || k > a.rows()) throw InvalidArgument("sparse_altmin_phase: k must lie in [1, n]");
    check_measurements(y, a.cols(), "sparse_altmin_phase");
    if (ground_truth && ground_truth->size() != a.rows())
        throw DimensionError("sparse_altmin_phase: ground truth has wrong length");
    if (y.isZero(0.0)) throw InvalidArgument("sparse_altmin_phase: all measurements are zero");

    const std::vector<Eigen::Index> support = top_k_indices(support_statistic(a, y), k);
    ComplexMatrix reduced(k, a.cols());
    for (Eigen::Index r = 0; r < k; ++r) reduced.row(r) = a.row(support[static_cast<std::size_t>(r)]);

    const Eigen::Index n = a.rows();
    const Embedding embed = [&support, n](const ComplexVector& xs) {
        ComplexVector full = ComplexVector::Zero(n);
        for (std::size_t r = 0; r < support.size(); ++r)
            full(support[r]) = xs(static_cast<Eigen::Index>(r));
        return full;
    };
    RecoveryTrace trace = resampled_core(reduced, y, config, ground_truth, embed);
    trace.final_estimate = embed(trace.final_estimate);
    trace.support = support;
    return trace;
}

}  // namespace altphase

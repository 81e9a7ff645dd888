#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "altphase/linalg.hpp"
#include "altphase/random.hpp"

namespace altphase {

enum class Model { gaussian, masked_dft };

std::string_view to_string(Model model) noexcept;
/// Accepts "gaussian" and "masked-dft"; throws InvalidArgument otherwise.
Model parse_model(std::string_view tag);

/// Linear measurement map x -> A^H x together with its adjoint r -> A r.
///
/// Implementations are immutable after construction and may be shared
/// between threads.
class MeasurementOperator {
public:
    virtual ~MeasurementOperator() = default;

    virtual Eigen::Index n() const noexcept = 0;
    virtual Eigen::Index m() const noexcept = 0;
    virtual Model model() const noexcept = 0;

    /// C^n -> C^m
    virtual ComplexVector forward(const ComplexVector& x) const = 0;
    /// C^m -> C^n
    virtual ComplexVector adjoint(const ComplexVector& r) const = 0;

    /// The explicit n x m matrix A when the model stores one, else nullptr.
    virtual const ComplexMatrix* matrix() const noexcept { return nullptr; }

    /// Column a_j of A, or nullopt for matrix-free operators.
    std::optional<ComplexVector> column(Eigen::Index j) const;

    LinearMap forward_map() const;
    LinearMap adjoint_map() const;
};

/// Operator backed by an explicit matrix A (n x m, columns are the a_i).
class DenseOperator final : public MeasurementOperator {
public:
    explicit DenseOperator(ComplexMatrix a);

    Eigen::Index n() const noexcept override { return a_.rows(); }
    Eigen::Index m() const noexcept override { return a_.cols(); }
    Model model() const noexcept override { return Model::gaussian; }
    ComplexVector forward(const ComplexVector& x) const override;
    ComplexVector adjoint(const ComplexVector& r) const override;
    const ComplexMatrix* matrix() const noexcept override { return &a_; }

private:
    ComplexMatrix a_;
};

/// J illumination masks z^(u) followed by an unnormalized DFT:
/// forward(x) = [DFT(x .* z^(1)); ...; DFT(x .* z^(J))], so m = J n.
class MaskedDftOperator final : public MeasurementOperator {
public:
    /// `masks` is n x J, one mask per column.
    explicit MaskedDftOperator(ComplexMatrix masks);

    Eigen::Index n() const noexcept override { return masks_.rows(); }
    Eigen::Index m() const noexcept override { return masks_.rows() * masks_.cols(); }
    Model model() const noexcept override { return Model::masked_dft; }
    ComplexVector forward(const ComplexVector& x) const override;
    ComplexVector adjoint(const ComplexVector& r) const override;

    Eigen::Index filter_count() const noexcept { return masks_.cols(); }
    const ComplexMatrix& masks() const noexcept { return masks_; }

private:
    ComplexMatrix masks_;
};

/// Entries of A i.i.d. standard complex Gaussian.
DenseOperator sample_gaussian_operator(Eigen::Index n, Eigen::Index m, Rng& rng);

/// Masks i.i.d. standard complex Gaussian.
MaskedDftOperator build_masked_dft_operator(Eigen::Index n, Eigen::Index filters, Rng& rng);

/// y_i = |forward(x_star)_i|
RealVector measure(const MeasurementOperator& op, const ComplexVector& x_star);

/// y_i = |forward(x_star)_i + nu_i|, nu_i complex Gaussian with E|nu_i|^2 = sigma^2.
RealVector measure_noisy(const MeasurementOperator& op, const ComplexVector& x_star, double sigma,
                         Rng& rng);

struct InstanceSpec {
    Model model = Model::gaussian;
    Eigen::Index n = 0;
    // number of measurements; a multiple of n for masked-dft
    Eigen::Index m = 0;
    double sigma = 0.0;
    // nonzero entries of x_star; 0 means dense
    Eigen::Index sparsity = 0;
    std::uint64_t seed = 0;
};

struct ProblemInstance {
    InstanceSpec spec;
    ComplexVector x_star;
    std::shared_ptr<const MeasurementOperator> op;
    RealVector y;
};

/// Deterministic in `spec`: operator, ground truth and noise draw from
/// separate streams derived from spec.seed. x_star is unit norm.
ProblemInstance generate_instance(const InstanceSpec& spec);

nlohmann::json to_json(const ProblemInstance& instance);

/// Regenerates the instance from the recorded spec and checks that x_star and
/// y match the stored arrays bit for bit. Throws InvalidArgument otherwise.
ProblemInstance instance_from_json(const nlohmann::json& doc);

}  // namespace altphase

#include "altphase/measurements.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "altphase/errors.hpp"

namespace altphase {

std::string_view to_string(Model model) noexcept {
    switch (model) {
        case Model::gaussian: return "gaussian";
        case Model::masked_dft: return "masked-dft";
    }
    return "unknown";
}

Model parse_model(std::string_view tag) {
    if (tag == "gaussian") return Model::gaussian;
    if (tag == "masked-dft") return Model::masked_dft;
    throw InvalidArgument("unknown measurement model '" + std::string(tag) + "'");
}

std::optional<ComplexVector> MeasurementOperator::column(Eigen::Index j) const {
    const ComplexMatrix* a = matrix();
    if (a == nullptr) return std::nullopt;
    if (j < 0 || j >= a->cols()) throw DimensionError("column index out of range");
    return ComplexVector(a->col(j));
}

LinearMap MeasurementOperator::forward_map() const {
    return [this](const ComplexVector& x) { return forward(x); };
}

LinearMap MeasurementOperator::adjoint_map() const {
    return [this](const ComplexVector& r) { return adjoint(r); };
}

DenseOperator::DenseOperator(ComplexMatrix a) : a_(std::move(a)) {
    if (a_.rows() < 1 || a_.cols() < 1) throw InvalidArgument("DenseOperator: empty matrix");
    if (!a_.allFinite()) throw InvalidArgument("DenseOperator: non-finite entries");
}

ComplexVector DenseOperator::forward(const ComplexVector& x) const {
    if (x.size() != a_.rows()) throw DimensionError("DenseOperator::forward: expected length n");
    return a_.adjoint() * x;
}

ComplexVector DenseOperator::adjoint(const ComplexVector& r) const {
    if (r.size() != a_.cols()) throw DimensionError("DenseOperator::adjoint: expected length m");
    return a_ * r;
}

MaskedDftOperator::MaskedDftOperator(ComplexMatrix masks) : masks_(std::move(masks)) {
    if (masks_.rows() < 1 || masks_.cols() < 1) throw InvalidArgument("MaskedDftOperator: empty mask set");
    if (!masks_.allFinite()) throw InvalidArgument("MaskedDftOperator: non-finite mask entries");
}

ComplexVector MaskedDftOperator::forward(const ComplexVector& x) const {
    const Eigen::Index n = masks_.rows();
    if (x.size() != n) throw DimensionError("MaskedDftOperator::forward: expected length n");
    // Eigen::FFT caches plans internally, so each call owns its own instance.
    Eigen::FFT<double> fft;
    ComplexVector out(m());
    ComplexVector block(n);
    ComplexVector spectrum(n);
    for (Eigen::Index u = 0; u < masks_.cols(); ++u) {
        block = x.cwiseProduct(masks_.col(u));
        // kissfft cannot plan a length-1 transform; that DFT is the identity.
        if (n == 1) spectrum = block;
        else fft.fwd(spectrum, block);
        out.segment(u * n, n) = spectrum;
    }
    return out;
}

ComplexVector MaskedDftOperator::adjoint(const ComplexVector& r) const {
    const Eigen::Index n = masks_.rows();
    if (r.size() != m()) throw DimensionError("MaskedDftOperator::adjoint: expected length m");
    Eigen::FFT<double> fft;
    fft.SetFlag(Eigen::FFT<double>::Unscaled);
    ComplexVector out = ComplexVector::Zero(n);
    ComplexVector block(n);
    ComplexVector time(n);
    for (Eigen::Index u = 0; u < masks_.cols(); ++u) {
        block = r.segment(u * n, n);
        // unscaled inverse DFT is the conjugate transpose of the forward DFT
        if (n == 1) time = block;
        else fft.inv(time, block);
        out += masks_.col(u).conjugate().cwiseProduct(time);
    }
    return out;
}

DenseOperator sample_gaussian_operator(Eigen::Index n, Eigen::Index m, Rng& rng) {
    if (n < 1 || m < 1) throw InvalidArgument("sample_gaussian_operator: n and m must be >= 1");
    return DenseOperator(standard_complex_normal(rng, n, m));
}

MaskedDftOperator build_masked_dft_operator(Eigen::Index n, Eigen::Index filters, Rng& rng) {
    if (n < 1 || filters < 1)
        throw InvalidArgument("build_masked_dft_operator: n and filter count must be >= 1");
    return MaskedDftOperator(standard_complex_normal(rng, n, filters));
}

RealVector measure(const MeasurementOperator& op, const ComplexVector& x_star) {
    if (x_star.size() != op.n()) throw DimensionError("measure: x_star length differs from n");
    return op.forward(x_star).cwiseAbs();
}

RealVector measure_noisy(const MeasurementOperator& op, const ComplexVector& x_star, double sigma,
                         Rng& rng) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
        throw InvalidArgument("measure_noisy: sigma must be finite and >= 0");
    if (sigma == 0.0) return measure(op, x_star);
    if (x_star.size() != op.n()) throw DimensionError("measure_noisy: x_star length differs from n");
    ComplexVector clean = op.forward(x_star);
    const double scale = sigma / std::sqrt(2.0);
    RealVector y(clean.size());
    for (Eigen::Index i = 0; i < clean.size(); ++i)
        y(i) = std::abs(clean(i) + scale * standard_complex_normal(rng));
    return y;
}

namespace {

void validate(const InstanceSpec& spec) {
    if (spec.n < 1) throw InvalidArgument("instance: n must be >= 1");
    if (spec.m < 1) throw InvalidArgument("instance: m must be >= 1");
    if (spec.model == Model::masked_dft && spec.m % spec.n != 0)
        throw InvalidArgument("instance: masked-dft requires m to be a multiple of n");
    if (!(spec.sigma >= 0.0) || !std::isfinite(spec.sigma))
        throw InvalidArgument("instance: sigma must be finite and >= 0");
    if (spec.sparsity < 0 || spec.sparsity > spec.n)
        throw InvalidArgument("instance: sparsity must lie in [0, n]");
}

ComplexVector sample_ground_truth(const InstanceSpec& spec, Rng& rng) {
    if (spec.sparsity == 0 || spec.sparsity == spec.n) return uniform_unit_sphere(rng, spec.n);
    std::vector<Eigen::Index> indices(static_cast<std::size_t>(spec.n));
    std::iota(indices.begin(), indices.end(), Eigen::Index{0});
    // partial Fisher-Yates with explicit draws, portable across standard libraries
    for (Eigen::Index i = 0; i < spec.sparsity; ++i) {
        const auto span = static_cast<std::uint64_t>(spec.n - i);
        const auto pick = static_cast<Eigen::Index>(rng() % span) + i;
        std::swap(indices[static_cast<std::size_t>(i)], indices[static_cast<std::size_t>(pick)]);
    }
    const ComplexVector values = uniform_unit_sphere(rng, spec.sparsity);
    ComplexVector x = ComplexVector::Zero(spec.n);
    for (Eigen::Index i = 0; i < spec.sparsity; ++i) x(indices[static_cast<std::size_t>(i)]) = values(i);
    return x;
}

}  // namespace

ProblemInstance generate_instance(const InstanceSpec& spec) {
    validate(spec);
    ProblemInstance inst;
    inst.spec = spec;

    Rng op_rng(derive_seed(spec.seed, {0}));
    if (spec.model == Model::gaussian)
        inst.op = std::make_shared<DenseOperator>(sample_gaussian_operator(spec.n, spec.m, op_rng));
    else
        inst.op = std::make_shared<MaskedDftOperator>(
            build_masked_dft_operator(spec.n, spec.m / spec.n, op_rng));

    Rng truth_rng(derive_seed(spec.seed, {1}));
    inst.x_star = sample_ground_truth(spec, truth_rng);

    Rng noise_rng(derive_seed(spec.seed, {2}));
    inst.y = measure_noisy(*inst.op, inst.x_star, spec.sigma, noise_rng);
    return inst;
}

nlohmann::json to_json(const ProblemInstance& instance) {
    std::vector<double> x;
    x.reserve(static_cast<std::size_t>(2 * instance.x_star.size()));
    for (const Complex& c : instance.x_star) {
        x.push_back(c.real());
        x.push_back(c.imag());
    }
    return {
        {"n", instance.spec.n},
        {"m", instance.spec.m},
        {"model", std::string(to_string(instance.spec.model))},
        {"seed", instance.spec.seed},
        {"sigma", instance.spec.sigma},
        {"sparsity", instance.spec.sparsity},
        {"x_star", std::move(x)},
        {"y", std::vector<double>(instance.y.begin(), instance.y.end())},
    };
}

ProblemInstance instance_from_json(const nlohmann::json& doc) {
    InstanceSpec spec;
    try {
        spec.n = doc.at("n").get<Eigen::Index>();
        spec.m = doc.at("m").get<Eigen::Index>();
        spec.model = parse_model(doc.at("model").get<std::string>());
        spec.seed = doc.at("seed").get<std::uint64_t>();
        spec.sigma = doc.at("sigma").get<double>();
        spec.sparsity = doc.value("sparsity", Eigen::Index{0});
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("instance json: ") + e.what());
    }
    ProblemInstance inst = generate_instance(spec);

    const auto x = doc.at("x_star").get<std::vector<double>>();
    const auto y = doc.at("y").get<std::vector<double>>();
    if (x.size() != static_cast<std::size_t>(2 * inst.x_star.size()) ||
        y.size() != static_cast<std::size_t>(inst.y.size()))
        throw InvalidArgument("instance json: array lengths disagree with n and m");
    for (Eigen::Index i = 0; i < inst.x_star.size(); ++i) {
        const auto k = static_cast<std::size_t>(2 * i);
        if (inst.x_star(i) != Complex(x[k], x[k + 1]))
            throw InvalidArgument("instance json: x_star does not match the regenerated instance");
    }
    for (Eigen::Index i = 0; i < inst.y.size(); ++i)
        if (inst.y(i) != y[static_cast<std::size_t>(i)])
            throw InvalidArgument("instance json: y does not match the regenerated instance");
    return inst;
}

}  // namespace altphase

#include "altphase/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "altphase/errors.hpp"
#include "altphase/random.hpp"

namespace altphase {

namespace {

void require_same_size(const ComplexVector& a, const ComplexVector& b, const char* what) {
    if (a.size() != b.size())
        throw DimensionError(std::string(what) + ": length mismatch (" + std::to_string(a.size()) +
                             " vs " + std::to_string(b.size()) + ")");
}

// Power iteration treats a residual at this level as an exact eigenvector.
constexpr double kExactEigenTol = 64.0 * std::numeric_limits<double>::epsilon();

}  // namespace

UnitComplex::UnitComplex(Complex z) : value_(z) {
    if (!(std::abs(std::abs(z) - 1.0) <= 1e-12))
        throw InvalidArgument("UnitComplex: modulus differs from 1");
}

UnitComplex phase(Complex z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw InvalidArgument("phase: non-finite input");
    const double r = std::abs(z);
    if (r == 0.0) return UnitComplex(Complex(1.0, 0.0));
    return UnitComplex(z / r);
}

ComplexVector phase(const ComplexVector& v) {
    ComplexVector out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = phase(v(i)).value();
    return out;
}

bool all_finite(const ComplexVector& v) noexcept {
    return v.allFinite();
}

bool all_finite(const RealVector& v) noexcept {
    return v.allFinite();
}

double dist(const ComplexVector& x1, const ComplexVector& x2) {
    require_same_size(x1, x2, "dist");
    const double n1 = x1.norm();
    const double n2 = x2.norm();
    if (n1 == 0.0 || n2 == 0.0) throw InvalidArgument("dist: zero vector");
    // sqrt(1 - |<u, v>|^2) evaluated as the norm of the component of v
    // orthogonal to u; the direct form loses half the digits near dist = 0.
    const ComplexVector u = x1 / n1;
    const ComplexVector v = x2 / n2;
    const double sine = (v - u * u.dot(v)).norm();
    return std::clamp(sine, 0.0, 1.0);
}

AlignResult align_global_phase(const ComplexVector& x, const ComplexVector& reference) {
    require_same_size(x, reference, "align_global_phase");
    const Complex ip = reference.dot(x);
    if (ip == Complex(0.0, 0.0)) return {x, false};
    return {x * std::conj(ip / std::abs(ip)), true};
}

PowerIterationResult power_iteration(const LinearMap& apply, std::size_t n,
                                     const ComplexVector& start,
                                     const PowerIterationOptions& options) {
    if (n == 0) throw InvalidArgument("power_iteration: n must be positive");
    if (static_cast<std::size_t>(start.size()) != n)
        throw DimensionError("power_iteration: start vector has wrong length");
    if (options.max_iters == 0) throw InvalidArgument("power_iteration: max_iters must be >= 1");
    if (!(options.tol > 0.0)) throw InvalidArgument("power_iteration: tol must be positive");
    const double start_norm = start.norm();
    if (!(start_norm > 0.0) || !std::isfinite(start_norm))
        throw InvalidArgument("power_iteration: start vector must be nonzero and finite");

    const std::size_t min_iters = options.min_iters == 0 ? 2 * n : options.min_iters;

    PowerIterationResult result;
    ComplexVector v = start / start_norm;
    for (std::size_t k = 1; k <= options.max_iters; ++k) {
        ComplexVector w = apply(v);
        if (static_cast<std::size_t>(w.size()) != n)
            throw DimensionError("power_iteration: operator changed the dimension");
        if (!w.allFinite())
            throw NumericalError("power_iteration: non-finite operator output at iteration " +
                                 std::to_string(k));
        const double lambda = v.dot(w).real();
        const double residual = (w - lambda * v).norm();
        result.vector = v;
        result.eigenvalue = lambda;
        result.iterations = k;

        const double wn = w.norm();
        if (wn == 0.0 || residual <= kExactEigenTol * std::abs(lambda) ||
            (k >= min_iters && residual <= options.tol * lambda)) {
            result.converged = true;
            return result;
        }
        v = w / wn;
    }
    return result;
}

CgnrResult cgnr_least_squares(const LinearMap& forward, const LinearMap& adjoint,
                              const ComplexVector& b, std::size_t n,
                              const CgnrOptions& options, const ComplexVector& x0) {
    if (n == 0) throw InvalidArgument("cgnr_least_squares: n must be positive");
    if (!(options.tol > 0.0)) throw InvalidArgument("cgnr_least_squares: tol must be positive");
    if (!b.allFinite()) throw InvalidArgument("cgnr_least_squares: non-finite right-hand side");
    const auto ni = static_cast<Eigen::Index>(n);

    if (options.check_adjoint) {
        Rng probe_rng(0x5eedcafeULL);
        for (int probe = 0; probe < 3; ++probe) {
            const ComplexVector u = standard_complex_normal(probe_rng, ni);
            const ComplexVector v = standard_complex_normal(probe_rng, b.size());
            const ComplexVector fu = forward(u);
            const ComplexVector av = adjoint(v);
            if (fu.size() != b.size() || av.size() != ni)
                throw ContractError("cgnr_least_squares: forward/adjoint have inconsistent shapes");
            const double scale = fu.norm() * v.norm() + u.norm() * av.norm();
            if (std::abs(fu.dot(v) - u.dot(av)) > options.adjoint_tol * scale)
                throw ContractError("cgnr_least_squares: forward and adjoint are not an adjoint pair");
        }
    }

    CgnrResult result;
    const ComplexVector atb = adjoint(b);
    if (atb.size() != ni) throw DimensionError("cgnr_least_squares: adjoint output has wrong length");
    const double atb_norm = atb.norm();
    if (atb_norm == 0.0) {
        result.x = ComplexVector::Zero(ni);
        result.converged = true;
        return result;
    }

    ComplexVector x = x0.size() == 0 ? ComplexVector(ComplexVector::Zero(ni)) : x0;
    if (x.size() != ni) throw DimensionError("cgnr_least_squares: x0 has wrong length");

    ComplexVector r = b - forward(x);
    ComplexVector s = adjoint(r);
    ComplexVector p = s;
    double gamma = s.squaredNorm();
    const double target = options.tol * atb_norm;

    std::size_t it = 0;
    bool converged = std::sqrt(gamma) <= target;
    while (!converged && it < options.max_iters) {
        const ComplexVector q = forward(p);
        const double qq = q.squaredNorm();
        if (qq == 0.0) break;
        const double alpha = gamma / qq;
        x += alpha * p;
        r -= alpha * q;
        s = adjoint(r);
        ++it;
        const double gamma_next = s.squaredNorm();
        if (!std::isfinite(gamma_next))
            throw NumericalError("cgnr_least_squares: non-finite iterate at iteration " +
                                 std::to_string(it));
        converged = std::sqrt(gamma_next) <= target;
        p = s + (gamma_next / gamma) * p;
        gamma = gamma_next;
    }

    if (!x.allFinite()) throw NumericalError("cgnr_least_squares: non-finite solution");
    result.x = std::move(x);
    result.iterations = it;
    result.converged = converged;
    result.relative_normal_residual = adjoint(forward(result.x) - b).norm() / atb_norm;
    return result;
}

}  // namespace altphase

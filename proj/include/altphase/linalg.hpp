#pragma once

#include <complex>
#include <cstddef>
#include <functional>

#include <Eigen/Dense>

namespace altphase {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

// A linear map given only through its action on vectors.
using LinearMap = std::function<ComplexVector(const ComplexVector&)>;

/// Complex scalar of modulus one.
class UnitComplex {
public:
    /// Throws InvalidArgument if | |z| - 1 | > 1e-12.
    explicit UnitComplex(Complex z);

    Complex value() const noexcept { return value_; }
    operator Complex() const noexcept { return value_; }

private:
    Complex value_;
};

/// z / |z|, with phase(0) = 1. Throws InvalidArgument for non-finite z.
UnitComplex phase(Complex z);

/// Elementwise phase of a vector (same conventions as `phase`).
ComplexVector phase(const ComplexVector& v);

bool all_finite(const ComplexVector& v) noexcept;
bool all_finite(const RealVector& v) noexcept;

/// Sine of the principal angle between two complex directions:
/// sqrt(1 - |<x1, x2>|^2 / (|x1|^2 |x2|^2)), radicand clamped to [0, 1].
double dist(const ComplexVector& x1, const ComplexVector& x2);

struct AlignResult {
    ComplexVector aligned;
    // false when <reference, x> == 0 and x was returned unchanged
    bool ok = true;
};

/// Rotates x by a global phase so that <reference, x> is real and nonnegative.
AlignResult align_global_phase(const ComplexVector& x, const ComplexVector& reference);

struct PowerIterationOptions {
    std::size_t max_iters = 1000;
    double tol = 1e-6;
    // Iterations run before the residual test is first applied; 0 means 2n.
    std::size_t min_iters = 0;
};

struct PowerIterationResult {
    ComplexVector vector;  // unit norm
    double eigenvalue = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Dominant eigenpair of a Hermitian PSD operator by power iteration starting
/// from `start` (need not be normalized, must be nonzero).
///
/// Converged when ||apply(v) - lambda v|| <= tol * lambda. Throws NumericalError
/// when `apply` produces non-finite values.
PowerIterationResult power_iteration(const LinearMap& apply, std::size_t n,
                                     const ComplexVector& start,
                                     const PowerIterationOptions& options = {});

struct CgnrOptions {
    double tol = 1e-10;
    std::size_t max_iters = 500;
    // Probe <forward(u), v> == <u, adjoint(v)> with random vectors before solving.
    bool check_adjoint = false;
    double adjoint_tol = 1e-10;
};

struct CgnrResult {
    ComplexVector x;
    std::size_t iterations = 0;
    bool converged = false;
    // ||adjoint(forward(x) - b)|| / ||adjoint(b)|| at exit
    double relative_normal_residual = 0.0;
};

/// Least squares min ||forward(x) - b|| by conjugate gradients on the normal
/// equations adjoint(forward(x)) = adjoint(b). `x0` warm-starts the iteration
/// (zero vector when empty).
CgnrResult cgnr_least_squares(const LinearMap& forward, const LinearMap& adjoint,
                              const ComplexVector& b, std::size_t n,
                              const CgnrOptions& options = {},
                              const ComplexVector& x0 = {});

}  // namespace altphase

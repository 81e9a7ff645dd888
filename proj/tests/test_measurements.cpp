#include "doctest.h"

#include <cmath>
#include <numbers>

#include "altphase/errors.hpp"
#include "altphase/linalg.hpp"
#include "altphase/measurements.hpp"
#include "altphase/random.hpp"
#include "naive_oracles.hpp"

using namespace altphase;
using altphase::testing::naive_masked_forward;

namespace {

double adjoint_mismatch(const MeasurementOperator& op, Rng& rng) {
    const ComplexVector u = standard_complex_normal(rng, op.n());
    const ComplexVector v = standard_complex_normal(rng, op.m());
    const ComplexVector fu = op.forward(u);
    const ComplexVector av = op.adjoint(v);
    const Complex lhs = fu.dot(v);
    const Complex rhs = u.dot(av);
    return std::abs(lhs - rhs) / std::max(std::abs(lhs), fu.norm() * v.norm() * 1e-3);
}

}  // namespace

TEST_CASE("parse_model") {
    CHECK(parse_model("gaussian") == Model::gaussian);
    CHECK(parse_model("masked-dft") == Model::masked_dft);
    CHECK(to_string(Model::masked_dft) == "masked-dft");
    CHECK_THROWS_AS(parse_model("fourier"), InvalidArgument);
}

TEST_CASE("gaussian operator: entry moments") {
    Rng rng(11);
    const DenseOperator op = sample_gaussian_operator(1000, 1000, rng);
    const ComplexMatrix& a = *op.matrix();
    double m2 = 0.0;
    double m4 = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            const double p = std::norm(a(i, j));
            m2 += p;
            m4 += p * p;
        }
    const double count = static_cast<double>(a.size());
    m2 /= count;
    m4 /= count;
    CHECK(m2 >= 1.99);
    CHECK(m2 <= 2.01);
    CHECK(m4 >= 7.9);
    CHECK(m4 <= 8.1);
}

TEST_CASE("gaussian operator: sample covariance close to 2I") {
    Rng rng(12);
    const DenseOperator op = sample_gaussian_operator(8, 100000, rng);
    const ComplexMatrix& a = *op.matrix();
    const ComplexMatrix cov = (a * a.adjoint()) / static_cast<double>(a.cols());
    const ComplexMatrix diff = cov - 2.0 * ComplexMatrix::Identity(8, 8);
    CHECK(diff.cwiseAbs().maxCoeff() <= 0.1);
}

TEST_CASE("gaussian operator: determinism and shape") {
    Rng r1(99), r2(99);
    const DenseOperator a = sample_gaussian_operator(5, 7, r1);
    const DenseOperator b = sample_gaussian_operator(5, 7, r2);
    CHECK(a.n() == 5);
    CHECK(a.m() == 7);
    CHECK(*a.matrix() == *b.matrix());
    REQUIRE(a.column(3).has_value());
    CHECK(*a.column(3) == a.matrix()->col(3));
    CHECK_THROWS_AS(a.column(7), DimensionError);
}

TEST_CASE("dense operator: forward is A^H x") {
    ComplexMatrix a(2, 3);
    a << Complex(1, 1), Complex(0, 2), Complex(3, 0),
         Complex(0, -1), Complex(1, 0), Complex(2, 2);
    const DenseOperator op(a);
    ComplexVector x(2);
    x << Complex(1, 0), Complex(0, 1);
    const ComplexVector f = op.forward(x);
    // f_j = conj(a_0j) x_0 + conj(a_1j) x_1
    CHECK(std::abs(f(0) - Complex(0, -1)) < 1e-15);
    CHECK(std::abs(f(1) - Complex(0, -1)) < 1e-15);
    CHECK(std::abs(f(2) - Complex(5, 2)) < 1e-15);
    CHECK_THROWS_AS(op.forward(ComplexVector::Zero(3)), DimensionError);
    CHECK_THROWS_AS(op.adjoint(ComplexVector::Zero(2)), DimensionError);
}

TEST_CASE("dense operator: rejects empty or non-finite matrices") {
    CHECK_THROWS_AS(DenseOperator{ComplexMatrix(0, 3)}, InvalidArgument);
    ComplexMatrix bad = ComplexMatrix::Ones(2, 2);
    bad(1, 1) = Complex(std::nan(""), 0);
    CHECK_THROWS_AS(DenseOperator{bad}, InvalidArgument);
}

TEST_CASE("measure: examples") {
    const DenseOperator identity(ComplexMatrix::Identity(2, 2));
    ComplexVector x(2);
    x << Complex(1, 0) / std::sqrt(2.0), Complex(0, 1) / std::sqrt(2.0);
    const RealVector y = measure(identity, x);
    CHECK(std::abs(y(0) - 1 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(y(1) - 1 / std::sqrt(2.0)) < 1e-15);

    Rng rng(3);
    const DenseOperator op = sample_gaussian_operator(6, 20, rng);
    CHECK(measure(op, ComplexVector::Zero(6)).isZero(0.0));
    CHECK_THROWS_AS(measure(op, ComplexVector::Zero(5)), DimensionError);
}

TEST_CASE("measure: invariant under global phase") {
    Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const DenseOperator op = sample_gaussian_operator(10, 40, rng);
        const ComplexVector x = standard_complex_normal(rng, 10);
        const double phi = std::uniform_real_distribution<double>(0.0, 2 * std::numbers::pi)(rng);
        const RealVector y1 = measure(op, x);
        const RealVector y2 = measure(op, ComplexVector(std::polar(1.0, phi) * x));
        CHECK((y1 - y2).cwiseAbs().maxCoeff() <= 1e-12 * y1.maxCoeff());
        CHECK(y1.minCoeff() >= 0.0);
    }
}

TEST_CASE("measure_noisy") {
    Rng rng(5);
    const DenseOperator op = sample_gaussian_operator(4, 50, rng);
    const ComplexVector x = uniform_unit_sphere(rng, 4);

    Rng n1(8);
    CHECK(measure_noisy(op, x, 0.0, n1) == measure(op, x));

    Rng a(9), b(9);
    CHECK(measure_noisy(op, x, 0.3, a) == measure_noisy(op, x, 0.3, b));

    Rng bad(1);
    CHECK_THROWS_AS(measure_noisy(op, x, -0.1, bad), InvalidArgument);
}

TEST_CASE("measure_noisy: x* = 0, sigma = 1 gives E[y^2] = 1") {
    Rng rng(6);
    const DenseOperator op = sample_gaussian_operator(1, 100000, rng);
    Rng noise(7);
    const RealVector y = measure_noisy(op, ComplexVector::Zero(1), 1.0, noise);
    const double mean = y.squaredNorm() / static_cast<double>(y.size());
    CHECK(mean >= 0.98);
    CHECK(mean <= 1.02);
}

TEST_CASE("masked DFT: all-ones mask is the plain DFT") {
    const MaskedDftOperator op(ComplexMatrix::Ones(8, 1));
    CHECK(op.m() == 8);
    CHECK(op.filter_count() == 1);
    ComplexVector e1 = ComplexVector::Zero(8);
    e1(0) = 1.0;
    const RealVector y = measure(op, e1);
    CHECK((y - RealVector::Ones(8)).cwiseAbs().maxCoeff() <= 1e-15);

    ComplexVector e2 = ComplexVector::Zero(8);
    e2(1) = 1.0;
    const ComplexVector f = op.forward(e2);
    CHECK(std::abs(f(2) - std::polar(1.0, -2 * std::numbers::pi * 2 / 8)) < 1e-14);
}

TEST_CASE("masked DFT: forward agrees with a direct DFT") {
    Rng rng(21);
    for (Eigen::Index n : {1, 2, 3, 5, 8, 12, 17, 31, 32, 45, 64}) {
        for (Eigen::Index j : {1, 3}) {
            const MaskedDftOperator op = build_masked_dft_operator(n, j, rng);
            CHECK(op.m() == n * j);
            const ComplexVector x = standard_complex_normal(rng, n);
            const ComplexVector fast = op.forward(x);
            const ComplexVector slow = naive_masked_forward(op.masks(), x);
            CHECK((fast - slow).norm() <= 1e-10 * slow.norm());
        }
    }
}

TEST_CASE("masked DFT: adjoint pair on random probes") {
    Rng rng(22);
    for (Eigen::Index n : {4, 7, 16, 64}) {
        const MaskedDftOperator op = build_masked_dft_operator(n, 4, rng);
        for (int probe = 0; probe < 100; ++probe) CHECK(adjoint_mismatch(op, rng) <= 1e-10);
    }
}

TEST_CASE("masked DFT: adjoint equals the dense conjugate transpose") {
    Rng rng(23);
    const MaskedDftOperator op = build_masked_dft_operator(6, 2, rng);
    ComplexMatrix forward_matrix(op.m(), op.n());
    for (Eigen::Index j = 0; j < op.n(); ++j) {
        ComplexVector e = ComplexVector::Zero(op.n());
        e(j) = 1.0;
        forward_matrix.col(j) = op.forward(e);
    }
    const ComplexVector r = standard_complex_normal(rng, op.m());
    CHECK((op.adjoint(r) - forward_matrix.adjoint() * r).norm() <= 1e-12 * r.norm() * forward_matrix.norm());
}

TEST_CASE("masked DFT: Parseval with the unnormalized convention") {
    Rng rng(24);
    const MaskedDftOperator op = build_masked_dft_operator(20, 3, rng);
    const ComplexVector x = standard_complex_normal(rng, 20);
    double expected = 0.0;
    for (Eigen::Index u = 0; u < 3; ++u) expected += x.cwiseProduct(op.masks().col(u)).squaredNorm();
    expected *= 20.0;
    CHECK(std::abs(op.forward(x).squaredNorm() - expected) <= 1e-10 * expected);
    CHECK(std::abs(naive_masked_forward(op.masks(), x).squaredNorm() - expected) <= 1e-10 * expected);
}

TEST_CASE("masked DFT: no column access, dimension checks") {
    Rng rng(25);
    const MaskedDftOperator op = build_masked_dft_operator(5, 2, rng);
    CHECK(op.matrix() == nullptr);
    CHECK_FALSE(op.column(0).has_value());
    CHECK(op.model() == Model::masked_dft);
    CHECK_THROWS_AS(op.forward(ComplexVector::Zero(4)), DimensionError);
    CHECK_THROWS_AS(op.adjoint(ComplexVector::Zero(5)), DimensionError);
    CHECK_THROWS_AS(MaskedDftOperator{ComplexMatrix(0, 1)}, InvalidArgument);
}

TEST_CASE("adjoint pair: gaussian operators") {
    Rng rng(26);
    for (Eigen::Index n : {1, 5, 32}) {
        const DenseOperator op = sample_gaussian_operator(n, 3 * n + 1, rng);
        for (int probe = 0; probe < 100; ++probe) CHECK(adjoint_mismatch(op, rng) <= 1e-10);
    }
}

TEST_CASE("generate_instance: invariants") {
    InstanceSpec spec;
    spec.n = 12;
    spec.m = 60;
    spec.seed = 77;
    const ProblemInstance inst = generate_instance(spec);
    CHECK(std::abs(inst.x_star.norm() - 1.0) < 1e-12);
    CHECK(inst.y.size() == 60);
    CHECK(inst.y.minCoeff() >= 0.0);
    CHECK((inst.y - measure(*inst.op, inst.x_star)).cwiseAbs().maxCoeff() <= 1e-12);

    const ProblemInstance again = generate_instance(spec);
    CHECK(again.x_star == inst.x_star);
    CHECK(again.y == inst.y);

    spec.seed = 78;
    CHECK(generate_instance(spec).x_star != inst.x_star);
}

TEST_CASE("generate_instance: sparse ground truth") {
    InstanceSpec spec;
    spec.n = 30;
    spec.m = 100;
    spec.sparsity = 4;
    spec.seed = 5;
    const ProblemInstance inst = generate_instance(spec);
    Eigen::Index nonzero = 0;
    for (Eigen::Index i = 0; i < inst.x_star.size(); ++i)
        if (inst.x_star(i) != Complex(0, 0)) ++nonzero;
    CHECK(nonzero == 4);
    CHECK(std::abs(inst.x_star.norm() - 1.0) < 1e-12);
}

TEST_CASE("generate_instance: masked DFT and noise") {
    InstanceSpec spec;
    spec.model = Model::masked_dft;
    spec.n = 16;
    spec.m = 64;
    spec.sigma = 0.1;
    spec.seed = 3;
    const ProblemInstance inst = generate_instance(spec);
    CHECK(inst.op->model() == Model::masked_dft);
    CHECK(inst.op->m() == 64);
    CHECK(inst.y.minCoeff() >= 0.0);
    CHECK((inst.y - measure(*inst.op, inst.x_star)).norm() > 0.0);

    spec.m = 65;
    CHECK_THROWS_AS(generate_instance(spec), InvalidArgument);
}

TEST_CASE("instance JSON: round trip and tamper detection") {
    InstanceSpec spec;
    spec.n = 6;
    spec.m = 30;
    spec.sigma = 0.05;
    spec.seed = 1234;
    const ProblemInstance inst = generate_instance(spec);
    const nlohmann::json doc = to_json(inst);
    CHECK(doc.at("n") == 6);
    CHECK(doc.at("m") == 30);
    CHECK(doc.at("model") == "gaussian");
    CHECK(doc.at("seed") == 1234);
    CHECK(doc.at("x_star").size() == 12);
    CHECK(doc.at("y").size() == 30);

    const ProblemInstance back = instance_from_json(nlohmann::json::parse(doc.dump()));
    CHECK(back.x_star == inst.x_star);
    CHECK(back.y == inst.y);

    nlohmann::json tampered = doc;
    tampered["y"][0] = tampered["y"][0].get<double>() + 1e-9;
    CHECK_THROWS_AS(instance_from_json(tampered), InvalidArgument);
}

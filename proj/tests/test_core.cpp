#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "renyiflow/core.hpp"
#include "renyiflow/generators.hpp"

#include <cmath>

using namespace renyiflow;
using core::Keep;

TEST_CASE("tensor product identities") {
    const Matrix i2 = Matrix::Identity(2, 2);
    CHECK((core::tensor_product(i2, i2) - Matrix::Identity(4, 4)).norm() == 0.0);

    Matrix d1 = Matrix::Zero(2, 2), d2 = Matrix::Zero(2, 2);
    d1.diagonal() << 1.0, 2.0;
    d2.diagonal() << 1.0, 3.0;
    const Matrix kron = core::tensor_product(d1, d2);
    RealVector expect(4);
    expect << 1.0, 3.0, 2.0, 6.0;  // A-major ordering
    for (int i = 0; i < 4; ++i) CHECK(kron(i, i).real() == doctest::Approx(expect(i)));

    const Matrix sx = gen::pauli_x();
    const Matrix once = core::tensor_product(sx, sx);
    CHECK((once * once - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("partial trace recovers factors and preserves trace") {
    gen::Rng rng(11);
    const Matrix ra = gen::random_density(3, rng);
    const Matrix rb = gen::random_density(4, rng);
    const Matrix r = core::tensor_product(ra, rb);
    CHECK((core::partial_trace(r, 3, 4, Keep::A) - ra).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((core::partial_trace(r, 3, 4, Keep::B) - rb).cwiseAbs().maxCoeff() < 1e-14);

    // Bell-state projector: maximally entangled, reduced state is I/2
    Vector bell = Vector::Zero(4);
    bell(0) = 1.0 / std::sqrt(2.0);
    bell(3) = 1.0 / std::sqrt(2.0);
    const Matrix proj = bell * bell.adjoint();
    CHECK((core::partial_trace(proj, 2, 2, Keep::A) - 0.5 * Matrix::Identity(2, 2))
              .cwiseAbs()
              .maxCoeff() < 1e-15);

    const Matrix rnd = gen::random_density(12, rng);
    // element-wise summation oracle for the trace
    Complex tr = 0.0;
    for (int i = 0; i < 12; ++i) tr += rnd(i, i);
    CHECK(std::abs(core::partial_trace(rnd, 3, 4, Keep::A).trace() - tr) < 1e-13);
    CHECK_THROWS_AS(core::partial_trace(rnd, 2, 5, Keep::A), DimensionError);
}

TEST_CASE("thermal state limits") {
    gen::Rng rng(7);
    const Matrix h = gen::random_hermitian(5, rng);
    const Matrix hot = core::thermal_state(h, 0.0);
    CHECK((hot - Matrix::Identity(5, 5) / 5.0).cwiseAbs().maxCoeff() < 1e-14);

    Matrix hq = Matrix::Zero(2, 2);
    hq(1, 1) = 1.0;
    const Matrix cold = core::thermal_state(hq, std::numeric_limits<double>::infinity());
    CHECK(cold(0, 0).real() == doctest::Approx(1.0));
    CHECK(std::abs(cold(1, 1)) < 1e-15);

    const Matrix qb = core::thermal_state(hq, 1.0);
    CHECK(qb(0, 0).real() == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))).epsilon(1e-14));

    // overflow safety: large beta with shifted spectrum
    Matrix hbig = Matrix::Zero(2, 2);
    hbig(0, 0) = 1e4;
    hbig(1, 1) = 1e4 + 1.0;
    const Matrix big = core::thermal_state(hbig, 50.0);
    CHECK(std::isfinite(big(0, 0).real()));
    CHECK(big.trace().real() == doctest::Approx(1.0));
}

TEST_CASE("renyi entropy basics and unitary invariance") {
    gen::Rng rng(3);
    Vector psi(4);
    for (int i = 0; i < 4; ++i) psi(i) = rng.cnormal();
    psi.normalize();
    const Matrix pure = psi * psi.adjoint();
    for (int m = 1; m <= 4; ++m) CHECK(core::renyi_entropy(pure, m) == doctest::Approx(1.0));

    const Matrix mixedQubit = 0.5 * Matrix::Identity(2, 2);
    CHECK(core::renyi_entropy(mixedQubit, 2) == doctest::Approx(0.5));
    for (int d : {2, 3, 5})
        for (int m : {2, 3, 4})
            CHECK(core::renyi_entropy(Matrix::Identity(d, d) / d, m) ==
                  doctest::Approx(std::pow(static_cast<double>(d), 1 - m)));

    for (int d : {2, 4, 8}) {
        const Matrix r = gen::random_density(d, rng);
        CHECK(core::renyi_entropy(r, 1) == doctest::Approx(1.0).epsilon(1e-12));
        const Matrix u = gen::random_unitary(d, rng);
        const Matrix rc = u * r * u.adjoint();
        for (int m : {2, 3})
            CHECK(std::abs(core::renyi_entropy(rc, m) - core::renyi_entropy(r, m)) < 1e-10);
    }
}

TEST_CASE("shannon entropy") {
    Vector psi(3);
    psi << 1.0, 0.0, 0.0;
    CHECK(core::shannon_entropy(psi * psi.adjoint()) == doctest::Approx(0.0));
    CHECK(core::shannon_entropy(Matrix::Identity(4, 4) / 4.0) == doctest::Approx(std::log(4.0)));

    Matrix r = Matrix::Zero(2, 2);
    r(0, 0) = 0.75;
    r(1, 1) = 0.25;
    const double expected = -0.75 * std::log(0.75) - 0.25 * std::log(0.25);
    CHECK(core::shannon_entropy(r) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("conserved measure K") {
    gen::Rng rng(17);
    const Matrix ra = gen::random_density(2, rng);
    const Matrix rb = gen::random_density(3, rng);
    const Complex k = core::conserved_measure_k(core::tensor_product(ra, rb), 2, 3);
    // index-contraction oracle: the product state factorizes into cubic traces
    const Complex expect = (ra * ra * ra).trace() * (rb * rb * rb).trace();
    CHECK(std::abs(k - expect) < 1e-13);

    const Matrix halves = core::tensor_product(0.5 * Matrix::Identity(2, 2),
                                               0.5 * Matrix::Identity(2, 2));
    CHECK(std::abs(core::conserved_measure_k(halves, 2, 2) - Complex(1.0 / 16.0)) < 1e-15);

    // invariance under U_A (x) U_B, brute-force contraction on both sides
    const Matrix r = gen::random_density(6, rng);
    const Matrix u = core::tensor_product(gen::random_unitary(2, rng), gen::random_unitary(3, rng));
    const Complex k1 = core::conserved_measure_k(r, 2, 3);
    const Complex k2 = core::conserved_measure_k(u * r * u.adjoint(), 2, 3);
    CHECK(std::abs(k1 - k2) < 1e-10);

    // not invariant under generic entangling unitaries
    const Matrix ug = gen::random_unitary(6, rng);
    const Complex k3 = core::conserved_measure_k(ug * r * ug.adjoint(), 2, 3);
    CHECK(std::abs(k1 - k3) > 1e-6);
}

TEST_CASE("matrix power and support handling") {
    gen::Rng rng(23);
    const Matrix r = gen::random_density(4, rng);
    const Matrix sqrtR = core::matrix_power(r, 0.5);
    CHECK((sqrtR * sqrtR - r).cwiseAbs().maxCoeff() < 1e-12);

    // rank-deficient input: integer powers stay on the support
    Vector psi(3);
    psi << 1.0, 1.0, 0.0;
    psi.normalize();
    const Matrix pure = psi * psi.adjoint();
    CHECK((core::matrix_power(pure, 3.0) - pure).cwiseAbs().maxCoeff() < 1e-12);

    Matrix indef = Matrix::Zero(2, 2);
    indef(0, 0) = 1.0;
    indef(1, 1) = -0.5;
    CHECK_THROWS_AS(core::matrix_power(indef, 0.5), NumericalGuardError);
}

TEST_CASE("finite-difference Shannon limit of the Renyi family") {
    gen::Rng rng(31);
    const Matrix r = gen::random_density(5, rng);
    const double s = core::shannon_entropy(r);
    for (double m : {1.0 + 1e-4, 1.0 - 1e-4}) {
        const double sm = core::matrix_power(r, m).trace().real();
        const double approx = -std::log(sm) / (m - 1.0);
        CHECK(std::abs(approx - s) < 1e-4);
    }
}

TEST_CASE("density matrix validation rejects bad inputs") {
    gen::Rng rng(41);
    CHECK_NOTHROW(core::require_density_matrix(gen::random_density(4, rng)));
    Matrix bad = gen::random_density(3, rng);
    bad(0, 1) += Complex(0.1, 0.0);  // breaks Hermiticity
    CHECK_THROWS(core::require_density_matrix(bad));
    Matrix scaled = 1.5 * gen::random_density(3, rng);
    CHECK_THROWS(core::require_density_matrix(scaled));
    Matrix negative = Matrix::Zero(2, 2);
    negative(0, 0) = 1.1;
    negative(1, 1) = -0.1;
    CHECK_THROWS(core::require_density_matrix(negative));
}

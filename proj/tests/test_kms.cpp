#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "renyiflow/generators.hpp"
#include "renyiflow/kms.hpp"
#include "renyiflow/perturbative.hpp"

#include <cmath>

using namespace renyiflow;

namespace {

std::vector<double> bohr_grid(const Matrix& h, double pad = 0.0) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    std::vector<double> w;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j)
            if (i != j) w.push_back(es.eigenvalues()(i) - es.eigenvalues()(j) + pad);
    return w;
}

Matrix random_level_hamiltonian(Eigen::Index n, gen::Rng& rng, double spread) {
    Matrix h = Matrix::Zero(n, n);
    double e = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        h(i, i) = e;
        e += spread * (0.5 + rng.uniform());
    }
    return h;
}

}  // namespace

TEST_CASE("qubit correlator has two thermally weighted peaks") {
    const double eps = 1.4, beta = 0.9, eta = 0.05;
    Matrix hA = Matrix::Zero(2, 2);
    hA(1, 1) = eps;
    const std::vector<double> grid = {-eps, eps};
    const auto k = kms::energy_basis_correlator(hA, {gen::pauli_x()}, beta, 0, 1, grid, eta);
    const double z = 1.0 + std::exp(-beta * eps);
    const double peakScale = 2.0 * M_PI * perturbative::gaussian_delta(0.0, eta);
    CHECK(k.samples[0](0, 0).real() ==
          doctest::Approx(peakScale / z).epsilon(1e-6));  // ground-state weight at -eps
    CHECK(k.samples[1](0, 0).real() ==
          doctest::Approx(peakScale * std::exp(-beta * eps) / z).epsilon(1e-6));
}

TEST_CASE("standard KMS at N = 0, M = 1") {
    gen::Rng rng(3);
    const Matrix hA = random_level_hamiltonian(4, rng, 0.8);
    const Matrix a1 = gen::random_offdiagonal_coupling(4, rng);
    const double beta = 1.2, eta = 0.07;
    const auto grid = bohr_grid(hA);
    const auto corr = kms::energy_basis_correlator(hA, {a1}, beta, 0, 1, grid, eta);
    const auto spec = kms::make_spectral_data(hA, {a1}, beta, grid, eta);
    const auto rep = kms::check_kms_multi(spec, corr, beta, 0, 1);
    CHECK(rep.maxResidual < 1e-8);
}

TEST_CASE("generalized KMS for random multi-level systems") {
    for (std::uint64_t seed : {5u, 6u}) {
        gen::Rng rng(seed);
        const Eigen::Index dim = (seed == 5u) ? 4 : 6;
        const Matrix hA = random_level_hamiltonian(dim, rng, 0.6);
        const std::vector<Matrix> ops = {gen::random_offdiagonal_coupling(dim, rng),
                                         gen::random_offdiagonal_coupling(dim, rng)};
        const double beta = 0.9, eta = 0.05;
        const auto grid = bohr_grid(hA);
        for (int m : {2, 3}) {
            const auto spec = kms::make_spectral_data(hA, ops, m * beta, grid, eta);
            for (int n = 0; n <= m; ++n) {
                const auto corr = kms::energy_basis_correlator(hA, ops, beta, n, m, grid, eta);
                const auto rep = kms::check_kms_multi(spec, corr, beta, n, m);
                CHECK(rep.maxResidual < 1e-8);
            }
        }
    }
}

TEST_CASE("KMS residual stays at round-off for both broadenings") {
    gen::Rng rng(9);
    const Matrix hA = random_level_hamiltonian(4, rng, 0.7);
    const Matrix a1 = gen::random_offdiagonal_coupling(4, rng);
    const double beta = 1.1;
    const auto grid = bohr_grid(hA);
    for (double eta : {0.1, 0.05}) {
        const auto spec = kms::make_spectral_data(hA, {a1}, 2 * beta, grid, eta);
        const auto corr = kms::energy_basis_correlator(hA, {a1}, beta, 1, 2, grid, eta);
        CHECK(kms::check_kms_multi(spec, corr, beta, 1, 2).maxResidual < 1e-8);
    }
}

TEST_CASE("infinite-temperature limit keeps the relation intact") {
    gen::Rng rng(11);
    const Matrix hA = random_level_hamiltonian(3, rng, 0.9);
    const Matrix a1 = gen::random_offdiagonal_coupling(3, rng);
    const double beta = 1e-6, eta = 0.06;
    const auto grid = bohr_grid(hA);
    const auto spec = kms::make_spectral_data(hA, {a1}, 3 * beta, grid, eta);
    const auto corr = kms::energy_basis_correlator(hA, {a1}, beta, 1, 3, grid, eta);
    CHECK(kms::check_kms_multi(spec, corr, beta, 1, 3).maxResidual < 1e-8);
}

TEST_CASE("dissipative susceptibility antisymmetry") {
    gen::Rng rng(13);
    // well-separated Bohr frequencies: the identity is exact on shell and
    // carries only Gaussian-tail error between peaks
    Matrix hA = Matrix::Zero(4, 4);
    hA.diagonal() << 0.0, 0.4, 1.3, 2.9;
    const std::vector<Matrix> ops = {gen::random_offdiagonal_coupling(4, rng),
                                     gen::random_offdiagonal_coupling(4, rng)};
    const double beta = 1.4, eta = 0.05;
    std::vector<double> grid = bohr_grid(hA);
    std::vector<double> full = grid;
    for (double w : grid) full.push_back(-w);
    const auto spec = kms::make_spectral_data(hA, ops, beta, full, eta);
    double peak = 0.0;
    for (const auto& x : spec.chiTilde) peak = std::max(peak, x.cwiseAbs().maxCoeff());
    const std::size_t half = grid.size();
    for (std::size_t k = 0; k < half; ++k) {
        const Matrix& plus = spec.chiTilde[k];
        const Matrix& minus = spec.chiTilde[half + k];
        CHECK((plus + minus.transpose()).cwiseAbs().maxCoeff() < 1e-6 * peak);
    }
}

TEST_CASE("Renyi free-energy identity") {
    Matrix hq = Matrix::Zero(2, 2);
    hq(1, 1) = 1.0;
    const auto one = kms::renyi_free_energy_identity(hq, 1.3, 1);
    CHECK(one.lhs == doctest::Approx(0.0));
    CHECK(one.residual < 1e-15);

    const auto qb = kms::renyi_free_energy_identity(hq, 1.0, 2);
    const double expect =
        std::log((1.0 + std::exp(-2.0)) / std::pow(1.0 + std::exp(-1.0), 2));
    CHECK(qb.lhs == doctest::Approx(expect).epsilon(1e-14));
    CHECK(qb.rhs == doctest::Approx(expect).epsilon(1e-14));
    CHECK(qb.residual < 1e-14);

    gen::Rng rng(17);
    const Matrix h6 = random_level_hamiltonian(6, rng, 0.8);
    for (double beta : {0.1, 1.0, 10.0})
        for (int m : {2, 3, 5})
            CHECK(kms::renyi_free_energy_identity(h6, beta, m).residual < 1e-12);
}

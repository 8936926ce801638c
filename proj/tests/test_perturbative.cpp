#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "renyiflow/correspondence.hpp"
#include "renyiflow/generators.hpp"
#include "renyiflow/perturbative.hpp"

#include <cmath>

using namespace renyiflow;
using perturbative::RateTable;
using perturbative::WBlockForm;

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
    return v;
}

BipartiteSystem banded_system(double lambda, std::uint64_t seed) {
    gen::Rng rng(seed);
    Matrix hA = Matrix::Zero(2, 2), hB = Matrix::Zero(4, 4);
    hA.diagonal() << 0.0, 1.0;
    hB.diagonal() << 0.0, 0.9, 1.05, 1.2;
    std::vector<std::pair<Matrix, Matrix>> coup;
    coup.emplace_back(gen::random_offdiagonal_coupling(2, rng),
                      gen::random_offdiagonal_coupling(4, rng));
    return BipartiteSystem(hA, hB, std::move(coup), lambda);
}

RealVector thermal_probs(const Matrix& h, double beta) {
    const Matrix r = core::thermal_state(h, beta);
    return r.diagonal().real();
}

/// Rate table with the Lorentzian-Richardson kernel, the line shape the
/// e^{-eta tau} damped time integrals realize.
RateTable lr_rates(const BipartiteSystem& sys, double eta) {
    RateTable rt = perturbative::golden_rule_rates(sys, eta);
    const Matrix hab = sys.h_coupling();
    const Eigen::Index d = rt.gamma.rows();
    for (Eigen::Index s = 0; s < d; ++s)
        for (Eigen::Index t = 0; t < d; ++t) {
            if (rt.gamma(s, t) == 0.0 && std::norm(hab(s, t)) == 0.0) continue;
            if (s / rt.dimB() == t / rt.dimB() || s % rt.dimB() == t % rt.dimB()) continue;
            rt.gamma(s, t) =
                2.0 * M_PI * std::norm(hab(s, t)) *
                correspondence::delta_kernel(rt.energy(s) - rt.energy(t), eta,
                                             correspondence::DeltaKernel::LorentzianRichardson);
        }
    return rt;
}

}  // namespace

TEST_CASE("golden rule rates: zeros, symmetry, closed form") {
    BipartiteSystem zero = banded_system(0.0, 3);
    const RateTable rt0 = perturbative::golden_rule_rates(zero, 0.1);
    CHECK(rt0.gamma.cwiseAbs().maxCoeff() == 0.0);

    BipartiteSystem sys = banded_system(0.2, 3);
    const RateTable rt = perturbative::golden_rule_rates(sys, 0.1);
    CHECK((rt.gamma - rt.gamma.transpose()).cwiseAbs().maxCoeff() < 1e-15);
    for (Eigen::Index s = 0; s < rt.gamma.rows(); ++s) {
        CHECK(rt.gamma(s, s) == 0.0);
        for (Eigen::Index t = 0; t < rt.gamma.cols(); ++t)
            if (s / 4 == t / 4 || s % 4 == t % 4) CHECK(rt.gamma(s, t) == 0.0);
    }

    // resonant two-level exchange: Gamma = 2 pi lambda^2 N_eta(0) |g|^2
    Matrix hA = Matrix::Zero(2, 2), hB = Matrix::Zero(2, 2);
    hA.diagonal() << 0.0, 1.0;
    hB.diagonal() << 0.0, 1.0;
    const double g = 0.8;
    BipartiteSystem res(hA, hB, {{g * gen::pauli_x(), gen::pauli_x()}}, 0.1);
    const double eta = 0.2;
    const RateTable rr = perturbative::golden_rule_rates(res, eta);
    const double expect =
        2.0 * M_PI * 0.01 * g * g * perturbative::gaussian_delta(0.0, eta);
    CHECK(rr.gamma(0 * 2 + 1, 1 * 2 + 0) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("single-world W block vanishes pointwise with the corrected form") {
    gen::Rng rng(7);
    Matrix hA = Matrix::Zero(3, 3), hB = Matrix::Zero(3, 3);
    hA.diagonal() << 0.0, 0.7, 1.9;
    hB.diagonal() << 0.0, 1.1, 2.4;
    const Matrix rhoA = core::thermal_state(hA, 0.8);
    const Matrix rhoB = core::thermal_state(hB, 1.4);
    const Matrix a1 = gen::random_offdiagonal_coupling(3, rng);
    const Matrix b1 = gen::random_offdiagonal_coupling(3, rng);
    const auto grid = linspace(0.0, 30.0, 3001);

    const auto c = perturbative::bath_correlator(rhoB, {b1}, hB, grid);
    const auto k0 = perturbative::multiworld_correlator(rhoA, {a1}, hA, 0, 1, grid);
    const auto k1 = perturbative::multiworld_correlator(rhoA, {a1}, hA, 1, 1, grid);
    const auto w = perturbative::w_block(c, k0, k1, grid, WBlockForm::Corrected);
    double wmax = 0.0;
    for (const Complex& v : w.values) wmax = std::max(wmax, std::abs(v));
    CHECK(wmax < 1e-13);
}

TEST_CASE("W integral reproduces the golden-rule flow; printed form does not") {
    const double lambda = 0.15, betaA = 0.9, betaB = 0.5, eta = 0.35;
    BipartiteSystem sys = banded_system(lambda, 11);
    const Matrix rhoA = core::thermal_state(sys.hA, betaA);
    const Matrix rhoB = core::thermal_state(sys.hB, betaB);
    const RealVector pA = thermal_probs(sys.hA, betaA);
    const RealVector pB = thermal_probs(sys.hB, betaB);

    const auto grid = linspace(0.0, 120.0, 48001);
    std::vector<Matrix> bScaled{lambda * sys.couplings[0].second};
    const auto c = perturbative::bath_correlator(rhoB, bScaled, sys.hB, grid);

    for (int m : {2, 3}) {
        const auto k0 =
            perturbative::multiworld_correlator(rhoA, {sys.couplings[0].first}, sys.hA, 0, m, grid);
        const auto k1 =
            perturbative::multiworld_correlator(rhoA, {sys.couplings[0].first}, sys.hA, 1, m, grid);
        const auto w = perturbative::w_block(c, k0, k1, grid, WBlockForm::Corrected);
        const FlowReport viaW = perturbative::flow_second_order(w, eta, false);
        const FlowReport viaRates = perturbative::flow_2nd_states(lr_rates(sys, eta), pA, pB, m);
        // F_M = M * int W
        CHECK(m * viaW.flow == doctest::Approx(viaRates.flow).epsilon(2e-3));

        const auto wp = perturbative::w_block(c, k0, k1, grid, WBlockForm::Printed);
        const FlowReport viaPrinted = perturbative::flow_second_order(wp, eta, false);
        CHECK(std::abs(m * viaPrinted.flow - viaRates.flow) >
              0.2 * std::abs(viaRates.flow));
    }
}

TEST_CASE("unitarity sum rule for the diagonal master-equation block") {
    const double lambda = 0.25, eta = 0.3;
    BipartiteSystem sys = banded_system(lambda, 19);
    const Matrix hab = sys.h_coupling();
    const RateTable rt = lr_rates(sys, eta);
    const Eigen::Index d = sys.dim();
    const auto grid = linspace(0.0, 120.0, 24001);

    for (Eigen::Index s : {0, 3, 5}) {
        // diagonal block: W_ss(tau) = -2 Re sum_t |H_st|^2 e^{i(E_s - E_t) tau}
        perturbative::SampledFunction w;
        w.tau = grid;
        for (double t : grid) {
            Complex acc = 0.0;
            for (Eigen::Index u = 0; u < d; ++u)
                acc -= 2.0 * std::real(std::norm(hab(s, u)) *
                                       std::exp(Complex(0.0, (rt.energy(s) - rt.energy(u)) * t)));
            w.values.push_back(acc);
        }
        const FlowReport rep = perturbative::flow_second_order(w, eta, false);
        CHECK(rep.flow == doctest::Approx(-rt.escape(s)).epsilon(1e-6));
    }
}

TEST_CASE("second-order flow from states: limits and form equality") {
    const double eta = 0.15;
    BipartiteSystem sys = banded_system(0.3, 23);
    const RateTable rt = perturbative::golden_rule_rates(sys, eta);

    // form1 == form2 for arbitrary distributions
    gen::Rng rng(29);
    RealVector pA(2), pB(4);
    pA << 0.6, 0.4;
    pB << 0.4, 0.3, 0.2, 0.1;
    for (double m : {2.0, 3.0, 4.0, 1.7}) {
        const FlowReport rep = perturbative::flow_2nd_states(rt, pA, pB, m);
        CHECK(rep.breakdown.at("form1") ==
              doctest::Approx(rep.breakdown.at("form2")).epsilon(1e-10));
    }

    // zero-temperature A: F_M = -M Gamma_0 exactly in this representation
    RealVector ground(2);
    ground << 1.0, 0.0;
    const RealMatrix gred = rt.reduced_rates(pB);
    for (int m : {2, 3}) {
        const FlowReport rep = perturbative::flow_2nd_states(rt, ground, pB, m);
        CHECK(rep.flow == doctest::Approx(-m * gred(0, 1)).epsilon(1e-12));
    }
}

TEST_CASE("equal-temperature equilibrium kills the second-order flow") {
    // engineered exact resonance so the on-shell cancellation is exact
    Matrix hA = Matrix::Zero(2, 2), hB = Matrix::Zero(2, 2);
    hA.diagonal() << 0.0, 1.0;
    hB.diagonal() << 0.0, 1.0;
    gen::Rng rng(31);
    BipartiteSystem sys(hA, hB, {{gen::pauli_x(), gen::pauli_x()}}, 0.2);
    const RateTable rt = perturbative::golden_rule_rates(sys, 0.12);
    const double beta = 1.3;
    const RealVector pA = thermal_probs(hA, beta);
    const RealVector pB = thermal_probs(hB, beta);
    for (int m : {2, 3, 4}) {
        const FlowReport rep = perturbative::flow_2nd_states(rt, pA, pB, m);
        CHECK(std::abs(rep.flow) < 1e-12 * rt.gamma.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("Shannon flow: textbook relation and edge cases") {
    Matrix hA = Matrix::Zero(3, 3), hB = Matrix::Zero(3, 3);
    hA.diagonal() << 0.0, 0.8, 1.6;
    hB.diagonal() << 0.0, 0.8, 1.6;
    gen::Rng rng(37);
    BipartiteSystem sys(hA, hB,
                        {{gen::random_offdiagonal_coupling(3, rng),
                          gen::random_offdiagonal_coupling(3, rng)}},
                        0.2);
    const RateTable rt = perturbative::golden_rule_rates(sys, 0.1);
    const double beta = 0.9;
    const RealVector pA = thermal_probs(hA, beta);
    RealVector pB(3);
    pB << 0.2, 0.3, 0.5;  // B far from equilibrium

    const FlowReport rep = perturbative::flow_2nd_shannon(rt, pA, pB);
    // thermal A: dS/dt = beta dE/dt term by term
    CHECK(rep.breakdown.at("dSdt") ==
          doctest::Approx(beta * rep.breakdown.at("dEdt")).epsilon(1e-10));

    // detailed-balance-saturating rates: stationary distribution, no flow
    const RealVector pBth = thermal_probs(hB, beta);
    const FlowReport still = perturbative::flow_2nd_shannon(rt, pA, pBth);
    CHECK(std::abs(still.breakdown.at("dSdt")) < 1e-12 * rt.gamma.cwiseAbs().maxCoeff());

    // M -> 1 finite difference of the Renyi family
    const double dm = 1e-4;
    const FlowReport up = perturbative::flow_2nd_states(rt, pA, pB, 1.0 + dm);
    const FlowReport dn = perturbative::flow_2nd_states(rt, pA, pB, 1.0 - dm);
    const double slope = (up.flow - dn.flow) / (2.0 * dm);
    CHECK(slope == doctest::Approx(rep.flow).epsilon(1e-4));

    // zero-probability target with nonzero rate
    RealVector bad(3);
    bad << 1.0, 0.0, 0.0;
    CHECK_THROWS_AS(perturbative::flow_2nd_shannon(rt, bad, pB), NumericalGuardError);
}

TEST_CASE("fourth order: equilibrium amplitudes vanish, degenerate limit handled") {
    Matrix hA = Matrix::Zero(3, 3), hB = Matrix::Zero(3, 3);
    hA.diagonal() << 0.0, 1.0, 1.0;  // degenerate pair
    hB.diagonal() << 0.0, 1.0, 2.0;
    gen::Rng rng(41);
    BipartiteSystem sys(hA, hB,
                        {{gen::random_offdiagonal_coupling(3, rng),
                          gen::random_offdiagonal_coupling(3, rng)}},
                        0.3);
    const double eta = 0.1;

    // both thermal at the same temperature: amplitudes vanish on shell
    const double beta = 1.1;
    const RealVector pAeq = thermal_probs(hA, beta);
    const RealVector pBeq = thermal_probs(hB, beta);
    const FlowReport eq = perturbative::flow_4th_order(sys, pAeq, pBeq, 2, eta);
    // driven B for scale comparison
    RealVector pBdrv(3);
    pBdrv << 0.2, 0.2, 0.6;
    const FlowReport drv = perturbative::flow_4th_order(sys, pAeq, pBdrv, 2, eta);
    CHECK(std::abs(eq.flow) < 0.05 * std::abs(drv.flow));

    // M = 1: the divided difference vanishes identically
    const FlowReport one = perturbative::flow_4th_order(sys, pAeq, pBdrv, 1, eta);
    CHECK(one.flow == doctest::Approx(0.0));

    // Shannon limit equals -d/dM of the family at M = 1
    const FlowReport sh = perturbative::flow_4th_shannon(sys, pAeq, pBdrv, eta);
    const double dm = 1e-5;
    const FlowReport up = perturbative::flow_4th_order(sys, pAeq, pBdrv, 1.0 + dm, eta);
    const FlowReport dn = perturbative::flow_4th_order(sys, pAeq, pBdrv, 1.0 - dm, eta);
    const double dSM = (up.breakdown.at("dSMdt") - dn.breakdown.at("dSMdt")) / (2.0 * dm);
    CHECK(sh.breakdown.at("dSdt") == doctest::Approx(-dSM).epsilon(1e-6));
    CHECK(sh.breakdown.at("dSdt") <= 0.0);
}

TEST_CASE("flow_second_order flags non-convergent extrapolation") {
    perturbative::SampledFunction flat;
    flat.tau = linspace(0.0, 200.0, 2001);
    flat.values.assign(flat.tau.size(), Complex(1.0, 0.0));
    CHECK_THROWS_AS(perturbative::flow_second_order(flat, 0.1, true), NumericalGuardError);
}

#include "renyiflow/correspondence.hpp"

#include "renyiflow/core.hpp"

#include <cmath>

namespace renyiflow::correspondence {

namespace {

void push_peak(SpectralPeaks& peaks, double nu, const Matrix& coef) {
    if (coef.cwiseAbs().maxCoeff() < 1e-300) return;
    for (std::size_t k = 0; k < peaks.nu.size(); ++k) {
        if (std::abs(peaks.nu[k] - nu) < 1e-12) {
            peaks.coef[k] += coef;
            return;
        }
    }
    peaks.nu.push_back(nu);
    peaks.coef.push_back(coef);
}

}  // namespace

SpectralPeaks bath_peaks(const Matrix& hB, const std::vector<Matrix>& bOps, const RealVector& q) {
    const Eigen::Index d = hB.rows();
    const std::size_t nops = bOps.size();
    SpectralPeaks peaks;
    for (Eigen::Index n = 0; n < d; ++n)
        for (Eigen::Index m = 0; m < d; ++m) {
            Matrix c(nops, nops);
            for (std::size_t i = 0; i < nops; ++i)
                for (std::size_t j = 0; j < nops; ++j) c(i, j) = bOps[i](n, m) * bOps[j](m, n) * q(m);
            push_peak(peaks, hB(n, n).real() - hB(m, m).real(), c);
        }
    return peaks;
}

SpectralPeaks force_peaks(const std::vector<double>& nu, const std::vector<Vector>& amp) {
    SpectralPeaks peaks;
    const std::size_t nops = amp.empty() ? 0 : amp.front().size();
    for (std::size_t k = 0; k < nu.size(); ++k)
        for (std::size_t l = 0; l < nu.size(); ++l) {
            if (std::abs(nu[k] + nu[l]) > 1e-12) continue;
            Matrix c(nops, nops);
            for (std::size_t i = 0; i < nops; ++i)
                for (std::size_t j = 0; j < nops; ++j) c(i, j) = amp[k](i) * amp[l](j);
            // b_i(t) b_j(t - tau) averaged over t oscillates as e^{-i nu_k tau}
            push_peak(peaks, -nu[k], c);
        }
    return peaks;
}

void force_harmonics(const Matrix& hB, const std::vector<Matrix>& bOps, const Matrix& rhoB,
                     std::vector<double>& nu, std::vector<Vector>& amp) {
    const Eigen::Index d = hB.rows();
    const std::size_t nops = bOps.size();
    nu.clear();
    amp.clear();
    // <B_i>(t) = sum_{ab} B_{i,ab} rho_{ba} e^{i(E_a - E_b) t}; collect by frequency
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b) {
            Vector v(nops);
            for (std::size_t i = 0; i < nops; ++i) v(i) = bOps[i](a, b) * rhoB(b, a);
            if (v.cwiseAbs().maxCoeff() < 1e-300) continue;
            const double w = -(hB(a, a).real() - hB(b, b).real());  // e^{-i w t} convention
            bool merged = false;
            for (std::size_t k = 0; k < nu.size(); ++k)
                if (std::abs(nu[k] - w) < 1e-12) {
                    amp[k] += v;
                    merged = true;
                    break;
                }
            if (!merged) {
                nu.push_back(w);
                amp.push_back(v);
            }
        }
}

double delta_kernel(double x, double eta, DeltaKernel kernel) {
    if (kernel == DeltaKernel::Gaussian) return perturbative::gaussian_delta(x, eta);
    auto lor = [](double xx, double e) { return (e / M_PI) / (xx * xx + e * e); };
    return 2.0 * lor(x, 0.5 * eta) - lor(x, eta);
}

master::JumpProcess golden_rule_process(const RealVector& eA, const std::vector<Matrix>& aOps,
                                        const SpectralPeaks& peaks, double lambda, double eta,
                                        DeltaKernel kernel) {
    const Eigen::Index d = eA.size();
    const std::size_t nops = aOps.size();
    master::JumpProcess proc;
    proc.dim = d;
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b) {
            if (a == b) continue;
            double rate = 0.0;
            for (std::size_t k = 0; k < peaks.nu.size(); ++k) {
                const double g = delta_kernel(eA(b) - eA(a) + peaks.nu[k], eta, kernel);
                if (g == 0.0) continue;
                Complex amp = 0.0;
                for (std::size_t i = 0; i < nops; ++i)
                    for (std::size_t j = 0; j < nops; ++j)
                        amp += aOps[i](b, a) * aOps[j](a, b) * peaks.coef[k](i, j);
                rate += 2.0 * M_PI * lambda * lambda * g * amp.real();
            }
            if (rate > 1e-300)
                proc.edges.push_back({a, b, rate, eA(b) - eA(a)});
        }
    return proc;
}

namespace {

RealVector thermal_weights(const RealVector& e, double beta) {
    RealVector p(e.size());
    const double e0 = e.minCoeff();
    for (Eigen::Index i = 0; i < e.size(); ++i) p(i) = std::exp(-beta * (e(i) - e0));
    p /= p.sum();
    return p;
}

}  // namespace

Complex incoherent_fcs(const RealVector& eA, const std::vector<Matrix>& aOps,
                       const SpectralPeaks& bathPeaksAtQ, const SpectralPeaks& classicalPeaks,
                       double lambda, double eta, double betaRescaled, Complex xi,
                       DeltaKernel kernel) {
    const RealVector p = thermal_weights(eA, betaRescaled);
    const master::JumpProcess quantum =
        golden_rule_process(eA, aOps, bathPeaksAtQ, lambda, eta, kernel);
    Complex f = quantum.pinned_rate(xi, p);
    if (!classicalPeaks.nu.empty()) {
        const master::JumpProcess classical =
            golden_rule_process(eA, aOps, classicalPeaks, lambda, eta, kernel);
        f += classical.pinned_rate(xi, p);
    }
    return f;
}

Complex coherent_fcs(const RealVector& eA, const std::vector<Matrix>& aOps,
                     const std::vector<double>& nu, const std::vector<Vector>& amp, double lambda,
                     double eta, double betaRescaled, Complex xi, DeltaKernel kernel) {
    const RealVector p = thermal_weights(eA, betaRescaled);
    const Eigen::Index d = eA.size();
    Complex f = 0.0;
    // direct per-harmonic golden rule: rate_{a->b} = 2 pi lambda^2
    // |sum_i A_{i,ba} amp_k(i)|^2 N_eta(E_b - E_a - nu_k)
    for (std::size_t k = 0; k < nu.size(); ++k) {
        for (Eigen::Index a = 0; a < d; ++a)
            for (Eigen::Index b = 0; b < d; ++b) {
                if (a == b) continue;
                Complex me = 0.0;
                for (std::size_t i = 0; i < aOps.size(); ++i) me += aOps[i](b, a) * amp[k](i);
                const double rate = 2.0 * M_PI * lambda * lambda * std::norm(me) *
                                    delta_kernel(eA(b) - eA(a) - nu[k], eta, kernel);
                if (rate <= 1e-300) continue;
                const double w = eA(b) - eA(a);
                f += p(a) * rate * (std::exp(Complex(0.0, 1.0) * xi * w) - 1.0);
            }
    }
    return f;
}

CorrespondenceReport check_correspondence(const BipartiteSystem& system, const Matrix& rhoB, int m,
                                          double beta, double eta,
                                          const std::vector<double>& tauGrid) {
    if (m < 1) throw std::invalid_argument("check_correspondence: m >= 1");
    const Matrix thermalA = core::thermal_state(system.hA, beta);

    std::vector<Matrix> aOps, bOps;
    for (const auto& [ai, bi] : system.couplings) {
        aOps.push_back(ai);
        bOps.push_back(bi);
    }

    // stationary (diagonal) part of rhoB drives the quantum channels, the
    // coherences drive the classical-force channels
    RealVector qDiag = rhoB.diagonal().real();
    Matrix rhoBDiag = Matrix::Zero(rhoB.rows(), rhoB.cols());
    rhoBDiag.diagonal() = rhoB.diagonal();
    Matrix rhoBCoh = rhoB - rhoBDiag;

    std::vector<double> nu;
    std::vector<Vector> amp;
    force_harmonics(system.hB, bOps, rhoBCoh, nu, amp);
    std::vector<Vector> ampScaled;
    for (const auto& v : amp) ampScaled.push_back(system.lambda * v);

    // ---- left side: time-domain perturbative pipeline at native beta ----
    std::vector<Matrix> bOpsScaled;
    for (const auto& b : bOps) bOpsScaled.push_back(system.lambda * b);
    perturbative::Correlator c =
        perturbative::bath_correlator(rhoBDiag, bOpsScaled, system.hB, tauGrid);
    // period-averaged full correlator: the coherence part of rhoB survives
    // averaging as the disconnected <B_i(t1)><B_j(t2)> piece; without it the
    // cross-world flow would double-subtract the classical channel
    {
        const SpectralPeaks cl = force_peaks(nu, ampScaled);
        for (std::size_t k = 0; k < cl.nu.size(); ++k) {
            c.freq.push_back(cl.nu[k]);
            c.coef.push_back(cl.coef[k]);
        }
        c.samples.clear();
        for (double t : tauGrid) c.samples.push_back(c.eval(t));
    }
    const perturbative::Correlator k0 =
        perturbative::multiworld_correlator(thermalA, aOps, system.hA, 0, m, tauGrid);
    const perturbative::Correlator k1 =
        perturbative::multiworld_correlator(thermalA, aOps, system.hA, 1, m, tauGrid);
    const perturbative::SampledFunction w = perturbative::w_block(c, k0, k1, tauGrid);
    const FlowReport inc = perturbative::flow_second_order(w, eta, false);
    const FlowReport coh = perturbative::flow_2nd_coherent(thermalA, aOps, system.hA, m, nu,
                                                           ampScaled, tauGrid, eta);

    // ---- right side: golden-rule FCS at M beta, xi* = i beta (M-1) ----
    const RealVector eA = system.hA.diagonal().real();
    const Complex xiStar(0.0, beta * (m - 1));
    const SpectralPeaks bPeaks = bath_peaks(system.hB, bOpsScaled, qDiag);
    const SpectralPeaks clPeaks = force_peaks(nu, ampScaled);
    const Complex fi = incoherent_fcs(eA, aOps, bPeaks, clPeaks, 1.0, eta, m * beta, xiStar,
                                      DeltaKernel::LorentzianRichardson);
    const Complex fc = coherent_fcs(eA, aOps, nu, ampScaled, 1.0, eta, m * beta, xiStar,
                                    DeltaKernel::LorentzianRichardson);

    CorrespondenceReport rep;
    // F_M = M * int W (the M sits in front of the single-world trace in the
    // second-order expansion), so F_M/M is the bare W integral
    rep.lhsIncoherent = inc.flow;
    rep.lhsCoherent = coh.flow / m;
    rep.lhs = rep.lhsIncoherent + rep.lhsCoherent;
    rep.fIncoherent = fi.real();
    rep.fCoherent = fc.real();
    rep.rhs = rep.fIncoherent - rep.fCoherent;
    rep.residual = std::abs(rep.lhs - rep.rhs);
    rep.relative = rep.residual / std::max(std::abs(rep.lhs), 1e-300);
    return rep;
}

}  // namespace renyiflow::correspondence

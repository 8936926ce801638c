#ifndef RENYIFLOW_CORRESPONDENCE_HPP
#define RENYIFLOW_CORRESPONDENCE_HPP

#include "renyiflow/master.hpp"

#include <vector>

namespace renyiflow::correspondence {

/// Discrete spectral decomposition of a bath-side correlator,
/// C_ij(tau) = sum_k coef[k](i,j) exp(i nu[k] tau).
struct SpectralPeaks {
    std::vector<double> nu;
    std::vector<Matrix> coef;
};

/// Peaks of Tr[B_i(tau) B_j R_B] for a diagonal stationary state q (hB must
/// be diagonal).
SpectralPeaks bath_peaks(const Matrix& hB, const std::vector<Matrix>& bOps, const RealVector& q);

/// Peaks of the period-averaged classical-force product <b_i(t) b_j(t-tau)>
/// for force harmonics b_i(t) = sum_k amp[k](i) e^{-i nu[k] t}.
SpectralPeaks force_peaks(const std::vector<double>& nu, const std::vector<Vector>& amp);

/// Harmonics of <B_i>(t) = Tr[B_i(t) rhoB] under free hB evolution; the
/// classical forces of the coherent FCS.
void force_harmonics(const Matrix& hB, const std::vector<Matrix>& bOps, const Matrix& rhoB,
                     std::vector<double>& nu, std::vector<Vector>& amp);

/// Line-shape regularization of the energy delta. Gaussian is the library
/// default; LorentzianRichardson is the kernel the e^{-eta tau} damped time
/// integrals with eta, eta/2 Richardson extrapolation realize exactly, so
/// the two correspondence pipelines share their regularization error.
enum class DeltaKernel { Gaussian, LorentzianRichardson };

double delta_kernel(double x, double eta, DeltaKernel kernel);

/// Golden-rule jump process on A's eigenstates driven by a correlator:
/// a -> b at rate 2 pi lambda^2 sum_{ij,k} A_{i,ba} A_{j,ab} coef[k](i,j)
/// delta_eta(E_b - E_a + nu_k), counting weight E_b - E_a.
master::JumpProcess golden_rule_process(const RealVector& eA, const std::vector<Matrix>& aOps,
                                        const SpectralPeaks& peaks, double lambda, double eta,
                                        DeltaKernel kernel = DeltaKernel::Gaussian);

/// Incoherent scaled CGF rate at inverse temperature betaRescaled: the
/// quantum-bath channels plus the classical-force channels, pinned at the
/// thermal distribution of A (the counted system is a reservoir; the strict
/// dominant eigenvalue of an energy-tilted finite generator is trivially
/// zero, see master module).
Complex incoherent_fcs(const RealVector& eA, const std::vector<Matrix>& aOps,
                       const SpectralPeaks& bathPeaksAtQ, const SpectralPeaks& classicalPeaks,
                       double lambda, double eta, double betaRescaled, Complex xi,
                       DeltaKernel kernel = DeltaKernel::Gaussian);

/// Coherent (classical-force) scaled CGF rate: thermal A at betaRescaled
/// under the mean-field drive harmonics alone.
Complex coherent_fcs(const RealVector& eA, const std::vector<Matrix>& aOps,
                     const std::vector<double>& nu, const std::vector<Vector>& amp, double lambda,
                     double eta, double betaRescaled, Complex xi,
                     DeltaKernel kernel = DeltaKernel::Gaussian);

struct CorrespondenceReport {
    double lhs = 0.0;        // F_M / M at native beta, perturbative pipeline
    double lhsIncoherent = 0.0;
    double lhsCoherent = 0.0;
    double rhs = 0.0;        // f_i(xi*) - f_c(xi*) at M beta
    double fIncoherent = 0.0;
    double fCoherent = 0.0;
    double residual = 0.0;
    double relative = 0.0;
};

/// Both sides of the exact correspondence
///   F_M(beta)/M = f_i^{(M beta)}(xi*) - f_c^{(M beta)}(xi*),
///   xi* = i beta (M - 1),
/// left side from the time-domain W-block and coherent-flow integrals at
/// beta, right side from frequency-domain golden-rule FCS at M beta.
CorrespondenceReport check_correspondence(const BipartiteSystem& system, const Matrix& rhoB, int m,
                                          double beta, double eta,
                                          const std::vector<double>& tauGrid);

}  // namespace renyiflow::correspondence

#endif

#ifndef RENYIFLOW_KMS_HPP
#define RENYIFLOW_KMS_HPP

#include "renyiflow/types.hpp"

#include <vector>

namespace renyiflow::kms {

/// Frequency-domain correlator samples, K_ij(omega) on a grid.
struct SpectralCorrelator {
    int n = 0;
    int m = 1;
    std::vector<double> omega;
    std::vector<Matrix> samples;
};

/// Energy-basis thermal data at one inverse temperature: the dissipative
/// susceptibility table chiTilde_ij(omega) together with Z and F.
struct SpectralData {
    double beta = 0.0;
    double logZ = 0.0;
    double freeEnergy = 0.0;  // F = -ln Z / beta
    std::vector<double> omega;
    std::vector<Matrix> chiTilde;
};

double log_partition(const Matrix& h, double beta);
inline double free_energy(const Matrix& h, double beta) { return -log_partition(h, beta) / beta; }

/// Direct double sum over eigenpairs with Gaussian-broadened
/// delta(E_m - E_n + omega):
/// K^{N,M}_ij(omega) = 2 pi sum N_eta(E_m - E_n + omega)
///     A_{i,nm} A_{j,mn} e^{-beta M E_n} / Z(M beta) * e^{beta N omega}.
SpectralCorrelator energy_basis_correlator(const Matrix& hA, const std::vector<Matrix>& aOps,
                                           double beta, int n, int m,
                                           const std::vector<double>& omegaGrid, double eta);

/// chiTilde_ij(omega, beta) = (e^{beta omega} - 1) C_ij(omega, beta) from
/// the same broadened sums, so both sides of the KMS check share their
/// discretization error.
SpectralData make_spectral_data(const Matrix& hA, const std::vector<Matrix>& aOps, double beta,
                                const std::vector<double>& omegaGrid, double eta);

struct KmsReport {
    double maxResidual = 0.0;   // relative to the peak |K|
    double peak = 0.0;
};

/// Generalized KMS: K^{N,M}(omega) = n_B(M omega) e^{beta omega N}
/// chiTilde(omega, M beta), n_B at the native beta. `spec` must be built at
/// beta* = M beta on the correlator's grid.
KmsReport check_kms_multi(const SpectralData& spec, const SpectralCorrelator& corr, double beta,
                          int n, int m);

/// | ln S_M(beta) - M beta (F(M beta) - F(beta)) |, an exact identity.
struct FreeEnergyIdentity {
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;
};
FreeEnergyIdentity renyi_free_energy_identity(const Matrix& hA, double beta, int m);

}  // namespace renyiflow::kms

#endif

#ifndef RENYIFLOW_CORRELATORS_HPP
#define RENYIFLOW_CORRELATORS_HPP

#include "renyiflow/types.hpp"

#include <vector>

namespace renyiflow::perturbative {

/// Two-operator correlator, stationary in the time difference. Stored both
/// as samples on a tau grid and as the exact spectral sum
/// C(tau) = sum_k coef[k] * exp(i freq[k] tau), coef[k] a matrix in (i, j).
struct Correlator {
    enum class Kind { C, K };
    Kind kind = Kind::C;
    int n = 0;   // K^{N,M} indices; unused for a bath correlator
    int m = 1;
    std::vector<double> tau;
    std::vector<Matrix> samples;
    std::vector<double> freq;
    std::vector<Matrix> coef;

    Matrix eval(double t) const {
        Matrix out = Matrix::Zero(coef.front().rows(), coef.front().cols());
        for (std::size_t k = 0; k < freq.size(); ++k)
            out += coef[k] * std::exp(Complex(0.0, freq[k] * t));
        return out;
    }
};

/// C_ij(tau) = Tr_B[B_i(tau) B_j(0) R_B], interaction picture with respect
/// to hB. `state` must be stationary under hB (commutator below 1e-10).
Correlator bath_correlator(const Matrix& state, const std::vector<Matrix>& bOps, const Matrix& hB,
                           const std::vector<double>& tauGrid);

/// K^{N,M}_ij(tau) = Tr_A[A_i(tau) R^N A_j(0) R^{M-N}] / S_M.
Correlator multiworld_correlator(const Matrix& stateA, const std::vector<Matrix>& aOps,
                                 const Matrix& hA, int n, int m,
                                 const std::vector<double>& tauGrid);

}  // namespace renyiflow::perturbative

#endif

#include "renyiflow/correlators.hpp"

#include "renyiflow/core.hpp"

#include <cmath>

namespace renyiflow::perturbative {

namespace {

void require_stationary(const Matrix& state, const Matrix& h, const char* who) {
    const Matrix comm = h * state - state * h;
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    if (comm.cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw NumericalGuardError(std::string(who) + ": state is not stationary under the free Hamiltonian");
}

/// Assemble the spectral sum sum_{nm} e^{i(E_n - E_m) tau} ops[i](n,m) * wts[j](m,n)
/// with nearby frequencies merged, then sample it on the grid.
Correlator assemble(const std::vector<Matrix>& ops, const std::vector<Matrix>& wts,
                    const RealVector& e, const std::vector<double>& tauGrid) {
    const Eigen::Index d = e.size();
    const std::size_t nops = ops.size();
    Correlator out;
    for (Eigen::Index n = 0; n < d; ++n) {
        for (Eigen::Index m = 0; m < d; ++m) {
            const double w = e(n) - e(m);
            Matrix c(nops, nops);
            for (std::size_t i = 0; i < nops; ++i)
                for (std::size_t j = 0; j < nops; ++j) c(i, j) = ops[i](n, m) * wts[j](m, n);
            if (c.cwiseAbs().maxCoeff() < 1e-300) continue;
            bool merged = false;
            for (std::size_t k = 0; k < out.freq.size(); ++k) {
                if (std::abs(out.freq[k] - w) < 1e-12) {
                    out.coef[k] += c;
                    merged = true;
                    break;
                }
            }
            if (!merged) {
                out.freq.push_back(w);
                out.coef.push_back(c);
            }
        }
    }
    if (out.coef.empty()) {
        out.freq.push_back(0.0);
        out.coef.push_back(Matrix::Zero(nops, nops));
    }
    out.tau = tauGrid;
    out.samples.reserve(tauGrid.size());
    for (double t : tauGrid) out.samples.push_back(out.eval(t));
    return out;
}

}  // namespace

Correlator bath_correlator(const Matrix& state, const std::vector<Matrix>& bOps, const Matrix& hB,
                           const std::vector<double>& tauGrid) {
    require_stationary(state, hB, "bath_correlator");
    Eigen::SelfAdjointEigenSolver<Matrix> es(hB);
    const Matrix v = es.eigenvectors();
    std::vector<Matrix> ops, wts;
    const Matrix rho = v.adjoint() * state * v;
    for (const Matrix& b : bOps) ops.push_back(v.adjoint() * b * v);
    for (const Matrix& b : ops) wts.push_back(b * rho);
    Correlator c = assemble(ops, wts, es.eigenvalues(), tauGrid);
    c.kind = Correlator::Kind::C;
    return c;
}

Correlator multiworld_correlator(const Matrix& stateA, const std::vector<Matrix>& aOps,
                                 const Matrix& hA, int n, int m,
                                 const std::vector<double>& tauGrid) {
    if (n < 0 || n > m || m < 1)
        throw std::invalid_argument("multiworld_correlator: need 0 <= N <= M, M >= 1");
    require_stationary(stateA, hA, "multiworld_correlator");
    Eigen::SelfAdjointEigenSolver<Matrix> es(hA);
    const Matrix v = es.eigenvectors();
    const Matrix rho = v.adjoint() * stateA * v;
    const Matrix eye = Matrix::Identity(rho.rows(), rho.cols());
    const Matrix rN = (n == 0) ? eye : core::matrix_power(rho, n);
    const Matrix rMN = (m == n) ? eye : core::matrix_power(rho, m - n);
    const double sm = core::renyi_entropy(rho, m);
    std::vector<Matrix> ops, wts;
    for (const Matrix& a : aOps) ops.push_back(v.adjoint() * a * v);
    for (const Matrix& a : ops) wts.push_back(rN * a * rMN / sm);
    Correlator k = assemble(ops, wts, es.eigenvalues(), tauGrid);
    k.kind = Correlator::Kind::K;
    k.n = n;
    k.m = m;
    return k;
}

}  // namespace renyiflow::perturbative

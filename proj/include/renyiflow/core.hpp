#ifndef RENYIFLOW_CORE_HPP
#define RENYIFLOW_CORE_HPP

#include "renyiflow/types.hpp"

#include <cmath>

namespace renyiflow::core {

// Composite index convention used everywhere in this library:
// a bipartite state (a, alpha) maps to the single index a * dimB + alpha
// (A-major). tensor_product and partial_trace below realize exactly this.

template <typename DerivedA, typename DerivedB>
Matrix tensor_product(const Eigen::MatrixBase<DerivedA>& x, const Eigen::MatrixBase<DerivedB>& y) {
    Matrix out(x.rows() * y.rows(), x.cols() * y.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j)
            out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = Complex(x(i, j)) * y;
    return out;
}

enum class Keep { A, B };

template <typename Derived>
Matrix partial_trace(const Eigen::MatrixBase<Derived>& r, Eigen::Index dimA, Eigen::Index dimB,
                     Keep keep) {
    if (r.rows() != r.cols() || r.rows() != dimA * dimB)
        throw DimensionError("partial_trace: matrix is not square of size dimA*dimB");
    if (keep == Keep::A) {
        Matrix out = Matrix::Zero(dimA, dimA);
        for (Eigen::Index a = 0; a < dimA; ++a)
            for (Eigen::Index b = 0; b < dimA; ++b)
                for (Eigen::Index g = 0; g < dimB; ++g)
                    out(a, b) += r(a * dimB + g, b * dimB + g);
        return out;
    }
    Matrix out = Matrix::Zero(dimB, dimB);
    for (Eigen::Index al = 0; al < dimB; ++al)
        for (Eigen::Index be = 0; be < dimB; ++be)
            for (Eigen::Index a = 0; a < dimA; ++a)
                out(al, be) += r(a * dimB + al, a * dimB + be);
    return out;
}

inline bool is_hermitian(const Matrix& m, double tol = kHermiticityTol) {
    const double scale = m.cwiseAbs().maxCoeff();
    if (scale == 0.0) return true;
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

/// Throws unless `r` is Hermitian, unit trace and PSD within tolerance.
/// Inputs that fail are rejected, never clipped.
inline void require_density_matrix(const Matrix& r) {
    if (r.rows() != r.cols()) throw DimensionError("density matrix must be square");
    if (!is_hermitian(r)) throw NumericalGuardError("density matrix is not Hermitian");
    if (std::abs(r.trace() - Complex(1.0)) > kTraceTol)
        throw NumericalGuardError("density matrix trace differs from 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(r, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kPsdTol)
        throw NumericalGuardError("density matrix has a negative eigenvalue beyond tolerance");
}

/// exp(-beta H)/Z. The spectrum is shifted by its minimum before
/// exponentiating, so any finite beta is overflow-safe. beta may be
/// +infinity: returns the normalized projector on the ground space.
inline Matrix thermal_state(const Matrix& h, double beta) {
    if (!is_hermitian(h)) throw NumericalGuardError("thermal_state: H not Hermitian");
    if (beta < 0.0 || std::isnan(beta)) throw std::invalid_argument("thermal_state: beta must be >= 0");
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    const RealVector e = es.eigenvalues();
    const double e0 = e.minCoeff();
    RealVector w(e.size());
    if (std::isinf(beta)) {
        // ground space within the support cutoff (absolute, spectra are O(1))
        for (Eigen::Index i = 0; i < e.size(); ++i) w(i) = (e(i) - e0 <= 1e-12) ? 1.0 : 0.0;
    } else {
        for (Eigen::Index i = 0; i < e.size(); ++i) w(i) = std::exp(-beta * (e(i) - e0));
    }
    w /= w.sum();
    return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
}

/// S_M = Tr[R^M] for integer M >= 1 (S_1 = 1 by normalization).
inline double renyi_entropy(const Matrix& r, int m) {
    if (m < 1) throw std::invalid_argument("renyi_entropy: m must be >= 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(r, Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        s += std::pow(es.eigenvalues()(i), m);
    return s;
}

/// -Tr[R ln R] with 0 ln 0 := 0.
inline double shannon_entropy(const Matrix& r) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(r, Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const double p = es.eigenvalues()(i);
        if (p > kSupportCutoff) s -= p * std::log(p);
    }
    return s;
}

/// K = sum R_{a alpha, b gamma} R_{b beta, c alpha} R_{c gamma, a beta}.
/// Invariant under U_A (x) U_B; reducible to neither subsystem Renyi entropy.
inline Complex conserved_measure_k(const Matrix& r, Eigen::Index dimA, Eigen::Index dimB) {
    if (r.rows() != r.cols() || r.rows() != dimA * dimB)
        throw DimensionError("conserved_measure_k: matrix is not square of size dimA*dimB");
    Complex k = 0.0;
    for (Eigen::Index a = 0; a < dimA; ++a)
        for (Eigen::Index b = 0; b < dimA; ++b)
            for (Eigen::Index c = 0; c < dimA; ++c)
                for (Eigen::Index al = 0; al < dimB; ++al)
                    for (Eigen::Index be = 0; be < dimB; ++be)
                        for (Eigen::Index ga = 0; ga < dimB; ++ga)
                            k += r(a * dimB + al, b * dimB + ga) *
                                 r(b * dimB + be, c * dimB + al) *
                                 r(c * dimB + ga, a * dimB + be);
    return k;
}

/// Eigendecomposition-based power on the support. Eigenvalues below the
/// support cutoff are treated as exactly zero; a non-integer power with a
/// negative eigenvalue beyond the cutoff is an error.
inline Matrix matrix_power(const Matrix& r, double m) {
    if (m <= 0.0) throw std::invalid_argument("matrix_power: m must be > 0");
    Eigen::SelfAdjointEigenSolver<Matrix> es(r);
    const bool integer = std::abs(m - std::round(m)) < 1e-12;
    RealVector w(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        const double p = es.eigenvalues()(i);
        if (std::abs(p) <= kSupportCutoff) {
            w(i) = 0.0;
        } else if (p < 0.0 && !integer) {
            throw NumericalGuardError("matrix_power: non-integer power of a negative eigenvalue");
        } else {
            w(i) = integer ? std::pow(p, static_cast<int>(std::round(m))) : std::pow(p, m);
        }
    }
    return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace renyiflow::core

#endif

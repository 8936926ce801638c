#ifndef RENYIFLOW_SYSTEM_HPP
#define RENYIFLOW_SYSTEM_HPP

#include "renyiflow/core.hpp"

#include <algorithm>
#include <utility>
#include <vector>

namespace renyiflow {

/// Bipartite setup H = H_A + H_B + lambda * sum_i A_i (x) B_i.
/// Couplings must be strictly non-diagonal in the respective free
/// eigenbases; construction rejects anything else.
struct BipartiteSystem {
    Eigen::Index dimA = 0;
    Eigen::Index dimB = 0;
    Matrix hA;
    Matrix hB;
    std::vector<std::pair<Matrix, Matrix>> couplings;
    double lambda = 0.0;

    BipartiteSystem() = default;

    BipartiteSystem(Matrix hA_, Matrix hB_, std::vector<std::pair<Matrix, Matrix>> couplings_,
                    double lambda_)
        : dimA(hA_.rows()), dimB(hB_.rows()), hA(std::move(hA_)), hB(std::move(hB_)),
          couplings(std::move(couplings_)), lambda(lambda_) {
        validate();
    }

    void validate() const {
        if (!core::is_hermitian(hA) || !core::is_hermitian(hB))
            throw NumericalGuardError("BipartiteSystem: free Hamiltonians must be Hermitian");
        Eigen::SelfAdjointEigenSolver<Matrix> esA(hA), esB(hB);
        for (const auto& [ai, bi] : couplings) {
            if (ai.rows() != dimA || bi.rows() != dimB)
                throw DimensionError("BipartiteSystem: coupling dimension mismatch");
            if (!core::is_hermitian(ai) || !core::is_hermitian(bi))
                throw NumericalGuardError("BipartiteSystem: couplings must be Hermitian");
            const Matrix aeig = esA.eigenvectors().adjoint() * ai * esA.eigenvectors();
            const Matrix beig = esB.eigenvectors().adjoint() * bi * esB.eigenvectors();
            const double atol = 1e-10 * std::max(1.0, aeig.cwiseAbs().maxCoeff());
            const double btol = 1e-10 * std::max(1.0, beig.cwiseAbs().maxCoeff());
            if (aeig.diagonal().cwiseAbs().maxCoeff() > atol ||
                beig.diagonal().cwiseAbs().maxCoeff() > btol)
                throw NumericalGuardError(
                    "BipartiteSystem: coupling operator has diagonal elements in the free eigenbasis");
        }
    }

    Eigen::Index dim() const { return dimA * dimB; }

    Matrix h_free() const {
        return core::tensor_product(hA, Matrix::Identity(dimB, dimB)) +
               core::tensor_product(Matrix::Identity(dimA, dimA), hB);
    }

    Matrix h_coupling() const {
        Matrix h = Matrix::Zero(dim(), dim());
        for (const auto& [ai, bi] : couplings) h += core::tensor_product(ai, bi);
        return lambda * h;
    }

    Matrix h_total() const { return h_free() + h_coupling(); }

    /// Joint free energies E_a + E_alpha in composite-index order, assuming
    /// hA, hB are already diagonal (the common construction in this repo).
    RealVector free_energies() const {
        RealVector e(dim());
        for (Eigen::Index a = 0; a < dimA; ++a)
            for (Eigen::Index al = 0; al < dimB; ++al)
                e(a * dimB + al) = hA(a, a).real() + hB(al, al).real();
        return e;
    }

    /// Smallest nonzero Bohr frequency of H_A + H_B; sets adiabatic
    /// switching rates.
    double min_bohr_frequency() const {
        std::vector<double> e;
        Eigen::SelfAdjointEigenSolver<Matrix> esA(hA, Eigen::EigenvaluesOnly);
        Eigen::SelfAdjointEigenSolver<Matrix> esB(hB, Eigen::EigenvaluesOnly);
        for (Eigen::Index a = 0; a < dimA; ++a)
            for (Eigen::Index b = 0; b < dimB; ++b)
                e.push_back(esA.eigenvalues()(a) + esB.eigenvalues()(b));
        double w = 0.0;
        for (std::size_t i = 0; i < e.size(); ++i)
            for (std::size_t j = i + 1; j < e.size(); ++j) {
                const double d = std::abs(e[i] - e[j]);
                if (d > 1e-12 && (w == 0.0 || d < w)) w = d;
            }
        return w;
    }

    /// Mean spacing of the sorted joint free spectrum; the default Gaussian
    /// broadening is 3x this value.
    double mean_level_spacing() const {
        std::vector<double> e;
        Eigen::SelfAdjointEigenSolver<Matrix> esA(hA, Eigen::EigenvaluesOnly);
        Eigen::SelfAdjointEigenSolver<Matrix> esB(hB, Eigen::EigenvaluesOnly);
        for (Eigen::Index a = 0; a < dimA; ++a)
            for (Eigen::Index b = 0; b < dimB; ++b)
                e.push_back(esA.eigenvalues()(a) + esB.eigenvalues()(b));
        std::sort(e.begin(), e.end());
        if (e.size() < 2) return 1.0;
        return (e.back() - e.front()) / static_cast<double>(e.size() - 1);
    }

    double default_eta() const { return 3.0 * mean_level_spacing(); }
};

}  // namespace renyiflow

#endif

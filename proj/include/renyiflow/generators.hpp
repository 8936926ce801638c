#ifndef RENYIFLOW_GENERATORS_HPP
#define RENYIFLOW_GENERATORS_HPP

#include "renyiflow/types.hpp"

#include <cmath>
#include <random>

namespace renyiflow::gen {

/// Deterministic normal deviates. Box-Muller on top of mt19937_64 rather
/// than std::normal_distribution, whose stream is not pinned by the
/// standard; output files must be reproducible across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() {
        return (static_cast<double>(eng_() >> 11)) * (1.0 / 9007199254740992.0);
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do { u1 = uniform(); } while (u1 <= 1e-300);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * M_PI * u2);
        have_spare_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }

    Complex cnormal() { return {normal(), normal()}; }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

inline Matrix random_hermitian(Eigen::Index n, Rng& rng, double scale = 1.0) {
    Matrix g(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) g(i, j) = rng.cnormal();
    return scale * 0.5 * (g + g.adjoint());
}

inline Matrix random_unitary(Eigen::Index n, Rng& rng) {
    Matrix g(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) g(i, j) = rng.cnormal();
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < n; ++i) {
        Complex d = r(i, i);
        q.col(i) *= (std::abs(d) > 0.0) ? d / std::abs(d) : Complex(1.0);
    }
    return q;
}

inline Matrix random_density(Eigen::Index n, Rng& rng) {
    Matrix g(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) g(i, j) = rng.cnormal();
    Matrix r = g * g.adjoint();
    return r / r.trace();
}

/// Hermitian with zero diagonal, the coupling-operator shape required of
/// every A_i and B_i (in the eigenbasis of the free Hamiltonian).
inline Matrix random_offdiagonal_coupling(Eigen::Index n, Rng& rng, double scale = 1.0) {
    Matrix m = random_hermitian(n, rng, scale);
    m.diagonal().setZero();
    return m;
}

inline Matrix pauli_x() { Matrix m(2, 2); m << 0, 1, 1, 0; return m; }
inline Matrix pauli_y() { Matrix m(2, 2); m << 0, Complex(0, -1), Complex(0, 1), 0; return m; }
inline Matrix pauli_z() { Matrix m(2, 2); m << 1, 0, 0, -1; return m; }

inline Matrix boson_destroy(Eigen::Index nmax) {
    Matrix a = Matrix::Zero(nmax, nmax);
    for (Eigen::Index n = 1; n < nmax; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

inline Matrix boson_number(Eigen::Index nmax) {
    Matrix n = Matrix::Zero(nmax, nmax);
    for (Eigen::Index k = 0; k < nmax; ++k) n(k, k) = static_cast<double>(k);
    return n;
}

}  // namespace renyiflow::gen

#endif

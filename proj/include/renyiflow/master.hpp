#ifndef RENYIFLOW_MASTER_HPP
#define RENYIFLOW_MASTER_HPP

#include "renyiflow/perturbative.hpp"

#include <vector>

namespace renyiflow::master {

/// Realized rate-equation generator, convention dp/dt = L p. At chi = 0,
/// m = 1 the columns sum to zero and off-diagonal entries are nonnegative.
/// For m >= 2 the gain terms carry the replica factors (p_b/p_a)^{m-1} of
/// the multi-world reconnection; refWeights holds the Renyi-weighted
/// reference distribution used by the quasi-stationary flow functional.
struct RateGenerator {
    Matrix L;
    Complex chi{0.0, 0.0};
    int m = 1;
    RealVector refWeights;
};

/// Counting-field generator on composite states. oAWeights(s) is the value
/// of the counted observable in state s; a transition s -> s' acquires
/// exp(i chi (w(s') - w(s))). For m >= 2, refA/refB pin the reference
/// distributions that define the replica tilt and the Renyi weights.
RateGenerator build_generator(const perturbative::RateTable& rates, Complex chi,
                              const RealVector& oAWeights, int m,
                              const RealVector& refA = RealVector(),
                              const RealVector& refB = RealVector());

Vector solve_master(const RateGenerator& gen, const Vector& p0, double t);

/// Stationary distribution of a conservative generator (chi = 0, m = 1):
/// the null vector of L, normalized to unit sum.
RealVector stationary_distribution(const RateGenerator& gen);

struct D0Report {
    Complex d0{0.0, 0.0};  // -(eigenvalue of L with largest real part)
    bool degenerate = false;
};

/// Decay-rate convention D = -eig(L): returns the D with smallest real
/// part; ties on the real part are broken toward smaller |imaginary part|
/// and flagged degenerate.
D0Report dominant_eigenvalue(const Matrix& L);
inline D0Report dominant_eigenvalue(const RateGenerator& gen) { return dominant_eigenvalue(gen.L); }

/// Quasi-stationary counting rate: the instantaneous log-derivative of the
/// pseudo-trace started from `weights`, sum_s w_s sum_{s'} L(s', s). For a
/// finite closed system the strict long-time D0 of an energy-tilted
/// generator is zero (the counted observable is bounded); this functional
/// is the desk-scale realization of the paper's infinite-reservoir rates.
Complex quasistationary_rate(const Matrix& L, const RealVector& weights);

/// Multi-world flow through the generator route. Sign convention fixed by
/// the brute-force oracle: flow = -m * D0_qs under dp/dt = L p, where
/// D0_qs = -quasistationary_rate at the Renyi-weighted reference state.
/// breakdown: "d0_qs", "d0_strict_re", "d0_strict_im", "degenerate".
FlowReport multiworld_flow_via_d0(const RateGenerator& gen);

/// Edge-listed jump process with per-edge counting weights; this is the
/// form non-telescoping FCS models take (multiple transfer channels per
/// state pair, drive harmonics).
struct JumpProcess {
    struct Edge {
        Eigen::Index from = 0;
        Eigen::Index to = 0;
        double rate = 0.0;
        double weight = 0.0;  // counted transfer per jump
    };
    Eigen::Index dim = 0;
    std::vector<Edge> edges;

    Matrix generator(Complex chi) const;
    RealVector stationary() const;
    /// Single-jump CGF rate at a pinned distribution:
    /// sum_e pin(from) rate (e^{i chi w} - 1).
    Complex pinned_rate(Complex chi, const RealVector& pin) const;
};

struct KeldyshAction {
    std::vector<Complex> chi;
    std::vector<Complex> s;  // S(chi) = -T * D0(chi)
    double window = 0.0;
};

/// Long-time Keldysh action S(chi) = -T D0(chi) over a chi grid.
/// Requires T * gap(L(0)) >= 5 (long-time form validity).
KeldyshAction keldysh_action(const JumpProcess& process, const std::vector<Complex>& chiGrid,
                             double window);

/// First cumulants of the counted transfer from the action, by central
/// differences of S at chi = 0 with step h.
struct Cumulants {
    double c1 = 0.0;
    double c2 = 0.0;
};
Cumulants action_cumulants(const JumpProcess& process, double window, double h = 1e-4);

/// P(Q) on the transfer lattice Q = k * quantum, by trapezoid quadrature of
/// the generating function over chi in [-pi/quantum, pi/quantum].
struct TransferDistribution {
    std::vector<double> q;
    std::vector<double> p;
};
TransferDistribution fcs_invert(const JumpProcess& process, double window, double quantum,
                                int qMin, int qMax, int chiPoints = 512);

/// Bloch generator on a relevant subset: d rho/dt = i(H^r rho - rho H^r) +
/// dissipator acting on row-major vec(rho).
struct BlochGenerator {
    Matrix hr;
    Matrix dissipator;  // (d*d) x (d*d), row-major vec index a*d + b

    Eigen::Index dim() const { return hr.rows(); }
    Matrix full() const;
};

Matrix solve_bloch(const BlochGenerator& gen, const Matrix& rho0, double t);

/// Null vector of the vectorized Bloch generator, reshaped, Hermitized and
/// trace-normalized. Throws on a degenerate null space.
Matrix bloch_steady_state(const BlochGenerator& gen);

}  // namespace renyiflow::master

#endif

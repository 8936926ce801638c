#ifndef RENYIFLOW_PERTURBATIVE_HPP
#define RENYIFLOW_PERTURBATIVE_HPP

#include "renyiflow/correlators.hpp"
#include "renyiflow/system.hpp"

#include <vector>

namespace renyiflow::perturbative {

inline double gaussian_delta(double x, double eta) {
    return std::exp(-0.5 * x * x / (eta * eta)) / (std::sqrt(2.0 * M_PI) * eta);
}

inline double principal_value(double x, double eta) { return x / (x * x + eta * eta); }

/// Golden-rule rates on composite indices s = a*dimB + alpha, stored as
/// gamma(from, to). Symmetric, zero whenever a = b or alpha = beta.
struct RateTable {
    RealMatrix gamma;
    RealVector eA;
    RealVector eB;
    double eta = 0.0;

    Eigen::Index dimA() const { return eA.size(); }
    Eigen::Index dimB() const { return eB.size(); }
    double energy(Eigen::Index s) const { return eA(s / eB.size()) + eB(s % eB.size()); }
    double energyA(Eigen::Index s) const { return eA(s / eB.size()); }

    /// Total escape rate from composite state s.
    double escape(Eigen::Index s) const { return gamma.row(s).sum(); }

    /// Gamma_{a->b} = sum_{alpha,beta} Gamma_{a alpha, b beta} p_alpha.
    RealMatrix reduced_rates(const RealVector& pB) const;
};

/// Gamma_{a alpha, b beta} = 2 pi |lambda H^{AB}| ^2 deltaGauss_eta(E diff).
/// Requires hA and hB diagonal (build systems in the free eigenbasis).
RateTable golden_rule_rates(const BipartiteSystem& system, double eta);

struct SampledFunction {
    std::vector<double> tau;
    std::vector<Complex> values;
};

/// The printed form of the second-order block has its first and fourth
/// terms equal and opposite; the corrected form restores the fourth term as
/// the mirror of the third. Both are kept so the oracle cross-check can
/// demonstrate which one reproduces the flow.
enum class WBlockForm { Printed, Corrected };

/// W(tau) = -C_ij(tau) K^{0,M}_ij(tau) - C_ji(-tau) K^{0,M}_ji(-tau)
///          + C_ji(-tau) K^{1,M}_ij(tau) + [form-dependent fourth term],
/// summed over coupling indices i, j. Evaluated on tauGrid (tau >= 0).
SampledFunction w_block(const Correlator& c, const Correlator& k0, const Correlator& k1,
                        const std::vector<double>& tauGrid,
                        WBlockForm form = WBlockForm::Corrected);

/// F_M = int_0^inf W(tau) e^{-eta tau} d tau, trapezoid on the grid,
/// Richardson-extrapolated over eta, eta/2. breakdown: "spread" (the
/// Richardson disagreement), "imag" (imaginary residue, should be noise).
FlowReport flow_second_order(const SampledFunction& w, double convergenceRate,
                             bool throwOnSpread = true);

/// Second-order flow from rate tables, Eq. forms 1 and 2:
/// S_M F_M = M sum_{a,b} Gamma_{a->b} p_a (p_b^{M-1} - p_a^{M-1}).
/// breakdown: "form1", "form2", "SM".
FlowReport flow_2nd_states(const RateTable& rates, const RealVector& pA, const RealVector& pB,
                           double m);

/// Shannon flow -dS/dt = sum ln(p_b/p_a) Gamma_{a->b} p_a and the energy
/// flow dE/dt = sum Gamma_{a->b} (E_b - E_a) p_a.
/// flow = -dS/dt (the M -> 1 limit of F_M/(M-1)); breakdown: "dSdt", "dEdt".
FlowReport flow_2nd_shannon(const RateTable& rates, const RealVector& pA, const RealVector& pB);

/// Fourth-order two-world correction, Eq. structure
///   dS_M/dt = pi sum_{a != b} |A_ab|^2 deltaGauss_eta(E_a - E_b) *
///             (p_a^{M-1} - p_b^{M-1})/(p_a - p_b),
/// divided difference replaced by its limit (M-1) p_a^{M-2} at p_a = p_b.
/// flow = F_M = (dS_M/dt)/S_M; breakdown: "dSMdt", "amp_max", "SM".
FlowReport flow_4th_order(const BipartiteSystem& system, const RealVector& pA,
                          const RealVector& pB, double m, double eta);

/// M -> 1 derivative of the fourth-order family:
/// dS/dt = -pi sum_{a != b} |A_ab|^2 deltaGauss_eta(E_a - E_b) *
///         ln(p_a/p_b)/(p_a - p_b), with limit 1/p_a at p_a = p_b.
FlowReport flow_4th_shannon(const BipartiteSystem& system, const RealVector& pA,
                            const RealVector& pB, double eta);

/// Cross-world (coherent) second-order flow for a system whose B factor
/// carries oscillating operator means b_i(t) = sum_k amp[k][i] e^{-i nu_k t}:
///   F_coh = -(M/S_M) sum_{N=0}^{M-2} int_0^inf dtau <b_i(t) b_j(t-tau)>_t
///           [2 K^{N+1,M} - K^{N+2,M} - K^{N,M}]_ij(tau),
/// period-averaged over t. Used by the flow/FCS correspondence.
FlowReport flow_2nd_coherent(const Matrix& stateA, const std::vector<Matrix>& aOps,
                             const Matrix& hA, int m, const std::vector<double>& nu,
                             const std::vector<Vector>& amp, const std::vector<double>& tauGrid,
                             double convergenceRate);

}  // namespace renyiflow::perturbative

#endif

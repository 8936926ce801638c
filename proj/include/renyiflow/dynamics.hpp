#ifndef RENYIFLOW_DYNAMICS_HPP
#define RENYIFLOW_DYNAMICS_HPP

#include "renyiflow/system.hpp"

#include <functional>
#include <vector>

namespace renyiflow::dynamics {

/// Adiabatic switching envelope on the coupling: g(tau) = exp(rate*(tau-tOn))
/// capped at 1, so the coupling is at full strength for tau >= tOn.
struct SwitchingProfile {
    enum class Kind { None, Exponential };
    Kind kind = Kind::None;
    double rate = 0.0;
    double tOn = 0.0;

    double envelope(double tau) const {
        if (kind == Kind::None) return 1.0;
        if (tau >= tOn) return 1.0;
        return std::exp(rate * (tau - tOn));
    }

    static SwitchingProfile none() { return {}; }
    static SwitchingProfile exponential(double rate, double tOn) {
        return {Kind::Exponential, rate, tOn};
    }
    /// Default rate: 0.05 x smallest nonzero Bohr frequency of H_A + H_B.
    static SwitchingProfile for_system(const BipartiteSystem& sys, double tOn);
};

struct EvolutionJob {
    BipartiteSystem system;
    Matrix initial;              // density matrix on A (x) B
    double tStart = 0.0;
    double tEnd = 1.0;
    double dt = 1e-2;
    SwitchingProfile switching;
    /// Optional multiplicative drive on the coupling (on top of switching).
    std::function<double(double)> couplingModulation;
    /// Optional additive time-dependent Hamiltonian term on the full space.
    std::function<Matrix(double)> extraH;

    Matrix hamiltonian(double tau) const;
};

struct CountingConfig {
    Matrix oA;          // counted observable on A (e.g. H_A)
    Complex chi{0.0, 0.0};
    double windowStart = 0.0;
    double windowEnd = 0.0;
};

/// Fixed-step midpoint-sampled exponential stepping:
/// R -> U R U^dag with U = exp(-i H(tau + dt/2) dt) per step.
Matrix evolve_unitary(const EvolutionJob& job);

/// Same stepping, visiting `sampleTimes` (must be ascending, within
/// [tStart, tEnd]); `visit` receives the state at each sample time.
void evolve_sampled(const EvolutionJob& job, const std::vector<double>& sampleTimes,
                    const std::function<void(double, const Matrix&)>& visit);

/// Two-sided extended evolution. Inside the counting window the forward
/// branch uses U_A(+chi/2) H U_A(-chi/2) and the backward branch
/// U_A(-chi/2) H U_A(+chi/2), realized exactly as a similarity sandwich of
/// the ordinary propagator, so chi introduces no extra stepping error and
/// chi = 0 is bit-identical to evolve_unitary.
Matrix evolve_extended(const EvolutionJob& job, const CountingConfig& counting);

/// Time-ordered propagator U(tEnd <- tStart) of the job's Hamiltonian.
Matrix propagator(const EvolutionJob& job);

/// Exact two-time projective-measurement statistics of oA (measured at
/// tStart and tEnd): returns pairs (q, probability) with q = o_final -
/// o_initial, aggregated over degenerate outcomes.
std::vector<std::pair<double, double>> two_time_measurement(const EvolutionJob& job,
                                                            const Matrix& oA, double tol = 1e-9);

/// d/dt ln Tr_A[(Tr_B R)^M] by a least-squares slope over the probe times.
/// breakdown: "slope", "fit_residual", "residual_flag" (1 when the residual
/// exceeds 10% of the slope magnitude), "lnSM_mid".
FlowReport oracle_renyi_flow(const EvolutionJob& job, int m, const std::vector<double>& probeTimes);

/// Same probe machinery for an arbitrary scalar functional of the state.
FlowReport oracle_scalar_flow(const EvolutionJob& job,
                              const std::function<double(const Matrix&)>& fn,
                              const std::vector<double>& probeTimes, const std::string& method);

}  // namespace renyiflow::dynamics

#endif

#ifndef RENYIFLOW_RESERVOIR_HPP
#define RENYIFLOW_RESERVOIR_HPP

#include "renyiflow/dynamics.hpp"
#include "renyiflow/perturbative.hpp"

#include <vector>

namespace renyiflow::reservoir {

/// Repeated-interaction realization of an infinite reservoir: one factor of
/// the bipartition is reset to a fixed state after every segment of length
/// segmentTime. A finite closed system has no stationary flows or transfer
/// statistics (every counted observable is bounded); refreshing one side is
/// the desk-scale construction that restores them.
struct RepeatedInteraction {
    BipartiteSystem system;
    double segmentTime = 1.0;
    double dt = 1e-2;
    std::function<double(double)> couplingModulation;  // phase-aligned per segment
};

/// Propagator of a single segment (coupling always fully switched).
Matrix segment_propagator(const RepeatedInteraction& ri);

/// Transition probabilities per unit time between composite basis states,
/// gamma(s -> t) = |U_ts|^2 / segmentTime. Exact rates of the refreshed
/// dynamics at leading order; no line-shape regularization enters.
perturbative::RateTable segment_rates(const RepeatedInteraction& ri);

/// Refreshed evolution with the B factor reset to `qB` (diagonal) each
/// segment; returns rhoA after each of nSegments segments.
std::vector<Matrix> refreshed_evolution_b(const RepeatedInteraction& ri, const Matrix& rhoA0,
                                          const RealVector& qB, int nSegments);

/// Counting statistics of the total energy deposited into the refreshed A
/// factor (reset to `pA` thermal-diagonal each segment, measured per
/// segment): carries the chi-tilted pseudo-state of B through nSegments and
/// returns ln Tr of it. Exact chained two-time-measurement statistics.
Complex refreshed_counting_action(const RepeatedInteraction& ri, const RealVector& pA,
                                  const Matrix& rhoB0, Complex chi, int nSegments);

/// First two cumulants of the refreshed counting statistics by central
/// differences in chi.
struct RefreshedCumulants {
    double c1 = 0.0;
    double c2 = 0.0;
};
RefreshedCumulants refreshed_cumulants(const RepeatedInteraction& ri, const RealVector& pA,
                                       const Matrix& rhoB0, int nSegments, double h = 5e-3);

}  // namespace renyiflow::reservoir

#endif

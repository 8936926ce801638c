#ifndef RENYIFLOW_MULTIWORLD_HPP
#define RENYIFLOW_MULTIWORLD_HPP

#include "renyiflow/dynamics.hpp"

#include <vector>

namespace renyiflow::multiworld {

/// Contour reconnection at the observation time, one permutation per
/// subsystem: world w's ket (row) index contracts with world perm[w]'s bra
/// (column) index. Identity closes contours within each world; a full cycle
/// threads a single loop through all worlds.
struct ReconnectionPattern {
    int worlds = 1;
    std::vector<int> permA;
    std::vector<int> permB;

    void validate() const;

    static ReconnectionPattern renyi_a(int m);
    static ReconnectionPattern renyi_b(int m);
    /// The K-measure wiring: A cycles forward, B cycles backward (M = 3).
    static ReconnectionPattern k_measure();
    static ReconnectionPattern custom(std::vector<int> pa, std::vector<int> pb);
};

struct WorldEnsemble {
    Eigen::Index dimA = 0;
    Eigen::Index dimB = 0;
    std::vector<Matrix> replicas;

    static WorldEnsemble identical(const Matrix& r, Eigen::Index dimA, Eigen::Index dimB, int m);
};

/// Contract the replica ensemble along the pattern:
/// sum over {a_w},{alpha_w} of prod_w R_w[(a_w, alpha_w), (a_{pA(w)}, alpha_{pB(w)})].
Complex evaluate_pattern(const WorldEnsemble& ens, const ReconnectionPattern& pat);

/// d/dt ln evaluate_pattern for identical replicas evolving under `job`.
/// breakdown: "fit_residual", "imag_slope" (drift of the complex phase).
FlowReport pattern_flow(const dynamics::EvolutionJob& job, const ReconnectionPattern& pat,
                        const std::vector<double>& probeTimes);

}  // namespace renyiflow::multiworld

#endif

#ifndef RENYIFLOW_QHE_HPP
#define RENYIFLOW_QHE_HPP

#include "renyiflow/master.hpp"

#include <string>
#include <vector>

namespace renyiflow::qhe {

/// Environment characterized at the single working frequency omega by its
/// dissipative susceptibility table chiTilde_{mn,pq}(+omega) on composite
/// transition indices (m,n) -> m*nLevels + n. Values at -omega follow from
/// the antisymmetry chiTilde_{mn,pq}(-w) = -chiTilde_{pq,mn}(w).
struct QheEnvironment {
    std::string name;
    double temperature = 1.0;
    bool probe = false;
    Matrix chiAtOmega;

    double bose(double omega) const { return 1.0 / std::expm1(omega / temperature); }
};

struct QheSpec {
    Eigen::Index nLevels = 0;
    std::vector<int> inUpper;  // 1 for the {u} set, 0 for {d}
    RealVector energies;       // E_u/E_d plus intra-set splittings
    Matrix drive;              // Omega_{mn}, the e^{-i omega t} part; couples across sets only
    double omega = 0.0;        // drive frequency, ~ E_u - E_d
    std::vector<QheEnvironment> envs;

    void validate() const;
    Eigen::Index probe_index() const;

    /// eta_{nm}: +1 for n in {u}, m in {d}; -1 mirrored; 0 within a set.
    RealMatrix eta_matrix() const;

    /// Rotating-frame coherent part: detunings E_n - omega (upper set) plus
    /// the now-static drive.
    Matrix rotating_hr() const;

    /// RWA Redfield dissipator of one environment on vec(rho), row-major.
    Matrix dissipator(const QheEnvironment& env) const;

    /// Largest probe-induced rate over largest non-probe rate; the model
    /// assumes this stays below 0.1.
    double probe_rate_ratio() const;
};

/// Null state of the rotating-frame Bloch generator with every non-probe
/// environment attached. Throws on a degenerate null space.
Matrix steady_state(const QheSpec& spec);

/// Q_i = omega sum_{mnp, eta_np = 1} [rho_mn chiTilde_{pm,np}(1 + n_B)
///       - rho_mn chiTilde_{np,pm} n_B], probe environment quantities.
double q_incoherent(const QheSpec& spec, const Matrix& rho);

/// Q_c = omega sum_{mnpq, eta_pq = 1} rho_nm rho_qp chiTilde_{mn,pq}.
double q_coherent(const QheSpec& spec, const Matrix& rho);

/// F_M = M n_B(M w/T) / (n_B((M-1) w/T) n_B(w/T) w) (Q_i - Q_c), the
/// Shannon flow F_S = (Q_i - Q_c)/T and the low-temperature form
/// M (Q_i - Q_c)/w. At M = 1 the prefactor vanishes; the report carries the
/// (M-1)-slope instead. breakdown: "Qi", "Qc", "prefactor", "FS", "lowT".
FlowReport qhe_flows(const QheSpec& spec, const Matrix& rho, double m);

/// The printed F_M prefactor alone (per unit Q_i - Q_c), robust near M = 1.
double flow_prefactor(double m, double omega, double temperature);

}  // namespace renyiflow::qhe

#endif

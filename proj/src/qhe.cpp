#include "renyiflow/qhe.hpp"

#include <cmath>

namespace renyiflow::qhe {

void QheSpec::validate() const {
    if (nLevels < 2) throw std::invalid_argument("QheSpec: need at least two levels");
    if (static_cast<Eigen::Index>(inUpper.size()) != nLevels || energies.size() != nLevels)
        throw DimensionError("QheSpec: level bookkeeping size mismatch");
    double eU = 0.0, eD = 0.0;
    int nU = 0, nD = 0;
    for (Eigen::Index n = 0; n < nLevels; ++n) {
        if (inUpper[n]) { eU += energies(n); ++nU; }
        else { eD += energies(n); ++nD; }
    }
    if (nU == 0 || nD == 0) throw std::invalid_argument("QheSpec: both sets must be populated");
    if (eU / nU <= eD / nD) throw std::invalid_argument("QheSpec: E_u - E_d must be positive");
    for (Eigen::Index m = 0; m < nLevels; ++m)
        for (Eigen::Index n = 0; n < nLevels; ++n)
            if (inUpper[m] == inUpper[n] && std::abs(drive(m, n)) > 0.0)
                throw std::invalid_argument("QheSpec: drive must couple across the sets only");
    if (omega <= 0.0) throw std::invalid_argument("QheSpec: omega must be positive");
    int probes = 0;
    for (const auto& e : envs) {
        if (e.chiAtOmega.rows() != nLevels * nLevels || e.chiAtOmega.cols() != nLevels * nLevels)
            throw DimensionError("QheSpec: susceptibility table must be (n^2) x (n^2)");
        if (e.temperature <= 0.0) throw std::invalid_argument("QheSpec: temperatures must be > 0");
        if (e.probe) ++probes;
    }
    if (probes != 1) throw std::invalid_argument("QheSpec: exactly one probe environment required");
}

Eigen::Index QheSpec::probe_index() const {
    for (std::size_t i = 0; i < envs.size(); ++i)
        if (envs[i].probe) return static_cast<Eigen::Index>(i);
    throw std::invalid_argument("QheSpec: no probe environment");
}

RealMatrix QheSpec::eta_matrix() const {
    RealMatrix eta = RealMatrix::Zero(nLevels, nLevels);
    for (Eigen::Index n = 0; n < nLevels; ++n)
        for (Eigen::Index m = 0; m < nLevels; ++m) {
            if (inUpper[n] && !inUpper[m]) eta(n, m) = 1.0;
            if (!inUpper[n] && inUpper[m]) eta(n, m) = -1.0;
        }
    return eta;
}

Matrix QheSpec::rotating_hr() const {
    Matrix hr = Matrix::Zero(nLevels, nLevels);
    for (Eigen::Index n = 0; n < nLevels; ++n)
        hr(n, n) = energies(n) - (inUpper[n] ? omega : 0.0);
    hr += drive + drive.adjoint();
    return hr;
}

namespace {

Matrix sigma(Eigen::Index m, Eigen::Index n, Eigen::Index d) {
    Matrix s = Matrix::Zero(d, d);
    s(m, n) = 1.0;
    return s;
}

}  // namespace

Matrix QheSpec::dissipator(const QheEnvironment& env) const {
    const Eigen::Index d = nLevels;
    const RealMatrix eta = eta_matrix();
    const double nB = env.bose(omega);
    const Matrix eye = Matrix::Identity(d, d);
    Matrix diss = Matrix::Zero(d * d, d * d);

    auto idx = [d](Eigen::Index m, Eigen::Index n) { return m * d + n; };
    // half-transform weights: G_kl(eta_k w) = (1+n_B) chi_{lk}(w) for a
    // raising k, n_B chi_{kl}(w) for a lowering k (delta parts, Lamb shifts
    // dropped)
    auto ghalf = [&](Eigen::Index k1, Eigen::Index k2, Eigen::Index l1, Eigen::Index l2) {
        if (eta(k1, k2) > 0) return (1.0 + nB) * env.chiAtOmega(idx(l1, l2), idx(k1, k2));
        return nB * env.chiAtOmega(idx(k1, k2), idx(l1, l2));
    };

    for (Eigen::Index m = 0; m < d; ++m)
        for (Eigen::Index n = 0; n < d; ++n) {
            if (eta(m, n) == 0.0) continue;
            const Matrix sk = sigma(m, n, d);
            for (Eigen::Index p = 0; p < d; ++p)
                for (Eigen::Index q = 0; q < d; ++q) {
                    if (eta(p, q) != -eta(m, n)) continue;
                    const Matrix sl = sigma(p, q, d);
                    const Complex gkl = ghalf(m, n, p, q);
                    const Complex glk = ghalf(p, q, m, n);
                    if (gkl == Complex(0.0) && glk == Complex(0.0)) continue;
                    // row-major vec: vec(A rho B) = (A (x) B^T) vec(rho)
                    const Matrix lsk = core::tensor_product(sk * sl, eye);
                    const Matrix gain = core::tensor_product(sl, sk.transpose());
                    const Matrix rsk = core::tensor_product(eye, (sl * sk).transpose());
                    const Matrix gain2 = core::tensor_product(sk, sl.transpose());
                    diss -= 0.5 * gkl * (lsk - gain);
                    diss -= 0.5 * glk * (rsk - gain2);
                }
        }
    return diss;
}

double QheSpec::probe_rate_ratio() const {
    double probe = 0.0, rest = 0.0;
    for (const auto& e : envs) {
        const double scale = dissipator(e).cwiseAbs().maxCoeff();
        if (e.probe) probe = std::max(probe, scale);
        else rest = std::max(rest, scale);
    }
    return (rest > 0.0) ? probe / rest : (probe > 0.0 ? HUGE_VAL : 0.0);
}

Matrix steady_state(const QheSpec& spec) {
    spec.validate();
    master::BlochGenerator gen;
    gen.hr = spec.rotating_hr();
    gen.dissipator = Matrix::Zero(spec.nLevels * spec.nLevels, spec.nLevels * spec.nLevels);
    for (const auto& env : spec.envs)
        if (!env.probe) gen.dissipator += spec.dissipator(env);
    return master::bloch_steady_state(gen);
}

namespace {

Complex q_incoherent_complex(const QheSpec& spec, const Matrix& rho) {
    const QheEnvironment& env = spec.envs[spec.probe_index()];
    const Eigen::Index d = spec.nLevels;
    const RealMatrix eta = spec.eta_matrix();
    const double nB = env.bose(spec.omega);
    auto idx = [d](Eigen::Index a, Eigen::Index b) { return a * d + b; };
    Complex acc = 0.0;
    for (Eigen::Index m = 0; m < d; ++m)
        for (Eigen::Index n = 0; n < d; ++n)
            for (Eigen::Index p = 0; p < d; ++p) {
                if (eta(n, p) != 1.0) continue;
                acc += rho(m, n) * env.chiAtOmega(idx(p, m), idx(n, p)) * (1.0 + nB) -
                       rho(m, n) * env.chiAtOmega(idx(n, p), idx(p, m)) * nB;
            }
    return spec.omega * acc;
}

Complex q_coherent_complex(const QheSpec& spec, const Matrix& rho) {
    const QheEnvironment& env = spec.envs[spec.probe_index()];
    const Eigen::Index d = spec.nLevels;
    const RealMatrix eta = spec.eta_matrix();
    auto idx = [d](Eigen::Index a, Eigen::Index b) { return a * d + b; };
    Complex acc = 0.0;
    for (Eigen::Index m = 0; m < d; ++m)
        for (Eigen::Index n = 0; n < d; ++n)
            for (Eigen::Index p = 0; p < d; ++p)
                for (Eigen::Index q = 0; q < d; ++q) {
                    if (eta(p, q) != 1.0) continue;
                    acc += rho(n, m) * rho(q, p) * env.chiAtOmega(idx(m, n), idx(p, q));
                }
    return spec.omega * acc;
}

double realized(Complex v, const char* who) {
    if (std::abs(v.imag()) > 1e-8 * (std::abs(v.real()) + 1e-12))
        throw NumericalGuardError(std::string(who) + ": non-real result, susceptibility table inconsistent");
    return v.real();
}

}  // namespace

double q_incoherent(const QheSpec& spec, const Matrix& rho) {
    return realized(q_incoherent_complex(spec, rho), "q_incoherent");
}

double q_coherent(const QheSpec& spec, const Matrix& rho) {
    return realized(q_coherent_complex(spec, rho), "q_coherent");
}

double flow_prefactor(double m, double omega, double temperature) {
    if (std::abs(m - 1.0) < 1e-14) return 0.0;
    const double x = omega / temperature;
    const double nbM = 1.0 / std::expm1(m * x);
    const double nbM1 = 1.0 / std::expm1((m - 1.0) * x);
    const double nb1 = 1.0 / std::expm1(x);
    return m * nbM / (nbM1 * nb1 * omega);
}

FlowReport qhe_flows(const QheSpec& spec, const Matrix& rho, double m) {
    const QheEnvironment& probe = spec.envs[spec.probe_index()];
    const double qi = q_incoherent(spec, rho);
    const double qc = q_coherent(spec, rho);
    const double pref = flow_prefactor(m, spec.omega, probe.temperature);
    FlowReport rep;
    rep.m = m;
    rep.flow = pref * (qi - qc);
    rep.method = "qhe";
    rep.breakdown["Qi"] = qi;
    rep.breakdown["Qc"] = qc;
    rep.breakdown["prefactor"] = pref;
    rep.breakdown["FS"] = (qi - qc) / probe.temperature;
    rep.breakdown["lowT"] = m * (qi - qc) / spec.omega;
    return rep;
}

}  // namespace renyiflow::qhe

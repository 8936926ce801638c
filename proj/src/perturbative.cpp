#include "renyiflow/perturbative.hpp"

#include <cmath>

namespace renyiflow::perturbative {

RealMatrix RateTable::reduced_rates(const RealVector& pB) const {
    const Eigen::Index dA = dimA();
    const Eigen::Index dB = dimB();
    RealMatrix g = RealMatrix::Zero(dA, dA);
    for (Eigen::Index a = 0; a < dA; ++a)
        for (Eigen::Index b = 0; b < dA; ++b)
            for (Eigen::Index al = 0; al < dB; ++al)
                for (Eigen::Index be = 0; be < dB; ++be)
                    g(a, b) += gamma(a * dB + al, b * dB + be) * pB(al);
    return g;
}

RateTable golden_rule_rates(const BipartiteSystem& system, double eta) {
    if (eta <= 0.0) throw std::invalid_argument("golden_rule_rates: eta must be > 0");
    const Eigen::Index dA = system.dimA, dB = system.dimB, d = dA * dB;
    const Matrix hab = system.h_coupling();
    RateTable rt;
    rt.eA = system.hA.diagonal().real();
    rt.eB = system.hB.diagonal().real();
    rt.eta = eta;
    rt.gamma = RealMatrix::Zero(d, d);
    for (Eigen::Index s = 0; s < d; ++s) {
        for (Eigen::Index t = 0; t < d; ++t) {
            if (s / dB == t / dB || s % dB == t % dB) continue;  // strictly non-diagonal coupling
            const double de = rt.energy(s) - rt.energy(t);
            rt.gamma(s, t) = 2.0 * M_PI * std::norm(hab(s, t)) * gaussian_delta(de, eta);
        }
    }
    return rt;
}

SampledFunction w_block(const Correlator& c, const Correlator& k0, const Correlator& k1,
                        const std::vector<double>& tauGrid, WBlockForm form) {
    if (k0.n != 0 || k1.n != 1 || k0.m != k1.m)
        throw std::invalid_argument("w_block: expected K^{0,M} and K^{1,M} with matching M");
    if (c.coef.front().rows() != k0.coef.front().rows())
        throw std::invalid_argument("w_block: coupling index sets do not match");
    SampledFunction w;
    w.tau = tauGrid;
    w.values.reserve(tauGrid.size());
    for (double t : tauGrid) {
        const Matrix cp = c.eval(t);    // C_ij(t1, t2), tau = t1 - t2
        const Matrix cm = c.eval(-t);   // C_ji(t2, t1) = cm(j, i)
        const Matrix k0p = k0.eval(t);
        const Matrix k0m = k0.eval(-t);
        const Matrix k1p = k1.eval(t);
        const Matrix k1m = k1.eval(-t);
        Complex val = 0.0;
        const Eigen::Index nops = cp.rows();
        for (Eigen::Index i = 0; i < nops; ++i) {
            for (Eigen::Index j = 0; j < nops; ++j) {
                val += -cp(i, j) * k0p(i, j) - cm(j, i) * k0m(j, i) + cm(j, i) * k1p(i, j);
                val += (form == WBlockForm::Corrected) ? cp(i, j) * k1m(j, i)
                                                       : cp(i, j) * k0p(i, j);
            }
        }
        w.values.push_back(val);
    }
    return w;
}

namespace {

Complex damped_integral(const SampledFunction& w, double eta) {
    Complex acc = 0.0;
    for (std::size_t k = 0; k + 1 < w.tau.size(); ++k) {
        const double h = w.tau[k + 1] - w.tau[k];
        const Complex f0 = w.values[k] * std::exp(-eta * w.tau[k]);
        const Complex f1 = w.values[k + 1] * std::exp(-eta * w.tau[k + 1]);
        acc += 0.5 * h * (f0 + f1);
    }
    return acc;
}

}  // namespace

FlowReport flow_second_order(const SampledFunction& w, double convergenceRate, bool throwOnSpread) {
    if (convergenceRate <= 0.0)
        throw std::invalid_argument("flow_second_order: convergence rate must be > 0");
    const Complex fEta = damped_integral(w, convergenceRate);
    const Complex fHalf = damped_integral(w, 0.5 * convergenceRate);
    const Complex extrap = 2.0 * fHalf - fEta;
    const double spread = std::abs(fHalf - fEta);
    FlowReport rep;
    rep.flow = extrap.real();
    rep.method = "2nd";
    rep.breakdown["spread"] = spread;
    rep.breakdown["imag"] = extrap.imag();
    rep.breakdown["eta_value"] = fEta.real();
    rep.breakdown["eta_half_value"] = fHalf.real();
    if (throwOnSpread && spread > 0.05 * std::abs(extrap) && std::abs(extrap) > 1e-14)
        throw NumericalGuardError("flow_second_order: Richardson extrapolation spread exceeds 5%");
    return rep;
}

FlowReport flow_2nd_states(const RateTable& rates, const RealVector& pA, const RealVector& pB,
                           double m) {
    const Eigen::Index dA = rates.dimA(), dB = rates.dimB();
    if (pA.size() != dA || pB.size() != dB)
        throw DimensionError("flow_2nd_states: probability vector size mismatch");
    double sm = 0.0;
    for (Eigen::Index a = 0; a < dA; ++a) sm += std::pow(pA(a), m);

    const RealMatrix gred = rates.reduced_rates(pB);
    double form2 = 0.0;
    for (Eigen::Index a = 0; a < dA; ++a)
        for (Eigen::Index b = 0; b < dA; ++b)
            form2 += gred(a, b) * pA(a) * (std::pow(pA(b), m - 1.0) - std::pow(pA(a), m - 1.0));
    form2 *= m / sm;

    double form1 = 0.0;
    for (Eigen::Index a = 0; a < dA; ++a)
        for (Eigen::Index al = 0; al < dB; ++al)
            for (Eigen::Index b = 0; b < dA; ++b)
                for (Eigen::Index be = 0; be < dB; ++be)
                    form1 += rates.gamma(a * dB + al, b * dB + be) *
                             (pA(b) * pB(be) - pA(a) * pB(al)) * std::pow(pA(a), m - 1.0);
    form1 *= m / sm;

    FlowReport rep;
    rep.m = m;
    rep.flow = form2;
    rep.method = "2nd-states";
    rep.breakdown["form1"] = form1;
    rep.breakdown["form2"] = form2;
    rep.breakdown["SM"] = sm;
    return rep;
}

FlowReport flow_2nd_shannon(const RateTable& rates, const RealVector& pA, const RealVector& pB) {
    const Eigen::Index dA = rates.dimA();
    const RealMatrix gred = rates.reduced_rates(pB);
    double minusDs = 0.0, dE = 0.0;
    for (Eigen::Index a = 0; a < dA; ++a) {
        if (pA(a) <= 0.0) continue;  // no occupation, no outgoing weight
        for (Eigen::Index b = 0; b < dA; ++b) {
            if (gred(a, b) == 0.0) continue;
            if (pA(b) <= 0.0)
                throw NumericalGuardError(
                    "flow_2nd_shannon: zero-probability target with nonzero rate");
            minusDs += std::log(pA(b) / pA(a)) * gred(a, b) * pA(a);
            dE += gred(a, b) * (rates.eA(b) - rates.eA(a)) * pA(a);
        }
    }
    FlowReport rep;
    rep.m = 1.0;
    rep.flow = minusDs;
    rep.method = "2nd-shannon";
    rep.breakdown["dSdt"] = -minusDs;
    rep.breakdown["dEdt"] = dE;
    return rep;
}

namespace {

/// (p_a^{M-1} - p_b^{M-1})/(p_a - p_b) with its removable limit.
double divided_difference(double pa, double pb, double m) {
    if (std::abs(pa - pb) < 1e-12) return (m - 1.0) * std::pow(pa, m - 2.0);
    return (std::pow(pa, m - 1.0) - std::pow(pb, m - 1.0)) / (pa - pb);
}

double log_divided_difference(double pa, double pb) {
    if (std::abs(pa - pb) < 1e-12) return 1.0 / pa;
    return std::log(pa / pb) / (pa - pb);
}

struct FourthOrderAmps {
    RealMatrix absSq;   // |A_ab|^2
    double ampMax = 0.0;
};

FourthOrderAmps fourth_order_amplitudes(const BipartiteSystem& system, const RealVector& pA,
                                        const RealVector& pB, double eta) {
    const Eigen::Index dA = system.dimA, dB = system.dimB;
    const Matrix hab = system.h_coupling();
    const RealVector eA = system.hA.diagonal().real();
    const RealVector eB = system.hB.diagonal().real();
    FourthOrderAmps out;
    out.absSq = RealMatrix::Zero(dA, dA);
    for (Eigen::Index a = 0; a < dA; ++a) {
        for (Eigen::Index b = 0; b < dA; ++b) {
            if (a == b) continue;  // the a = b diagram exponentiates the second order
            Complex amp = 0.0;
            for (Eigen::Index cc = 0; cc < dA; ++cc) {
                for (Eigen::Index al = 0; al < dB; ++al) {
                    for (Eigen::Index be = 0; be < dB; ++be) {
                        const Complex h1 = hab(a * dB + al, cc * dB + be);
                        const Complex h2 = hab(cc * dB + be, b * dB + al);
                        if (h1 == Complex(0.0) || h2 == Complex(0.0)) continue;
                        const double de = eA(a) + eB(al) - eA(cc) - eB(be);
                        const double braket =
                            M_PI * ((pA(a) + pA(b)) * pB(al) - 2.0 * pA(cc) * pB(be)) *
                            gaussian_delta(de, eta);
                        const double pv = (pA(a) - pA(b)) * principal_value(de, eta);
                        amp += h1 * h2 * Complex(braket, -pv);
                    }
                }
            }
            out.absSq(a, b) = std::norm(amp);
            out.ampMax = std::max(out.ampMax, std::abs(amp));
        }
    }
    return out;
}

}  // namespace

FlowReport flow_4th_order(const BipartiteSystem& system, const RealVector& pA,
                          const RealVector& pB, double m, double eta) {
    const Eigen::Index dA = system.dimA;
    const RealVector eA = system.hA.diagonal().real();
    const FourthOrderAmps amps = fourth_order_amplitudes(system, pA, pB, eta);
    double dsm = 0.0;
    for (Eigen::Index a = 0; a < dA; ++a)
        for (Eigen::Index b = 0; b < dA; ++b)
            if (a != b)
                dsm += M_PI * amps.absSq(a, b) * gaussian_delta(eA(a) - eA(b), eta) *
                       divided_difference(pA(a), pA(b), m);
    double sm = 0.0;
    for (Eigen::Index a = 0; a < dA; ++a) sm += std::pow(pA(a), m);
    FlowReport rep;
    rep.m = m;
    rep.flow = dsm / sm;
    rep.method = "4th";
    rep.breakdown["dSMdt"] = dsm;
    rep.breakdown["amp_max"] = amps.ampMax;
    rep.breakdown["SM"] = sm;
    return rep;
}

FlowReport flow_4th_shannon(const BipartiteSystem& system, const RealVector& pA,
                            const RealVector& pB, double eta) {
    const Eigen::Index dA = system.dimA;
    const RealVector eA = system.hA.diagonal().real();
    const FourthOrderAmps amps = fourth_order_amplitudes(system, pA, pB, eta);
    double ds = 0.0;
    for (Eigen::Index a = 0; a < dA; ++a)
        for (Eigen::Index b = 0; b < dA; ++b)
            if (a != b)
                ds -= M_PI * amps.absSq(a, b) * gaussian_delta(eA(a) - eA(b), eta) *
                      log_divided_difference(pA(a), pA(b));
    FlowReport rep;
    rep.m = 1.0;
    rep.flow = ds;
    rep.method = "4th-shannon";
    rep.breakdown["dSdt"] = ds;
    rep.breakdown["amp_max"] = amps.ampMax;
    return rep;
}

FlowReport flow_2nd_coherent(const Matrix& stateA, const std::vector<Matrix>& aOps,
                             const Matrix& hA, int m, const std::vector<double>& nu,
                             const std::vector<Vector>& amp, const std::vector<double>& tauGrid,
                             double convergenceRate) {
    if (m < 2) {
        FlowReport rep;
        rep.m = m;
        rep.method = "2nd-coherent";
        return rep;  // single world: no cross-world pairs
    }
    if (nu.size() != amp.size())
        throw std::invalid_argument("flow_2nd_coherent: nu/amp size mismatch");
    const std::size_t nops = aOps.size();

    // period average of b_i(t) b_j(t - tau): harmonics pair up at nu + nu' = 0
    std::vector<std::pair<double, Matrix>> force;  // (nu_k, amp_k amp_{-k}^T)
    for (std::size_t k = 0; k < nu.size(); ++k) {
        for (std::size_t l = 0; l < nu.size(); ++l) {
            if (std::abs(nu[k] + nu[l]) > 1e-12) continue;
            Matrix f(nops, nops);
            for (std::size_t i = 0; i < nops; ++i)
                for (std::size_t j = 0; j < nops; ++j) f(i, j) = amp[k](i) * amp[l](j);
            force.emplace_back(nu[k], f);
        }
    }

    std::vector<Correlator> kn;
    for (int n = 0; n <= m; ++n)
        kn.push_back(multiworld_correlator(stateA, aOps, hA, n, m, tauGrid));

    SampledFunction integrand;
    integrand.tau = tauGrid;
    integrand.values.reserve(tauGrid.size());
    for (std::size_t it = 0; it < tauGrid.size(); ++it) {
        const double t = tauGrid[it];
        Matrix bracket = Matrix::Zero(nops, nops);
        for (int n = 0; n <= m - 2; ++n)
            bracket += 2.0 * kn[n + 1].eval(t) - kn[n + 2].eval(t) - kn[n].eval(t);
        Complex val = 0.0;
        for (const auto& [w, f] : force) {
            const Complex phase = std::exp(Complex(0.0, -w * t));
            for (std::size_t i = 0; i < nops; ++i)
                for (std::size_t j = 0; j < nops; ++j) val += phase * f(i, j) * bracket(i, j);
        }
        integrand.values.push_back(val);
    }

    FlowReport base = flow_second_order(integrand, convergenceRate, false);
    FlowReport rep;
    rep.m = m;
    rep.flow = -static_cast<double>(m) * base.flow;
    rep.method = "2nd-coherent";
    rep.breakdown["spread"] = m * base.breakdown["spread"];
    rep.breakdown["imag"] = -m * base.breakdown["imag"];
    return rep;
}

}  // namespace renyiflow::perturbative

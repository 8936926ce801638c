#include "renyiflow/master.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace renyiflow::master {

RateGenerator build_generator(const perturbative::RateTable& rates, Complex chi,
                              const RealVector& oAWeights, int m, const RealVector& refA,
                              const RealVector& refB) {
    const Eigen::Index d = rates.gamma.rows();
    const Eigen::Index dB = rates.dimB();
    if (oAWeights.size() != d)
        throw DimensionError("build_generator: oAWeights must cover the composite space");
    if (m < 1) throw std::invalid_argument("build_generator: m >= 1");
    if (m >= 2 && (refA.size() != rates.dimA() || refB.size() != dB))
        throw std::invalid_argument("build_generator: multi-world tilt needs refA and refB");

    RateGenerator gen;
    gen.chi = chi;
    gen.m = m;
    gen.L = Matrix::Zero(d, d);
    for (Eigen::Index s = 0; s < d; ++s) {
        double escape = 0.0;
        for (Eigen::Index t = 0; t < d; ++t) {
            if (t == s) continue;
            const double g = rates.gamma(s, t);
            if (g == 0.0) continue;
            escape += g;
            Complex factor = std::exp(Complex(0.0, 1.0) * chi * (oAWeights(t) - oAWeights(s)));
            if (m >= 2) {
                const double pa = refA(s / dB), pb = refA(t / dB);
                // unoccupied reference sources carry zero Renyi weight; keep
                // the generator finite there
                factor *= (pa > kSupportCutoff) ? std::pow(pb / pa, m - 1) : 0.0;
            }
            gen.L(t, s) += g * factor;
        }
        gen.L(s, s) -= escape;
    }
    if (m >= 2) {
        gen.refWeights.resize(d);
        double sm = 0.0;
        for (Eigen::Index a = 0; a < refA.size(); ++a) sm += std::pow(refA(a), m);
        for (Eigen::Index s = 0; s < d; ++s)
            gen.refWeights(s) = std::pow(refA(s / dB), m) * refB(s % dB) / sm;
    } else if (refA.size() == rates.dimA() && refB.size() == dB) {
        gen.refWeights.resize(d);
        for (Eigen::Index s = 0; s < d; ++s) gen.refWeights(s) = refA(s / dB) * refB(s % dB);
    }
    return gen;
}

Vector solve_master(const RateGenerator& gen, const Vector& p0, double t) {
    if (p0.size() != gen.L.rows()) throw DimensionError("solve_master: p0 size mismatch");
    const Matrix prop = (gen.L * t).exp();
    return prop * p0;
}

RealVector stationary_distribution(const RateGenerator& gen) {
    Eigen::ComplexEigenSolver<Matrix> es(gen.L);
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < es.eigenvalues().size(); ++i)
        if (std::abs(es.eigenvalues()(i)) < std::abs(es.eigenvalues()(best))) best = i;
    if (std::abs(es.eigenvalues()(best)) > 1e-8)
        throw NumericalGuardError("stationary_distribution: no zero eigenvalue");
    Vector v = es.eigenvectors().col(best);
    const Complex total = v.sum();
    if (std::abs(total) < 1e-12)
        throw NumericalGuardError("stationary_distribution: traceless null vector");
    v /= total;
    RealVector p(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) p(i) = v(i).real();
    return p;
}

D0Report dominant_eigenvalue(const Matrix& L) {
    Eigen::ComplexEigenSolver<Matrix> es(L);
    const auto& ev = es.eigenvalues();
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < ev.size(); ++i) {
        const double dr = ev(i).real() - ev(best).real();
        if (dr > 1e-12) {
            best = i;
        } else if (std::abs(dr) <= 1e-12 && std::abs(ev(i).imag()) < std::abs(ev(best).imag())) {
            best = i;
        }
    }
    D0Report rep;
    rep.d0 = -ev(best);
    const double scale = std::max(1.0, L.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (i != best && std::abs(ev(i).real() - ev(best).real()) <= 1e-10 * scale)
            rep.degenerate = true;
    return rep;
}

Complex quasistationary_rate(const Matrix& L, const RealVector& weights) {
    if (weights.size() != L.cols())
        throw DimensionError("quasistationary_rate: weight size mismatch");
    Complex acc = 0.0;
    for (Eigen::Index s = 0; s < L.cols(); ++s) acc += weights(s) * L.col(s).sum();
    return acc;
}

FlowReport multiworld_flow_via_d0(const RateGenerator& gen) {
    if (gen.m == 1) {
        FlowReport rep;
        rep.m = 1;
        rep.method = "d0";
        rep.breakdown["d0_qs"] = 0.0;
        return rep;  // a single world conserves its trace
    }
    if (gen.refWeights.size() != gen.L.rows())
        throw std::invalid_argument("multiworld_flow_via_d0: generator lacks reference weights");
    const Complex rate = quasistationary_rate(gen.L, gen.refWeights);
    const D0Report strict = dominant_eigenvalue(gen);
    FlowReport rep;
    rep.m = gen.m;
    rep.flow = static_cast<double>(gen.m) * rate.real();  // = -m * D0_qs
    rep.method = "d0";
    rep.breakdown["d0_qs"] = -rate.real();
    rep.breakdown["d0_strict_re"] = strict.d0.real();
    rep.breakdown["d0_strict_im"] = strict.d0.imag();
    rep.breakdown["degenerate"] = strict.degenerate ? 1.0 : 0.0;
    return rep;
}

Matrix JumpProcess::generator(Complex chi) const {
    Matrix L = Matrix::Zero(dim, dim);
    for (const Edge& e : edges) {
        L(e.to, e.from) += e.rate * std::exp(Complex(0.0, 1.0) * chi * e.weight);
        L(e.from, e.from) -= e.rate;
    }
    return L;
}

RealVector JumpProcess::stationary() const {
    RateGenerator g;
    g.L = generator(Complex(0.0, 0.0));
    return stationary_distribution(g);
}

Complex JumpProcess::pinned_rate(Complex chi, const RealVector& pin) const {
    Complex acc = 0.0;
    for (const Edge& e : edges)
        acc += pin(e.from) * e.rate *
               (std::exp(Complex(0.0, 1.0) * chi * e.weight) - 1.0);
    return acc;
}

namespace {

double generator_gap(const Matrix& L0) {
    Eigen::ComplexEigenSolver<Matrix> es(L0);
    double gap = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const double re = -es.eigenvalues()(i).real();
        if (re > 1e-12 && (gap == 0.0 || re < gap)) gap = re;
    }
    return gap;
}

}  // namespace

KeldyshAction keldysh_action(const JumpProcess& process, const std::vector<Complex>& chiGrid,
                             double window) {
    const double gap = generator_gap(process.generator(Complex(0.0, 0.0)));
    if (gap * window < 5.0)
        throw NumericalGuardError("keldysh_action: window too short for the long-time form");
    KeldyshAction act;
    act.window = window;
    act.chi = chiGrid;
    act.s.reserve(chiGrid.size());
    for (Complex chi : chiGrid) {
        const D0Report d0 = dominant_eigenvalue(process.generator(chi));
        act.s.push_back(-window * d0.d0);
    }
    return act;
}

Cumulants action_cumulants(const JumpProcess& process, double window, double h) {
    auto s = [&](double chi) {
        return -window * dominant_eigenvalue(process.generator(Complex(chi, 0.0))).d0;
    };
    const Complex sp = s(h), sm = s(-h), s0 = s(0.0);
    Cumulants c;
    // ln<e^{i chi Q}> = S(chi): c1 = -i S'(0), c2 = -S''(0)
    c.c1 = ((sp - sm) / (2.0 * h) / Complex(0.0, 1.0)).real();
    c.c2 = (-(sp - 2.0 * s0 + sm) / (h * h)).real();
    return c;
}

TransferDistribution fcs_invert(const JumpProcess& process, double window, double quantum,
                                int qMin, int qMax, int chiPoints) {
    if (quantum <= 0.0) throw std::invalid_argument("fcs_invert: quantum must be > 0");
    const double lim = M_PI / quantum;
    std::vector<Complex> g(chiPoints);
    std::vector<double> chis(chiPoints);
    for (int k = 0; k < chiPoints; ++k) {
        chis[k] = -lim + 2.0 * lim * k / (chiPoints - 1);
        const D0Report d0 = dominant_eigenvalue(process.generator(Complex(chis[k], 0.0)));
        g[k] = std::exp(-window * d0.d0);
    }
    TransferDistribution dist;
    for (int q = qMin; q <= qMax; ++q) {
        const double qv = q * quantum;
        Complex acc = 0.0;
        for (int k = 0; k + 1 < chiPoints; ++k) {
            const double h = chis[k + 1] - chis[k];
            acc += 0.5 * h *
                   (std::exp(Complex(0.0, -chis[k] * qv)) * g[k] +
                    std::exp(Complex(0.0, -chis[k + 1] * qv)) * g[k + 1]);
        }
        dist.q.push_back(qv);
        dist.p.push_back((acc * quantum / (2.0 * M_PI)).real());
    }
    return dist;
}

Matrix BlochGenerator::full() const {
    const Eigen::Index d = dim();
    const Matrix eye = Matrix::Identity(d, d);
    const Complex iu(0.0, 1.0);
    // row-major vec: vec(A rho B) = (A (x) B^T) vec(rho)
    Matrix lh = iu * (core::tensor_product(hr, eye) - core::tensor_product(eye, hr.transpose()));
    return lh + dissipator;
}

Matrix solve_bloch(const BlochGenerator& gen, const Matrix& rho0, double t) {
    const Eigen::Index d = gen.dim();
    if (rho0.rows() != d || rho0.cols() != d)
        throw DimensionError("solve_bloch: state dimension mismatch");
    Vector v(d * d);
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b) v(a * d + b) = rho0(a, b);
    const Matrix prop = (gen.full() * t).exp();
    v = prop * v;
    Matrix out(d, d);
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b) out(a, b) = v(a * d + b);
    return out;
}

Matrix bloch_steady_state(const BlochGenerator& gen) {
    const Eigen::Index d = gen.dim();
    const Matrix L = gen.full();
    Eigen::ComplexEigenSolver<Matrix> es(L);
    Eigen::Index best = -1;
    int nullCount = 0;
    const double scale = std::max(1.0, L.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        if (std::abs(es.eigenvalues()(i)) < 1e-9 * scale) {
            ++nullCount;
            if (best < 0) best = i;
        }
    }
    if (best < 0) throw NumericalGuardError("bloch_steady_state: no stationary solution");
    if (nullCount > 1) throw NumericalGuardError("bloch_steady_state: degenerate null space");
    Matrix rho(d, d);
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b) rho(a, b) = es.eigenvectors().col(best)(a * d + b);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    const Complex tr = rho.trace();
    if (std::abs(tr) < 1e-12)
        throw NumericalGuardError("bloch_steady_state: traceless null vector");
    return rho / tr;
}

}  // namespace renyiflow::master

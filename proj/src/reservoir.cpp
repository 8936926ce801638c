#include "renyiflow/reservoir.hpp"

#include <cmath>

namespace renyiflow::reservoir {

namespace {

dynamics::EvolutionJob segment_job(const RepeatedInteraction& ri) {
    dynamics::EvolutionJob job;
    job.system = ri.system;
    job.initial = Matrix::Identity(ri.system.dim(), ri.system.dim());
    job.initial /= static_cast<double>(ri.system.dim());
    job.tStart = 0.0;
    job.tEnd = ri.segmentTime;
    job.dt = ri.dt;
    job.couplingModulation = ri.couplingModulation;
    return job;
}

}  // namespace

Matrix segment_propagator(const RepeatedInteraction& ri) {
    return dynamics::propagator(segment_job(ri));
}

perturbative::RateTable segment_rates(const RepeatedInteraction& ri) {
    const Matrix u = segment_propagator(ri);
    const Eigen::Index d = u.rows();
    perturbative::RateTable rt;
    rt.eA = ri.system.hA.diagonal().real();
    rt.eB = ri.system.hB.diagonal().real();
    rt.eta = 1.0 / ri.segmentTime;  // effective spectral resolution of a segment
    rt.gamma = RealMatrix::Zero(d, d);
    for (Eigen::Index s = 0; s < d; ++s)
        for (Eigen::Index t = 0; t < d; ++t)
            if (s != t) rt.gamma(s, t) = std::norm(u(t, s)) / ri.segmentTime;
    return rt;
}

std::vector<Matrix> refreshed_evolution_b(const RepeatedInteraction& ri, const Matrix& rhoA0,
                                          const RealVector& qB, int nSegments) {
    const Matrix u = segment_propagator(ri);
    Matrix qMat = Matrix::Zero(qB.size(), qB.size());
    for (Eigen::Index i = 0; i < qB.size(); ++i) qMat(i, i) = qB(i);
    Matrix rhoA = rhoA0;
    std::vector<Matrix> history;
    history.reserve(nSegments);
    for (int k = 0; k < nSegments; ++k) {
        const Matrix r = u * core::tensor_product(rhoA, qMat) * u.adjoint();
        rhoA = core::partial_trace(r, ri.system.dimA, ri.system.dimB, core::Keep::A);
        history.push_back(rhoA);
    }
    return history;
}

Complex refreshed_counting_action(const RepeatedInteraction& ri, const RealVector& pA,
                                  const Matrix& rhoB0, Complex chi, int nSegments) {
    const Matrix u = segment_propagator(ri);
    const Eigen::Index dA = ri.system.dimA, dB = ri.system.dimB;
    Matrix pMat = Matrix::Zero(dA, dA);
    for (Eigen::Index i = 0; i < dA; ++i) pMat(i, i) = pA(i);

    // counted observable is H_A (diagonal); the chi/2 gauge factors are
    // diagonal too, so the sandwich is exact
    const RealVector eA = ri.system.hA.diagonal().real();
    Vector phasePlus(dA), phaseMinus(dA);
    const Complex s = 0.5 * chi;
    for (Eigen::Index i = 0; i < dA; ++i) {
        phasePlus(i) = std::exp(Complex(0.0, 1.0) * s * eA(i));
        phaseMinus(i) = std::exp(Complex(0.0, -1.0) * s * eA(i));
    }
    const Matrix uaPlus =
        core::tensor_product(Matrix(phasePlus.asDiagonal()), Matrix::Identity(dB, dB));
    const Matrix uaMinus =
        core::tensor_product(Matrix(phaseMinus.asDiagonal()), Matrix::Identity(dB, dB));
    const Matrix fwd = uaPlus * u * uaMinus;
    const Matrix bwd = uaMinus * u.adjoint() * uaPlus;

    Matrix rhoB = rhoB0;
    for (int k = 0; k < nSegments; ++k) {
        const Matrix x = fwd * core::tensor_product(pMat, rhoB) * bwd;
        rhoB = core::partial_trace(x, dA, dB, core::Keep::B);
    }
    return std::log(rhoB.trace());
}

RefreshedCumulants refreshed_cumulants(const RepeatedInteraction& ri, const RealVector& pA,
                                       const Matrix& rhoB0, int nSegments, double h) {
    const Complex sp = refreshed_counting_action(ri, pA, rhoB0, Complex(h, 0.0), nSegments);
    const Complex sm = refreshed_counting_action(ri, pA, rhoB0, Complex(-h, 0.0), nSegments);
    RefreshedCumulants c;
    c.c1 = ((sp - sm) / (2.0 * h) / Complex(0.0, 1.0)).real();
    c.c2 = (-(sp + sm) / (h * h)).real();  // S(0) = 0 for the refreshed chain
    return c;
}

}  // namespace renyiflow::reservoir

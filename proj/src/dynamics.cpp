#include "renyiflow/dynamics.hpp"

#include <cmath>

namespace renyiflow::dynamics {

SwitchingProfile SwitchingProfile::for_system(const BipartiteSystem& sys, double tOn) {
    const double w = sys.min_bohr_frequency();
    return exponential(0.05 * (w > 0.0 ? w : 1.0), tOn);
}

Matrix EvolutionJob::hamiltonian(double tau) const {
    double g = switching.envelope(tau);
    if (couplingModulation) g *= couplingModulation(tau);
    Matrix h = system.h_free() + g * system.h_coupling();
    if (extraH) h += extraH(tau);
    return h;
}

namespace {

Matrix step_operator(const Matrix& h, double dt) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    Vector phase(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < phase.size(); ++i)
        phase(i) = std::exp(Complex(0.0, -es.eigenvalues()(i) * dt));
    return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

bool time_dependent(const EvolutionJob& job) {
    return job.switching.kind != SwitchingProfile::Kind::None ||
           static_cast<bool>(job.couplingModulation) || static_cast<bool>(job.extraH);
}

void check_guard(const EvolutionJob& job) {
    if (job.dt <= 0.0) throw std::invalid_argument("EvolutionJob: dt must be > 0");
    if (job.tEnd < job.tStart) throw std::invalid_argument("EvolutionJob: tEnd < tStart");
    double hmax = 0.0;
    for (double f : {0.0, 0.5, 1.0}) {
        const double tau = job.tStart + f * (job.tEnd - job.tStart);
        hmax = std::max(hmax, job.hamiltonian(tau).cwiseAbs().maxCoeff());
    }
    if (job.dt * hmax > 0.1)
        throw NumericalGuardError("EvolutionJob: stability guard dt*|H|_max <= 0.1 violated");
}

/// Walks [t0, t1] in fixed steps dt (last step shortened), applying
/// R -> U R U^dag. Caches the step operator while H is static.
class Stepper {
public:
    explicit Stepper(const EvolutionJob& job) : job_(job), td_(time_dependent(job)) {}

    void advance(Matrix& r, double t0, double t1) {
        double t = t0;
        while (t < t1 - 1e-15 * std::max(1.0, std::abs(t1))) {
            const double dt = std::min(job_.dt, t1 - t);
            if (td_ || !haveCached_ || std::abs(dt - cachedDt_) > 1e-15) {
                cachedU_ = step_operator(job_.hamiltonian(t + 0.5 * dt), dt);
                cachedDt_ = dt;
                haveCached_ = !td_;
            }
            r = cachedU_ * r * cachedU_.adjoint();
            t += dt;
        }
    }

    void accumulate(Matrix& u, double t0, double t1) {
        double t = t0;
        while (t < t1 - 1e-15 * std::max(1.0, std::abs(t1))) {
            const double dt = std::min(job_.dt, t1 - t);
            if (td_ || !haveCached_ || std::abs(dt - cachedDt_) > 1e-15) {
                cachedU_ = step_operator(job_.hamiltonian(t + 0.5 * dt), dt);
                cachedDt_ = dt;
                haveCached_ = !td_;
            }
            u = cachedU_ * u;
            t += dt;
        }
    }

private:
    const EvolutionJob& job_;
    bool td_;
    bool haveCached_ = false;
    double cachedDt_ = 0.0;
    Matrix cachedU_;
};

}  // namespace

Matrix evolve_unitary(const EvolutionJob& job) {
    check_guard(job);
    Matrix r = job.initial;
    Stepper(job).advance(r, job.tStart, job.tEnd);
    return r;
}

void evolve_sampled(const EvolutionJob& job, const std::vector<double>& sampleTimes,
                    const std::function<void(double, const Matrix&)>& visit) {
    check_guard(job);
    Matrix r = job.initial;
    Stepper stepper(job);
    double t = job.tStart;
    for (double ts : sampleTimes) {
        if (ts < t - 1e-12 || ts > job.tEnd + 1e-12)
            throw std::invalid_argument("evolve_sampled: sample times must be ascending within the job");
        stepper.advance(r, t, ts);
        t = ts;
        visit(ts, r);
    }
}

Matrix propagator(const EvolutionJob& job) {
    check_guard(job);
    Matrix u = Matrix::Identity(job.initial.rows(), job.initial.cols());
    Stepper(job).accumulate(u, job.tStart, job.tEnd);
    return u;
}

Matrix evolve_extended(const EvolutionJob& job, const CountingConfig& counting) {
    check_guard(job);
    if (counting.windowEnd < counting.windowStart)
        throw std::invalid_argument("CountingConfig: window must be ordered");
    Matrix r = job.initial;
    Stepper stepper(job);
    if (counting.chi == Complex(0.0, 0.0)) {
        stepper.advance(r, job.tStart, job.tEnd);
        return r;
    }
    const double t0 = std::max(counting.windowStart, job.tStart);
    const double t1 = std::min(counting.windowEnd, job.tEnd);

    Eigen::SelfAdjointEigenSolver<Matrix> es(counting.oA);
    const Eigen::Index dB = job.system.dimB;
    auto ua = [&](Complex x) {
        Vector w(es.eigenvalues().size());
        for (Eigen::Index i = 0; i < w.size(); ++i)
            w(i) = std::exp(Complex(0.0, 1.0) * x * es.eigenvalues()(i));
        const Matrix onA = es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
        return core::tensor_product(onA, Matrix::Identity(dB, dB));
    };
    const Complex s = 0.5 * counting.chi;
    const Matrix uMinus = ua(-s);
    const Matrix uPlus = ua(s);

    stepper.advance(r, job.tStart, t0);
    r = uMinus * r * uMinus;
    stepper.advance(r, t0, t1);
    r = uPlus * r * uPlus;
    stepper.advance(r, t1, job.tEnd);
    return r;
}

std::vector<std::pair<double, double>> two_time_measurement(const EvolutionJob& job,
                                                            const Matrix& oA, double tol) {
    const Matrix u = propagator(job);
    Eigen::SelfAdjointEigenSolver<Matrix> es(oA);
    const Eigen::Index dA = oA.rows();
    const Eigen::Index dB = job.system.dimB;
    const Matrix vFull = core::tensor_product(es.eigenvectors(), Matrix::Identity(dB, dB));
    const Matrix rEig = vFull.adjoint() * job.initial * vFull;
    const Matrix uEig = vFull.adjoint() * u * vFull;

    // first measurement dephases R in the oA eigenbasis; outcomes i with
    // P(i), post-measurement blocks evolve and are measured again
    std::map<double, double> dist;
    for (Eigen::Index i = 0; i < dA; ++i) {
        Matrix block = Matrix::Zero(dA * dB, dA * dB);
        block.block(i * dB, i * dB, dB, dB) = rEig.block(i * dB, i * dB, dB, dB);
        const Matrix evolved = uEig * block * uEig.adjoint();
        for (Eigen::Index f = 0; f < dA; ++f) {
            double p = 0.0;
            for (Eigen::Index b = 0; b < dB; ++b) p += evolved(f * dB + b, f * dB + b).real();
            if (std::abs(p) < 1e-300) continue;
            const double q = es.eigenvalues()(f) - es.eigenvalues()(i);
            bool merged = false;
            for (auto& [qq, pp] : dist) {
                if (std::abs(qq - q) <= tol) {
                    pp += p;
                    merged = true;
                    break;
                }
            }
            if (!merged) dist[q] += p;
        }
    }
    return {dist.begin(), dist.end()};
}

namespace {

FlowReport slope_fit(const std::vector<double>& t, const std::vector<double>& f,
                     const std::string& method) {
    const std::size_t n = t.size();
    double tm = 0.0, fm = 0.0;
    for (std::size_t i = 0; i < n; ++i) { tm += t[i]; fm += f[i]; }
    tm /= static_cast<double>(n);
    fm /= static_cast<double>(n);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (t[i] - tm) * (f[i] - fm);
        den += (t[i] - tm) * (t[i] - tm);
    }
    const double slope = num / den;
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = f[i] - fm - slope * (t[i] - tm);
        res += d * d;
    }
    const double span = t.back() - t.front();
    // residual expressed as an equivalent slope error over the span
    const double resSlope = std::sqrt(res / static_cast<double>(n)) / (0.5 * span);

    FlowReport rep;
    rep.flow = slope;
    rep.method = method;
    rep.breakdown["slope"] = slope;
    rep.breakdown["fit_residual"] = resSlope;
    rep.breakdown["lnSM_mid"] = fm;
    rep.breakdown["residual_flag"] =
        (std::abs(slope) > 1e-12 && resSlope > 0.1 * std::abs(slope)) ? 1.0 : 0.0;
    return rep;
}

}  // namespace

FlowReport oracle_scalar_flow(const EvolutionJob& job,
                              const std::function<double(const Matrix&)>& fn,
                              const std::vector<double>& probeTimes, const std::string& method) {
    if (probeTimes.size() < 3)
        throw std::invalid_argument("oracle flow: need at least 3 probe times");
    for (double tp : probeTimes) {
        const double g = job.switching.envelope(tp);
        if (g < 1.0 - 1e-6)
            throw std::invalid_argument("oracle flow: probe time before switching is complete");
    }
    std::vector<double> vals;
    evolve_sampled(job, probeTimes, [&](double, const Matrix& r) { vals.push_back(fn(r)); });
    return slope_fit(probeTimes, vals, method);
}

FlowReport oracle_renyi_flow(const EvolutionJob& job, int m, const std::vector<double>& probeTimes) {
    const Eigen::Index dA = job.system.dimA;
    const Eigen::Index dB = job.system.dimB;
    auto lnSm = [dA, dB, m](const Matrix& r) {
        const Matrix ra = core::partial_trace(r, dA, dB, core::Keep::A);
        return std::log(core::renyi_entropy(ra, m));
    };
    FlowReport rep = oracle_scalar_flow(job, lnSm, probeTimes, "oracle");
    rep.m = m;
    return rep;
}

}  // namespace renyiflow::dynamics

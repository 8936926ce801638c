#include "renyiflow/multiworld.hpp"

#include <cmath>
#include <numeric>

namespace renyiflow::multiworld {

void ReconnectionPattern::validate() const {
    if (worlds < 1) throw std::invalid_argument("ReconnectionPattern: need at least one world");
    auto check = [this](const std::vector<int>& p, const char* name) {
        if (static_cast<int>(p.size()) != worlds)
            throw std::invalid_argument(std::string("ReconnectionPattern: ") + name + " size mismatch");
        std::vector<bool> seen(worlds, false);
        for (int v : p) {
            if (v < 0 || v >= worlds || seen[v])
                throw std::invalid_argument(
                    std::string("ReconnectionPattern: ") + name + " is not a valid contraction");
            seen[v] = true;
        }
    };
    check(permA, "permA");
    check(permB, "permB");
}

ReconnectionPattern ReconnectionPattern::renyi_a(int m) {
    ReconnectionPattern pat;
    pat.worlds = m;
    pat.permA.resize(m);
    pat.permB.resize(m);
    for (int w = 0; w < m; ++w) {
        pat.permA[w] = (w + 1) % m;
        pat.permB[w] = w;
    }
    return pat;
}

ReconnectionPattern ReconnectionPattern::renyi_b(int m) {
    ReconnectionPattern pat = renyi_a(m);
    std::swap(pat.permA, pat.permB);
    return pat;
}

ReconnectionPattern ReconnectionPattern::k_measure() {
    ReconnectionPattern pat;
    pat.worlds = 3;
    pat.permA = {1, 2, 0};
    pat.permB = {2, 0, 1};
    return pat;
}

ReconnectionPattern ReconnectionPattern::custom(std::vector<int> pa, std::vector<int> pb) {
    ReconnectionPattern pat;
    pat.worlds = static_cast<int>(pa.size());
    pat.permA = std::move(pa);
    pat.permB = std::move(pb);
    pat.validate();
    return pat;
}

WorldEnsemble WorldEnsemble::identical(const Matrix& r, Eigen::Index dimA, Eigen::Index dimB,
                                       int m) {
    WorldEnsemble ens;
    ens.dimA = dimA;
    ens.dimB = dimB;
    ens.replicas.assign(m, r);
    return ens;
}

Complex evaluate_pattern(const WorldEnsemble& ens, const ReconnectionPattern& pat) {
    pat.validate();
    const int m = pat.worlds;
    if (static_cast<int>(ens.replicas.size()) != m)
        throw std::invalid_argument("evaluate_pattern: world count does not match the ensemble");
    const Eigen::Index dA = ens.dimA, dB = ens.dimB;
    for (const Matrix& r : ens.replicas)
        if (r.rows() != dA * dB || r.cols() != dA * dB)
            throw DimensionError("evaluate_pattern: replica dimension mismatch");
    double work = std::pow(static_cast<double>(dA), m) * std::pow(static_cast<double>(dB), m);
    if (work > 5e7)
        throw std::invalid_argument("evaluate_pattern: contraction too large for the dense evaluator");

    std::vector<Eigen::Index> a(m, 0), al(m, 0);
    Complex total = 0.0;
    while (true) {
        Complex term = 1.0;
        for (int w = 0; w < m; ++w) {
            const Eigen::Index row = a[w] * dB + al[w];
            const Eigen::Index col = a[pat.permA[w]] * dB + al[pat.permB[w]];
            term *= ens.replicas[w](row, col);
            if (term == Complex(0.0)) break;
        }
        total += term;
        // odometer over the 2m summation indices
        int k = 0;
        for (; k < 2 * m; ++k) {
            if (k < m) {
                if (++a[k] < dA) break;
                a[k] = 0;
            } else {
                if (++al[k - m] < dB) break;
                al[k - m] = 0;
            }
        }
        if (k == 2 * m) break;
    }
    return total;
}

FlowReport pattern_flow(const dynamics::EvolutionJob& job, const ReconnectionPattern& pat,
                        const std::vector<double>& probeTimes) {
    pat.validate();
    const Eigen::Index dA = job.system.dimA, dB = job.system.dimB;
    std::vector<double> re, im;
    dynamics::evolve_sampled(job, probeTimes, [&](double, const Matrix& r) {
        const Complex v = evaluate_pattern(WorldEnsemble::identical(r, dA, dB, pat.worlds), pat);
        re.push_back(std::log(std::abs(v)));
        im.push_back(std::arg(v));
    });
    // least-squares slope of ln|value|; phase drift reported separately
    const std::size_t n = re.size();
    double tm = 0.0, fm = 0.0, gm = 0.0;
    for (std::size_t i = 0; i < n; ++i) { tm += probeTimes[i]; fm += re[i]; gm += im[i]; }
    tm /= n; fm /= n; gm /= n;
    double num = 0.0, den = 0.0, numIm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (probeTimes[i] - tm) * (re[i] - fm);
        numIm += (probeTimes[i] - tm) * (im[i] - gm);
        den += (probeTimes[i] - tm) * (probeTimes[i] - tm);
    }
    const double slope = num / den;
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = re[i] - fm - slope * (probeTimes[i] - tm);
        res += d * d;
    }
    const double span = probeTimes.back() - probeTimes.front();
    const double resSlope = std::sqrt(res / n) / (0.5 * span);

    FlowReport rep;
    rep.m = pat.worlds;
    rep.flow = slope;
    rep.method = "pattern";
    rep.breakdown["fit_residual"] = resSlope;
    rep.breakdown["imag_slope"] = numIm / den;
    rep.breakdown["residual_flag"] =
        (std::abs(slope) > 1e-12 && resSlope > 0.1 * std::abs(slope)) ? 1.0 : 0.0;
    return rep;
}

}  // namespace renyiflow::multiworld

#ifndef RENYIFLOW_TYPES_HPP
#define RENYIFLOW_TYPES_HPP

#include <Eigen/Dense>

#include <complex>
#include <map>
#include <stdexcept>
#include <string>

namespace renyiflow {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermiticityTol = 1e-12;   // relative, max-norm
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kSupportCutoff = 1e-14;    // eigenvalue treated as exact zero

class NumericalGuardError : public std::runtime_error {
public:
    explicit NumericalGuardError(const std::string& what) : std::runtime_error(what) {}
};

class DimensionError : public std::invalid_argument {
public:
    explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

/// Per-flow result record. `breakdown` carries named parts such as
/// per-order terms, Q_i/Q_c, fit residuals or Richardson spreads.
struct FlowReport {
    double m = 1.0;
    double flow = 0.0;
    std::string method;
    std::map<std::string, double> breakdown;
};

}  // namespace renyiflow

#endif

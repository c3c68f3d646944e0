#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace nhjump {

inline constexpr const char* version_string = "0.1.0";

using cxd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

constexpr double tau_bio = 1e-9;   // relative residual bound for accepted eigensystems
constexpr double tau_deg = 1e-9;   // degeneracy grouping, relative to spectral radius

// error taxonomy: numerical failures carry a name so the CLI can map them to exit codes
struct NumericalError : std::runtime_error {
    std::string kind;
    NumericalError(std::string k, const std::string& msg)
        : std::runtime_error(k + ": " + msg), kind(std::move(k)) {}
};

struct DefectiveMatrix : NumericalError {
    explicit DefectiveMatrix(const std::string& msg) : NumericalError("DefectiveMatrix", msg) {}
};
struct DegenerateCoupling : NumericalError {
    explicit DegenerateCoupling(const std::string& msg) : NumericalError("DegenerateCoupling", msg) {}
};
struct SingularNormalization : NumericalError {
    explicit SingularNormalization(const std::string& msg) : NumericalError("SingularNormalization", msg) {}
};
struct NoConvergence : NumericalError {
    explicit NoConvergence(const std::string& msg) : NumericalError("NoConvergence", msg) {}
};
struct VanishingNorm : NumericalError {
    explicit VanishingNorm(const std::string& msg) : NumericalError("VanishingNorm", msg) {}
};
struct InvalidState : NumericalError {
    explicit InvalidState(const std::string& msg) : NumericalError("InvalidState", msg) {}
};
struct DimensionMismatch : NumericalError {
    explicit DimensionMismatch(const std::string& msg) : NumericalError("DimensionMismatch", msg) {}
};
struct SingularFactor : NumericalError {
    explicit SingularFactor(const std::string& msg) : NumericalError("SingularFactor", msg) {}
};

inline void require_finite(const Mat& m, const std::string& what) {
    if (!m.allFinite()) throw InvalidState(what + " contains NaN/Inf");
}

inline double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace nhjump

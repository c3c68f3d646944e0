#pragma once

#include <unsupported/Eigen/MatrixFunctions>

#include "nhjump/liouvillian.hpp"

namespace nhjump {

struct TimeSeries {
    std::vector<double> times;
    std::vector<cxd> values;
    std::string label;

    void validate() const {
        if (times.size() != values.size()) throw DimensionMismatch("time series lengths");
        for (size_t i = 1; i < times.size(); ++i)
            if (!(times[i] > times[i - 1])) throw InvalidState("times must strictly increase");
    }
};

struct SpectralMode {
    cxd e;     // rate in the i*L convention: c_n(t) = exp(-i e t) c_n(0)
    Mat rho;   // unvectorized right eigenvector
    cxd c0;    // overlap of the matching left eigenvector with vec(rho0)
};

struct SpectralModes {
    std::vector<SpectralMode> modes;
};

inline SpectralModes spectral_modes(const Superoperator& s, const Mat& rho0) {
    const int n = s.dim;
    if (rho0.rows() != n || rho0.cols() != n) throw DimensionMismatch("spectral_modes rho0");
    Mat htilde =
        (s.kind == SuperKind::composite) ? s.matrix : Mat(cxd(0, 1) * s.matrix);
    auto es = eig_biortho(htilde);
    Vec v0 = vectorize(rho0);
    bool trace_preserving = false;
    if (s.kind == SuperKind::full) {
        // decaying modes are traceless only when the generator kills the
        // identity row; explicitly non-Hermitian models may break that
        Eigen::RowVectorXcd ones = Eigen::RowVectorXcd::Zero(n * n);
        for (int i = 0; i < n; ++i) ones(i * n + i) = 1.0;
        trace_preserving = (ones * s.matrix).norm() <= 1e-10 * s.matrix.norm();
    }
    SpectralModes out;
    out.modes.reserve(n * n);
    for (int k = 0; k < n * n; ++k) {
        SpectralMode mode;
        mode.e = es.eigenvalues(k);
        mode.rho = unvectorize(es.right.col(k), n);
        mode.c0 = es.left.col(k).dot(v0);  // dot conjugates the left factor
        cxd tr = mode.rho.trace();
        if (std::abs(mode.e) <= 1e-9) {
            if (std::abs(tr) > 1e-12) {  // steady modes carry weight: pin trace to 1
                mode.rho /= tr;
                mode.c0 *= tr;
            }
        } else if (trace_preserving && std::abs(tr) > 1e-8) {
            throw InvalidState("decaying mode of a trace-preserving generator must be traceless");
        }
        out.modes.push_back(std::move(mode));
    }
    return out;
}

inline Mat reconstruct_at(const SpectralModes& sm, double t) {
    const int n = static_cast<int>(sm.modes.front().rho.rows());
    Mat rho = Mat::Zero(n, n);
    for (const auto& mode : sm.modes)
        rho += mode.c0 * std::exp(cxd(0, -1) * mode.e * t) * mode.rho;
    return rho;
}

inline void check_density_matrix(const Mat& rho, double tol = 1e-10) {
    if (rho.rows() != rho.cols()) throw DimensionMismatch("density matrix must be square");
    double scale = std::max(1.0, max_abs(rho));
    if (max_abs(Mat(rho - rho.adjoint())) > tol * scale)
        throw InvalidState("density matrix must be Hermitian");
    if (std::abs(rho.trace() - cxd(1, 0)) > tol) throw InvalidState("density matrix trace != 1");
    Eigen::SelfAdjointEigenSolver<Mat> solver(0.5 * (rho + rho.adjoint()));
    if (solver.eigenvalues().minCoeff() < -tol)
        throw InvalidState("density matrix must be positive semidefinite");
}

// one output step of the master equation by a scaled Taylor expansion of
// exp(L dt) acting on rho in matrix form; never assembles the dim^2 generator
inline Mat taylor_step(const Mat& heff, const std::vector<Channel>& channels, Mat rho,
                       double dt) {
    auto rhs = [&](const Mat& r) {
        Mat d = cxd(0, -1) * (heff * r - r * heff.adjoint());
        for (const auto& ch : channels) d += ch.rate * ch.op * r * ch.op.adjoint();
        return d;
    };
    double scale = heff.norm();
    for (const auto& ch : channels) scale += ch.rate * ch.op.squaredNorm();
    int nsub = std::max(1, static_cast<int>(std::ceil(2.0 * dt * scale)));
    double h = dt / nsub;
    for (int sub = 0; sub < nsub; ++sub) {
        Mat acc = rho, term = rho;
        bool converged = false;
        for (int k = 1; k <= 80; ++k) {
            term = (h / k) * rhs(term);
            acc += term;
            if (max_abs(term) <= 1e-16 * std::max(1.0, max_abs(acc))) {
                converged = true;
                break;
            }
        }
        if (!converged) throw NoConvergence("master-equation Taylor step");
        rho = std::move(acc);
    }
    return rho;
}

// Hilbert dimension above which the dim^2 eigendecomposition is abandoned in
// favor of direct stepping
inline constexpr int spectral_dim_cap = 32;

inline std::vector<Mat> evolve_master_stepped(const LindbladModel& model, const Mat& rho0,
                                              const std::vector<double>& times) {
    Mat heff = effective_nh_hamiltonian(model);
    std::vector<Mat> out;
    out.reserve(times.size());
    Mat rho = rho0;
    double prev = 0.0;
    for (double t : times) {
        if (t < prev) throw InvalidState("times must be nondecreasing from 0");
        if (t > prev) rho = taylor_step(heff, model.channels, rho, t - prev);
        prev = t;
        out.push_back(rho);
    }
    return out;
}

inline std::vector<Mat> evolve_master(const LindbladModel& model, const Mat& rho0,
                                      const std::vector<double>& times) {
    model.validate();
    if (rho0.rows() != model.dim) throw DimensionMismatch("evolve_master rho0");
    check_density_matrix(rho0);
    if (model.dim > spectral_dim_cap) return evolve_master_stepped(model, rho0, times);
    try {
        auto sm = spectral_modes(build_full(model), rho0);
        std::vector<Mat> out;
        out.reserve(times.size());
        for (double t : times) out.push_back(reconstruct_at(sm, t));
        return out;
    } catch (const DefectiveMatrix&) {
        return evolve_master_stepped(model, rho0, times);
    }
}

inline std::vector<Mat> evolve_nh(const LindbladModel& model, const Mat& rho0,
                                  const std::vector<double>& times) {
    model.validate();
    if (rho0.rows() != model.dim) throw DimensionMismatch("evolve_nh rho0");
    check_density_matrix(rho0);
    Mat heff = effective_nh_hamiltonian(model);
    std::vector<Mat> props;
    props.reserve(times.size());
    bool spectral_ok = true;
    BiorthoEigensystem es;
    try {
        es = eig_biortho(heff);
    } catch (const DefectiveMatrix&) {
        spectral_ok = false;
    }
    for (double t : times) {
        if (spectral_ok) {
            Vec phase(es.dim());
            for (int i = 0; i < es.dim(); ++i)
                phase(i) = std::exp(cxd(0, -1) * es.eigenvalues(i) * t);
            props.push_back(es.right * phase.asDiagonal() * es.left.adjoint());
        } else {
            props.push_back(Mat(cxd(0, -1) * t * heff).exp());
        }
    }
    std::vector<Mat> out;
    out.reserve(times.size());
    for (const Mat& p : props) {
        Mat rho = p * rho0 * p.adjoint();
        double tr = rho.trace().real();
        if (!(std::abs(tr) >= 1e-300))
            throw VanishingNorm("conditional state fully decayed");
        out.push_back(rho / tr);
    }
    return out;
}

inline cxd expectation(const Mat& obs, const Mat& rho) {
    if (obs.rows() != rho.rows() || obs.cols() != rho.cols())
        throw DimensionMismatch("expectation dims");
    return (obs * rho).trace();
}

}  // namespace nhjump

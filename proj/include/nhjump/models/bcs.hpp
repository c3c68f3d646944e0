#pragma once

#include "nhjump/liouvillian.hpp"

namespace nhjump {

struct BranchAmbiguity : NumericalError {
    explicit BranchAmbiguity(const std::string& w) : NumericalError("BranchAmbiguity", w) {}
};
struct VanishingDissipation : NumericalError {
    explicit VanishingDissipation(const std::string& w)
        : NumericalError("VanishingDissipation", w) {}
};

struct BcsParams {
    int N = 10;        // momentum grid points / pair channels
    double J = 1.0;    // hopping
    double mu = 0.0;   // chemical potential
    double U0 = 1.8;   // bare pairing interaction
    double kappa = 0;  // two-body loss rate
    cxd U1;            // effective coupling entering the gap equation
};

// the loss contributes to the pairing channel; merging it into the coupling
// reproduces the reported order parameter
inline BcsParams bcs_params(int N, double J, double mu, double U0, double kappa) {
    BcsParams p;
    p.N = N;
    p.J = J;
    p.mu = mu;
    p.U0 = U0;
    p.kappa = kappa;
    p.U1 = cxd(U0, kappa / 2);
    return p;
}

inline std::vector<double> bcs_grid_xi(const BcsParams& p) {
    if (p.N < 2) throw InvalidState("need at least two momentum modes");
    std::vector<double> xi(p.N);
    for (int m = 0; m < p.N; ++m) {
        double k = M_PI * m / (p.N - 1);
        xi[m] = -2 * p.J * std::cos(k) - p.mu;
    }
    return xi;
}

// complex Newton iteration on the self-consistency N/U1 = sum 1/(2 E_k)
inline cxd bcs_gap_solve(const BcsParams& p, cxd init = cxd(0, 0), double tol = 1e-12,
                         int max_iter = 200) {
    if (std::abs(p.U1) == 0.0) throw InvalidState("coupling must be nonzero");
    auto xi = bcs_grid_xi(p);
    cxd d = init;
    if (d == cxd(0, 0)) d = 0.1 * p.J * cxd(1, p.kappa / (2 * std::abs(p.U0)));
    cxd g(0, 0);
    for (int it = 0; it < max_iter; ++it) {
        g = -cxd(p.N, 0) / p.U1;
        cxd dg(0, 0);
        for (double x : xi) {
            cxd e = std::sqrt(cxd(x * x, 0) + d * d);
            g += 1.0 / (2.0 * e);
            dg += -d / (2.0 * e * e * e);
        }
        cxd step = g / dg;
        d -= step;
        if (std::abs(step) < 1e-16) break;
    }
    // recompute the residual at the returned root
    g = -cxd(p.N, 0) / p.U1;
    for (double x : xi) {
        cxd e = std::sqrt(cxd(x * x, 0) + d * d);
        g += 1.0 / (2.0 * e);
        if (std::abs(e.real()) < 1e-12)
            throw BranchAmbiguity("quasiparticle energy sits on the square-root cut");
    }
    if (!(std::abs(g) <= tol)) throw NoConvergence("gap equation did not converge");
    return d;
}

inline cxd bcs_gap_residual(const BcsParams& p, cxd d) {
    cxd g = -cxd(p.N, 0) / p.U1;
    for (double x : bcs_grid_xi(p)) g += 1.0 / (2.0 * std::sqrt(cxd(x * x, 0) + d * d));
    return g;
}

struct BcsMode {
    double k = 0, xi = 0;
    cxd E, u, v;
};

inline std::vector<BcsMode> bcs_modes(const BcsParams& p, cxd d0) {
    auto xi = bcs_grid_xi(p);
    std::vector<BcsMode> out(p.N);
    for (int m = 0; m < p.N; ++m) {
        BcsMode& md = out[m];
        md.k = M_PI * m / (p.N - 1);
        md.xi = xi[m];
        md.E = std::sqrt(cxd(md.xi * md.xi, 0) + d0 * d0);
        if (std::abs(md.E.real()) < 1e-12)
            throw BranchAmbiguity("quasiparticle energy sits on the square-root cut");
        md.u = std::sqrt((md.E + md.xi) / (2.0 * md.E));
        md.v = std::sqrt((md.E - md.xi) / (2.0 * md.E));
        if (md.v.real() > 0) {  // gauge: pair component keeps a negative real part
            md.u = -md.u;
            md.v = -md.v;
        }
    }
    return out;
}

// pair-conserving restricted space: ground plus one doubly-excited state per
// mode; the mean-field Hamiltonian is diagonal with the complex 2 E_k and is
// registered as explicitly non-Hermitian (constant -sum E_k dropped)
struct BcsSystem {
    LindbladModel model;
    Mat h_mf;
    std::vector<Mat> jumps;
};

inline BcsSystem bcs_restricted_model(const BcsParams& p, const std::vector<BcsMode>& modes) {
    const int n = static_cast<int>(modes.size());
    const int dim = n + 1;
    BcsSystem sys;
    sys.h_mf = Mat::Zero(dim, dim);
    for (int k = 0; k < n; ++k) sys.h_mf(1 + k, 1 + k) = 2.0 * modes[k].E;
    std::vector<Channel> channels;
    for (int k = 0; k < n; ++k) {
        const auto& md = modes[k];
        Mat L = Mat::Zero(dim, dim);
        L(0, 0) = md.u * md.v;
        L(0, 1 + k) = md.u * md.u;
        L(1 + k, 0) = -md.v * md.v;
        L(1 + k, 1 + k) = -md.u * md.v;
        for (int j = 0; j < n; ++j)
            if (j != k) L(1 + j, 1 + j) = md.u * md.v;
        sys.jumps.push_back(L);
        channels.push_back({p.kappa, L});
    }
    sys.model = {dim, sys.h_mf, std::move(channels), true};
    return sys;
}

// closed-form ground-state energy pieces: free decay rate and the first-order
// shift from the jumps
inline std::pair<double, double> bcs_ground_corrections(const BcsParams& p,
                                                        const std::vector<BcsMode>& modes) {
    double e0 = 0.0, e1 = 0.0;
    for (const auto& md : modes) {
        e0 -= 2.0 * md.E.imag();
        e1 -= p.kappa * std::norm(md.u) * std::norm(md.v);
    }
    return {e0, e1};
}

// first-order corrected ground pair on the composite (vectorized) restricted
// space, unnormalized, plus the closed-form normalization |N0|^2
struct BcsGroundPair {
    Vec right, left;
    double n0_sq = 1.0;
};

inline BcsGroundPair bcs_first_order_states(const BcsParams& p,
                                            const std::vector<BcsMode>& modes) {
    const int n = static_cast<int>(modes.size());
    const int dim = n + 1;
    BcsGroundPair out;
    out.right = Vec::Zero(dim * dim);
    out.left = Vec::Zero(dim * dim);
    out.right(0) = 1.0;
    out.left(0) = 1.0;
    for (int k = 0; k < n; ++k) {
        const auto& md = modes[k];
        if (std::abs(md.E.imag()) < 1e-14)
            throw VanishingDissipation("first-order denominators need Im(E) != 0");
        const cxd u = md.u, v = md.v, E = md.E;
        const int gk = 0 * dim + (1 + k);        // ground (x) excited*
        const int kg = (1 + k) * dim + 0;        // excited (x) ground*
        const int kk = (1 + k) * dim + (1 + k);  // excited (x) excited*
        out.right(gk) = -cxd(0, 1) * p.kappa * u * v * std::conj(v) * std::conj(v) /
                        (2.0 * std::conj(E));
        out.right(kg) = cxd(0, 1) * p.kappa * std::conj(u) * std::conj(v) * v * v / (2.0 * E);
        out.right(kk) = -p.kappa * std::norm(v) * std::norm(v) / (4.0 * E.imag());
        out.left(gk) =
            -cxd(0, 1) * p.kappa * u * u * std::conj(u) * std::conj(v) / (2.0 * E);
        out.left(kg) =
            cxd(0, 1) * p.kappa * std::conj(u) * std::conj(u) * u * v / (2.0 * std::conj(E));
        out.left(kk) = -p.kappa * std::norm(u) * std::norm(u) / (4.0 * E.imag());
    }
    // |N0|^2 from the closed formula; complex denominators enter squared
    cxd sum(0, 0);
    for (const auto& md : modes) {
        double k2u4v4 = p.kappa * p.kappa * std::norm(md.u) * std::norm(md.u) *
                        std::norm(md.v) * std::norm(md.v);
        sum += k2u4v4 / (4.0 * std::conj(md.E) * std::conj(md.E));
        sum += k2u4v4 / (4.0 * md.E * md.E);
        sum += k2u4v4 / (16.0 * md.E.imag() * md.E.imag());
    }
    out.n0_sq = 1.0 / (sum.real() + 1.0);
    return out;
}

struct BcsObservables {
    double e_aver = 0;
    double p0 = 0;
    std::vector<double> pk;
};

// energy with the loss contribution folded back in, plus ground/excited
// populations of the trace-normalized state
inline BcsObservables bcs_observables(const Mat& rho, const BcsSystem& sys) {
    const int dim = sys.model.dim;
    if (rho.rows() != dim || rho.cols() != dim) throw DimensionMismatch("bcs_observables rho");
    Mat hobs = sys.h_mf;
    for (const auto& ch : sys.model.channels)
        hobs += cxd(0, 0.5) * ch.rate * (ch.op.adjoint() * ch.op);
    Mat rn = rho / rho.trace();
    BcsObservables out;
    out.e_aver = (rn * hobs).trace().real();
    out.p0 = rn(0, 0).real();
    out.pk.resize(dim - 1);
    for (int k = 1; k < dim; ++k) out.pk[k - 1] = rn(k, k).real();
    return out;
}

}  // namespace nhjump

#pragma once

#include "nhjump/dynamics.hpp"

namespace nhjump {

struct PerturbedMode {
    int index = 0;
    cxd e0, e1, e2;
    Vec psi0, psi1, psi2;  // right-vector pieces in the operator's own basis
    Vec phi0, phi1, phi2;  // matching left-vector pieces

    cxd energy(int order) const { return e0 + e1 + (order >= 2 ? e2 : cxd(0, 0)); }
};

namespace detail {

struct EngineMode {
    cxd e1, e2;
    Vec psi1, l1, psi2, l2;  // coefficients in the group-rotated basis
};

struct EngineResult {
    std::vector<EngineMode> modes;
    Mat Q, Qi;  // group-block rotation: corrected frames are Q cr and Qi^dag cl
};

// Rayleigh-Schrodinger corrections for a diagonal free part e0 plus coupling V,
// with intermediate normalization. Levels closer than 1e-9 of the spectral
// radius form a group whose V-block is diagonalized first; corrections then
// only mix states across groups.
inline EngineResult pert_engine(const Vec& e0, const Mat& V, int order) {
    const int n = static_cast<int>(e0.size());
    if (V.rows() != n || V.cols() != n) throw DimensionMismatch("pert_engine V");
    const double rad = std::max(1.0, e0.cwiseAbs().maxCoeff());
    const double tau = tau_deg * rad;

    std::vector<std::vector<int>> groups;
    std::vector<char> used(n, 0);
    std::vector<int> gi(n, 0);
    for (int i = 0; i < n; ++i) {
        if (used[i]) continue;
        groups.push_back({i});
        used[i] = 1;
        for (int j = i + 1; j < n; ++j)
            if (!used[j] && std::abs(e0(j) - e0(i)) <= tau) {
                groups.back().push_back(j);
                used[j] = 1;
            }
    }
    for (size_t g = 0; g < groups.size(); ++g)
        for (int i : groups[g]) gi[i] = static_cast<int>(g);

    Mat Q = Mat::Identity(n, n), Qi = Mat::Identity(n, n);
    for (const auto& g : groups) {
        const int gs = static_cast<int>(g.size());
        if (gs < 2) continue;
        Mat B(gs, gs);
        for (int a = 0; a < gs; ++a)
            for (int b = 0; b < gs; ++b) B(a, b) = V(g[a], g[b]);
        double offd = 0.0;
        for (int a = 0; a < gs; ++a)
            for (int b = 0; b < gs; ++b)
                if (a != b) offd = std::max(offd, std::abs(B(a, b)));
        const double bscale = std::max(1.0, max_abs(B));
        if (offd <= 1e-14 * bscale) continue;  // block already diagonal
        Vec wb;
        Mat S;
        eig_right(B, wb, S);
        std::vector<int> order_idx(gs);
        std::iota(order_idx.begin(), order_idx.end(), 0);
        std::stable_sort(order_idx.begin(), order_idx.end(), [&](int a, int b) {
            if (wb(a).real() != wb(b).real()) return wb(a).real() < wb(b).real();
            return wb(a).imag() < wb(b).imag();
        });
        Vec wbs(gs);
        Mat Ss(gs, gs);
        for (int a = 0; a < gs; ++a) {
            wbs(a) = wb(order_idx[a]);
            Ss.col(a) = S.col(order_idx[a]);
        }
        Eigen::PartialPivLU<Mat> lu(Ss);
        Mat Si = lu.inverse();
        double inv_res = max_abs(Mat(Ss * Si - Mat::Identity(gs, gs)));
        if (!(inv_res <= 1e-8))  // NaN-safe: defective blocks may poison the inverse
            throw DegenerateCoupling("degenerate block has no stable eigenbasis");
        // a defective block shows up as a rotation with exploding condition
        // number rather than an outright singular one
        if (!(Si.norm() * Ss.norm() <= 1e10))
            throw DegenerateCoupling("degenerate block is too close to defective");
        Mat check = Si * B * Ss;
        for (int a = 0; a < gs; ++a) check(a, a) -= wbs(a);
        if (!(max_abs(check) <= 1e-8 * bscale))
            throw DegenerateCoupling("degenerate block is not diagonalizable");
        for (int a = 0; a < gs; ++a)
            for (int b = 0; b < gs; ++b) {
                Q(g[a], g[b]) = Ss(a, b);
                Qi(g[a], g[b]) = Si(a, b);
            }
    }
    Mat Vr = Qi * V * Q;

    EngineResult res;
    res.Q = std::move(Q);
    res.Qi = std::move(Qi);
    res.modes.resize(n);
    for (int m = 0; m < n; ++m) {
        EngineMode& md = res.modes[m];
        md.e1 = Vr(m, m);
        md.psi1 = Vec::Zero(n);
        md.l1 = Vec::Zero(n);
        md.psi2 = Vec::Zero(n);
        md.l2 = Vec::Zero(n);
        md.e2 = cxd(0, 0);
        for (int k = 0; k < n; ++k) {
            if (gi[k] == gi[m]) continue;
            md.psi1(k) = Vr(k, m) / (e0(m) - e0(k));
            md.l1(k) = std::conj(Vr(m, k) / (e0(m) - e0(k)));
        }
        if (order >= 2) {
            for (int k = 0; k < n; ++k) {
                if (gi[k] == gi[m]) continue;
                md.e2 += Vr(m, k) * Vr(k, m) / (e0(m) - e0(k));
                cxd s(0, 0), sl(0, 0);
                for (int l = 0; l < n; ++l) {
                    if (gi[l] == gi[m]) continue;
                    cxd dd = (e0(m) - e0(k)) * (e0(m) - e0(l));
                    s += Vr(k, l) * Vr(l, m) / dd;
                    sl += std::conj(Vr(m, l)) * std::conj(Vr(l, k)) / std::conj(dd);
                }
                cxd d = e0(m) - e0(k);
                md.psi2(k) = s - Vr(m, m) * Vr(k, m) / (d * d);
                md.l2(k) = sl - std::conj(Vr(m, m) * Vr(m, k) / (d * d));
            }
        }
    }
    return res;
}

}  // namespace detail

inline std::vector<PerturbedMode> correct_modes(const BiorthoEigensystem& es0, const Mat& v,
                                                int order) {
    const int n = es0.dim();
    if (v.rows() != n || v.cols() != n) throw DimensionMismatch("correction V");
    Mat vb = es0.left.adjoint() * v * es0.right;
    auto eng = detail::pert_engine(es0.eigenvalues, vb, order);
    Mat qid = eng.Qi.adjoint();
    std::vector<PerturbedMode> out(n);
    for (int m = 0; m < n; ++m) {
        PerturbedMode& md = out[m];
        md.index = m;
        md.e0 = es0.eigenvalues(m);
        md.e1 = eng.modes[m].e1;
        md.e2 = eng.modes[m].e2;
        md.psi0 = es0.right * eng.Q.col(m);
        md.psi1 = es0.right * (eng.Q * eng.modes[m].psi1);
        md.psi2 = es0.right * (eng.Q * eng.modes[m].psi2);
        md.phi0 = es0.left * qid.col(m);
        md.phi1 = es0.left * (qid * eng.modes[m].l1);
        md.phi2 = es0.left * (qid * eng.modes[m].l2);
    }
    return out;
}

inline std::vector<PerturbedMode> correct_first_order(const BiorthoEigensystem& es0,
                                                      const Mat& v) {
    return correct_modes(es0, v, 1);
}

inline std::vector<PerturbedMode> correct_second_order(const BiorthoEigensystem& es0,
                                                       const Mat& v) {
    return correct_modes(es0, v, 2);
}

struct PerturbedEigensystem {
    int order = 1;
    std::vector<PerturbedMode> modes;
    BiorthoEigensystem assembled;
};

inline PerturbedEigensystem assemble(const BiorthoEigensystem& es0,
                                     const std::vector<PerturbedMode>& modes, int order) {
    const int n = es0.dim();
    if (static_cast<int>(modes.size()) != n) throw DimensionMismatch("assemble modes");
    PerturbedEigensystem out;
    out.order = order;
    out.modes = modes;
    std::stable_sort(out.modes.begin(), out.modes.end(),
                     [&](const PerturbedMode& a, const PerturbedMode& b) {
                         cxd ea = a.energy(order), eb = b.energy(order);
                         if (ea.real() != eb.real()) return ea.real() < eb.real();
                         return ea.imag() < eb.imag();
                     });
    Mat right(n, n), left(n, n);
    Vec ev(n);
    for (int m = 0; m < n; ++m) {
        const PerturbedMode& md = out.modes[m];
        Vec r = md.psi0 + md.psi1;
        Vec l = md.phi0 + md.phi1;
        if (order >= 2) {
            r += md.psi2;
            l += md.phi2;
        }
        cxd g = l.dot(r);
        if (std::abs(g) < 1e-12)
            throw SingularNormalization("corrected pair has vanishing overlap");
        cxd s = std::sqrt(g);
        right.col(m) = r / s;
        left.col(m) = l / std::conj(s);
        ev(m) = md.energy(order);
    }
    out.assembled.eigenvalues = ev;
    out.assembled.right = right;
    // exact biorthonormality and completeness: rebuild the left family from the
    // corrected right one
    Eigen::PartialPivLU<Mat> lu(right);
    out.assembled.left = lu.inverse().adjoint();
    return out;
}

inline std::vector<Mat> perturbative_evolve(const LindbladModel& model, const Mat& rho0,
                                            const std::vector<double>& times, int order) {
    model.validate();
    if (rho0.rows() != model.dim) throw DimensionMismatch("perturbative_evolve rho0");
    check_density_matrix(rho0);
    if (order < 1 || order > 2) throw InvalidState("perturbation order must be 1 or 2");
    Mat heff = effective_nh_hamiltonian(model);
    auto es = eig_biortho(heff);
    auto cs = build_composite(model, es);
    auto eng = detail::pert_engine(cs.e0, cs.v_bio, order);

    const int nn = model.dim * model.dim;
    Mat rb(nn, nn), lb(nn, nn);
    Vec ev(nn);
    Mat qid = eng.Qi.adjoint();
    for (int m = 0; m < nn; ++m) {
        Vec cr = eng.modes[m].psi1;
        cr(m) += 1.0;
        Vec cl = eng.modes[m].l1;
        cl(m) += 1.0;
        if (order >= 2) {
            cr += eng.modes[m].psi2;
            cl += eng.modes[m].l2;
        }
        rb.col(m) = eng.Q * cr;
        lb.col(m) = qid * cl;
        ev(m) = cs.e0(m) + eng.modes[m].e1 + (order >= 2 ? eng.modes[m].e2 : cxd(0, 0));
    }
    // intermediate normalization throughout: no per-pair rescaling here. The
    // corrected families keep large paired components that cancel in the sum;
    // rescaling each pair separately destroys that cancellation.
    Mat ra = cs.basis_right * rb;
    Mat la = cs.basis_left * lb;
    Vec c0 = la.adjoint() * vectorize(rho0);
    std::vector<Mat> out;
    out.reserve(times.size());
    for (double t : times) {
        Vec coef(nn);
        for (int m = 0; m < nn; ++m) coef(m) = std::exp(cxd(0, -1) * ev(m) * t) * c0(m);
        Mat rho = unvectorize(ra * coef, model.dim);
        cxd tr = rho.trace();
        if (!(std::abs(tr) >= 1e-300)) throw VanishingNorm("perturbative state fully decayed");
        out.push_back(rho / tr);
    }
    return out;
}

}  // namespace nhjump

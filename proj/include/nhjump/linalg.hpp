#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "nhjump/common.hpp"

// Fortran LAPACK entry points (OpenBLAS). Column-major; Eigen's default
// storage matches, so matrices pass through without transposition.
extern "C" {
void zgeev_(const char* jobvl, const char* jobvr, const int* n, nhjump::cxd* a,
            const int* lda, nhjump::cxd* w, nhjump::cxd* vl, const int* ldvl,
            nhjump::cxd* vr, const int* ldvr, nhjump::cxd* work, const int* lwork,
            double* rwork, int* info);
void dgeev_(const char* jobvl, const char* jobvr, const int* n, double* a,
            const int* lda, double* wr, double* wi, double* vl, const int* ldvl,
            double* vr, const int* ldvr, double* work, const int* lwork, int* info);
}

namespace nhjump {

// -------- raw eigensolvers --------

inline Vec eigvals(const Mat& m) {
    if (m.rows() != m.cols()) throw DimensionMismatch("eigvals: non-square");
    int n = static_cast<int>(m.rows());
    if (n == 0) return Vec();
    Mat a = m;
    Vec w(n);
    int lwork = -1, info = 0;
    cxd wq;
    std::vector<double> rwork(2 * n);
    zgeev_("N", "N", &n, a.data(), &n, w.data(), nullptr, &n, nullptr, &n, &wq, &lwork,
           rwork.data(), &info);
    lwork = static_cast<int>(wq.real());
    std::vector<cxd> work(lwork);
    zgeev_("N", "N", &n, a.data(), &n, w.data(), nullptr, &n, nullptr, &n, work.data(),
           &lwork, rwork.data(), &info);
    if (info != 0) throw NoConvergence("zgeev failed, info=" + std::to_string(info));
    return w;
}

inline void eig_right(const Mat& m, Vec& w, Mat& vr) {
    if (m.rows() != m.cols()) throw DimensionMismatch("eig_right: non-square");
    int n = static_cast<int>(m.rows());
    Mat a = m;
    w.resize(n);
    vr.resize(n, n);
    int lwork = -1, info = 0;
    cxd wq;
    std::vector<double> rwork(2 * n);
    zgeev_("N", "V", &n, a.data(), &n, w.data(), nullptr, &n, vr.data(), &n, &wq, &lwork,
           rwork.data(), &info);
    lwork = static_cast<int>(wq.real());
    std::vector<cxd> work(lwork);
    zgeev_("N", "V", &n, a.data(), &n, w.data(), nullptr, &n, vr.data(), &n, work.data(),
           &lwork, rwork.data(), &info);
    if (info != 0) throw NoConvergence("zgeev failed, info=" + std::to_string(info));
}

// eigenvalues of a real matrix (complex pairs come back conjugate)
inline Vec eigvals_real(const RMat& m) {
    int n = static_cast<int>(m.rows());
    if (n == 0) return Vec();
    RMat a = m;
    RVec wr(n), wi(n);
    int lwork = -1, info = 0;
    double wq;
    dgeev_("N", "N", &n, a.data(), &n, wr.data(), wi.data(), nullptr, &n, nullptr, &n, &wq,
           &lwork, &info);
    lwork = static_cast<int>(wq);
    std::vector<double> work(lwork);
    dgeev_("N", "N", &n, a.data(), &n, wr.data(), wi.data(), nullptr, &n, nullptr, &n,
           work.data(), &lwork, &info);
    if (info != 0) throw NoConvergence("dgeev failed, info=" + std::to_string(info));
    Vec w(n);
    for (int i = 0; i < n; ++i) w(i) = cxd(wr(i), wi(i));
    return w;
}

// -------- biorthogonal eigensystem --------

struct BiorthoEigensystem {
    Vec eigenvalues;
    Mat right;  // columns |r_n>
    Mat left;   // columns |l_n>,  <l_m|r_n> = delta_mn

    int dim() const { return static_cast<int>(eigenvalues.size()); }
};

inline double completeness_residual(const BiorthoEigensystem& es) {
    Mat s = es.right * es.left.adjoint();
    s.diagonal().array() -= 1.0;
    return max_abs(s);
}

// Diagonalize a general complex matrix and return paired left/right families.
// Rights come from zgeev (unit norm, phase fixed so the largest-|.| entry is
// real positive); lefts are (R^{-1})^dagger, which makes biorthonormality and
// completeness exact even inside degenerate eigenvalue groups. Residuals are
// checked a posteriori; a failure means the matrix is (numerically) defective.
inline BiorthoEigensystem eig_biortho(const Mat& m, double tol = tau_bio) {
    if (m.rows() != m.cols()) throw DimensionMismatch("eig_biortho: non-square");
    require_finite(m, "eig_biortho input");
    const int n = static_cast<int>(m.rows());

    Vec w;
    Mat vr;
    eig_right(m, w, vr);

    // deterministic order: lexicographic by (Re, Im)
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        if (w(a).real() != w(b).real()) return w(a).real() < w(b).real();
        return w(a).imag() < w(b).imag();
    });

    BiorthoEigensystem es;
    es.eigenvalues.resize(n);
    es.right.resize(n, n);
    for (int j = 0; j < n; ++j) {
        es.eigenvalues(j) = w(idx[j]);
        Vec col = vr.col(idx[j]);
        col /= col.norm();
        // phase gauge: largest-|entry| real positive
        int imax = 0;
        double best = -1.0;
        for (int i = 0; i < n; ++i)
            if (std::abs(col(i)) > best) { best = std::abs(col(i)); imax = i; }
        cxd ph = col(imax) / std::abs(col(imax));
        col /= ph;
        es.right.col(j) = col;
    }

    Eigen::PartialPivLU<Mat> lu(es.right);
    const double scale = std::max(max_abs(m), 1.0);
    {
        // cheap singularity guard before trusting the inverse
        double dmin = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
        if (!(dmin > 0.0))
            throw DefectiveMatrix("right eigenvector matrix is singular");
    }
    es.left = lu.inverse().adjoint();

    // a posteriori residuals (relative to the input scale)
    double r1 = max_abs(m * es.right - es.right * es.eigenvalues.asDiagonal()) / scale;
    double r2 = max_abs(m.adjoint() * es.left -
                        es.left * es.eigenvalues.conjugate().asDiagonal()) /
                scale;
    double r3 = max_abs(Mat(es.left.adjoint() * es.right) - Mat::Identity(n, n));
    if (r1 > tol || r2 > tol || r3 > tol)
        throw DefectiveMatrix("residuals " + std::to_string(r1) + "/" + std::to_string(r2) +
                              "/" + std::to_string(r3) + " exceed tol " + std::to_string(tol));
    return es;
}

// A with |r_n> = A e_n and |l_n> = (A^{-1})^dagger e_n: the similarity taking
// the orthonormal frame to the biorthogonal one.
inline Mat similarity_factor(const BiorthoEigensystem& es) {
    const int n = es.dim();
    Mat a = es.right;
    Mat recon = a.inverse().adjoint();
    if (max_abs(Mat(recon - es.left)) > 1e3 * tau_bio)
        throw SingularFactor("left family is not (A^{-1})^dagger of the right family");
    return a;
}

// Trace in the biorthogonal frame: sum_n <l_n|rho|r_n> = Tr(rho) identically
// (cyclic property + completeness), valid for any state and any eigensystem.
inline cxd biortho_trace(const Mat& rho, const BiorthoEigensystem& es) {
    if (rho.rows() != es.dim() || rho.cols() != es.dim())
        throw DimensionMismatch("biortho_trace: state/eigensystem size");
    return (es.left.adjoint() * rho * es.right).trace();
}

// -------- multiset spectrum matching --------

// Greedy nearest matching inside a sliding real-part window. Plain sorted
// comparison mispairs eigenvalues whose real parts tie to rounding, which
// shows up as O(1) spurious mismatch on exactly-equal spectra.
inline double spectrum_match_distance(Vec a, Vec b, double window = 1e-6) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    const int n = static_cast<int>(a.size());
    std::vector<int> ia(n), ib(n);
    std::iota(ia.begin(), ia.end(), 0);
    std::iota(ib.begin(), ib.end(), 0);
    auto lt = [](const Vec& v) {
        return [&v](int x, int y) { return v(x).real() < v(y).real(); };
    };
    std::stable_sort(ia.begin(), ia.end(), lt(a));
    std::stable_sort(ib.begin(), ib.end(), lt(b));
    std::vector<bool> used(n, false);
    int lo = 0;
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        const cxd x = a(ia[i]);
        while (lo < n && (used[lo] || b(ib[lo]).real() < x.real() - window)) ++lo;
        int best = -1;
        double bestd = std::numeric_limits<double>::infinity();
        for (int j = lo; j < n && b(ib[j]).real() <= x.real() + window; ++j) {
            if (used[j]) continue;
            double d = std::abs(b(ib[j]) - x);
            if (d < bestd) { bestd = d; best = j; }
        }
        if (best < 0) return std::numeric_limits<double>::infinity();
        used[best] = true;
        worst = std::max(worst, bestd);
    }
    return worst;
}

}  // namespace nhjump

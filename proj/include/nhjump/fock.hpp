#pragma once

#include <bit>
#include <cstdint>

#include "nhjump/common.hpp"

namespace nhjump {

struct IndexOutOfRange : NumericalError {
    explicit IndexOutOfRange(const std::string& msg) : NumericalError("IndexOutOfRange", msg) {}
};
struct InvalidCap : NumericalError {
    explicit InvalidCap(const std::string& msg) : NumericalError("InvalidCap", msg) {}
};

// ---- Pauli algebra ----

struct PauliOps {
    Mat sx, sy, sz, sp, sm;
};

// basis {|0> (up), |1> (down)}
inline PauliOps pauli_ops() {
    PauliOps p;
    p.sx.resize(2, 2);
    p.sx << 0, 1, 1, 0;
    p.sy.resize(2, 2);
    p.sy << 0, cxd(0, -1), cxd(0, 1), 0;
    p.sz.resize(2, 2);
    p.sz << 1, 0, 0, -1;
    p.sp = (p.sx + cxd(0, 1) * p.sy) / 2.0;
    p.sm = (p.sx - cxd(0, 1) * p.sy) / 2.0;
    return p;
}

inline Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// ---- number-capped fermionic Fock space ----

struct FockSpace {
    int n_sites = 0;
    int max_particles = 0;
    std::vector<std::uint32_t> basis;  // occupation bitmasks, ordered (popcount, value)

    int dim() const { return static_cast<int>(basis.size()); }
    int index_of(std::uint32_t mask) const {
        for (int i = 0; i < dim(); ++i)
            if (basis[i] == mask) return i;
        throw IndexOutOfRange("state not in capped basis");
    }
    int particles(int i) const { return std::popcount(basis[i]); }
};

inline FockSpace fock_space(int n_sites, int max_particles) {
    if (n_sites < 1) throw InvalidCap("need at least one site");
    if (max_particles < 0 || max_particles > n_sites)
        throw InvalidCap("max_particles outside [0, n_sites]");
    FockSpace s;
    s.n_sites = n_sites;
    s.max_particles = max_particles;
    for (std::uint32_t m = 0; m < (1u << n_sites); ++m)
        if (std::popcount(m) <= max_particles) s.basis.push_back(m);
    std::stable_sort(s.basis.begin(), s.basis.end(), [](std::uint32_t a, std::uint32_t b) {
        int pa = std::popcount(a), pb = std::popcount(b);
        if (pa != pb) return pa < pb;
        return a < b;
    });
    return s;
}

// c_site with the Jordan-Wigner sign (-1)^(occupied sites below `site`)
inline Mat annihilator(const FockSpace& s, int site) {
    if (site < 0 || site >= s.n_sites) throw IndexOutOfRange("site index");
    Mat c = Mat::Zero(s.dim(), s.dim());
    for (int j = 0; j < s.dim(); ++j) {
        std::uint32_t m = s.basis[j];
        if (!(m >> site & 1u)) continue;
        std::uint32_t m2 = m & ~(1u << site);
        int sign = std::popcount(m & ((1u << site) - 1u)) % 2 ? -1 : 1;
        c(s.index_of(m2), j) = sign;
    }
    return c;
}

inline Mat number_operator(const FockSpace& s) {
    Mat n = Mat::Zero(s.dim(), s.dim());
    for (int j = 0; j < s.dim(); ++j) n(j, j) = s.particles(j);
    return n;
}

}  // namespace nhjump

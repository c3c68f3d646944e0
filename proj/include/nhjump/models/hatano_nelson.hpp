#pragma once

#include "nhjump/liouvillian.hpp"

namespace nhjump {

enum class Boundary { obc, pbc };

struct HatanoNelsonParams {
    int n_sites = 2;
    double J = 1.0;
    double kappa = 0.0;
    Boundary bc = Boundary::obc;
    int max_particles = 2;
};

// lossy chain whose bond channels c_a - i c_b turn the hopping asymmetric in
// the effective Hamiltonian (J -> -J +- kappa/2 plus on-site widths)
struct HatanoNelsonSystem {
    FockSpace space;
    LindbladModel model;
    std::vector<std::pair<int, int>> bonds;
};

inline HatanoNelsonSystem hatano_nelson(const HatanoNelsonParams& p) {
    if (p.n_sites < 2) throw InvalidState("need at least two sites");
    if (p.kappa < 0) throw InvalidState("negative loss rate");
    HatanoNelsonSystem sys;
    sys.space = fock_space(p.n_sites, p.max_particles);
    for (int j = 0; j + 1 < p.n_sites; ++j) sys.bonds.push_back({j, j + 1});
    if (p.bc == Boundary::pbc) sys.bonds.push_back({p.n_sites - 1, 0});
    const int d = sys.space.dim();
    Mat h0 = Mat::Zero(d, d);
    std::vector<Channel> channels;
    for (auto [a, b] : sys.bonds) {
        Mat ca = annihilator(sys.space, a), cb = annihilator(sys.space, b);
        h0 -= p.J * (ca.adjoint() * cb + cb.adjoint() * ca);
        channels.push_back({p.kappa, ca - cxd(0, 1) * cb});
    }
    sys.model = {d, std::move(h0), std::move(channels), false};
    return sys;
}

inline std::vector<int> particle_sectors(const FockSpace& s) {
    std::vector<int> out(s.dim());
    for (int i = 0; i < s.dim(); ++i) out[i] = s.particles(i);
    return out;
}

// spectrum of the non-Hermitian side alone, mapped to Liouvillian convention:
// cross differences -i(E_a - E_b*) of the effective-Hamiltonian eigenvalues
inline Vec crossdiff_spectrum(const Mat& heff) {
    Vec e = eigvals(heff);
    const int n = static_cast<int>(e.size());
    Vec out(n * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            out(a * n + b) = cxd(0, -1) * (e(a) - std::conj(e(b)));
    return out;
}

}  // namespace nhjump

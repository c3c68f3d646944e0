#include <catch2/catch_amalgamated.hpp>

#include "nhjump/dynamics.hpp"
#include "nhjump/models/hatano_nelson.hpp"

using namespace nhjump;

static std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> t(n);
    for (int i = 0; i < n; ++i) t[i] = a + (b - a) * i / (n - 1);
    return t;
}

TEST_CASE("bond losses produce asymmetric hopping in the effective Hamiltonian") {
    double J = 1.1, kap = 0.3;
    for (auto bc : {Boundary::obc, Boundary::pbc}) {
        auto sys = hatano_nelson({6, J, kap, bc, 1});
        REQUIRE(sys.bonds.size() == (bc == Boundary::obc ? 5u : 6u));
        Mat heff = effective_nh_hamiltonian(sys.model);

        std::vector<int> coordination(6, 0);
        for (auto [a, b] : sys.bonds) {
            int ia = sys.space.index_of(1u << a), ib = sys.space.index_of(1u << b);
            // hopping along the bond direction is weakened, against it enhanced
            REQUIRE(std::abs(heff(ib, ia) - cxd(-J + kap / 2, 0)) < 1e-14);
            REQUIRE(std::abs(heff(ia, ib) - cxd(-J - kap / 2, 0)) < 1e-14);
            ++coordination[a];
            ++coordination[b];
        }
        for (int j = 0; j < 6; ++j) {
            int ij = sys.space.index_of(1u << j);
            REQUIRE(std::abs(heff(ij, ij) - cxd(0, -kap / 2 * coordination[j])) < 1e-14);
        }
    }
}

TEST_CASE("the coherent part conserves particle number") {
    auto sys = hatano_nelson({5, 1.0, 0.7, Boundary::pbc, 2});
    Mat n_op = number_operator(sys.space);
    REQUIRE(max_abs(Mat(sys.model.H0 * n_op - n_op * sys.model.H0)) < 1e-14);

    auto sectors = particle_sectors(sys.space);
    REQUIRE(static_cast<int>(sectors.size()) == sys.space.dim());
    for (int i = 0; i < sys.space.dim(); ++i) REQUIRE(sectors[i] == sys.space.particles(i));
}

TEST_CASE("full and no-jump spectra coincide at the balanced point") {
    for (auto bc : {Boundary::obc, Boundary::pbc}) {
        auto sys = hatano_nelson({4, 1.0, 1.0, bc, 2});
        Vec full = spectrum(build_full(sys.model));
        Vec nojump = spectrum(build_nojump(sys.model));
        auto rep = spectra_match(full, nojump, 1e-8);
        INFO("bc=" << (bc == Boundary::obc ? "obc" : "pbc")
                   << " distance=" << rep.max_distance);
        REQUIRE(rep.pass);

        // the no-jump spectrum is just the cross-difference of the
        // effective-Hamiltonian eigenvalues
        Vec cross = crossdiff_spectrum(effective_nh_hamiltonian(sys.model));
        REQUIRE(spectra_match(nojump, cross, 1e-8).pass);
    }
}

TEST_CASE("bond losses drain particles while the no-jump flow conserves them") {
    auto sys = hatano_nelson({6, 1.0, 0.4, Boundary::obc, 2});
    Mat rho0 = Mat::Zero(sys.space.dim(), sys.space.dim());
    int init = sys.space.index_of(0b11);  // both leftmost sites occupied
    rho0(init, init) = 1.0;
    Mat n_op = number_operator(sys.space);
    auto times = linspace(0.0, 10.0, 21);

    auto me = evolve_master(sys.model, rho0, times);
    double prev = expectation(n_op, me.front()).real();
    REQUIRE(std::abs(prev - 2.0) < 1e-12);
    for (const auto& rho : me) {
        double n = expectation(n_op, rho).real();
        REQUIRE(n <= prev + 2e-9);
        prev = n;
    }
    REQUIRE(expectation(n_op, me.back()).real() < 1.0);

    auto nh = evolve_nh(sys.model, rho0, times);
    for (const auto& rho : nh) REQUIRE(std::abs(expectation(n_op, rho).real() - 2.0) < 1e-10);
}

TEST_CASE("lattice construction rejects bad parameters") {
    REQUIRE_THROWS_AS(hatano_nelson({1, 1.0, 0.1, Boundary::obc, 1}), InvalidState);
    REQUIRE_THROWS_AS(hatano_nelson({4, 1.0, -0.1, Boundary::obc, 1}), InvalidState);
}

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "nhjump/fock.hpp"

using namespace nhjump;

static Mat random_complex(int n, unsigned seed) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> d(0.0, 1.0);
    Mat m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = cxd(d(gen), d(gen));
    return m;
}

TEST_CASE("pauli matrices satisfy the su(2) algebra with spin-up first") {
    auto p = pauli_ops();
    REQUIRE(max_abs(Mat(p.sx * p.sy - p.sy * p.sx - cxd(0, 2) * p.sz)) == 0.0);
    REQUIRE(max_abs(Mat(p.sy * p.sz - p.sz * p.sy - cxd(0, 2) * p.sx)) == 0.0);
    REQUIRE(max_abs(Mat(p.sx * p.sx - Mat::Identity(2, 2))) == 0.0);
    // basis index 0 is the excited (spin-up) state
    REQUIRE(p.sz(0, 0) == cxd(1, 0));
    REQUIRE(p.sz(1, 1) == cxd(-1, 0));
    REQUIRE(max_abs(Mat(p.sp - 0.5 * (p.sx + cxd(0, 1) * p.sy))) == 0.0);
    REQUIRE(max_abs(Mat(p.sm - p.sp.adjoint())) == 0.0);
    // sm lowers: sm|up> = |down>
    REQUIRE(p.sm(1, 0) == cxd(1, 0));
    // projector identity sp*sm = |up><up|
    Mat proj = p.sp * p.sm;
    REQUIRE(proj(0, 0) == cxd(1, 0));
    REQUIRE(proj(1, 1) == cxd(0, 0));
}

TEST_CASE("kronecker product obeys the mixed product rule") {
    Mat a = random_complex(2, 101), b = random_complex(3, 102);
    Mat c = random_complex(2, 103), d = random_complex(3, 104);
    Mat lhs = kron(a, b) * kron(c, d);
    Mat rhs = kron(Mat(a * c), Mat(b * d));
    REQUIRE(max_abs(Mat(lhs - rhs)) < 1e-13 * max_abs(rhs));
    REQUIRE(kron(a, b).rows() == 6);
}

TEST_CASE("ten-site chain capped at two particles has 56 basis states") {
    auto s = fock_space(10, 2);
    REQUIRE(s.dim() == 56);
    REQUIRE(fock_space(10, 0).dim() == 1);
    REQUIRE(fock_space(10, 1).dim() == 11);
    // ordering: particle number first, then the mask value
    REQUIRE(s.basis[0] == 0u);
    REQUIRE(s.particles(0) == 0);
    for (int i = 1; i <= 10; ++i) REQUIRE(s.particles(i) == 1);
    for (int i = 11; i < 56; ++i) REQUIRE(s.particles(i) == 2);
    for (int i = 1; i < s.dim(); ++i) {
        int pa = s.particles(i - 1), pb = s.particles(i);
        REQUIRE((pa < pb || (pa == pb && s.basis[i - 1] < s.basis[i])));
    }
    for (int i = 0; i < s.dim(); ++i) REQUIRE(s.index_of(s.basis[i]) == i);
}

TEST_CASE("annihilators obey canonical anticommutation relations") {
    auto s = fock_space(4, 4);  // full space, identities are exact
    REQUIRE(s.dim() == 16);
    std::vector<Mat> c(4);
    for (int j = 0; j < 4; ++j) c[j] = annihilator(s, j);
    Mat id = Mat::Identity(s.dim(), s.dim());
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            Mat anti = c[i] * c[j] + c[j] * c[i];
            REQUIRE(max_abs(anti) == 0.0);
            Mat mixed = c[i] * c[j].adjoint() + c[j].adjoint() * c[i];
            if (i == j)
                REQUIRE(max_abs(Mat(mixed - id)) == 0.0);
            else
                REQUIRE(max_abs(mixed) == 0.0);
        }
}

TEST_CASE("Jordan-Wigner string produces fermionic signs") {
    auto s = fock_space(3, 3);
    Mat c1 = annihilator(s, 1);
    // removing site 1 from |occupied: 0,1> passes over site 0 -> sign -1
    int from = s.index_of(0b011u);
    int to = s.index_of(0b001u);
    REQUIRE(c1(to, from) == cxd(-1, 0));
    // no occupied site below 1 in |occupied: 1,2> -> sign +1
    REQUIRE(annihilator(s, 1)(s.index_of(0b100u), s.index_of(0b110u)) == cxd(1, 0));
    // adjoint creates with the same string sign
    Mat c0 = annihilator(s, 0);
    REQUIRE(c0.adjoint()(s.index_of(0b011u), s.index_of(0b010u)) == cxd(1, 0));
}

TEST_CASE("total particle number commutes with a hopping Hamiltonian") {
    auto s = fock_space(6, 2);
    Mat num = number_operator(s);
    Mat hop = Mat::Zero(s.dim(), s.dim());
    for (int j = 0; j + 1 < 6; ++j) {
        Mat ca = annihilator(s, j), cb = annihilator(s, j + 1);
        hop += ca.adjoint() * cb + cb.adjoint() * ca;
    }
    REQUIRE(max_abs(Mat(num * hop - hop * num)) == 0.0);
    for (int i = 0; i < s.dim(); ++i)
        REQUIRE(num(i, i) == cxd(s.particles(i), 0));
}

TEST_CASE("fock space rejects invalid inputs") {
    REQUIRE_THROWS_AS(fock_space(0, 0), InvalidCap);
    REQUIRE_THROWS_AS(fock_space(4, -1), InvalidCap);
    REQUIRE_THROWS_AS(fock_space(4, 5), InvalidCap);
    auto s = fock_space(4, 2);
    REQUIRE_THROWS_AS(s.index_of(0b1111u), IndexOutOfRange);
    REQUIRE_THROWS_AS(annihilator(s, 4), IndexOutOfRange);
    REQUIRE_THROWS_AS(annihilator(s, -1), IndexOutOfRange);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "renyicf/duality.hpp"
#include "renyicf/oracle.hpp"

using namespace renyicf;

TEST_CASE("dual coupling: fixed point, involution, frozen value") {
    CHECK(dual_coupling(self_dual_beta) == doctest::Approx(self_dual_beta).epsilon(1e-14));
    for (const double b : {0.1, 0.3, 1.0})
        CHECK(dual_coupling(dual_coupling(b)) == doctest::Approx(b).epsilon(1e-13));
    // high-precision reference of -(1/2) ln tanh(0.226102)
    CHECK(dual_coupling(0.226102) == doctest::Approx(0.75180468285636944933).epsilon(1e-14));
    CHECK_THROWS_AS(dual_coupling(0.0), std::invalid_argument);
    CHECK_THROWS_AS(dual_coupling(-0.2), std::invalid_argument);
}

TEST_CASE("dual coupling is strictly decreasing") {
    double prev = dual_coupling(0.05);
    for (double b = 0.1; b < 3.0; b += 0.05) {
        const double cur = dual_coupling(b);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("entropy shifts") {
    CHECK(renyi_shift_2d(0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(renyi_shift_2d(1.3) - 1.3 == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(renyi_shift_3d(0.0, 10) == doctest::Approx(9 * std::log(2.0)).epsilon(1e-14));
    CHECK_THROWS_AS(renyi_shift_3d(0.0, 0), std::invalid_argument);
    // the shift cancels in differences: C*_n - C_n = 0
    const double d_direct = 0.62 - 0.31;
    CHECK(renyi_shift_2d(0.62) - renyi_shift_2d(0.31) == doctest::Approx(d_direct).epsilon(1e-15));
}

TEST_CASE("prefactor coefficient pairs") {
    SUBCASE("2D torus form: (1/2) [sinh 2b*]^{-|L|}") {
        DualityRelation r;
        r.form = DualityForm::Ising2D;
        r.n_sites = 16;
        const LogPrefactor p = partition_prefactor(r);
        CHECK(p.two_pow2 == -2);
        CHECK(p.two_sinh == -32);
        const double bs = dual_coupling(0.44);
        CHECK(p.log_value(0.44) ==
              doctest::Approx(-std::log(2.0) - 16 * std::log(std::sinh(2 * bs))).epsilon(1e-13));
    }
    SUBCASE("3D torus form: 2^{-|L|/2 - Ng} [sinh 2b*]^{-3|L|/2}") {
        DualityRelation r;
        r.form = DualityForm::Gauge3D;
        r.dimension = 3;
        r.n_sites = 27;
        r.n_gauge_fixed = 26;
        const LogPrefactor p = partition_prefactor(r);
        CHECK(p.two_pow2 == -27 - 2 * 26);
        CHECK(p.two_sinh == -3 * 27);
    }
    SUBCASE("replica forms") {
        DualityRelation r;
        r.form = DualityForm::Replica2D;
        r.n_replicas = 3;
        r.n_sites = 9;
        CHECK(partition_prefactor(r).two_sinh == -2 * 3 * 9);
        r.form = DualityForm::Replica3DEnhanced;
        r.dimension = 3;
        r.n_gauge_fixed = 5;
        r.boundary_sites = 4;
        const LogPrefactor p = partition_prefactor(r);
        CHECK(p.two_pow2 == 2 * 2 * 3 - 3 * 9 - 2 * 3 * 5);  // 2(n-1)(|dA|-1) - n|L| - 2n Ng
        CHECK(p.two_sinh == -3 * 3 * 9);
        r.form = DualityForm::Replica3DCentral;
        const LogPrefactor c = partition_prefactor(r);
        CHECK(c.two_pow2 == 2 * 4 - 3 * 9 - 2 * 3 * 5);
        CHECK(c.two_sinh == -3 * 3 * 9 + 2 * 4);
    }
    SUBCASE("mismatched geometry is rejected") {
        DualityRelation r;
        r.form = DualityForm::Gauge3D;
        r.dimension = 2;
        r.n_sites = 9;
        CHECK_THROWS_AS(partition_prefactor(r), std::invalid_argument);
        r.form = DualityForm::Ising2D;
        r.n_sites = 0;
        CHECK_THROWS_AS(partition_prefactor(r), std::invalid_argument);
    }
}

TEST_CASE("general 2D prefactor reduces to the torus form") {
    ReplicaLatticeSpec s;
    s.dimension = 2;
    s.n_tau = 4;
    s.n_s = 4;
    const BondGraph g = build_replica_lattice(s);
    const DualityRelation rel = general_relation_2d(g);
    const LogPrefactor general = partition_prefactor(rel);
    DualityRelation torus;
    torus.form = DualityForm::Ising2D;
    torus.n_sites = 16;
    const LogPrefactor bulk = partition_prefactor(torus);
    CHECK(general.log_value(0.37) == doctest::Approx(bulk.log_value(0.37)).epsilon(1e-13));
}

TEST_CASE("ratio cancellation: Z_n/Z^n = 2^{n-1} Z*_n/(Z*)^n on free patches") {
    for (const int n : {2, 3}) {
        ReplicaLatticeSpec sn;
        sn.dimension = 2;
        sn.n_replicas = n;
        sn.n_tau = 3;
        sn.n_s = 3;
        sn.slab_length = 1;
        sn.cut_offset = 1;
        sn.cut_slice = 1;
        sn.bc_tau = sn.bc_s = Boundary::Free;
        ReplicaLatticeSpec s1 = sn;
        s1.n_replicas = 1;
        const BondGraph gn = build_replica_lattice(sn);
        const BondGraph g1 = build_replica_lattice(s1);
        const double beta = 0.41;
        const double bs = dual_coupling(beta);
        const double lhs = enumerate_spin_Z(gn, beta).log_z - n * enumerate_spin_Z(g1, beta).log_z;
        const double rhs = (n - 1) * std::log(2.0) + enumerate_spin_Z(face_dual(gn), bs).log_z -
                           n * enumerate_spin_Z(face_dual(g1), bs).log_z;
        CHECK(std::abs(lhs - rhs) <= 1e-10);  // absolute on logs = relative on Z
    }
}

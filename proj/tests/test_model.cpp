#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "renyicf/model.hpp"
#include "renyicf/oracle.hpp"
#include "renyicf/rng.hpp"

using namespace renyicf;

namespace {

ReplicaLatticeSpec torus2d(int n, int nt, int ns, int l, bool proto = false) {
    ReplicaLatticeSpec s;
    s.dimension = 2;
    s.n_replicas = n;
    s.n_tau = nt;
    s.n_s = ns;
    s.slab_length = l;
    s.protocol_bonds = proto;
    return s;
}

}  // namespace

TEST_CASE("action on aligned spins and at beta = 0") {
    const BondGraph g = build_replica_lattice(torus2d(1, 2, 2, 0));
    const SpinConfig up = SpinConfig::aligned(g.n_sites());
    const CouplingField f = couplings_at(g, 0.3, 0.0);
    CHECK(action(g, up, f) == doctest::Approx(-0.3 * g.n_bonds()).epsilon(1e-14));
    const CouplingField f0 = couplings_at(g, 0.0, 0.0);
    RngStream rng(5, 5);
    const SpinConfig rnd = random_config(g.n_sites(), rng);
    CHECK(action(g, rnd, f0) == 0.0);
}

TEST_CASE("action matches a bond-by-bond hand evaluation on the 2x2 torus") {
    const BondGraph g = build_replica_lattice(torus2d(1, 2, 2, 0));
    REQUIRE(g.n_bonds() == 8);
    SpinConfig c = SpinConfig::aligned(4);
    c.s[0] = -1;
    const CouplingField f = couplings_at(g, 0.3, 0.0);
    double hand = 0.0;
    for (const Bond& b : g.bonds) hand -= 0.3 * c.s[b.a] * c.s[b.b];
    CHECK(action(g, c, f) == doctest::Approx(hand).epsilon(1e-15));
    // flipping one corner balances the 4 incident bonds against the other 4
    CHECK(hand == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("action rejects size mismatch") {
    const BondGraph g = build_replica_lattice(torus2d(1, 2, 2, 0));
    SpinConfig wrong;
    wrong.s.assign(3, 1);
    CHECK_THROWS_AS(action(g, wrong, couplings_at(g, 0.3, 0.0)), std::invalid_argument);
}

TEST_CASE("interpolated couplings: switch classes and endpoints") {
    const BondGraph g = build_replica_lattice(torus2d(2, 3, 3, 1, true));
    CHECK_THROWS_AS(couplings_at(g, 0.4, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(couplings_at(g, 0.4, 1.1), std::invalid_argument);
    const CouplingField mid = couplings_at(g, 0.4, 0.5);
    for (int b = 0; b < g.n_bonds(); ++b) {
        if (g.bonds[b].cls == BondClass::SwitchOff || g.bonds[b].cls == BondClass::SwitchOn)
            CHECK(mid.j[b] == doctest::Approx(0.2).epsilon(1e-15));
        else
            CHECK(mid.j[b] == 0.4);
    }

    // endpoint partition functions equal the fresh l+1 and l slabs
    const double z0 = enumerate_spin_Z(g, couplings_at(g, 0.35, 0.0)).log_z;
    const double z1 = enumerate_spin_Z(g, couplings_at(g, 0.35, 1.0)).log_z;
    const BondGraph gl1 = build_replica_lattice(torus2d(2, 3, 3, 2));
    const BondGraph gl0 = build_replica_lattice(torus2d(2, 3, 3, 1));
    CHECK(z0 == doctest::Approx(enumerate_spin_Z(gl1, 0.35).log_z).epsilon(1e-12));
    CHECK(z1 == doctest::Approx(enumerate_spin_Z(gl0, 0.35).log_z).epsilon(1e-12));
}

TEST_CASE("gauge invariance of frustrations") {
    // flipping the sign of all bonds at one site together with that spin
    // leaves exp(-S) invariant
    const BondGraph g = build_replica_lattice(torus2d(1, 3, 3, 0));
    RngStream rng(99, 1);
    for (int rep = 0; rep < 20; ++rep) {
        SpinConfig c = random_config(g.n_sites(), rng);
        CouplingField f = couplings_at(g, 0.7, 0.0);
        const int site = static_cast<int>(rng.next_below(g.n_sites()));
        const double before = action(g, c, f);
        for (int k = g.adj_off[site]; k < g.adj_off[site + 1]; ++k)
            f.sign[g.adj[k].first] = static_cast<std::int8_t>(-f.sign[g.adj[k].first]);
        c.s[site] = static_cast<std::int8_t>(-c.s[site]);
        CHECK(action(g, c, f) == doctest::Approx(before).epsilon(1e-13));
    }
}

TEST_CASE("seam sets flip coupling signs") {
    const BondGraph g = build_replica_lattice(torus2d(1, 3, 3, 0));
    SeamSet seams;
    seams.bonds = {0, 5};
    const CouplingField f = couplings_at(g, 0.4, 0.0, &seams);
    CHECK(f.sign[0] == -1);
    CHECK(f.sign[5] == -1);
    CHECK(f.sign[1] == 1);
}

TEST_CASE("clock coefficients: closed forms and frozen references") {
    SUBCASE("N = 2 reduces to cosh and sinh") {
        const auto c = clock_fourier_coeffs(2, 0.35);
        CHECK(c[0] == doctest::Approx(std::cosh(0.35)).epsilon(1e-14));
        CHECK(c[1] == doctest::Approx(std::sinh(0.35)).epsilon(1e-14));
    }
    SUBCASE("beta = 0: only C_0 survives") {
        const auto c = clock_fourier_coeffs(5, 0.0);
        CHECK(c[0] == doctest::Approx(1.0).epsilon(1e-15));
        for (int k = 1; k < 5; ++k) CHECK(std::abs(c[k]) < 1e-15);
    }
    SUBCASE("N = 4, beta = 0.7 against 50-digit reference") {
        const auto c = clock_fourier_coeffs(4, 0.7);
        const double ref[4] = {1.1275845028154715091, 0.37929185091976675173, 0.12758450281547150908,
                               0.37929185091976675173};
        for (int k = 0; k < 4; ++k) CHECK(c[k] == doctest::Approx(ref[k]).epsilon(1e-14));
    }
    SUBCASE("positivity for N <= 4") {
        RngStream rng(3, 3);
        for (int rep = 0; rep < 30; ++rep) {
            const int n = 2 + static_cast<int>(rng.next_below(3));
            const double beta = 0.05 + 2.0 * rng.next_double();
            for (const double ck : clock_fourier_coeffs(n, beta)) CHECK(ck > 0.0);
        }
    }
    CHECK_THROWS_AS(clock_fourier_coeffs(1, 0.3), std::invalid_argument);
}

TEST_CASE("bessel weight wraps integer-order I") {
    CHECK(bessel_weight(0, 0.0) == 1.0);
    CHECK(bessel_weight(2, 0.0) == 0.0);
    CHECK(bessel_weight(-3, 1.7) == bessel_weight(3, 1.7));
    CHECK_THROWS_AS(bessel_weight(0, -1.0), std::invalid_argument);
}

TEST_CASE("protocol schedules") {
    const ProtocolSchedule p = ProtocolSchedule::linear(4, 1, 10);
    CHECK(p.lambdas.front() == 0.0);
    CHECK(p.lambdas.back() == 1.0);
    const ProtocolSchedule r = p.reversed();
    CHECK(r.direction == ProtocolSchedule::Direction::Reverse);
    CHECK(r.lambdas.front() == 1.0);
    CHECK(r.lambdas.back() == 0.0);
    ProtocolSchedule bad = p;
    bad.lambdas[2] = bad.lambdas[1];  // not strictly monotone
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

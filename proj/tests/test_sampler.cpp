#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "renyicf/sampler.hpp"

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

std::uint64_t config_bits(const SpinConfig& c) {
    std::uint64_t b = 0;
    for (std::size_t i = 0; i < c.s.size(); ++i)
        if (c.s[i] < 0) b |= 1ULL << i;
    return b;
}

}  // namespace

TEST_CASE("beta = 0: no bond activates, spins are uniform random") {
    const BondGraph g = build_replica_lattice(torus2d(1, 3, 3, 0));
    const CouplingField f = couplings_at(g, 0.0, 0.0);
    RngStream rng(1, 1);
    SpinConfig c = SpinConfig::aligned(g.n_sites());
    const auto labels = cluster_decomposition(g, f, c, rng);
    for (int i = 0; i < g.n_sites(); ++i) CHECK(labels[i] == i);
    // magnetization of single sweeps averages to zero
    double m = 0.0;
    const int reps = 20000;
    for (int k = 0; k < reps; ++k) {
        sw_sweep(g, f, c, rng);
        for (const auto s : c.s) m += s;
    }
    m /= reps * g.n_sites();
    CHECK(std::abs(m) < 0.01);
}

TEST_CASE("strong coupling: single cluster, sweep preserves alignment up to a global flip") {
    const BondGraph g = build_replica_lattice(torus2d(1, 3, 3, 0));
    const CouplingField f = couplings_at(g, 50.0, 0.0);
    RngStream rng(2, 7);
    SpinConfig c = SpinConfig::aligned(g.n_sites());
    const auto labels = cluster_decomposition(g, f, c, rng);
    for (const auto l : labels) CHECK(l == labels[0]);
    for (int k = 0; k < 10; ++k) {
        sw_sweep(g, f, c, rng);
        for (const auto s : c.s) CHECK(s == c.s[0]);
    }
}

TEST_CASE("zero-weight switch bonds never merge clusters") {
    const BondGraph g = build_replica_lattice(torus2d(2, 3, 3, 1, true));
    CouplingField f = couplings_at(g, 0.9, 0.0);  // SwitchOn bonds carry J = 0
    for (int b = 0; b < g.n_bonds(); ++b)
        if (g.bonds[b].cls != BondClass::SwitchOn) f.j[b] = 0.0;
    RngStream rng(3, 3);
    const SpinConfig c = SpinConfig::aligned(g.n_sites());
    const auto labels = cluster_decomposition(g, f, c, rng);
    for (int i = 0; i < g.n_sites(); ++i) CHECK(labels[i] == i);
}

TEST_CASE("branch sites merge clusters across replicas") {
    ReplicaLatticeSpec s;
    s.dimension = 2;
    s.n_replicas = 2;
    s.n_tau = 3;
    s.n_s = 3;
    s.slab_length = 1;
    s.cut_offset = 1;
    s.cut_slice = 1;
    s.bc_tau = s.bc_s = Boundary::Free;
    s.variant = GeometryVariant::EnhancedVertex;
    const BondGraph d = build_replica_lattice(s);
    REQUIRE(!d.branch_sites.empty());
    const int branch = d.branch_sites.front();
    // activate only the branch site's bonds: its whole 4n-neighborhood,
    // spanning both replicas, must join one cluster
    CouplingField f = couplings_at(d, 50.0, 0.0);
    for (int b = 0; b < d.n_bonds(); ++b)
        if (d.bonds[b].a != branch && d.bonds[b].b != branch) f.j[b] = 0.0;
    RngStream rng(4, 4);
    const SpinConfig c = SpinConfig::aligned(d.n_sites());
    const auto labels = cluster_decomposition(d, f, c, rng);
    std::set<int> replicas_in_cluster;
    for (int i = 0; i < d.n_sites(); ++i)
        if (labels[i] == labels[branch] && d.sites[i].replica >= 0)
            replicas_in_cluster.insert(d.sites[i].replica);
    CHECK(replicas_in_cluster.size() == 2);
}

TEST_CASE("negative effective couplings are rejected") {
    const BondGraph g = build_replica_lattice(torus2d(1, 2, 2, 0));
    CouplingField f = couplings_at(g, 0.5, 0.0);
    f.sign[0] = -1;
    RngStream rng(5, 5);
    SpinConfig c = SpinConfig::aligned(g.n_sites());
    CHECK_THROWS_AS(sw_sweep(g, f, c, rng), std::invalid_argument);
    // metropolis handles the same field
    CHECK_NOTHROW(metropolis_sweep(g, f, c, rng));
}

TEST_CASE("reproducibility: identical (seed, stream) gives identical trajectories") {
    const BondGraph g = build_replica_lattice(torus2d(2, 3, 3, 1));
    const CouplingField f = couplings_at(g, 0.4, 0.0);
    auto run = [&](std::uint64_t seed, std::uint64_t stream) {
        RngStream rng(seed, stream);
        SpinConfig c = SpinConfig::aligned(g.n_sites());
        std::vector<std::uint64_t> states;
        for (int k = 0; k < 50; ++k) {
            sw_sweep(g, f, c, rng);
            states.push_back(config_bits(c));
        }
        return states;
    };
    CHECK(run(42, 7) == run(42, 7));
    CHECK(run(42, 7) != run(42, 8));
    CHECK(run(42, 7) != run(43, 7));
}

TEST_CASE("ergodicity smoke test: all 16 states of the 2x2 torus visited") {
    const BondGraph g = build_replica_lattice(torus2d(1, 2, 2, 0));
    const CouplingField f = couplings_at(g, 0.3, 0.0);
    RngStream rng(6, 6);
    SpinConfig c = SpinConfig::aligned(g.n_sites());
    std::set<std::uint64_t> seen;
    for (int k = 0; k < 100000 && seen.size() < 16; ++k) {
        sw_sweep(g, f, c, rng);
        seen.insert(config_bits(c));
    }
    CHECK(seen.size() == 16);
}

TEST_CASE("metropolis at beta = 0 accepts everything") {
    const BondGraph g = build_replica_lattice(torus2d(1, 2, 2, 0));
    const CouplingField f = couplings_at(g, 0.0, 0.0);
    RngStream rng(7, 7);
    SpinConfig c = SpinConfig::aligned(g.n_sites());
    // with J = 0 every proposal has dS = 0 and is accepted: all spins flip
    metropolis_sweep(g, f, c, rng);
    for (const auto s : c.s) CHECK(s == -1);
}

TEST_CASE("isolated site has zero mean magnetization") {
    // n_s = 1 collapses the spatial direction; a 1-site "lattice" with no
    // bonds is the isolated-site limit
    ReplicaLatticeSpec s = torus2d(1, 1, 1, 0);
    const BondGraph g = build_replica_lattice(s);
    REQUIRE(g.n_bonds() == 0);
    const CouplingField f = couplings_at(g, 0.9, 0.0);
    RngStream rng(8, 8);
    SpinConfig c = SpinConfig::aligned(1);
    double m = 0.0;
    const int reps = 200000;
    for (int k = 0; k < reps; ++k) {
        metropolis_sweep(g, f, c, rng);
        m += c.s[0];
    }
    CHECK(std::abs(m / reps) < 0.01);
}

TEST_CASE("autocorrelation helper returns a small tau for SW on a small torus") {
    const BondGraph g = build_replica_lattice(torus2d(1, 3, 3, 0));
    RngStream rng(9, 9);
    const double tau = integrated_autocorrelation(g, couplings_at(g, 0.44, 0.0), 0.44, rng);
    CHECK(tau > 0.0);
    CHECK(tau < 5.0);
}

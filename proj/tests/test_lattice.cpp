#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "renyicf/lattice.hpp"
#include "renyicf/rng.hpp"

using namespace renyicf;

namespace {

ReplicaLatticeSpec make2d(int n, int nt, int ns, int l, Boundary bc = Boundary::Periodic, int x0 = 0,
                          int cut = 0) {
    ReplicaLatticeSpec s;
    s.dimension = 2;
    s.n_replicas = n;
    s.n_tau = nt;
    s.n_s = ns;
    s.slab_length = l;
    s.cut_offset = x0;
    s.cut_slice = cut;
    s.bc_tau = s.bc_s = bc;
    return s;
}

}  // namespace

TEST_CASE("ordinary torus: 4x4, n=1 gives 32 bonds, all degrees 4") {
    const BondGraph g = build_replica_lattice(make2d(1, 4, 4, 0));
    CHECK(g.n_sites() == 16);
    CHECK(g.n_bonds() == 32);
    for (int i = 0; i < g.n_sites(); ++i) CHECK(g.degree(i) == 4);
    CHECK(g.branch_sites.empty());
}

TEST_CASE("branch sites of the enhanced-vertex dual have degree 4n") {
    for (int n : {2, 3}) {
        ReplicaLatticeSpec s = make2d(n, 3, 3, 1);
        s.variant = GeometryVariant::EnhancedVertex;
        const BondGraph d = build_replica_lattice(s);
        REQUIRE(d.branch_sites.size() == 2);
        for (const auto b : d.branch_sites) {
            CHECK(d.sites[b].shared);
            CHECK(d.degree(b) == 4 * n);
        }
        // on the torus every other dual site is an ordinary plaquette
        for (int i = 0; i < d.n_sites(); ++i)
            if (!d.sites[i].shared) CHECK(d.degree(i) == 4);
        // one dual bond per direct bond
        CHECK(d.n_bonds() == 2 * n * 9);
    }
}

TEST_CASE("3D standard cut: bond count and seam classes") {
    // independent tally from first principles: 3 bonds per site on the
    // torus; inter-replica temporal bonds only at the seam inside the slab
    ReplicaLatticeSpec s;
    s.dimension = 3;
    s.n_replicas = 2;
    s.n_tau = 4;
    s.n_s = 4;
    s.n_s2 = 4;
    s.slab_length = 2;
    const BondGraph g = build_replica_lattice(s);
    const int sites = 2 * 4 * 4 * 4;
    CHECK(g.n_sites() == sites);
    CHECK(g.n_bonds() == 3 * sites);
    int inter = 0;
    for (const Bond& b : g.bonds)
        if (b.cls == BondClass::TemporalInter) ++inter;
    CHECK(inter == 2 /*l*/ * 4 /*n_s2*/ * 2 /*n*/);
    for (int i = 0; i < g.n_sites(); ++i) CHECK(g.degree(i) == 6);
}

TEST_CASE("degree invariance under randomized specs (standard cut, torus)") {
    RngStream rng(123, 0);
    for (int rep = 0; rep < 40; ++rep) {
        ReplicaLatticeSpec s;
        s.dimension = rng.next_bool() ? 2 : 3;
        s.n_replicas = 1 + static_cast<int>(rng.next_below(3));
        s.n_tau = 2 + static_cast<int>(rng.next_below(3));
        s.n_s = 2 + static_cast<int>(rng.next_below(3));
        s.n_s2 = s.dimension == 3 ? 2 + static_cast<int>(rng.next_below(2)) : 1;
        s.slab_length = static_cast<int>(rng.next_below(s.n_s + 1));
        s.cut_offset = static_cast<int>(rng.next_below(s.n_s));
        const BondGraph g = build_replica_lattice(s);
        for (int i = 0; i < g.n_sites(); ++i) CHECK(g.degree(i) == 2 * s.dimension);
    }
}

TEST_CASE("n=1 with a cut is graph-isomorphic to the plain torus") {
    const BondGraph with_cut = build_replica_lattice(make2d(1, 4, 4, 2));
    const BondGraph plain = build_replica_lattice(make2d(1, 4, 4, 0));
    CHECK(canonical_bonds(with_cut, true) == canonical_bonds(plain, true));
}

TEST_CASE("switch pairs: counts and closure") {
    SUBCASE("2D: one pair per replica") {
        ReplicaLatticeSpec s = make2d(2, 3, 3, 1);
        s.protocol_bonds = true;
        const BondGraph g = build_replica_lattice(s);
        const auto pairs = switch_pairs(g);
        CHECK(pairs.size() == 2);
        for (const auto& [off, on] : pairs) {
            CHECK(g.bonds[off].cls == BondClass::SwitchOff);
            CHECK(g.bonds[on].cls == BondClass::SwitchOn);
            CHECK(g.bonds[off].a == g.bonds[on].a);  // same seam-side site
        }
    }
    SUBCASE("3D: n x transverse pairs") {
        ReplicaLatticeSpec s;
        s.dimension = 3;
        s.n_replicas = 2;
        s.n_tau = 3;
        s.n_s = 3;
        s.n_s2 = 4;
        s.slab_length = 1;
        s.protocol_bonds = true;
        const BondGraph g = build_replica_lattice(s);
        CHECK(switch_pairs(g).size() == 8);
    }
    SUBCASE("applying all switches reproduces the fresh build at l") {
        for (int l : {0, 1, 2}) {
            ReplicaLatticeSpec s = make2d(2, 3, 3, l);
            s.protocol_bonds = true;
            const BondGraph proto = build_replica_lattice(s);
            const BondGraph switched = apply_switches(proto);
            const BondGraph fresh = build_replica_lattice(make2d(2, 3, 3, l));
            CHECK(canonical_bonds(switched) == canonical_bonds(fresh));
        }
    }
}

TEST_CASE("spec validation rejects bad extents") {
    CHECK_THROWS_AS(build_replica_lattice(make2d(2, 3, 3, 4)), std::invalid_argument);  // l > N_s
    CHECK_THROWS_AS(build_replica_lattice(make2d(2, 3, 3, 2, Boundary::Free, 2)), std::invalid_argument);
    ReplicaLatticeSpec s = make2d(2, 3, 3, 1);
    s.cut_slice = 5;
    CHECK_THROWS_AS(build_replica_lattice(s), std::invalid_argument);
    s = make2d(2, 3, 3, 1, Boundary::Free);  // free tau needs an interior cut
    CHECK_THROWS_AS(build_replica_lattice(s), std::invalid_argument);
    s.cut_slice = 1;
    CHECK_NOTHROW(build_replica_lattice(s));
    s = make2d(1, 3, 3, 0);
    s.variant = GeometryVariant::CentralPlaquette;  // D=2 has no central plaquettes
    CHECK_THROWS_AS(build_replica_lattice(s), std::invalid_argument);
}

TEST_CASE("face tracing: euler characteristic of the n-sheeted torus") {
    for (int n : {1, 2, 3}) {
        const BondGraph g = build_replica_lattice(make2d(n, 3, 4, 2));
        const auto faces = trace_faces(g);
        // V - E + F = 2 - 2g with genus n
        const int chi = g.n_sites() - g.n_bonds() + static_cast<int>(faces.size());
        CHECK(chi == 2 - 2 * n);
    }
}

TEST_CASE("gauge lattice, n=1 torus: every link in 4 plaquettes") {
    ReplicaLatticeSpec s;
    s.dimension = 3;
    s.n_replicas = 1;
    s.n_tau = 3;
    s.n_s = 3;
    s.n_s2 = 3;
    s.variant = GeometryVariant::EnhancedVertex;
    const GaugeReplicaGraph g = build_gauge_replica(s);
    CHECK(g.n_links == 3 * 27);
    CHECK(static_cast<int>(g.plaquettes.size()) == 3 * 27);
    std::vector<int> in_plaquettes(g.n_links, 0);
    for (const GaugePlaquette& p : g.plaquettes)
        for (const std::int32_t l : p.links) ++in_plaquettes[l];
    for (const int c : in_plaquettes) CHECK(c == 4);
}

TEST_CASE("gauge replica n=2: singularity links shared, in 8 plaquettes") {
    ReplicaLatticeSpec s;
    s.dimension = 3;
    s.n_replicas = 2;
    s.n_tau = 3;
    s.n_s = 4;
    s.n_s2 = 3;
    s.slab_length = 2;
    s.variant = GeometryVariant::EnhancedVertex;
    const GaugeReplicaGraph g = build_gauge_replica(s);
    int shared = 0;
    std::vector<int> in_plaquettes(g.n_links, 0);
    for (const GaugePlaquette& p : g.plaquettes)
        for (const std::int32_t l : p.links) ++in_plaquettes[l];
    for (int l = 0; l < g.n_links; ++l)
        if (g.link_shared[l]) {
            ++shared;
            CHECK(in_plaquettes[l] == 8);
        }
    CHECK(shared == 2 * 3);  // two conical lines times the transverse extent
}

TEST_CASE("central plaquette loops have length 4n") {
    for (int n : {2, 3}) {
        ReplicaLatticeSpec s;
        s.dimension = 3;
        s.n_replicas = n;
        s.n_tau = 3;
        s.n_s = 4;
        s.n_s2 = 3;
        s.slab_length = 2;
        s.variant = GeometryVariant::CentralPlaquette;
        const GaugeReplicaGraph g = build_gauge_replica(s);
        REQUIRE(g.central_plaquettes.size() == 2 * 3);
        for (const auto& loop : g.central_plaquettes) {
            CHECK(static_cast<int>(loop.size()) == 4 * n);
            std::set<std::int32_t> uniq(loop.begin(), loop.end());
            CHECK(uniq.size() == loop.size());
        }
        CHECK(g.link_shared == std::vector<bool>(g.n_links, false));
    }
}

TEST_CASE("maximal tree is spanning and acyclic; every link closes through it") {
    ReplicaLatticeSpec s;
    s.dimension = 3;
    s.n_replicas = 2;
    s.n_tau = 2;
    s.n_s = 2;
    s.n_s2 = 2;
    s.slab_length = 1;
    s.bc_tau = s.bc_s = s.bc_s2 = Boundary::Free;
    s.cut_slice = 1;
    s.variant = GeometryVariant::EnhancedVertex;
    const GaugeReplicaGraph g = build_gauge_replica(s);
    CHECK(static_cast<int>(g.maximal_tree.size()) == g.n_sites - 1);
    CHECK(g.n_gauge_fixed() < g.n_links);
    std::vector<int> parent(g.n_sites);
    for (int i = 0; i < g.n_sites; ++i) parent[i] = i;
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (const std::int32_t t : g.maximal_tree) {
        const auto [a, b] = g.link_ends[t];
        CHECK(find(a) != find(b));  // acyclic
        parent[find(a)] = find(b);
    }
    for (int l = 0; l < g.n_links; ++l) CHECK(find(g.link_ends[l].first) == find(g.link_ends[l].second));
    const auto alt = gauge_spanning_tree(g, true);
    CHECK(alt.size() == g.maximal_tree.size());
    CHECK(alt != g.maximal_tree);
}

TEST_CASE("build_gauge_replica rejects unsupported input") {
    CHECK_THROWS_AS(build_gauge_replica(make2d(1, 3, 3, 0)), std::invalid_argument);  // D = 2
    ReplicaLatticeSpec s;
    s.dimension = 3;
    s.n_tau = 3;
    s.n_s = 3;
    s.n_s2 = 1;  // no transverse extent
    CHECK_THROWS_AS(build_gauge_replica(s), std::invalid_argument);
}

TEST_CASE("bond dump CSV") {
    const BondGraph g = build_replica_lattice(make2d(1, 2, 2, 0));
    std::ostringstream os;
    dump_bonds_csv(g, os);
    const std::string out = os.str();
    CHECK(out.rfind("site_a,site_b,class,sign\n", 0) == 0);
    CHECK(std::count(out.begin(), out.end(), '\n') == g.n_bonds() + 1);
    CHECK(out.find("spatial") != std::string::npos);
    CHECK(out.find("temporal_intra") != std::string::npos);
}

TEST_CASE("boundary sites: slab interfaces") {
    CHECK(make2d(2, 3, 4, 2).boundary_sites() == 2);  // two cut endpoints
    CHECK(make2d(2, 3, 4, 0).boundary_sites() == 0);  // no slab
    CHECK(make2d(2, 3, 4, 4).boundary_sites() == 0);  // slab covers everything
    ReplicaLatticeSpec s3;
    s3.dimension = 3;
    s3.n_replicas = 2;
    s3.n_tau = 3;
    s3.n_s = 4;
    s3.n_s2 = 5;
    s3.slab_length = 2;
    CHECK(s3.boundary_sites() == 2 * 5);
    s3.bc_s = Boundary::Free;
    s3.cut_offset = 0;  // anchored slab: single entangling line
    CHECK(s3.boundary_sites() == 5);
}

TEST_CASE("antiperiodic boundaries appear as signed wrap bonds") {
    ReplicaLatticeSpec s = make2d(1, 3, 3, 0);
    s.bc_s = Boundary::Antiperiodic;
    const BondGraph g = build_replica_lattice(s);
    int flipped = 0;
    for (const Bond& b : g.bonds)
        if (b.sign < 0) {
            ++flipped;
            CHECK(b.cls == BondClass::Spatial);
        }
    CHECK(flipped == 3);  // one seam column
}

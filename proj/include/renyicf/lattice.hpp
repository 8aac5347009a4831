#ifndef RENYICF_LATTICE_HPP
#define RENYICF_LATTICE_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace renyicf {

enum class BondClass : std::uint8_t { Spatial, TemporalIntra, TemporalInter, SwitchOff, SwitchOn };
enum class GeometryVariant : std::uint8_t { StandardCut, EnhancedVertex, CentralPlaquette };
enum class Boundary : std::uint8_t { Periodic, Antiperiodic, Free };

const char* to_string(BondClass c);
const char* to_string(GeometryVariant v);
const char* to_string(Boundary b);

// Geometry of n replica sheets with a slab cut of width slab_length along
// the first spatial direction.  The cut seam lies between time slices
// cut_slice-1 and cut_slice; the default (0) puts it on the temporal wrap,
// between tau = n_tau-1 and tau = 0.  Temporal bonds crossing the seam at
// spatial positions inside the slab connect replica r to replica r+1 mod n.
struct ReplicaLatticeSpec {
    int dimension = 2;  // 2 or 3
    int n_replicas = 1;
    int n_tau = 4;
    int n_s = 4;
    int n_s2 = 1;  // transverse extent, D = 3 only
    int slab_length = 0;
    int cut_offset = 0;
    int cut_slice = 0;
    GeometryVariant variant = GeometryVariant::StandardCut;
    Boundary bc_tau = Boundary::Periodic;
    Boundary bc_s = Boundary::Periodic;
    Boundary bc_s2 = Boundary::Periodic;
    // When set, the graph carries both bond sets of the slab pair
    // (slab_length+1 at lambda=0, slab_length at lambda=1) with the moved
    // column's seam bonds classed SwitchOff / SwitchOn.
    bool protocol_bonds = false;

    void validate() const;  // throws std::invalid_argument with a diagnostic
    std::uint64_t hash() const;
    // number of lattice sites per entangling line times the number of lines
    int boundary_sites() const;
    int sheet_sites() const;  // sites of one replica sheet
};

struct Site {
    std::int32_t replica;  // -1 for shared (branch) sites
    std::int16_t tau, x, y;
    bool shared = false;
};

struct Bond {
    std::int32_t a, b;
    BondClass cls;
    std::int8_t sign = 1;  // -1 on antiperiodic seams / frustrations
};

struct BondGraph {
    ReplicaLatticeSpec spec;
    std::vector<Site> sites;
    std::vector<Bond> bonds;
    std::vector<std::int32_t> branch_sites;

    // flattened adjacency: for site i, entries adj[adj_off[i]..adj_off[i+1])
    // of (bond index, neighbor site)
    std::vector<std::int32_t> adj_off;
    std::vector<std::pair<std::int32_t, std::int32_t>> adj;

    // rotation system for D=2 face tracing: slot d of site i holds the
    // half-edge 2*bond+end leaving i in local direction d (+tau,+x,-tau,-x);
    // -1 when absent (free boundary)
    std::vector<std::array<std::int32_t, 4>> slots;
    bool has_embedding = false;

    int n_sites() const { return static_cast<int>(sites.size()); }
    int n_bonds() const { return static_cast<int>(bonds.size()); }
    int degree(int site) const { return adj_off[site + 1] - adj_off[site]; }
    void build_adjacency();
    std::uint64_t hash() const;
};

BondGraph build_replica_lattice(const ReplicaLatticeSpec& spec);

// Face-dual of an embedded 2D graph: one dual site per face, one dual bond
// per direct bond.  Faces of length 4n become shared branch sites.
BondGraph face_dual(const BondGraph& g);

// Faces as cycles of bond indices (D=2 embedded graphs only).
std::vector<std::vector<std::int32_t>> trace_faces(const BondGraph& g);

// Protocol bookkeeping: pairs (bond_off, bond_on) covering the seam bonds of
// the column moved by the slab_length+1 -> slab_length protocol.
std::vector<std::pair<std::int32_t, std::int32_t>> switch_pairs(const BondGraph& g);

// Resolve the protocol at lambda=1: drop SwitchOff bonds, reclass SwitchOn
// as ordinary temporal bonds.
BondGraph apply_switches(const BondGraph& g);

// Canonical edge list for isomorphism-by-construction checks: sites sorted
// by (replica, tau, x, y), bonds as sorted (lo, hi, class?, sign) tuples.
std::vector<std::array<std::int64_t, 4>> canonical_bonds(const BondGraph& g, bool class_blind = false);

void dump_bonds_csv(const BondGraph& g, std::ostream& os);

// --- gauge side -----------------------------------------------------------

struct GaugePlaquette {
    std::vector<std::int32_t> links;
    std::vector<std::int8_t> orient;
};

struct GaugeReplicaGraph {
    ReplicaLatticeSpec spec;
    int n_links = 0;
    int n_sites = 0;  // gauge sites incident to links (3-cells + outer, or dual vertices)
    std::vector<bool> link_shared;  // true on conical-singularity links
    std::vector<std::pair<std::int32_t, std::int32_t>> link_ends;
    std::vector<GaugePlaquette> plaquettes;
    std::vector<std::int32_t> maximal_tree;  // link ids, acyclic spanning set
    std::vector<std::vector<std::int32_t>> central_plaquettes;  // 4n-loops (CentralPlaquette)

    int n_gauge_fixed() const { return static_cast<int>(maximal_tree.size()); }  // N_g
    std::uint64_t hash() const;
};

// D=3 only.  EnhancedVertex (and n=1): the exact dual complex of the
// StandardCut spin lattice; links live on the faces of the replica complex,
// plaquettes on its edges, gauge sites on its 3-cells plus one outer site
// for free boundaries.  CentralPlaquette: gauge links on the edges of the
// replica complex, plaquettes on its faces; faces encircling the conical
// singularity wind n times and have length 4n.
GaugeReplicaGraph build_gauge_replica(const ReplicaLatticeSpec& spec);

// Deterministic spanning tree over (gauge sites, links); alt=true explores
// links in reverse order, giving a different tree for independence checks.
std::vector<std::int32_t> gauge_spanning_tree(const GaugeReplicaGraph& g, bool alt = false);

}  // namespace renyicf

#endif

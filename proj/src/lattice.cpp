// Replica lattice construction: n sheets with a slab cut, the face-dual
// (branch-point) geometry in 2D, and the dual gauge complex in 3D.

#include "renyicf/lattice.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "renyicf/rng.hpp"

namespace renyicf {

const char* to_string(BondClass c) {
    switch (c) {
        case BondClass::Spatial: return "spatial";
        case BondClass::TemporalIntra: return "temporal_intra";
        case BondClass::TemporalInter: return "temporal_inter";
        case BondClass::SwitchOff: return "switch_off";
        case BondClass::SwitchOn: return "switch_on";
    }
    return "?";
}

const char* to_string(GeometryVariant v) {
    switch (v) {
        case GeometryVariant::StandardCut: return "standard_cut";
        case GeometryVariant::EnhancedVertex: return "enhanced_vertex";
        case GeometryVariant::CentralPlaquette: return "central_plaquette";
    }
    return "?";
}

const char* to_string(Boundary b) {
    switch (b) {
        case Boundary::Periodic: return "periodic";
        case Boundary::Antiperiodic: return "antiperiodic";
        case Boundary::Free: return "free";
    }
    return "?";
}

namespace {

bool wraps(Boundary b) { return b != Boundary::Free; }

struct Geometry {
    const ReplicaLatticeSpec& s;
    int nt, ns, ns2, n;
    bool wrap_t, wrap_x, wrap_y;

    explicit Geometry(const ReplicaLatticeSpec& spec)
        : s(spec),
          nt(spec.n_tau),
          ns(spec.n_s),
          ns2(spec.n_s2),
          n(spec.n_replicas),
          wrap_t(wraps(spec.bc_tau)),
          wrap_x(wraps(spec.bc_s)),
          wrap_y(wraps(spec.bc_s2)) {}

    int site_id(int r, int t, int x, int y) const { return ((r * nt + t) * ns + x) * ns2 + y; }
    int n_sites() const { return n * nt * ns * ns2; }

    // slab membership of spatial column x (effective slab length l)
    bool in_slab(int x, int l) const {
        if (l <= 0) return false;
        if (l >= ns) return true;
        const int x0 = s.cut_offset;
        if (!wrap_x) return x >= x0 && x < x0 + l;
        const int d = ((x - x0) % ns + ns) % ns;
        return d < l;
    }

    // a temporal bond leaving slice t crosses the cut seam
    bool seam_layer(int t) const { return (t + 1) % nt == s.cut_slice % nt; }

    bool t_step_exists(int t) const { return wrap_t ? nt > 1 : t + 1 < nt; }
    bool x_step_exists(int x) const { return wrap_x ? ns > 1 : x + 1 < ns; }
    bool y_step_exists(int y) const { return s.dimension == 3 && (wrap_y ? ns2 > 1 : y + 1 < ns2); }
};

}  // namespace

void ReplicaLatticeSpec::validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("ReplicaLatticeSpec: " + msg); };
    if (dimension != 2 && dimension != 3) fail("dimension must be 2 or 3");
    if (n_replicas < 1) fail("n_replicas must be >= 1");
    if (n_tau < 1 || n_s < 1 || n_s2 < 1) fail("extents must be positive");
    if (dimension == 2 && n_s2 != 1) fail("n_s2 must be 1 in two dimensions");
    if (variant == GeometryVariant::CentralPlaquette && dimension != 3)
        fail("CentralPlaquette geometry is only defined for D = 3");
    const int l_max = protocol_bonds ? slab_length + 1 : slab_length;
    if (slab_length < 0 || l_max > n_s) {
        std::ostringstream os;
        os << "slab length " << l_max << " exceeds spatial extent " << n_s;
        fail(os.str());
    }
    if (bc_s == Boundary::Free) {
        if (cut_offset < 0 || cut_offset + l_max > n_s) fail("cut_offset + slab length out of range for free boundaries");
    } else if (cut_offset < 0 || cut_offset >= n_s) {
        fail("cut_offset out of range");
    }
    if (cut_slice < 0 || cut_slice >= n_tau) fail("cut_slice out of range");
    if (bc_tau == Boundary::Free && cut_slice == 0 && n_replicas > 1 && l_max > 0)
        fail("free temporal boundaries need an interior cut_slice in [1, n_tau-1]");
}

int ReplicaLatticeSpec::sheet_sites() const { return n_tau * n_s * n_s2; }

int ReplicaLatticeSpec::boundary_sites() const {
    Geometry geo(*this);
    const int l = slab_length;
    if (l <= 0 || l >= n_s) return 0;
    int lines = 0;
    for (int x = 0; x < n_s; ++x) {
        if (!geo.x_step_exists(x)) continue;
        const int x1 = (x + 1) % n_s;
        if (geo.in_slab(x, l) != geo.in_slab(x1, l)) ++lines;
    }
    return lines * (dimension == 3 ? n_s2 : 1);
}

std::uint64_t ReplicaLatticeSpec::hash() const {
    const int fields[] = {dimension, n_replicas, n_tau, n_s, n_s2, slab_length, cut_offset, cut_slice,
                          static_cast<int>(variant), static_cast<int>(bc_tau), static_cast<int>(bc_s),
                          static_cast<int>(bc_s2), protocol_bonds ? 1 : 0};
    return fnv1a(fields, sizeof(fields));
}

void BondGraph::build_adjacency() {
    const int ns = n_sites();
    adj_off.assign(ns + 1, 0);
    for (const Bond& b : bonds) {
        ++adj_off[b.a + 1];
        ++adj_off[b.b + 1];
    }
    for (int i = 0; i < ns; ++i) adj_off[i + 1] += adj_off[i];
    adj.resize(static_cast<std::size_t>(adj_off[ns]));
    std::vector<std::int32_t> fill(adj_off.begin(), adj_off.end() - 1);
    for (std::int32_t i = 0; i < static_cast<std::int32_t>(bonds.size()); ++i) {
        const Bond& b = bonds[i];
        adj[fill[b.a]++] = {i, b.b};
        adj[fill[b.b]++] = {i, b.a};
    }
}

std::uint64_t BondGraph::hash() const {
    std::uint64_t h = spec.hash();
    for (const Bond& b : bonds) {
        const std::int64_t k[3] = {b.a, b.b, (static_cast<std::int64_t>(b.cls) << 8) | static_cast<std::uint8_t>(b.sign)};
        h = fnv1a(k, sizeof(k), h);
    }
    return h;
}

namespace {

// Directions used for the rotation system and for bond lookup by origin.
enum Dir : int { DIR_T = 0, DIR_X = 1, DIR_Y = 2 };

struct DirectBuild {
    BondGraph g;
    // bond index by (origin site, direction); switch pairs are stored
    // separately since they duplicate the temporal slot
    std::vector<std::array<std::int32_t, 3>> origin_bond;

    std::int32_t bond_at(int site, int dir) const {
        const std::int32_t b = origin_bond[site][dir];
        assert(b >= 0);
        return b;
    }
};

DirectBuild build_standard_cut(const ReplicaLatticeSpec& spec) {
    Geometry geo(spec);
    DirectBuild out;
    BondGraph& g = out.g;
    g.spec = spec;
    const int nsite = geo.n_sites();
    g.sites.resize(nsite);
    for (int r = 0; r < geo.n; ++r)
        for (int t = 0; t < geo.nt; ++t)
            for (int x = 0; x < geo.ns; ++x)
                for (int y = 0; y < geo.ns2; ++y)
                    g.sites[geo.site_id(r, t, x, y)] = {r, static_cast<std::int16_t>(t),
                                                        static_cast<std::int16_t>(x),
                                                        static_cast<std::int16_t>(y), false};
    out.origin_bond.assign(nsite, {-1, -1, -1});

    const int l = spec.slab_length;
    const bool proto = spec.protocol_bonds;
    const int x_move = proto ? (spec.bc_s == Boundary::Free ? spec.cut_offset + l
                                                            : (spec.cut_offset + l) % geo.ns)
                             : -1;

    const bool embed = spec.dimension == 2 && !proto;
    if (embed) g.slots.assign(nsite, {-1, -1, -1, -1});

    auto add_bond = [&](int a, int b, BondClass cls, int sign, int origin, int dir) {
        const std::int32_t id = static_cast<std::int32_t>(g.bonds.size());
        g.bonds.push_back({a, b, cls, static_cast<std::int8_t>(sign)});
        if (origin >= 0) out.origin_bond[origin][dir] = id;
        if (embed && dir != DIR_Y) {
            const int slot_out = (dir == DIR_T) ? 0 : 1;
            const int slot_in = (dir == DIR_T) ? 2 : 3;
            g.slots[a][slot_out] = 2 * id;
            g.slots[b][slot_in] = 2 * id + 1;
        }
        return id;
    };

    for (int r = 0; r < geo.n; ++r)
        for (int t = 0; t < geo.nt; ++t)
            for (int x = 0; x < geo.ns; ++x)
                for (int y = 0; y < geo.ns2; ++y) {
                    const int a = geo.site_id(r, t, x, y);
                    // temporal
                    if (geo.t_step_exists(t)) {
                        const int t2 = (t + 1) % geo.nt;
                        const bool seam = geo.seam_layer(t);
                        const int sign = (spec.bc_tau == Boundary::Antiperiodic && t + 1 == geo.nt) ? -1 : 1;
                        if (proto && seam && x == x_move) {
                            const int r_up = (r + 1) % geo.n;
                            add_bond(a, geo.site_id(r_up, t2, x, y), BondClass::SwitchOff, sign, -1, DIR_T);
                            add_bond(a, geo.site_id(r, t2, x, y), BondClass::SwitchOn, sign, -1, DIR_T);
                        } else {
                            const bool cross = seam && geo.in_slab(x, proto ? l + 1 : l);
                            const int r2 = cross ? (r + 1) % geo.n : r;
                            add_bond(a, geo.site_id(r2, t2, x, y),
                                     cross ? BondClass::TemporalInter : BondClass::TemporalIntra, sign, a,
                                     DIR_T);
                        }
                    }
                    // spatial x
                    if (geo.x_step_exists(x)) {
                        const int x2 = (x + 1) % geo.ns;
                        const int sign = (spec.bc_s == Boundary::Antiperiodic && x + 1 == geo.ns) ? -1 : 1;
                        add_bond(a, geo.site_id(r, t, x2, y), BondClass::Spatial, sign, a, DIR_X);
                    }
                    // spatial y
                    if (geo.y_step_exists(y)) {
                        const int y2 = (y + 1) % geo.ns2;
                        const int sign = (spec.bc_s2 == Boundary::Antiperiodic && y + 1 == geo.ns2) ? -1 : 1;
                        add_bond(a, geo.site_id(r, t, x, y2), BondClass::Spatial, sign, a, DIR_Y);
                    }
                }

    g.has_embedding = embed;
    g.build_adjacency();
    return out;
}

}  // namespace

std::vector<std::vector<std::int32_t>> trace_faces(const BondGraph& g) {
    if (!g.has_embedding) throw std::invalid_argument("trace_faces: graph carries no 2D embedding");
    const int nb = g.n_bonds();
    // half-edge h = 2*bond + end; end 0 leaves bond.a, end 1 leaves bond.b
    std::vector<std::int32_t> he_site(2 * nb), he_slot(2 * nb, -1);
    for (int i = 0; i < g.n_sites(); ++i)
        for (int d = 0; d < 4; ++d) {
            const std::int32_t h = g.slots[i][d];
            if (h >= 0) {
                he_site[h] = i;
                he_slot[h] = d;
            }
        }
    for (int h = 0; h < 2 * nb; ++h)
        if (he_slot[h] < 0) throw std::logic_error("trace_faces: incomplete rotation system");

    std::vector<std::int32_t> face_of(2 * nb, -1);
    std::vector<std::vector<std::int32_t>> faces;
    for (int h0 = 0; h0 < 2 * nb; ++h0) {
        if (face_of[h0] >= 0) continue;
        const int fid = static_cast<int>(faces.size());
        faces.emplace_back();
        int h = h0;
        do {
            face_of[h] = fid;
            faces[fid].push_back(h);
            const int opp = h ^ 1;
            const int v = he_site[opp];
            const int d = he_slot[opp];
            int next = -1;
            for (int k = 1; k <= 4; ++k) {
                const int hh = g.slots[v][(d + k) % 4];
                if (hh >= 0) {
                    next = hh;
                    break;
                }
            }
            h = next;
        } while (h != h0);
    }
    return faces;
}

BondGraph face_dual(const BondGraph& g) {
    const auto faces = trace_faces(g);
    const int nb = g.n_bonds();
    std::vector<std::int32_t> face_of(2 * nb);
    for (std::size_t f = 0; f < faces.size(); ++f)
        for (const std::int32_t h : faces[f]) face_of[h] = static_cast<std::int32_t>(f);

    BondGraph d;
    d.spec = g.spec;
    d.spec.variant = GeometryVariant::EnhancedVertex;
    d.sites.resize(faces.size());
    const int n = g.spec.n_replicas;
    for (std::size_t f = 0; f < faces.size(); ++f) {
        // representative coordinates: lexicographic minimum over corners
        Site rep{};
        bool first = true;
        int n_inter = 0, n_intra = 0;
        std::vector<bool> replicas_seen(static_cast<std::size_t>(n), false);
        for (const std::int32_t h : faces[f]) {
            const Bond& b = g.bonds[h >> 1];
            if (b.cls == BondClass::TemporalInter) ++n_inter;
            if (b.cls == BondClass::TemporalIntra) ++n_intra;
            const Site& s = g.sites[(h & 1) ? b.b : b.a];
            if (s.replica >= 0) replicas_seen[s.replica] = true;
            const auto key = std::tuple(s.replica, s.tau, s.x, s.y);
            if (first || key < std::tuple(rep.replica, rep.tau, rep.x, rep.y)) rep = s;
            first = false;
        }
        const bool branch = n > 1 && static_cast<int>(faces[f].size()) == 4 * n && n_inter == n && n_intra == n;
        d.sites[f] = {branch ? -1 : rep.replica, rep.tau, rep.x, rep.y, branch};
        if (branch) d.branch_sites.push_back(static_cast<std::int32_t>(f));
    }
    d.bonds.reserve(nb);
    for (int b = 0; b < nb; ++b)
        d.bonds.push_back({face_of[2 * b], face_of[2 * b + 1], g.bonds[b].cls, g.bonds[b].sign});
    d.has_embedding = false;
    d.build_adjacency();
    return d;
}

BondGraph build_replica_lattice(const ReplicaLatticeSpec& spec) {
    spec.validate();
    switch (spec.variant) {
        case GeometryVariant::StandardCut:
            return build_standard_cut(spec).g;
        case GeometryVariant::EnhancedVertex: {
            if (spec.dimension != 2)
                throw std::invalid_argument(
                    "EnhancedVertex spin lattices are built in 2D only; the 3D enhanced geometry "
                    "lives on the gauge side (build_gauge_replica)");
            if (spec.protocol_bonds)
                throw std::invalid_argument("protocol bonds are not supported on the dual geometry");
            ReplicaLatticeSpec direct = spec;
            direct.variant = GeometryVariant::StandardCut;
            return face_dual(build_standard_cut(direct).g);
        }
        case GeometryVariant::CentralPlaquette:
            throw std::invalid_argument("CentralPlaquette is a gauge-side geometry; use build_gauge_replica");
    }
    throw std::logic_error("unreachable");
}

std::vector<std::pair<std::int32_t, std::int32_t>> switch_pairs(const BondGraph& g) {
    if (!g.spec.protocol_bonds)
        throw std::invalid_argument("switch_pairs: graph was not built with protocol bonds");
    std::map<std::int32_t, std::pair<std::int32_t, std::int32_t>> by_origin;
    for (std::int32_t i = 0; i < static_cast<std::int32_t>(g.bonds.size()); ++i) {
        const Bond& b = g.bonds[i];
        if (b.cls == BondClass::SwitchOff) by_origin[b.a].first = i + 1;
        if (b.cls == BondClass::SwitchOn) by_origin[b.a].second = i + 1;
    }
    std::vector<std::pair<std::int32_t, std::int32_t>> pairs;
    pairs.reserve(by_origin.size());
    for (const auto& [origin, p] : by_origin) {
        if (p.first == 0 || p.second == 0) throw std::logic_error("switch_pairs: unpaired switch bond");
        pairs.emplace_back(p.first - 1, p.second - 1);
    }
    return pairs;
}

BondGraph apply_switches(const BondGraph& g) {
    BondGraph out;
    out.spec = g.spec;
    out.spec.protocol_bonds = false;
    out.sites = g.sites;
    out.branch_sites = g.branch_sites;
    for (const Bond& b : g.bonds) {
        if (b.cls == BondClass::SwitchOff) continue;
        Bond nb = b;
        if (nb.cls == BondClass::SwitchOn) nb.cls = BondClass::TemporalIntra;
        out.bonds.push_back(nb);
    }
    out.has_embedding = false;
    out.build_adjacency();
    return out;
}

std::vector<std::array<std::int64_t, 4>> canonical_bonds(const BondGraph& g, bool class_blind) {
    std::vector<std::int32_t> order(g.sites.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<std::int32_t>(i);
    std::sort(order.begin(), order.end(), [&](std::int32_t a, std::int32_t b) {
        const Site &sa = g.sites[a], &sb = g.sites[b];
        return std::tuple(sa.replica, sa.tau, sa.x, sa.y) < std::tuple(sb.replica, sb.tau, sb.x, sb.y);
    });
    std::vector<std::int32_t> rank(g.sites.size());
    for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<std::int32_t>(i);
    for (std::size_t i = 1; i < order.size(); ++i) {
        const Site &sa = g.sites[order[i - 1]], &sb = g.sites[order[i]];
        if (std::tuple(sa.replica, sa.tau, sa.x, sa.y) == std::tuple(sb.replica, sb.tau, sb.x, sb.y))
            throw std::invalid_argument("canonical_bonds: site coordinates are not unique");
    }
    std::vector<std::array<std::int64_t, 4>> out;
    out.reserve(g.bonds.size());
    for (const Bond& b : g.bonds) {
        std::int64_t lo = rank[b.a], hi = rank[b.b];
        if (lo > hi) std::swap(lo, hi);
        out.push_back({lo, hi, class_blind ? 0 : static_cast<std::int64_t>(b.cls), b.sign});
    }
    std::sort(out.begin(), out.end());
    return out;
}

void dump_bonds_csv(const BondGraph& g, std::ostream& os) {
    os << "site_a,site_b,class,sign\n";
    for (const Bond& b : g.bonds)
        os << b.a << ',' << b.b << ',' << to_string(b.cls) << ',' << static_cast<int>(b.sign) << '\n';
}

// --- 3D replica complex and its dual --------------------------------------

namespace {

struct Face3D {
    std::vector<std::int32_t> edges;
    std::vector<std::int8_t> orient;
    bool winding = false;
    std::int32_t cell_a = -1, cell_b = -1;  // -1 = outer region
};

struct Complex3D {
    DirectBuild direct;
    std::vector<Face3D> faces;
    int n_cells = 0;
    bool has_boundary = false;
};

// Enumerates the faces and 3-cells of the glued n-sheet cubic complex.
// Faces in mixed slab-boundary columns at the seam wind through all
// replicas (length 4n); so do the corresponding 3-cells.
Complex3D build_complex3d(const ReplicaLatticeSpec& spec) {
    Geometry geo(spec);
    Complex3D cx;
    cx.direct = build_standard_cut(spec);
    const int l = spec.slab_length;
    const int n = geo.n;

    auto bond = [&](int r, int t, int x, int y, int dir) {
        return cx.direct.bond_at(geo.site_id(r % n, (t + geo.nt) % geo.nt, (x + geo.ns) % geo.ns,
                                             (y + geo.ns2) % geo.ns2),
                                 dir);
    };
    auto mixed_col = [&](int x) {
        return geo.x_step_exists(x) && geo.in_slab(x, l) != geo.in_slab((x + 1) % geo.ns, l);
    };
    auto crossing_col = [&](int x) {  // both temporal edges of the column cross
        return geo.in_slab(x, l) && geo.in_slab((x + 1) % geo.ns, l);
    };

    // cells: ordinary cubes keyed (r, t, x, y); winding cubes keyed (x, y)
    std::map<std::array<int, 4>, std::int32_t> cube_id;
    std::map<std::array<int, 2>, std::int32_t> winding_cube_id;
    auto cube_exists = [&](int t, int x, int y) {
        return geo.t_step_exists(t) && geo.x_step_exists(x) && geo.y_step_exists(y);
    };
    for (int t = 0; t < geo.nt; ++t)
        for (int x = 0; x < geo.ns; ++x)
            for (int y = 0; y < geo.ns2; ++y) {
                if (!cube_exists(t, x, y)) continue;
                if (geo.seam_layer(t) && mixed_col(x)) {
                    winding_cube_id[{x, y}] = cx.n_cells++;
                } else {
                    for (int r = 0; r < n; ++r) cube_id[{r, t, x, y}] = cx.n_cells++;
                }
            }

    // cell lookup from the bottom replica of the cube at layer t
    auto cell_from_bottom = [&](int r, int t, int x, int y) -> std::int32_t {
        if (!cube_exists(t, x, y)) {
            cx.has_boundary = true;
            return -1;
        }
        if (geo.seam_layer(t) && mixed_col(x)) return winding_cube_id.at({x, y});
        return cube_id.at({((r % n) + n) % n, t, x, y});
    };
    // cell lookup from the top replica (row t+1) of the cube at layer t
    auto cell_from_top = [&](int r, int t, int x, int y) -> std::int32_t {
        if (!cube_exists(t, x, y)) {
            cx.has_boundary = true;
            return -1;
        }
        if (geo.seam_layer(t)) {
            if (mixed_col(x)) return winding_cube_id.at({x, y});
            if (crossing_col(x)) return cube_id.at({(r - 1 + n) % n, t, x, y});
        }
        return cube_id.at({((r % n) + n) % n, t, x, y});
    };

    auto add_face = [&](Face3D f) { cx.faces.push_back(std::move(f)); };

    for (int t = 0; t < geo.nt; ++t)
        for (int x = 0; x < geo.ns; ++x)
            for (int y = 0; y < geo.ns2; ++y) {
                const bool tt = geo.t_step_exists(t);
                const bool xx = geo.x_step_exists(x);
                const bool yy = geo.y_step_exists(y);
                const bool seam = tt && geo.seam_layer(t);
                const int t2 = (t + 1) % geo.nt;

                // xy faces (one per replica)
                if (xx && yy)
                    for (int r = 0; r < n; ++r) {
                        Face3D f;
                        f.edges = {bond(r, t, x, y, DIR_X), bond(r, t, x + 1, y, DIR_Y),
                                   bond(r, t, x, y + 1, DIR_X), bond(r, t, x, y, DIR_Y)};
                        f.orient = {1, 1, -1, -1};
                        f.cell_a = cell_from_bottom(r, t, x, y);  // cube above (layer t)
                        f.cell_b = cell_from_top(r, (t - 1 + geo.nt) % geo.nt, x, y);
                        add_face(std::move(f));
                    }

                // ty faces
                if (tt && yy)
                    for (int r = 0; r < n; ++r) {
                        const bool cross = seam && geo.in_slab(x, l);
                        const int r2 = cross ? (r + 1) % n : r;
                        Face3D f;
                        f.edges = {bond(r, t, x, y, DIR_Y), bond(r, t, x, y + 1, DIR_T),
                                   bond(r2, t2, x, y, DIR_Y), bond(r, t, x, y, DIR_T)};
                        f.orient = {1, 1, -1, -1};
                        f.cell_a = cell_from_bottom(r, t, x, y);
                        f.cell_b = cell_from_bottom(r, t, (x - 1 + geo.ns) % geo.ns, y);
                        add_face(std::move(f));
                    }

                // tx faces
                if (tt && xx) {
                    const bool m0 = geo.in_slab(x, l);
                    const bool m1 = geo.in_slab((x + 1) % geo.ns, l);
                    if (seam && m0 != m1) {
                        // winding face, one per (x, y), length 4n
                        Face3D f;
                        f.winding = true;
                        if (m1 && !m0) {
                            for (int r = 0; r < n; ++r) {
                                f.edges.push_back(bond(r, t, x, y, DIR_X));
                                f.orient.push_back(1);
                                f.edges.push_back(bond(r, t, x + 1, y, DIR_T));
                                f.orient.push_back(1);
                                f.edges.push_back(bond((r + 1) % n, t2, x, y, DIR_X));
                                f.orient.push_back(-1);
                                f.edges.push_back(bond((r + 1) % n, t, x, y, DIR_T));
                                f.orient.push_back(-1);
                            }
                        } else {
                            int r = 0;
                            for (int k = 0; k < n; ++k) {
                                f.edges.push_back(bond(r, t, x, y, DIR_X));
                                f.orient.push_back(1);
                                f.edges.push_back(bond(r, t, x + 1, y, DIR_T));
                                f.orient.push_back(1);
                                f.edges.push_back(bond(r, t2, x, y, DIR_X));
                                f.orient.push_back(-1);
                                f.edges.push_back(bond((r - 1 + n) % n, t, x, y, DIR_T));
                                f.orient.push_back(-1);
                                r = (r - 1 + n) % n;
                            }
                        }
                        f.cell_a = cell_from_bottom(0, t, x, y);
                        f.cell_b = cell_from_bottom(0, t, x, (y - 1 + geo.ns2) % geo.ns2);
                        add_face(std::move(f));
                    } else {
                        for (int r = 0; r < n; ++r) {
                            const bool cross = seam && m0;  // m0 == m1 here
                            const int r2 = cross ? (r + 1) % n : r;
                            Face3D f;
                            f.edges = {bond(r, t, x, y, DIR_X), bond(r, t, x + 1, y, DIR_T),
                                       bond(r2, t2, x, y, DIR_X), bond(r, t, x, y, DIR_T)};
                            f.orient = {1, 1, -1, -1};
                            f.cell_a = cell_from_bottom(r, t, x, y);
                            f.cell_b = cell_from_bottom(r, t, x, (y - 1 + geo.ns2) % geo.ns2);
                            add_face(std::move(f));
                        }
                    }
                }
            }

    for (const Face3D& f : cx.faces)
        if (f.cell_a < 0 || f.cell_b < 0) cx.has_boundary = true;
    return cx;
}

}  // namespace

std::vector<std::int32_t> gauge_spanning_tree(const GaugeReplicaGraph& g, bool alt) {
    std::vector<std::vector<std::pair<std::int32_t, std::int32_t>>> adj(g.n_sites);
    for (std::int32_t i = 0; i < g.n_links; ++i) {
        const auto [a, b] = g.link_ends[i];
        adj[a].push_back({i, b});
        adj[b].push_back({i, a});
    }
    if (alt)
        for (auto& v : adj) std::reverse(v.begin(), v.end());
    std::vector<bool> seen(g.n_sites, false);
    std::vector<std::int32_t> tree;
    const int root = alt ? g.n_sites - 1 : 0;
    std::queue<std::int32_t> q;
    q.push(root);
    seen[root] = true;
    while (!q.empty()) {
        const int v = q.front();
        q.pop();
        for (const auto& [link, w] : adj[v])
            if (!seen[w]) {
                seen[w] = true;
                tree.push_back(link);
                q.push(w);
            }
    }
    for (bool s : seen)
        if (!s) throw std::invalid_argument("gauge graph is not connected");
    std::sort(tree.begin(), tree.end());
    return tree;
}

GaugeReplicaGraph build_gauge_replica(const ReplicaLatticeSpec& spec) {
    spec.validate();
    if (spec.dimension != 3) throw std::invalid_argument("build_gauge_replica: only D = 3 is supported");
    if (spec.protocol_bonds) throw std::invalid_argument("build_gauge_replica: protocol bonds are spin-side only");
    if (spec.n_tau < 2 || spec.n_s < 2 || spec.n_s2 < 2)
        throw std::invalid_argument("build_gauge_replica: all extents must be >= 2");
    ReplicaLatticeSpec base = spec;
    base.variant = GeometryVariant::StandardCut;
    Complex3D cx = build_complex3d(base);
    const BondGraph& direct = cx.direct.g;

    GaugeReplicaGraph g;
    g.spec = spec;

    if (spec.variant == GeometryVariant::CentralPlaquette) {
        if (spec.n_replicas < 1) throw std::invalid_argument("bad replica count");
        // gauge fields on the edges of the replica complex; plaquettes on its
        // faces; faces encircling the singularity have length 4n
        g.n_links = direct.n_bonds();
        g.n_sites = direct.n_sites();
        g.link_shared.assign(g.n_links, false);
        g.link_ends.reserve(g.n_links);
        for (const Bond& b : direct.bonds) g.link_ends.push_back({b.a, b.b});
        g.plaquettes.reserve(cx.faces.size());
        for (const Face3D& f : cx.faces) {
            g.plaquettes.push_back({f.edges, f.orient});
            if (f.winding) g.central_plaquettes.push_back(f.edges);
        }
    } else {
        // dual complex: links on faces, plaquettes on edges, sites on 3-cells
        // plus one outer site when the complex has a boundary
        g.n_links = static_cast<int>(cx.faces.size());
        const int outer = cx.n_cells;
        g.n_sites = cx.n_cells + (cx.has_boundary ? 1 : 0);
        g.link_shared.assign(g.n_links, false);
        g.link_ends.reserve(g.n_links);
        g.plaquettes.assign(direct.n_bonds(), {});
        for (int f = 0; f < g.n_links; ++f) {
            const Face3D& face = cx.faces[f];
            g.link_shared[f] = face.winding;
            g.link_ends.push_back({face.cell_a < 0 ? outer : face.cell_a,
                                   face.cell_b < 0 ? outer : face.cell_b});
            for (std::size_t k = 0; k < face.edges.size(); ++k) {
                g.plaquettes[face.edges[k]].links.push_back(f);
                g.plaquettes[face.edges[k]].orient.push_back(face.orient[k]);
            }
        }
    }

    g.maximal_tree = gauge_spanning_tree(g, false);
    return g;
}

std::uint64_t GaugeReplicaGraph::hash() const {
    std::uint64_t h = spec.hash();
    h = fnv1a(&n_links, sizeof(n_links), h);
    for (const GaugePlaquette& p : plaquettes) h = fnv1a(p.links.data(), p.links.size() * sizeof(std::int32_t), h);
    return h;
}

}  // namespace renyicf

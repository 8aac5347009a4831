// Exact enumeration oracles.  Configurations are visited in Gray-code
// order so each step flips one degree of freedom; the action is updated
// incrementally and re-synchronized from scratch at block boundaries.
// Weights are accumulated as Kahan-compensated long double sums of
// exp(A - A_max) with A_max = sum |J|, so the log-sum-exp is streamed
// without storing anything.

#include "renyicf/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace renyicf {

namespace {

struct KahanAcc {
    long double sum = 0.0L, c = 0.0L;
    void add(long double v) {
        const long double y = v - c;
        const long double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
};

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hc = std::thread::hardware_concurrency();
    return static_cast<int>(std::min(hc == 0 ? 1u : hc, 8u));
}

// Runs fn(block_index) over all blocks on a small thread pool; the caller
// merges per-block results in index order, so the total is independent of
// the thread count.
template <typename Fn>
void run_blocks(std::uint64_t n_blocks, int threads, Fn&& fn) {
    if (threads <= 1 || n_blocks <= 1) {
        for (std::uint64_t i = 0; i < n_blocks; ++i) fn(i);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::uint64_t i = next.fetch_add(1);
            if (i >= n_blocks) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    const int n = std::min<std::uint64_t>(threads, n_blocks);
    pool.reserve(n);
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

void check_cap(int dof, const EnumerationOptions& opts, const char* what) {
    if (dof > opts.max_dof) {
        std::ostringstream os;
        os << what << ": " << dof << " binary degrees of freedom exceed the cap of " << opts.max_dof
           << " (2^" << dof << " ~ " << std::pow(2.0, dof) << " configurations, roughly "
           << std::pow(2.0, dof - 27) << " s per sweep at 10 ns/config)";
        throw std::runtime_error(os.str());
    }
    if (dof >= 63) throw std::runtime_error("enumeration index would overflow");
}

}  // namespace

ExactResult enumerate_spin_Z(const BondGraph& graph, const CouplingField& couplings,
                             EnumerationOptions opts) {
    const int n = graph.n_sites();
    if (couplings.size() != graph.n_bonds()) throw std::invalid_argument("enumerate_spin_Z: size mismatch");
    check_cap(n, opts, "enumerate_spin_Z");

    double a_max = 0.0;
    for (int b = 0; b < graph.n_bonds(); ++b) a_max += std::abs(couplings.j[b]);

    const std::uint64_t total = 1ULL << n;
    const std::uint64_t block = std::min<std::uint64_t>(total, 1ULL << opts.block_bits);
    const std::uint64_t n_blocks = total / block;
    std::vector<long double> partial(n_blocks, 0.0L), partial_act(n_blocks, 0.0L);

    run_blocks(n_blocks, resolve_threads(opts.threads), [&](std::uint64_t ib) {
        const std::uint64_t i0 = ib * block;
        // state at Gray(i0)
        std::vector<std::int8_t> s(n);
        const std::uint64_t g0 = i0 ^ (i0 >> 1);
        for (int i = 0; i < n; ++i) s[i] = (g0 >> i) & 1 ? -1 : 1;
        double act = 0.0;  // A = sum J sign sigma sigma ; weight = exp(A - a_max)
        for (int b = 0; b < graph.n_bonds(); ++b)
            act += couplings.j[b] * couplings.sign[b] * s[graph.bonds[b].a] * s[graph.bonds[b].b];
        KahanAcc acc, acc_act;
        for (std::uint64_t i = i0;;) {
            const long double w = std::exp(static_cast<long double>(act - a_max));
            acc.add(w);
            if (opts.want_mean_action) acc_act.add(w * static_cast<long double>(act));
            if (++i >= i0 + block) break;
            const int flip = std::countr_zero(i);
            double d = 0.0;
            for (int k = graph.adj_off[flip]; k < graph.adj_off[flip + 1]; ++k) {
                const auto [b, j] = graph.adj[k];
                d += couplings.j[b] * couplings.sign[b] * s[j];
            }
            act -= 2.0 * s[flip] * d;
            s[flip] = static_cast<std::int8_t>(-s[flip]);
        }
        partial[ib] = acc.sum;
        partial_act[ib] = acc_act.sum;
    });

    KahanAcc tot, tot_act;
    for (std::uint64_t ib = 0; ib < n_blocks; ++ib) {
        tot.add(partial[ib]);
        tot_act.add(partial_act[ib]);
    }
    ExactResult r;
    r.n_configs = total;
    r.geometry_hash = graph.hash();
    r.log_z = a_max + static_cast<double>(std::log(tot.sum));
    if (opts.want_mean_action) r.mean_action = static_cast<double>(tot_act.sum / tot.sum);
    return r;
}

ExactResult enumerate_spin_Z(const BondGraph& graph, double beta, EnumerationOptions opts) {
    ExactResult r = enumerate_spin_Z(graph, couplings_at(graph, beta, 0.0), opts);
    r.beta = beta;
    return r;
}

ExactResult enumerate_gauge_Z(const GaugeReplicaGraph& graph, double beta_star, EnumerationOptions opts,
                              const std::vector<std::int32_t>* tree_override,
                              const std::vector<std::int8_t>* plaq_signs) {
    const std::vector<std::int32_t>& tree = tree_override ? *tree_override : graph.maximal_tree;
    std::vector<bool> in_tree(graph.n_links, false);
    for (const std::int32_t l : tree) in_tree[l] = true;
    std::vector<std::int32_t> free_links;
    for (std::int32_t l = 0; l < graph.n_links; ++l)
        if (!in_tree[l]) free_links.push_back(l);
    const int n = static_cast<int>(free_links.size());
    check_cap(n, opts, "enumerate_gauge_Z");

    // plaquette incidence restricted to free links
    std::vector<std::int32_t> dof_of_link(graph.n_links, -1);
    for (int i = 0; i < n; ++i) dof_of_link[free_links[i]] = i;
    const int np = static_cast<int>(graph.plaquettes.size());
    std::vector<std::vector<std::int32_t>> plaq_of_dof(n);
    for (int q = 0; q < np; ++q)
        for (const std::int32_t l : graph.plaquettes[q].links) {
            const std::int32_t d = dof_of_link[l];
            if (d >= 0) plaq_of_dof[d].push_back(q);
        }

    std::vector<double> coupling(np, beta_star);
    if (plaq_signs) {
        if (static_cast<int>(plaq_signs->size()) != np)
            throw std::invalid_argument("enumerate_gauge_Z: plaquette sign size mismatch");
        for (int q = 0; q < np; ++q) coupling[q] *= (*plaq_signs)[q];
    }
    double a_max = 0.0;
    for (int q = 0; q < np; ++q) a_max += std::abs(coupling[q]);

    const std::uint64_t total = 1ULL << n;
    const std::uint64_t block = std::min<std::uint64_t>(total, 1ULL << opts.block_bits);
    const std::uint64_t n_blocks = total / block;
    std::vector<long double> partial(n_blocks, 0.0L);

    run_blocks(n_blocks, resolve_threads(opts.threads), [&](std::uint64_t ib) {
        const std::uint64_t i0 = ib * block;
        std::vector<std::int8_t> u(n);
        const std::uint64_t g0 = i0 ^ (i0 >> 1);
        for (int i = 0; i < n; ++i) u[i] = (g0 >> i) & 1 ? -1 : 1;
        // plaquette products with tree links at +1
        std::vector<std::int8_t> pq(np, 1);
        for (int q = 0; q < np; ++q) {
            int p = 1;
            for (const std::int32_t l : graph.plaquettes[q].links) {
                const std::int32_t d = dof_of_link[l];
                if (d >= 0) p *= u[d];
            }
            pq[q] = static_cast<std::int8_t>(p);
        }
        double act = 0.0;
        for (int q = 0; q < np; ++q) act += coupling[q] * pq[q];
        KahanAcc acc;
        for (std::uint64_t i = i0;;) {
            acc.add(std::exp(static_cast<long double>(act - a_max)));
            if (++i >= i0 + block) break;
            const int flip = std::countr_zero(i);
            for (const std::int32_t q : plaq_of_dof[flip]) {
                act -= 2.0 * coupling[q] * pq[q];
                pq[q] = static_cast<std::int8_t>(-pq[q]);
            }
            u[flip] = static_cast<std::int8_t>(-u[flip]);
        }
        partial[ib] = acc.sum;
    });

    KahanAcc tot;
    for (std::uint64_t ib = 0; ib < n_blocks; ++ib) tot.add(partial[ib]);
    ExactResult r;
    r.n_configs = total;
    r.beta = beta_star;
    r.geometry_hash = graph.hash();
    const double n_g = static_cast<double>(tree.size());
    r.log_z = a_max + static_cast<double>(std::log(tot.sum)) + n_g * std::log(2.0);
    return r;
}

ExactResult enumerate_sectors(const ReplicaLatticeSpec& torus_spec, double beta, EnumerationOptions opts) {
    if (torus_spec.bc_tau == Boundary::Free || torus_spec.bc_s == Boundary::Free ||
        (torus_spec.dimension == 3 && torus_spec.bc_s2 == Boundary::Free))
        throw std::invalid_argument("enumerate_sectors: torus boundary conditions required");
    const int dirs = torus_spec.dimension;
    ExactResult out;
    out.beta = beta;
    KahanAcc z_tot;
    double best = -1e300;
    std::vector<std::pair<std::string, double>> vals;
    for (int mask = 0; mask < (1 << dirs); ++mask) {
        ReplicaLatticeSpec s = torus_spec;
        s.bc_tau = (mask & 1) ? Boundary::Antiperiodic : Boundary::Periodic;
        s.bc_s = (mask & 2) ? Boundary::Antiperiodic : Boundary::Periodic;
        if (dirs == 3) s.bc_s2 = (mask & 4) ? Boundary::Antiperiodic : Boundary::Periodic;
        const BondGraph g = build_replica_lattice(s);
        const ExactResult r = enumerate_spin_Z(g, beta, opts);
        std::string key;
        for (int d = 0; d < dirs; ++d) key += (mask >> d) & 1 ? 'a' : 'p';
        vals.emplace_back(key, r.log_z);
        best = std::max(best, r.log_z);
        out.n_configs += r.n_configs;
    }
    for (const auto& [key, lz] : vals) {
        out.sector_log_z[key] = lz;
        z_tot.add(std::exp(static_cast<long double>(lz - best)));
    }
    out.log_z = best + static_cast<double>(std::log(z_tot.sum));  // log of the plain sector sum
    out.geometry_hash = torus_spec.hash();
    return out;
}

double exact_renyi(const ReplicaLatticeSpec& spec, double beta, EnumerationOptions opts) {
    if (spec.n_replicas < 2) throw std::invalid_argument("exact_renyi: needs n >= 2 replicas");
    const BondGraph gn = build_replica_lattice(spec);
    ReplicaLatticeSpec one = spec;
    one.n_replicas = 1;
    const BondGraph g1 = build_replica_lattice(one);
    const double log_zn = enumerate_spin_Z(gn, beta, opts).log_z;
    const double log_z1 = enumerate_spin_Z(g1, beta, opts).log_z;
    return (log_zn - spec.n_replicas * log_z1) / (1.0 - spec.n_replicas);
}

// --- homology of the replica complex over GF(2) -----------------------------

namespace {

struct Gf2Basis {
    std::vector<std::vector<std::uint64_t>> rows;
    std::vector<int> pivots;
    int words;

    explicit Gf2Basis(int n_bits) : words((n_bits + 63) / 64) {}

    static int lowest_bit(const std::vector<std::uint64_t>& r) {
        for (std::size_t w = 0; w < r.size(); ++w)
            if (r[w]) return static_cast<int>(w) * 64 + std::countr_zero(r[w]);
        return -1;
    }
    std::vector<std::uint64_t> reduce(std::vector<std::uint64_t> v) const {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const int p = pivots[i];
            if (v[p >> 6] & (1ULL << (p & 63)))
                for (int w = 0; w < words; ++w) v[w] ^= rows[i][w];
        }
        return v;
    }
    bool insert(std::vector<std::uint64_t> v) {
        v = reduce(std::move(v));
        const int p = lowest_bit(v);
        if (p < 0) return false;
        rows.push_back(std::move(v));
        pivots.push_back(p);
        return true;
    }
};

}  // namespace

std::vector<std::vector<std::int32_t>> topological_frustrations(const BondGraph& direct,
                                                                const GaugeReplicaGraph& gauge) {
    const int ne = direct.n_bonds();
    if (static_cast<int>(gauge.plaquettes.size()) != ne)
        throw std::invalid_argument(
            "topological_frustrations: gauge plaquettes must be indexed by direct bonds "
            "(EnhancedVertex dual)");
    const int words = (ne + 63) / 64;
    auto bit = [&](std::vector<std::uint64_t>& r, int e) { r[e >> 6] ^= 1ULL << (e & 63); };

    // span of dual-link flips: flipping link f frustrates the plaquettes of
    // every edge whose plaquette contains f
    std::vector<std::vector<std::int32_t>> link_edges(gauge.n_links);
    for (int e = 0; e < ne; ++e)
        for (const std::int32_t f : gauge.plaquettes[e].links) link_edges[f].push_back(e);
    Gf2Basis span(ne);
    for (int f = 0; f < gauge.n_links; ++f) {
        std::vector<std::uint64_t> r(words, 0);
        for (const std::int32_t e : link_edges[f]) bit(r, e);
        span.insert(std::move(r));
    }

    // cycle space of the direct graph from fundamental cycles of a BFS tree
    std::vector<std::vector<std::uint64_t>> root_path(direct.n_sites(), std::vector<std::uint64_t>(words, 0));
    std::vector<bool> seen(direct.n_sites(), false), edge_in_tree(ne, false);
    std::queue<std::int32_t> q;
    q.push(0);
    seen[0] = true;
    while (!q.empty()) {
        const int v = q.front();
        q.pop();
        for (int k = direct.adj_off[v]; k < direct.adj_off[v + 1]; ++k) {
            const auto [b, w] = direct.adj[k];
            if (seen[w]) continue;
            seen[w] = true;
            edge_in_tree[b] = true;
            root_path[w] = root_path[v];
            bit(root_path[w], b);
            q.push(w);
        }
    }

    std::vector<std::vector<std::int32_t>> out;
    for (int e = 0; e < ne; ++e) {
        if (edge_in_tree[e]) continue;
        std::vector<std::uint64_t> cyc(words, 0);
        bit(cyc, e);
        for (int w = 0; w < words; ++w)
            cyc[w] ^= root_path[direct.bonds[e].a][w] ^ root_path[direct.bonds[e].b][w];
        const auto residue = span.reduce(cyc);
        if (Gf2Basis::lowest_bit(residue) < 0) continue;
        std::vector<std::int32_t> edges;
        for (int i = 0; i < ne; ++i)
            if (residue[i >> 6] & (1ULL << (i & 63))) edges.push_back(i);
        out.push_back(std::move(edges));
        span.insert(residue);
    }
    return out;
}

double gauge_sector_sum_log_z(const GaugeReplicaGraph& gauge, double beta_star,
                              const std::vector<std::vector<std::int32_t>>& generators,
                              EnumerationOptions opts) {
    const int k = static_cast<int>(generators.size());
    if (k > 16) throw std::invalid_argument("gauge_sector_sum_log_z: too many sector generators");
    std::vector<double> logs;
    for (int mask = 0; mask < (1 << k); ++mask) {
        std::vector<std::int8_t> signs(gauge.plaquettes.size(), 1);
        for (int g = 0; g < k; ++g)
            if (mask & (1 << g))
                for (const std::int32_t e : generators[g]) signs[e] = static_cast<std::int8_t>(-signs[e]);
        logs.push_back(enumerate_gauge_Z(gauge, beta_star, opts, nullptr, &signs).log_z);
    }
    double mx = logs[0];
    for (const double v : logs) mx = std::max(mx, v);
    long double s = 0.0L;
    for (const double v : logs) s += std::exp(static_cast<long double>(v - mx));
    return mx + static_cast<double>(std::log(s));
}

double ring_log_z(int length, double beta) {
    // (2 cosh b)^L + (2 sinh b)^L, in log space
    if (beta < 0.0) throw std::invalid_argument("ring_log_z: beta must be >= 0");
    const double lc = length * (std::log(2.0) + std::log(std::cosh(beta)));
    if (beta == 0.0) return lc;
    const double ls = length * (std::log(2.0) + std::log(std::sinh(beta)));
    return lc + std::log1p(std::exp(ls - lc));
}

double chain_log_z(int length, double beta) {
    return length * std::log(2.0) + (length - 1) * std::log(std::cosh(beta));
}

double transfer_matrix_log_z_torus(int n_tau, int n_s, double beta) {
    // dense transfer matrix over column states; doubled vertical bonds for
    // n_s == 2 match the multigraph convention of the lattice builder
    if (n_s > 12) throw std::invalid_argument("transfer matrix width too large");
    if (n_tau < 2) throw std::invalid_argument("transfer matrix needs n_tau >= 2");
    const int dim = 1 << n_s;
    std::vector<double> col(dim);
    for (int a = 0; a < dim; ++a) {
        double e = 0.0;
        if (n_s == 2) {
            // extent-2 wrap: doubled bond, matching the lattice builder
            e = 2.0 * ((a & 1) ? -1 : 1) * ((a & 2) ? -1 : 1);
        } else if (n_s >= 3) {
            for (int i = 0; i < n_s; ++i) {
                const int j = (i + 1) % n_s;
                const int si = (a >> i) & 1 ? -1 : 1;
                const int sj = (a >> j) & 1 ? -1 : 1;
                e += si * sj;
            }
        }
        col[a] = e;
    }
    std::vector<long double> t(static_cast<std::size_t>(dim) * dim);
    for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b) {
            double cross = 0.0;
            for (int i = 0; i < n_s; ++i) {
                const int sa = (a >> i) & 1 ? -1 : 1;
                const int sb = (b >> i) & 1 ? -1 : 1;
                cross += sa * sb;
            }
            t[static_cast<std::size_t>(a) * dim + b] = std::exp(static_cast<long double>(beta * (col[a] + cross)));
        }
    // Z = Tr T^{n_tau} with rescaling to avoid overflow
    std::vector<long double> m = t;
    long double log_scale = 0.0L;
    for (int step = 1; step < n_tau; ++step) {
        std::vector<long double> next(static_cast<std::size_t>(dim) * dim, 0.0L);
        for (int a = 0; a < dim; ++a)
            for (int k = 0; k < dim; ++k) {
                const long double mak = m[static_cast<std::size_t>(a) * dim + k];
                if (mak == 0.0L) continue;
                for (int b = 0; b < dim; ++b) next[static_cast<std::size_t>(a) * dim + b] += mak * t[static_cast<std::size_t>(k) * dim + b];
            }
        long double mx = 0.0L;
        for (const long double v : next) mx = std::max(mx, v);
        for (long double& v : next) v /= mx;
        log_scale += std::log(mx);
        m = std::move(next);
    }
    long double tr = 0.0L;
    for (int a = 0; a < dim; ++a) tr += m[static_cast<std::size_t>(a) * dim + a];
    return static_cast<double>(log_scale + std::log(tr));
}

}  // namespace renyicf

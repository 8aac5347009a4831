#include "renyicf/sampler.hpp"

#include <cmath>
#include <stdexcept>

namespace renyicf {

std::vector<std::int32_t> cluster_decomposition(const BondGraph& graph, const CouplingField& couplings,
                                                const SpinConfig& config, RngStream& rng) {
    if (config.size() != graph.n_sites() || couplings.size() != graph.n_bonds())
        throw std::invalid_argument("cluster_decomposition: size mismatch");
    UnionFind uf(graph.n_sites());
    for (int b = 0; b < graph.n_bonds(); ++b) {
        const double jeff = couplings.effective(b);
        if (jeff < 0.0)
            throw std::invalid_argument("Swendsen-Wang requires nonnegative effective couplings");
        if (jeff == 0.0) continue;
        const Bond& bd = graph.bonds[b];
        if (config.s[bd.a] * config.s[bd.b] * couplings.sign[b] != 1) continue;
        const double p = -std::expm1(-2.0 * jeff);
        if (rng.next_double() < p) uf.unite(bd.a, bd.b);
    }
    std::vector<std::int32_t> label(graph.n_sites());
    for (int i = 0; i < graph.n_sites(); ++i) label[i] = uf.find(i);
    return label;
}

void sw_sweep(const BondGraph& graph, const CouplingField& couplings, SpinConfig& config, RngStream& rng) {
    const auto label = cluster_decomposition(graph, couplings, config, rng);
    // cluster roots are their own label; one coin per root, visited in site order
    std::vector<std::int8_t> flip(graph.n_sites(), 0);
    for (int i = 0; i < graph.n_sites(); ++i)
        if (label[i] == i) flip[i] = rng.next_bool() ? 1 : 0;
    for (int i = 0; i < graph.n_sites(); ++i)
        if (flip[label[i]]) config.s[i] = static_cast<std::int8_t>(-config.s[i]);
}

void metropolis_sweep(const BondGraph& graph, const CouplingField& couplings, SpinConfig& config,
                      RngStream& rng) {
    if (config.size() != graph.n_sites() || couplings.size() != graph.n_bonds())
        throw std::invalid_argument("metropolis_sweep: size mismatch");
    for (int i = 0; i < graph.n_sites(); ++i) {
        double h = 0.0;  // local field: sum_b J s sigma_j
        for (int k = graph.adj_off[i]; k < graph.adj_off[i + 1]; ++k) {
            const auto [b, j] = graph.adj[k];
            h += couplings.j[b] * couplings.sign[b] * config.s[j];
        }
        const double dS = 2.0 * config.s[i] * h;  // action change of flipping spin i
        if (dS <= 0.0 || rng.next_double() < std::exp(-dS)) config.s[i] = static_cast<std::int8_t>(-config.s[i]);
    }
}

double bond_energy(const BondGraph& graph, const SpinConfig& config) {
    double e = 0.0;
    for (const Bond& b : graph.bonds) e += b.sign * config.s[b.a] * config.s[b.b];
    return e;
}

double integrated_autocorrelation(const BondGraph& graph, const CouplingField& couplings, double beta,
                                  RngStream& rng, int n_measure) {
    (void)beta;
    SpinConfig c = SpinConfig::aligned(graph.n_sites());
    for (int k = 0; k < 100; ++k) sw_sweep(graph, couplings, c, rng);
    std::vector<double> e(n_measure);
    for (int k = 0; k < n_measure; ++k) {
        sw_sweep(graph, couplings, c, rng);
        e[k] = bond_energy(graph, c);
    }
    double mean = 0.0;
    for (double v : e) mean += v;
    mean /= n_measure;
    double var = 0.0;
    for (double v : e) var += (v - mean) * (v - mean);
    var /= n_measure;
    if (var <= 0.0) return 0.5;
    double tau = 0.5;
    for (int t = 1; t < n_measure / 4; ++t) {
        double c_t = 0.0;
        for (int k = 0; k + t < n_measure; ++k) c_t += (e[k] - mean) * (e[k + t] - mean);
        c_t /= (n_measure - t) * var;
        tau += c_t;
        if (t >= 6.0 * tau) break;  // Madras-Sokal window
    }
    return tau;
}

}  // namespace renyicf

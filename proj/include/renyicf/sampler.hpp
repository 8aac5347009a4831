#ifndef RENYICF_SAMPLER_HPP
#define RENYICF_SAMPLER_HPP

#include <cstdint>
#include <vector>

#include "renyicf/lattice.hpp"
#include "renyicf/model.hpp"
#include "renyicf/rng.hpp"

namespace renyicf {

// Union-find with path compression; iteration order is deterministic so a
// fixed rng stream reproduces the same clusters bit-exactly.
struct UnionFind {
    std::vector<std::int32_t> parent;

    explicit UnionFind(int n) : parent(n) {
        for (int i = 0; i < n; ++i) parent[i] = i;
    }
    std::int32_t find(std::int32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(std::int32_t a, std::int32_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[b < a ? a : b] = b < a ? b : a;  // smaller index wins
    }
};

// Swendsen-Wang bond activation and cluster labels for the current config.
// Bond b joining aligned spins activates with p = 1 - exp(-2 J_b).
// Requires all effective couplings >= 0.
std::vector<std::int32_t> cluster_decomposition(const BondGraph& graph, const CouplingField& couplings,
                                                const SpinConfig& config, RngStream& rng);

// One full SW sweep: activation, cluster labeling, independent 1/2 flips.
void sw_sweep(const BondGraph& graph, const CouplingField& couplings, SpinConfig& config, RngStream& rng);

// Sequential single-site Metropolis sweep; handles signed couplings.
void metropolis_sweep(const BondGraph& graph, const CouplingField& couplings, SpinConfig& config,
                      RngStream& rng);

// sum_b sign_b sigma_a sigma_b (the energy-like observable at unit coupling)
double bond_energy(const BondGraph& graph, const SpinConfig& config);

// Integrated autocorrelation time of the bond energy under SW sweeps,
// Madras-Sokal windowing; used for the automatic equilibration default.
double integrated_autocorrelation(const BondGraph& graph, const CouplingField& couplings, double beta,
                                  RngStream& rng, int n_measure = 2000);

}  // namespace renyicf

#endif

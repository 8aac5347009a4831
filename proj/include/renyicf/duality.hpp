#ifndef RENYICF_DUALITY_HPP
#define RENYICF_DUALITY_HPP

#include <cstdint>
#include <string>

#include "renyicf/lattice.hpp"

namespace renyicf {

// Kramers-Wannier map, beta* = -(1/2) ln tanh beta; an involution on (0, inf).
double dual_coupling(double beta);

// fixed point (1/2) ln(1 + sqrt(2))
inline constexpr double self_dual_beta = 0.44068679350977151262;

// 2D: S*_n = ln 2 + S_n.
double renyi_shift_2d(double s_n_direct);

// 3D: S^{Z2}_n = (|dA| - 1) ln 2 + S_n for a connected entangling surface
// of |dA| sites.
double renyi_shift_3d(double s_n_direct, int boundary_sites);

// The multiplicative constant connecting Z(beta) and the dual partition
// function, kept in log space as exact half-integer coefficients:
//   ln prefactor = (two_pow2 / 2) ln 2 + (two_sinh / 2) ln sinh(2 beta*).
// Z(beta) = prefactor * Z_dual(beta*).
struct LogPrefactor {
    std::int64_t two_pow2 = 0;
    std::int64_t two_sinh = 0;

    double log_value(double beta) const;
};

enum class DualityForm {
    Ising2D,               // torus bulk form: (1/2) [sinh 2b*]^{-|L|}
    Gauge3D,               // torus bulk form: 2^{-|L|/2 - Ng} [sinh 2b*]^{-3|L|/2}
    Replica2D,             // torus bulk form: (1/2) [sinh 2b*]^{-n|L|}
    Replica3DEnhanced,     // with the 2^{(n-1)(|dA|-1)} gauge-transform correction
    Replica3DCentral,      // central-plaquette geometry
    GeneralGraph2D,        // exact on any planar-embedded graph: 2^{V-1} (2 sinh 2b*)^{-E/2}
    GeneralGraph3D,        // exact on any ball-like complex: 2^{V-Ng-E/2} [sinh 2b*]^{-E/2}
};

struct DualityRelation {
    DualityForm form = DualityForm::Ising2D;
    int dimension = 2;
    int n_replicas = 1;
    std::int64_t n_sites = 0;        // |Lambda| per replica (bulk forms) or total V (general forms)
    std::int64_t n_bonds = 0;        // E, general forms only
    std::int64_t n_gauge_fixed = 0;  // N_g
    std::int64_t boundary_sites = 0; // |dA|
};

LogPrefactor partition_prefactor(const DualityRelation& rel);

// Convenience: the exact relation for a concrete graph pair produced by the
// lattice module (general-graph forms with the graph's own counts).
DualityRelation general_relation_2d(const BondGraph& direct);
DualityRelation general_relation_3d(const BondGraph& direct, const GaugeReplicaGraph& gauge);

}  // namespace renyicf

#endif

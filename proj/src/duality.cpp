#include "renyicf/duality.hpp"

#include <cmath>
#include <stdexcept>

namespace renyicf {

double dual_coupling(double beta) {
    if (beta <= 0.0) throw std::invalid_argument("dual_coupling: beta must be positive");
    return -0.5 * std::log(std::tanh(beta));
}

double renyi_shift_2d(double s_n_direct) { return s_n_direct + std::log(2.0); }

double renyi_shift_3d(double s_n_direct, int boundary_sites) {
    if (boundary_sites < 1) throw std::invalid_argument("renyi_shift_3d: boundary_sites must be >= 1");
    return s_n_direct + (boundary_sites - 1) * std::log(2.0);
}

double LogPrefactor::log_value(double beta) const {
    const double bs = dual_coupling(beta);
    return 0.5 * two_pow2 * std::log(2.0) + 0.5 * two_sinh * std::log(std::sinh(2.0 * bs));
}

LogPrefactor partition_prefactor(const DualityRelation& rel) {
    auto need = [&](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("partition_prefactor: ") + what);
    };
    const std::int64_t n = rel.n_replicas, L = rel.n_sites, Ng = rel.n_gauge_fixed, dA = rel.boundary_sites,
                       E = rel.n_bonds;
    LogPrefactor p;
    switch (rel.form) {
        case DualityForm::Ising2D:
            need(rel.dimension == 2 && n == 1 && L > 0, "Ising2D needs D=2, n=1, |Lambda|");
            p.two_pow2 = -2;
            p.two_sinh = -2 * L;
            break;
        case DualityForm::Gauge3D:
            need(rel.dimension == 3 && n == 1 && L > 0, "Gauge3D needs D=3, n=1, |Lambda|");
            p.two_pow2 = -L - 2 * Ng;
            p.two_sinh = -3 * L;
            break;
        case DualityForm::Replica2D:
            need(rel.dimension == 2 && n >= 1 && L > 0, "Replica2D needs D=2, |Lambda|");
            p.two_pow2 = -2;
            p.two_sinh = -2 * n * L;
            break;
        case DualityForm::Replica3DEnhanced:
            need(rel.dimension == 3 && n >= 1 && L > 0 && dA >= 1, "Replica3DEnhanced needs D=3 geometry");
            p.two_pow2 = 2 * (n - 1) * (dA - 1) - n * L - 2 * n * Ng;
            p.two_sinh = -3 * n * L;
            break;
        case DualityForm::Replica3DCentral:
            need(rel.dimension == 3 && n >= 1 && L > 0 && dA >= 1, "Replica3DCentral needs D=3 geometry");
            p.two_pow2 = (n - 1) * dA - n * L - 2 * n * Ng;
            p.two_sinh = -3 * n * L + (n - 1) * dA;
            break;
        case DualityForm::GeneralGraph2D:
            need(rel.dimension == 2 && L > 0 && E > 0, "GeneralGraph2D needs V and E");
            // 2^{V-1} (2 sinh 2b*)^{-E/2}
            p.two_pow2 = 2 * (L - 1) - E;
            p.two_sinh = -E;
            break;
        case DualityForm::GeneralGraph3D:
            need(rel.dimension == 3 && L > 0 && E > 0, "GeneralGraph3D needs V, E and N_g");
            p.two_pow2 = 2 * (L - Ng) - E;
            p.two_sinh = -E;
            break;
    }
    return p;
}

DualityRelation general_relation_2d(const BondGraph& direct) {
    DualityRelation r;
    r.form = DualityForm::GeneralGraph2D;
    r.dimension = 2;
    r.n_replicas = direct.spec.n_replicas;
    r.n_sites = direct.n_sites();
    r.n_bonds = direct.n_bonds();
    return r;
}

DualityRelation general_relation_3d(const BondGraph& direct, const GaugeReplicaGraph& gauge) {
    DualityRelation r;
    r.form = DualityForm::GeneralGraph3D;
    r.dimension = 3;
    r.n_replicas = direct.spec.n_replicas;
    r.n_sites = direct.n_sites();
    r.n_bonds = direct.n_bonds();
    r.n_gauge_fixed = gauge.n_gauge_fixed();
    r.boundary_sites = direct.spec.boundary_sites();
    return r;
}

}  // namespace renyicf

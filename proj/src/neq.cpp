#include "renyicf/neq.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "renyicf/rng.hpp"
#include "renyicf/sampler.hpp"

namespace renyicf {

namespace {

// ln(mean exp(-W)) via log-sum-exp
double log_mean_exp_neg(const std::vector<double>& w) {
    double m = -w[0];
    for (const double v : w) m = std::max(m, -v);
    long double s = 0.0L;
    for (const double v : w) s += std::exp(static_cast<long double>(-v - m));
    return m + static_cast<double>(std::log(s / static_cast<long double>(w.size())));
}

}  // namespace

WorkRecord run_trajectory(const BondGraph& graph, double beta, const ProtocolSchedule& schedule,
                          std::uint64_t master_seed, std::uint64_t trajectory_index) {
    schedule.validate();
    if (!graph.spec.protocol_bonds)
        throw std::invalid_argument("run_trajectory: graph must carry protocol (switch) bonds");

    RngStream rng(master_seed, trajectory_index);
    SpinConfig config = random_config(graph.n_sites(), rng);

    // switch bonds are the only ones whose coupling depends on lambda
    std::vector<std::int32_t> sw;
    for (std::int32_t b = 0; b < graph.n_bonds(); ++b)
        if (graph.bonds[b].cls == BondClass::SwitchOff || graph.bonds[b].cls == BondClass::SwitchOn)
            sw.push_back(b);

    CouplingField field = couplings_at(graph, beta, schedule.lambdas.front());
    for (int k = 0; k < schedule.equilibration_sweeps; ++k) sw_sweep(graph, field, config, rng);

    long double work = 0.0L;
    for (int k = 0; k < schedule.n_steps; ++k) {
        const double dl = schedule.lambdas[k + 1] - schedule.lambdas[k];
        // S(l') - S(l) = -sum_switch (J' - J) sign sigma sigma
        long double dw = 0.0L;
        for (const std::int32_t b : sw) {
            const Bond& bd = graph.bonds[b];
            const double dj = (bd.cls == BondClass::SwitchOn ? beta : -beta) * dl;
            dw -= static_cast<long double>(dj) * field.sign[b] * config.s[bd.a] * config.s[bd.b];
        }
        work += dw;
        field = couplings_at(graph, beta, schedule.lambdas[k + 1]);
        for (int s = 0; s < schedule.sweeps_per_step; ++s) sw_sweep(graph, field, config, rng);
    }

    WorkRecord rec;
    rec.master_seed = master_seed;
    rec.trajectory_index = trajectory_index;
    rec.direction = schedule.direction;
    rec.work = static_cast<double>(work);
    rec.n_steps = schedule.n_steps;
    rec.beta = beta;
    rec.geometry_hash = graph.hash();
    rec.config_hash = fnv1a(config.s.data(), config.s.size());
    return rec;
}

RatioEstimate estimate_ratio(const std::vector<WorkRecord>& records, int n_bootstrap,
                             std::uint64_t bootstrap_seed) {
    if (records.size() < 2) throw std::invalid_argument("estimate_ratio: need at least 2 records");
    for (const WorkRecord& r : records)
        if (r.direction != records[0].direction || r.n_steps != records[0].n_steps ||
            r.beta != records[0].beta || r.geometry_hash != records[0].geometry_hash)
            throw std::invalid_argument("estimate_ratio: mixed protocols");

    std::vector<double> w(records.size());
    double mean_w = 0.0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        w[i] = records[i].work;
        mean_w += w[i];
    }
    mean_w /= static_cast<double>(w.size());

    RatioEstimate est;
    est.n_trajectories = static_cast<int>(records.size());
    est.log_ratio = log_mean_exp_neg(w);
    est.mean_work = mean_w;
    est.direction = records[0].direction;
    est.n_steps = records[0].n_steps;
    est.beta = records[0].beta;
    est.geometry_hash = records[0].geometry_hash;

    RngStream rng(bootstrap_seed, 0);
    const std::size_t n = w.size();
    std::vector<double> resampled(n), boots(static_cast<std::size_t>(std::max(n_bootstrap, 2)));
    for (double& b : boots) {
        for (std::size_t i = 0; i < n; ++i) resampled[i] = w[rng.next_below(n)];
        b = log_mean_exp_neg(resampled);
    }
    double bm = 0.0;
    for (const double b : boots) bm += b;
    bm /= static_cast<double>(boots.size());
    double bv = 0.0;
    for (const double b : boots) bv += (b - bm) * (b - bm);
    est.err = std::sqrt(bv / static_cast<double>(boots.size() - 1));
    return est;
}

ReverseReport reverse_consistency(const RatioEstimate& forward, const RatioEstimate& reverse) {
    ReverseReport rep;
    rep.discrepancy = std::abs(forward.log_ratio + reverse.log_ratio);
    rep.err = std::sqrt(forward.err * forward.err + reverse.err * reverse.err);
    rep.n_sigma = rep.err > 0.0 ? rep.discrepancy / rep.err : (rep.discrepancy > 0.0 ? 1e300 : 0.0);
    rep.flagged = rep.n_sigma > 3.0;
    return rep;
}

CFunctionPoint c_function_point(const RatioEstimate& ratio, const ReplicaLatticeSpec& geometry,
                                const std::optional<ScaleInfo>& scale) {
    const int n = geometry.n_replicas;
    if (n < 2) throw std::invalid_argument("c_function_point: n = 1 (von Neumann limit) is out of scope");
    const int boundary = geometry.boundary_sites();

    CFunctionPoint p;
    p.beta = ratio.beta;
    p.n = n;
    p.n_tau = geometry.n_tau;
    p.n_s = geometry.n_s;
    p.n_s2 = geometry.n_s2;
    p.l = geometry.slab_length;
    p.boundary_sites = boundary;

    // forward protocol shrinks l+1 -> l, so ln<e^{-W}> = ln Z_n(l)/Z_n(l+1);
    // a reverse estimate carries the opposite sign
    const double sgn = ratio.direction == ProtocolSchedule::Direction::Forward ? 1.0 : -1.0;
    p.dlnz = sgn * ratio.log_ratio / (n - 1);
    p.dlnz_err = ratio.err / (n - 1);

    const int d = geometry.dimension;
    const double denom = boundary > 0 ? boundary : 1.0;
    const double pref_b = std::pow(static_cast<double>(p.l), d - 1) / denom;
    const double pref_m = std::pow(p.l + 0.5, d - 1) / denom;
    p.value_backward = pref_b * p.dlnz;
    p.err_backward = pref_b * p.dlnz_err;
    p.value_mid = pref_m * p.dlnz;
    p.err_mid = pref_m * p.dlnz_err;

    if (scale) {
        if (scale->n_tauc > 0) p.l_tc = static_cast<double>(p.l) / scale->n_tauc;
        if (scale->a_mg) p.l_mg = p.l * (*scale->a_mg);
    }
    return p;
}

}  // namespace renyicf

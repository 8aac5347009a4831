#include "renyicf/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "renyicf/rng.hpp"
#include "renyicf/special.hpp"

namespace renyicf {

SpinConfig random_config(int n_sites, RngStream& rng) {
    SpinConfig c;
    c.s.resize(n_sites);
    for (auto& v : c.s) v = rng.next_bool() ? 1 : -1;
    return c;
}

double action(const BondGraph& graph, const SpinConfig& config, const CouplingField& couplings) {
    if (config.size() != graph.n_sites() || couplings.size() != graph.n_bonds())
        throw std::invalid_argument("action: size mismatch between graph, config and couplings");
    double a = 0.0;
    for (int b = 0; b < graph.n_bonds(); ++b) {
        const Bond& bd = graph.bonds[b];
        a -= couplings.j[b] * couplings.sign[b] * config.s[bd.a] * config.s[bd.b];
    }
    return a;
}

CouplingField couplings_at(const BondGraph& graph, double beta, double lambda, const SeamSet* seams) {
    if (lambda < 0.0 || lambda > 1.0) throw std::invalid_argument("couplings_at: lambda outside [0, 1]");
    CouplingField f;
    f.j.resize(graph.n_bonds());
    f.sign.resize(graph.n_bonds());
    for (int b = 0; b < graph.n_bonds(); ++b) {
        switch (graph.bonds[b].cls) {
            case BondClass::SwitchOff: f.j[b] = beta * (1.0 - lambda); break;
            case BondClass::SwitchOn: f.j[b] = beta * lambda; break;
            default: f.j[b] = beta;
        }
        f.sign[b] = graph.bonds[b].sign;
    }
    if (seams)
        for (const std::int32_t b : seams->bonds) f.sign[b] = static_cast<std::int8_t>(-f.sign[b]);
    return f;
}

std::vector<double> clock_fourier_coeffs(int N, double beta) {
    if (N < 2) throw std::invalid_argument("clock_fourier_coeffs: N must be >= 2");
    const double twopi = 6.283185307179586476925286766559;
    std::vector<double> c(N);
    for (int k = 0; k < N; ++k) {
        double re = 0.0;
        for (int q = 0; q < N; ++q)
            re += std::exp(beta * std::cos(twopi * q / N)) * std::cos(twopi * k * q / N);
        c[k] = re / N;
    }
    return c;
}

double bessel_weight(int nu, double beta) {
    if (beta < 0.0) throw std::invalid_argument("bessel_weight: beta must be >= 0");
    return bessel_i(nu, beta);
}

ProtocolSchedule ProtocolSchedule::linear(int n_steps, int sweeps_per_step, int equilibration_sweeps,
                                          Direction dir) {
    ProtocolSchedule p;
    p.n_steps = n_steps;
    p.sweeps_per_step = sweeps_per_step;
    p.equilibration_sweeps = equilibration_sweeps;
    p.direction = dir;
    p.lambdas.resize(n_steps + 1);
    for (int k = 0; k <= n_steps; ++k) {
        const double l = static_cast<double>(k) / n_steps;
        p.lambdas[k] = dir == Direction::Forward ? l : 1.0 - l;
    }
    p.validate();
    return p;
}

ProtocolSchedule ProtocolSchedule::reversed() const {
    ProtocolSchedule p = *this;
    p.direction = direction == Direction::Forward ? Direction::Reverse : Direction::Forward;
    p.lambdas.assign(lambdas.rbegin(), lambdas.rend());
    return p;
}

void ProtocolSchedule::validate() const {
    if (n_steps < 1 || sweeps_per_step < 1 || equilibration_sweeps < 0)
        throw std::invalid_argument("ProtocolSchedule: counts must be positive");
    if (static_cast<int>(lambdas.size()) != n_steps + 1)
        throw std::invalid_argument("ProtocolSchedule: lambda grid size mismatch");
    const bool fwd = direction == Direction::Forward;
    if (lambdas.front() != (fwd ? 0.0 : 1.0) || lambdas.back() != (fwd ? 1.0 : 0.0))
        throw std::invalid_argument("ProtocolSchedule: lambda endpoints must span [0, 1]");
    for (int k = 0; k < n_steps; ++k) {
        const double d = lambdas[k + 1] - lambdas[k];
        if ((fwd && d <= 0.0) || (!fwd && d >= 0.0))
            throw std::invalid_argument("ProtocolSchedule: lambda grid must be strictly monotone");
    }
}

}  // namespace renyicf

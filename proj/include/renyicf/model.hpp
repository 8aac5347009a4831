#ifndef RENYICF_MODEL_HPP
#define RENYICF_MODEL_HPP

#include <cstdint>
#include <vector>

#include "renyicf/lattice.hpp"

namespace renyicf {

// One Ising variable per distinct site; shared (branch) sites are stored
// once and couple through all their incident bonds.
struct SpinConfig {
    std::vector<std::int8_t> s;  // +1 / -1

    static SpinConfig aligned(int n_sites) { return {std::vector<std::int8_t>(n_sites, 1)}; }
    int size() const { return static_cast<int>(s.size()); }
};

class RngStream;
SpinConfig random_config(int n_sites, RngStream& rng);

// Per-bond coupling strengths (units of inverse temperature) and signs.
struct CouplingField {
    std::vector<double> j;
    std::vector<std::int8_t> sign;

    int size() const { return static_cast<int>(j.size()); }
    double effective(int b) const { return j[b] * sign[b]; }
};

// Bond indices whose sign is flipped (frustration seams; oracle-side only).
struct SeamSet {
    std::vector<std::int32_t> bonds;
};

// S = -sum_b J_b s_b sigma_a sigma_b, so that the Boltzmann weight is
// exp(-S) = exp(+beta sum sigma sigma) for uniform ferromagnetic couplings.
double action(const BondGraph& graph, const SpinConfig& config, const CouplingField& couplings);

// Interpolated couplings: SwitchOff bonds carry beta*(1-lambda), SwitchOn
// beta*lambda, every other class beta.  Seam bonds get sign -1 on top of
// any antiperiodic signs already carried by the graph.
CouplingField couplings_at(const BondGraph& graph, double beta, double lambda,
                           const SeamSet* seams = nullptr);

// Discrete Fourier coefficients of exp(beta cos(2 pi q / N)); C_0 = cosh,
// C_1 = sinh for N = 2.
std::vector<double> clock_fourier_coeffs(int N, double beta);

// Modified Bessel weight I_nu(beta) of the dual U(1) spin model.
double bessel_weight(int nu, double beta);

struct ProtocolSchedule {
    enum class Direction { Forward, Reverse };

    int n_steps = 64;
    std::vector<double> lambdas;  // n_steps + 1 values, monotone
    int sweeps_per_step = 1;
    int equilibration_sweeps = 100;
    Direction direction = Direction::Forward;

    // linear grid, lambda = k/n_steps (Forward) or 1 - k/n_steps (Reverse)
    static ProtocolSchedule linear(int n_steps, int sweeps_per_step, int equilibration_sweeps,
                                   Direction dir = Direction::Forward);
    ProtocolSchedule reversed() const;
    void validate() const;
};

}  // namespace renyicf

#endif

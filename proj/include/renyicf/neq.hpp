#ifndef RENYICF_NEQ_HPP
#define RENYICF_NEQ_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "renyicf/lattice.hpp"
#include "renyicf/model.hpp"

namespace renyicf {

// One non-equilibrium trajectory's generalized work
// W = sum_k [S_{l_{k+1}}(c_k) - S_{l_k}(c_k)], accumulated in extended
// precision over the switch bonds only (the action difference is supported
// there).
struct WorkRecord {
    std::uint64_t master_seed = 0;
    std::uint64_t trajectory_index = 0;
    ProtocolSchedule::Direction direction = ProtocolSchedule::Direction::Forward;
    double work = 0.0;
    int n_steps = 0;
    double beta = 0.0;
    std::uint64_t geometry_hash = 0;
    std::uint64_t config_hash = 0;
};

WorkRecord run_trajectory(const BondGraph& graph, double beta, const ProtocolSchedule& schedule,
                          std::uint64_t master_seed, std::uint64_t trajectory_index);

struct RatioEstimate {
    int n_trajectories = 0;
    double log_ratio = 0.0;  // ln <e^{-W}> = ln Z(lambda=1)/Z(lambda=0)
    double err = 0.0;        // bootstrap error of log_ratio
    double mean_work = 0.0;
    ProtocolSchedule::Direction direction = ProtocolSchedule::Direction::Forward;
    int n_steps = 0;
    double beta = 0.0;
    std::uint64_t geometry_hash = 0;
};

// Jarzynski estimator with >= n_bootstrap resamples for the error of the
// log-of-mean.  All records must share (direction, n_steps, beta, geometry).
RatioEstimate estimate_ratio(const std::vector<WorkRecord>& records, int n_bootstrap = 1000,
                             std::uint64_t bootstrap_seed = 0x9e3779b9u);

struct ReverseReport {
    double discrepancy = 0.0;  // |ln R_fwd + ln R_rev|
    double err = 0.0;          // combined error
    double n_sigma = 0.0;
    bool flagged = false;  // discrepancy > 3 sigma
};

ReverseReport reverse_consistency(const RatioEstimate& forward, const RatioEstimate& reverse);

// One (beta, n, N_tau, N_s, l) measurement of the entropic c-function,
//   C_n = (l^{D-1} / |dA|) (1/(n-1)) (1/a) ln[Z_n(l)/Z_n(l+a)],
// with both the backward-difference (abscissa l) and mid-point (l + a/2)
// conventions attached.  Lattice units, a = 1.
struct CFunctionPoint {
    double beta = 0.0;
    int n = 2;
    int n_tau = 0, n_s = 0, n_s2 = 1;
    int l = 0;
    int boundary_sites = 0;
    double dlnz = 0.0;        // (1/(n-1)) ln[Z_n(l)/Z_n(l+1)]
    double dlnz_err = 0.0;
    double value_backward = 0.0, err_backward = 0.0;  // prefactor at l
    double value_mid = 0.0, err_mid = 0.0;            // prefactor at l+1/2
    std::optional<double> l_tc;  // l T_c = l / N_tau,c
    std::optional<double> l_mg;  // l m_g (needs a*m_g from the scale config)
    bool normalized = false;     // divided by C_2^CFT
};

struct ScaleInfo {
    int n_tauc = 0;
    std::optional<double> a_mg;
};

// ratio must estimate ln[Z_n(l)/Z_n(l+1)] on the protocol graph built at
// slab_length l (start slab l+1).  n = 1 is rejected.
CFunctionPoint c_function_point(const RatioEstimate& ratio, const ReplicaLatticeSpec& geometry,
                                const std::optional<ScaleInfo>& scale = std::nullopt);

}  // namespace renyicf

#endif

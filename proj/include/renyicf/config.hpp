#ifndef RENYICF_CONFIG_HPP
#define RENYICF_CONFIG_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "renyicf/lattice.hpp"

namespace renyicf {

// Config-file problems exit with code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parsed from the sectioned key-value run file; unknown sections or keys
// are rejected, `schema = 1` is required.  See docs/config.md for the
// grammar.
struct RunConfig {
    int schema = 1;

    // [geometry]
    int dimension = 2;
    int n_tau = 4, n_s = 4, n_s2 = 1;
    GeometryVariant variant = GeometryVariant::StandardCut;
    Boundary bc_tau = Boundary::Periodic, bc_s = Boundary::Periodic, bc_s2 = Boundary::Periodic;
    int cut_offset = 0;
    int cut_slice = 0;

    // [physics]
    int n_replicas = 2;
    std::optional<double> beta;   // exactly one of beta / n_tauc
    std::optional<int> n_tauc;    // beta = beta_c(n_tauc) from the scale table
    std::vector<int> slab_lengths;

    // [protocol]
    int n_steps = 64;
    int sweeps_per_step = 1;
    int equilibration_sweeps = -1;  // -1 = automatic (10 x tau_int, floor 100)
    int n_trajectories = 1000;
    std::uint64_t master_seed = 1;
    bool reverse = false;  // also run the reverse protocol

    // [analysis]
    std::optional<double> c2_cft;
    std::string mg_table;  // CSV path: beta,a_mg
    double ansatz_window_min = 0.84;
    double powerlaw_window_max = 1.26;

    // [io]
    std::string output_dir;  // empty: $RENYICF_OUTPUT_DIR or "runs"
    int threads = 0;
    int checkpoint_interval = 1000;

    double resolved_beta() const;
    ReplicaLatticeSpec geometry_spec(int slab_length, bool protocol) const;
    std::string resolved_output_dir() const;
    std::uint64_t hash() const;
};

RunConfig parse_config(std::istream& in, const std::string& origin = "<config>");
RunConfig load_config(const std::string& path);
void write_config(const RunConfig& c, std::ostream& os);

}  // namespace renyicf

#endif

#ifndef RENYICF_DRIVER_HPP
#define RENYICF_DRIVER_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "renyicf/config.hpp"
#include "renyicf/neq.hpp"

namespace renyicf {

// Append-only JSON-lines persistence for trajectory work records; one
// object per line, keys {W, beta, direction, geometry_hash, n_steps, seed}.
// Records are keyed by their trajectory index, so a resumed run fills in
// exactly the missing indices and reproduces the uninterrupted estimates.
void append_work_records(const std::string& path, const std::vector<WorkRecord>& records);
std::vector<WorkRecord> read_work_records(const std::string& path, std::uint64_t master_seed);

// One row of the points CSV written by simulate and consumed by analyze.
struct PointRow {
    CFunctionPoint point;
    int n_tauc = 0;  // 0 when the run was specified by raw beta
};

void write_points_csv(const std::string& path, const std::vector<PointRow>& rows);
std::vector<PointRow> read_points_csv(const std::string& path);

// schedules trajectory ensembles per (beta, l), resumable; returns exit code
int cmd_simulate(const RunConfig& config, bool dry_run, std::ostream& log);

// thermodynamic -> continuum -> normalization -> model fits; plots + JSON
int cmd_analyze(const RunConfig& config, const std::string& points_csv, std::ostream& log);

// deterministic helper shared with tests: run an ensemble in a worker pool
std::vector<WorkRecord> run_ensemble(const BondGraph& graph, double beta, const ProtocolSchedule& schedule,
                                     std::uint64_t master_seed, std::uint64_t index_begin,
                                     std::uint64_t index_end, int threads);

}  // namespace renyicf

#endif

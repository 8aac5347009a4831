#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unistd.h>

#include "renyicf/analysis.hpp"
#include "renyicf/config.hpp"
#include "renyicf/driver.hpp"
#include "renyicf/oracle.hpp"
#include "renyicf/rng.hpp"

using namespace renyicf;
namespace fs = std::filesystem;

namespace {

const char* kFullConfig = R"(
schema = 1

[geometry]
dimension = 2
n_tau = 3
n_s = 3

[physics]
replicas = 2
beta = 0.35
slab_lengths = 0 1

[protocol]
n_steps = 16
sweeps_per_step = 1
equilibration_sweeps = 40
trajectories = 300
master_seed = 4242
reverse = true

[io]
threads = 2
)";

RunConfig parse(const std::string& text) {
    std::istringstream is(text);
    return parse_config(is, "<test>");
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("renyicf_test_" + std::to_string(::getpid()) + "_" +
                                            std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("config parsing: happy path") {
    const RunConfig c = parse(kFullConfig);
    CHECK(c.dimension == 2);
    CHECK(c.n_replicas == 2);
    CHECK(*c.beta == 0.35);
    CHECK(c.slab_lengths == std::vector<int>{0, 1});
    CHECK(c.n_steps == 16);
    CHECK(c.master_seed == 4242);
    CHECK(c.reverse);
    CHECK(c.threads == 2);
    CHECK(c.resolved_beta() == 0.35);
    CHECK_NOTHROW(c.geometry_spec(1, true).validate());
}

TEST_CASE("config parsing: rejections") {
    CHECK_THROWS_AS(parse("[geometry]\nn_tau = 3\n"), ConfigError);  // missing schema
    CHECK_THROWS_AS(parse("schema = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse("schema = 1\n[geometry]\nbogus_key = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse("schema = 1\n[bogus]\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse("schema = 1\n[physics]\nbeta = 0.3\nn_tauc = 8\n"), ConfigError);  // both
    CHECK_THROWS_AS(parse("schema = 1\n"), ConfigError);                                     // neither
    CHECK_THROWS_AS(parse("schema = 1\n[physics]\nbeta = x\n"), ConfigError);
    CHECK_THROWS_AS(parse("schema = 1\n[geometry]\nn_tau\n"), ConfigError);  // no '='
}

TEST_CASE("n_tauc resolves beta through the scale table") {
    const RunConfig c = parse("schema = 1\n[geometry]\ndimension = 3\nn_s2 = 4\n[physics]\nn_tauc = 8\n");
    CHECK(c.resolved_beta() == scale_lookup(8).beta_c);
}

TEST_CASE("frozen config round-trips") {
    const RunConfig c = parse(kFullConfig);
    std::ostringstream first;
    write_config(c, first);
    std::istringstream is(first.str());
    const RunConfig c2 = parse_config(is, "<roundtrip>");
    std::ostringstream second;
    write_config(c2, second);
    CHECK(first.str() == second.str());
    CHECK(c.hash() == c2.hash());
}

TEST_CASE("work records: jsonl round trip and resumability") {
    TempDir tmp;
    const std::string path = (tmp.path / "records.jsonl").string();
    const BondGraph g = [&] {
        ReplicaLatticeSpec s;
        s.dimension = 2;
        s.n_replicas = 2;
        s.n_tau = 2;
        s.n_s = 3;
        s.slab_length = 0;
        s.protocol_bonds = true;
        return build_replica_lattice(s);
    }();
    const ProtocolSchedule sched = ProtocolSchedule::linear(8, 1, 10);
    const auto all = run_ensemble(g, 0.4, sched, 777, 0, 60, 0);
    append_work_records(path, {all.begin(), all.begin() + 30});
    append_work_records(path, {all.begin() + 30, all.end()});
    const auto back = read_work_records(path, 777);
    REQUIRE(back.size() == all.size());
    for (std::size_t i = 0; i < all.size(); ++i) {
        CHECK(back[i].work == all[i].work);
        CHECK(back[i].trajectory_index == all[i].trajectory_index);
        CHECK(back[i].geometry_hash == all[i].geometry_hash);
    }
    // split ensembles agree with the full one record by record
    const auto part1 = run_ensemble(g, 0.4, sched, 777, 0, 25, 0);
    const auto part2 = run_ensemble(g, 0.4, sched, 777, 25, 60, 0);
    for (std::size_t i = 0; i < part1.size(); ++i) CHECK(part1[i].work == all[i].work);
    for (std::size_t i = 0; i < part2.size(); ++i) CHECK(part2[i].work == all[25 + i].work);
}

TEST_CASE("points csv round trip") {
    TempDir tmp;
    const std::string path = (tmp.path / "points.csv").string();
    PointRow row;
    row.n_tauc = 8;
    row.point.beta = 0.226102;
    row.point.n = 2;
    row.point.n_tau = 80;
    row.point.n_s = 24;
    row.point.n_s2 = 24;
    row.point.l = 4;
    row.point.boundary_sites = 48;
    row.point.dlnz = 0.123456789012345;
    row.point.dlnz_err = 0.001;
    row.point.value_backward = 0.0411;
    row.point.err_backward = 0.0004;
    row.point.value_mid = 0.0456;
    row.point.err_mid = 0.00045;
    write_points_csv(path, {row});
    const auto rows = read_points_csv(path);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].n_tauc == 8);
    CHECK(rows[0].point.dlnz == row.point.dlnz);
    CHECK(rows[0].point.value_mid == row.point.value_mid);
}

TEST_CASE("cmd_simulate: dry run, determinism, resume, oracle agreement") {
    TempDir tmp;
    RunConfig cfg = parse(kFullConfig);
    cfg.output_dir = (tmp.path / "run").string();
    cfg.slab_lengths = {0};
    cfg.n_trajectories = 1500;
    cfg.n_steps = 24;

    std::ostringstream plan;
    CHECK(cmd_simulate(cfg, true, plan) == 0);
    CHECK(plan.str().find("trajectories") != std::string::npos);
    CHECK_FALSE(fs::exists(cfg.output_dir));  // dry run writes nothing

    std::ostringstream log1;
    CHECK(cmd_simulate(cfg, false, log1) == 0);
    const std::string points1 = slurp(fs::path(cfg.output_dir) / "points.csv");
    const std::string records1 = slurp(fs::path(cfg.output_dir) / "records_l0_forward.jsonl");

    // resuming a completed run re-runs nothing and keeps the estimates
    std::ostringstream log2;
    CHECK(cmd_simulate(cfg, false, log2) == 0);
    CHECK(log2.str().find("0 to run") != std::string::npos);
    CHECK(slurp(fs::path(cfg.output_dir) / "points.csv") == points1);
    CHECK(slurp(fs::path(cfg.output_dir) / "records_l0_forward.jsonl") == records1);

    // a fresh run from scratch is byte identical
    RunConfig cfg2 = cfg;
    cfg2.output_dir = (tmp.path / "run2").string();
    std::ostringstream log3;
    CHECK(cmd_simulate(cfg2, false, log3) == 0);
    CHECK(slurp(fs::path(cfg2.output_dir) / "records_l0_forward.jsonl") == records1);
    CHECK(slurp(fs::path(cfg2.output_dir) / "points.csv") == points1);

    // the estimate agrees with exact enumeration within 3 sigma
    const auto rows = read_points_csv((fs::path(cfg.output_dir) / "points.csv").string());
    REQUIRE(rows.size() == 1);
    ReplicaLatticeSpec s0 = cfg.geometry_spec(0, false), s1 = cfg.geometry_spec(1, false);
    const double exact = enumerate_spin_Z(build_replica_lattice(s0), 0.35).log_z -
                         enumerate_spin_Z(build_replica_lattice(s1), 0.35).log_z;
    CHECK(std::abs(rows[0].point.dlnz - exact) <= 3.0 * rows[0].point.dlnz_err);
}

TEST_CASE("cmd_analyze: synthetic end-to-end recovery") {
    TempDir tmp;
    // synthetic pipeline fixture: ansatz truth x linear-in-a cutoff effects
    // x exponential finite-volume effects, three lattice spacings
    const double a_true = 0.33, alpha_true = 0.36, mg_over_tc = 1.5, c2 = 0.8, m_thermo = 1.31;
    RngStream rng(13579, 0);
    std::vector<PointRow> rows;
    std::ofstream mg(tmp.path / "mg.csv");
    mg << "beta,a_mg\n";
    for (const int ntc : {8, 12, 16}) {
        mg << std::setprecision(17) << scale_lookup(ntc).beta_c << ',' << mg_over_tc / ntc << '\n';
        for (const int lk : {2, 4, 6}) {  // l/n_tauc in {1/4, 1/2, 3/4} of n_tauc
            const int l = lk * ntc / 8;
            const double x = mg_over_tc * l / static_cast<double>(ntc);
            const double cont = c2 * ansatz_model(x, a_true, alpha_true) * (1.0 + 0.3 / ntc);
            for (const double L : {1.5, 2.0, 3.0}) {
                PointRow r;
                r.n_tauc = ntc;
                r.point.beta = scale_lookup(ntc).beta_c;
                r.point.n = 2;
                r.point.n_tau = 10 * ntc;
                r.point.n_s = static_cast<int>(L * ntc);
                r.point.n_s2 = r.point.n_s;
                r.point.l = l;
                r.point.boundary_sites = 2 * r.point.n_s;
                const double v = cont * (1.0 + 0.4 * std::exp(-m_thermo * L));
                const double err = 0.015 * std::abs(v);
                r.point.value_mid = v + err * rng.next_normal();
                r.point.err_mid = err;
                r.point.value_backward = r.point.value_mid;
                r.point.err_backward = err;
                r.point.dlnz = 0.0;
                r.point.dlnz_err = err;
                rows.push_back(r);
            }
        }
    }
    mg.close();
    const std::string csv = (tmp.path / "points.csv").string();
    write_points_csv(csv, rows);

    RunConfig cfg = parse("schema = 1\n[geometry]\ndimension = 3\nn_s2 = 4\n[physics]\nn_tauc = 8\n");
    cfg.output_dir = (tmp.path / "out").string();
    cfg.mg_table = (tmp.path / "mg.csv").string();
    cfg.c2_cft = c2;
    cfg.ansatz_window_min = 0.3;  // synthetic data is ansatz-shaped everywhere
    std::ostringstream log;
    CHECK(cmd_analyze(cfg, csv, log) == 0);
    CHECK(fs::exists(fs::path(cfg.output_dir) / "analysis" / "extrapolated.csv"));
    CHECK(fs::exists(fs::path(cfg.output_dir) / "analysis" / "fits.json"));
    const std::string svg = slurp(fs::path(cfg.output_dir) / "analysis" / "cfunction.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);  // fit overlays rendered

    // recover the injected parameters within 2 sigma, parsed from the
    // analyze log line "ansatz: A = <v> +- <e>  alpha = <v> +- <e>"
    const std::string fits = slurp(fs::path(cfg.output_dir) / "analysis" / "fits.json");
    CHECK(fits.find("ansatz") != std::string::npos);
    const std::string line = log.str();
    const auto apos = line.find("ansatz: A = ");
    REQUIRE(apos != std::string::npos);
    double af = 0, aerr = 0, alf = 0, alerr = 0;
    REQUIRE(std::sscanf(line.c_str() + apos, "ansatz: A = %lf +- %lf  alpha = %lf +- %lf", &af, &aerr,
                        &alf, &alerr) == 4);
    CHECK(std::abs(af - a_true) <= 2.0 * aerr);
    CHECK(std::abs(alf - alpha_true) <= 2.0 * alerr);
    // the shared-M thermo fit recovers the finite-volume mass
    const auto mpos = line.find("thermodynamic fit: M/Tc = ");
    REQUIRE(mpos != std::string::npos);
    double mf = 0, merr = 0;
    REQUIRE(std::sscanf(line.c_str() + mpos, "thermodynamic fit: M/Tc = %lf +- %lf", &mf, &merr) == 2);
    CHECK(std::abs(mf - m_thermo) <= 2.5 * merr);
}

TEST_CASE("cmd_analyze: single-volume input warns and exits 0") {
    TempDir tmp;
    std::vector<PointRow> rows;
    for (const int ntc : {8, 12}) {
        PointRow r;
        r.n_tauc = ntc;
        r.point.beta = scale_lookup(ntc).beta_c;
        r.point.n = 2;
        r.point.l = ntc / 4;
        r.point.n_s = 3 * ntc;
        r.point.value_mid = 0.4;
        r.point.err_mid = 0.01;
        r.point.value_backward = 0.4;
        r.point.err_backward = 0.01;
        rows.push_back(r);
    }
    const std::string csv = (tmp.path / "points.csv").string();
    write_points_csv(csv, rows);
    RunConfig cfg = parse("schema = 1\n[physics]\nbeta = 0.3\n");
    cfg.output_dir = (tmp.path / "out").string();
    std::ostringstream log;
    CHECK(cmd_analyze(cfg, csv, log) == 0);
    CHECK(log.str().find("unextrapolated") != std::string::npos);
    CHECK(log.str().find("no m_g table") != std::string::npos);
}

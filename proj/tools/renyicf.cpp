// renyicf: replica-lattice Renyi c-functions via Jarzynski Monte Carlo and
// exact Kramers-Wannier duality checks.
//
// Subcommands: simulate, verify <suite>, analyze, dualize <beta|coeffs>,
// lattice dump, scale <Ntau>.  Exit codes: 0 success, 1 verification
// failure, 2 config error.

#include <fstream>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>

#include "renyicf/analysis.hpp"
#include "renyicf/config.hpp"
#include "renyicf/driver.hpp"
#include "renyicf/duality.hpp"
#include "renyicf/model.hpp"
#include "renyicf/verify.hpp"

using namespace renyicf;

int main(int argc, char** argv) {
    CLI::App app{"Renyi entropic c-functions of replica lattice spin models: "
                 "Jarzynski-equality Monte Carlo and exact duality verification"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "run trajectory ensembles per (beta, l) point");
    std::string sim_cfg;
    bool dry_run = false;
    sim->add_option("-c,--config", sim_cfg, "run configuration file")->required();
    sim->add_flag("--dry-run", dry_run, "emit the plan and exit");

    // verify
    auto* ver = app.add_subcommand("verify", "run a named verification suite");
    std::string suite;
    bool as_json = false;
    ver->add_option("suite", suite, "one of: " + [] {
            std::string s;
            for (const auto& n : suite_names()) s += n + " ";
            return s;
        }())
        ->required();
    ver->add_flag("--json", as_json, "machine-readable report");

    // analyze
    auto* ana = app.add_subcommand("analyze", "scale setting, extrapolations and model fits");
    std::string ana_cfg, points_file;
    ana->add_option("-c,--config", ana_cfg, "run configuration file")->required();
    ana->add_option("-p,--points", points_file, "points CSV (default <output_dir>/points.csv)");

    // dualize
    auto* dua = app.add_subcommand("dualize", "coupling map, prefactors and entropy shifts");
    auto* dua_beta = dua->add_subcommand("beta", "map beta to beta* and print prefactor pairs");
    double beta_in = 0.0;
    int dua_dim = 2, dua_n = 1;
    long long dua_sites = 0, dua_ng = 0, dua_da = 0;
    dua_beta->add_option("value", beta_in, "spin-model coupling beta")->required();
    dua_beta->add_option("--dim", dua_dim, "dimension (2 or 3)");
    dua_beta->add_option("--replicas", dua_n, "replica count");
    dua_beta->add_option("--sites", dua_sites, "|Lambda| per replica");
    dua_beta->add_option("--ng", dua_ng, "N_g (maximal-tree links)");
    dua_beta->add_option("--boundary", dua_da, "|dA| boundary sites");
    auto* dua_coeffs = dua->add_subcommand("coeffs", "clock-model Fourier coefficients C_k(beta)");
    int coeff_n = 2;
    double coeff_beta = 1.0;
    dua_coeffs->add_option("N", coeff_n, "Z_N clock order")->required();
    dua_coeffs->add_option("beta", coeff_beta, "coupling")->required();
    dua->require_subcommand(1);

    // lattice dump
    auto* lat = app.add_subcommand("lattice", "geometry inspection");
    auto* lat_dump = lat->add_subcommand("dump", "emit the bond list as CSV");
    std::string lat_cfg;
    int lat_l = -1;
    bool lat_protocol = false;
    lat_dump->add_option("-c,--config", lat_cfg, "run configuration file")->required();
    lat_dump->add_option("-l,--slab", lat_l, "slab length (default: first of slab_lengths)");
    lat_dump->add_flag("--protocol", lat_protocol, "include the switch-bond pair of the protocol");
    lat->require_subcommand(1);

    // scale
    auto* sc = app.add_subcommand("scale", "critical-coupling lookup");
    int ntau = 0;
    sc->add_option("ntau", ntau, "N_tau,c")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim) {
            const RunConfig cfg = load_config(sim_cfg);
            return cmd_simulate(cfg, dry_run, std::cout);
        }
        if (*ver) {
            const SuiteReport rep = run_suite(suite);
            if (as_json) print_report_json(rep, std::cout);
            else print_report(rep, std::cout);
            return rep.pass() ? 0 : 1;
        }
        if (*ana) {
            const RunConfig cfg = load_config(ana_cfg);
            const std::string pts = points_file.empty() ? cfg.resolved_output_dir() + "/points.csv" : points_file;
            return cmd_analyze(cfg, pts, std::cout);
        }
        if (*dua_beta) {
            const double bs = dual_coupling(beta_in);
            std::cout << std::setprecision(15) << "beta = " << beta_in << "\nbeta_star = " << bs
                      << "\ninvolution_check = " << dual_coupling(bs) << "\n";
            if (dua_sites > 0) {
                DualityRelation rel;
                rel.dimension = dua_dim;
                rel.n_replicas = dua_n;
                rel.n_sites = dua_sites;
                rel.n_gauge_fixed = dua_ng;
                rel.boundary_sites = dua_da;
                rel.form = dua_dim == 2 ? (dua_n > 1 ? DualityForm::Replica2D : DualityForm::Ising2D)
                                        : (dua_n > 1 ? DualityForm::Replica3DEnhanced : DualityForm::Gauge3D);
                const LogPrefactor p = partition_prefactor(rel);
                std::cout << "prefactor: 2^(" << p.two_pow2 / 2.0 << ") * sinh(2 beta*)^(" << p.two_sinh / 2.0
                          << ")\nln_prefactor = " << p.log_value(beta_in) << "\n";
                if (dua_dim == 2)
                    std::cout << "entropy_shift = ln 2 = " << renyi_shift_2d(0.0) << "\n";
                else if (dua_da > 0)
                    std::cout << "entropy_shift = (|dA|-1) ln 2 = " << renyi_shift_3d(0.0, static_cast<int>(dua_da))
                              << "\n";
            }
            return 0;
        }
        if (*dua_coeffs) {
            std::cout << "k,C_k\n" << std::setprecision(17);
            const auto c = clock_fourier_coeffs(coeff_n, coeff_beta);
            for (std::size_t k = 0; k < c.size(); ++k) std::cout << k << ',' << c[k] << '\n';
            return 0;
        }
        if (*lat_dump) {
            const RunConfig cfg = load_config(lat_cfg);
            const int l = lat_l >= 0 ? lat_l : cfg.slab_lengths.front();
            const BondGraph g = build_replica_lattice(cfg.geometry_spec(l, lat_protocol));
            dump_bonds_csv(g, std::cout);
            return 0;
        }
        if (*sc) {
            const ScaleRow row = scale_lookup(ntau);
            std::cout << std::setprecision(10) << "n_tauc = " << row.n_tauc << "\nbeta_c = " << row.beta_c
                      << " +- " << row.beta_c_err << "\na_tc = " << lattice_tc(ntau) << "\n";
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

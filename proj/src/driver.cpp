#include "renyicf/driver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "renyicf/analysis.hpp"
#include "renyicf/sampler.hpp"

namespace renyicf {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string dir_name(ProtocolSchedule::Direction d) {
    return d == ProtocolSchedule::Direction::Forward ? "forward" : "reverse";
}

}  // namespace

void append_work_records(const std::string& path, const std::vector<WorkRecord>& records) {
    std::ofstream out(path, std::ios::app);
    if (!out) throw std::runtime_error("cannot open records file '" + path + "' for append");
    for (const WorkRecord& r : records) {
        json j;
        j["seed"] = r.trajectory_index;
        j["direction"] = dir_name(r.direction);
        j["W"] = r.work;
        j["n_steps"] = r.n_steps;
        j["beta"] = r.beta;
        j["geometry_hash"] = r.geometry_hash;
        out << j.dump() << '\n';
    }
}

std::vector<WorkRecord> read_work_records(const std::string& path, std::uint64_t master_seed) {
    std::vector<WorkRecord> out;
    std::ifstream in(path);
    if (!in) return out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json j = json::parse(line);
        WorkRecord r;
        r.master_seed = master_seed;
        r.trajectory_index = j.at("seed").get<std::uint64_t>();
        r.direction = j.at("direction").get<std::string>() == "forward" ? ProtocolSchedule::Direction::Forward
                                                                        : ProtocolSchedule::Direction::Reverse;
        r.work = j.at("W").get<double>();
        r.n_steps = j.at("n_steps").get<int>();
        r.beta = j.at("beta").get<double>();
        r.geometry_hash = j.at("geometry_hash").get<std::uint64_t>();
        out.push_back(r);
    }
    return out;
}

void write_points_csv(const std::string& path, const std::vector<PointRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open points file '" + path + "'");
    out << "beta,n,n_tau,n_s,n_s2,l,n_tauc,boundary_sites,dlnz,dlnz_err,value_backward,err_backward,"
           "value_mid,err_mid\n";
    out << std::setprecision(17);
    for (const PointRow& r : rows) {
        const CFunctionPoint& p = r.point;
        out << p.beta << ',' << p.n << ',' << p.n_tau << ',' << p.n_s << ',' << p.n_s2 << ',' << p.l << ','
            << r.n_tauc << ',' << p.boundary_sites << ',' << p.dlnz << ',' << p.dlnz_err << ','
            << p.value_backward << ',' << p.err_backward << ',' << p.value_mid << ',' << p.err_mid << '\n';
    }
}

std::vector<PointRow> read_points_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open points file '" + path + "'");
    std::string header;
    std::getline(in, header);
    const std::string expected =
        "beta,n,n_tau,n_s,n_s2,l,n_tauc,boundary_sites,dlnz,dlnz_err,value_backward,err_backward,"
        "value_mid,err_mid";
    if (header != expected) throw std::runtime_error("points file '" + path + "': unexpected header");
    std::vector<PointRow> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream is(line);
        PointRow r;
        CFunctionPoint& p = r.point;
        char c;
        is >> p.beta >> c >> p.n >> c >> p.n_tau >> c >> p.n_s >> c >> p.n_s2 >> c >> p.l >> c >> r.n_tauc >>
            c >> p.boundary_sites >> c >> p.dlnz >> c >> p.dlnz_err >> c >> p.value_backward >> c >>
            p.err_backward >> c >> p.value_mid >> c >> p.err_mid;
        if (is.fail()) throw std::runtime_error("points file '" + path + "': malformed row: " + line);
        rows.push_back(r);
    }
    return rows;
}

std::vector<WorkRecord> run_ensemble(const BondGraph& graph, double beta, const ProtocolSchedule& schedule,
                                     std::uint64_t master_seed, std::uint64_t index_begin,
                                     std::uint64_t index_end, int threads) {
    const std::uint64_t n = index_end - index_begin;
    std::vector<WorkRecord> out(n);
    if (threads <= 0) {
        const unsigned hc = std::thread::hardware_concurrency();
        threads = static_cast<int>(std::min(hc == 0 ? 1u : hc, 8u));
    }
    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::uint64_t i = next.fetch_add(1);
            if (i >= n) return;
            out[i] = run_trajectory(graph, beta, schedule, master_seed, index_begin + i);
        }
    };
    if (threads <= 1 || n < 2) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return out;
}

namespace {

struct PointPlan {
    int l = 0;
    ProtocolSchedule::Direction dir = ProtocolSchedule::Direction::Forward;
    std::string records_path;
};

int resolve_equilibration(const RunConfig& cfg, const BondGraph& graph, double beta) {
    if (cfg.equilibration_sweeps >= 0) return cfg.equilibration_sweeps;
    // 10 x integrated autocorrelation time of the energy at lambda = 0,
    // floor of 100 sweeps
    RngStream rng(cfg.master_seed, 0xeeee000011110000ULL);
    const double tau = integrated_autocorrelation(graph, couplings_at(graph, beta, 0.0), beta, rng);
    return std::max(100, static_cast<int>(std::ceil(10.0 * tau)));
}

}  // namespace

int cmd_simulate(const RunConfig& cfg, bool dry_run, std::ostream& log) {
    const double beta = cfg.resolved_beta();
    if (cfg.variant != GeometryVariant::StandardCut)
        throw ConfigError("simulate: sampling runs on the spin side (variant = standard_cut)");

    std::vector<PointPlan> plans;
    for (const int l : cfg.slab_lengths) {
        plans.push_back({l, ProtocolSchedule::Direction::Forward, ""});
        if (cfg.reverse) plans.push_back({l, ProtocolSchedule::Direction::Reverse, ""});
    }

    if (dry_run) {
        log << "plan: " << plans.size() << " ensembles, beta = " << beta << "\n";
        for (const PointPlan& p : plans) {
            const ReplicaLatticeSpec spec = cfg.geometry_spec(p.l, true);
            spec.validate();
            const long long sweeps =
                static_cast<long long>(cfg.n_trajectories) *
                (cfg.n_steps * cfg.sweeps_per_step + std::max(cfg.equilibration_sweeps, 100));
            log << "  l = " << p.l << " (" << dir_name(p.dir) << "): " << cfg.n_trajectories
                << " trajectories x " << cfg.n_steps << " steps, ~" << sweeps << " sweeps\n";
        }
        return 0;
    }

    const fs::path outdir = cfg.resolved_output_dir();
    std::error_code ec;
    fs::create_directories(outdir, ec);
    {
        std::ofstream frozen(outdir / "config.frozen.cfg");
        if (!frozen) throw std::runtime_error("output directory '" + outdir.string() + "' is not writable");
        write_config(cfg, frozen);
    }

    std::vector<PointRow> rows;
    json estimates = json::array();
    std::map<int, RatioEstimate> fwd_by_l;

    for (PointPlan& plan : plans) {
        const ReplicaLatticeSpec spec = cfg.geometry_spec(plan.l, true);
        const BondGraph graph = build_replica_lattice(spec);
        const int equil = resolve_equilibration(cfg, graph, beta);
        const ProtocolSchedule sched =
            ProtocolSchedule::linear(cfg.n_steps, cfg.sweeps_per_step, equil, plan.dir);

        std::ostringstream fname;
        fname << "records_l" << plan.l << "_" << dir_name(plan.dir) << ".jsonl";
        plan.records_path = (outdir / fname.str()).string();

        std::vector<WorkRecord> records = read_work_records(plan.records_path, cfg.master_seed);
        std::set<std::uint64_t> have;
        for (const WorkRecord& r : records) {
            if (r.geometry_hash != graph.hash() || r.beta != beta || r.n_steps != cfg.n_steps)
                throw std::runtime_error("records file " + plan.records_path +
                                         " does not match this config; refusing to mix ensembles");
            have.insert(r.trajectory_index);
        }
        // reverse trajectories draw from a disjoint stream range
        const std::uint64_t base = plan.dir == ProtocolSchedule::Direction::Forward ? 0 : (1ULL << 32);
        std::vector<std::uint64_t> missing;
        for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(cfg.n_trajectories); ++i)
            if (!have.count(base + i)) missing.push_back(base + i);

        log << "l = " << plan.l << " (" << dir_name(plan.dir) << "): " << records.size() << " existing, "
            << missing.size() << " to run (equilibration " << equil << " sweeps)\n";

        std::size_t done = 0;
        while (done < missing.size()) {
            const std::size_t batch =
                std::min<std::size_t>(missing.size() - done, std::max(cfg.checkpoint_interval, 1));
            std::vector<WorkRecord> batch_records;
            batch_records.reserve(batch);
            // indices may be non-contiguous after a resume
            const std::uint64_t lo = missing[done], hi = missing[done + batch - 1] + 1;
            if (hi - lo == batch) {
                batch_records = run_ensemble(graph, beta, sched, cfg.master_seed, lo, hi, cfg.threads);
            } else {
                for (std::size_t k = 0; k < batch; ++k)
                    batch_records.push_back(
                        run_trajectory(graph, beta, sched, cfg.master_seed, missing[done + k]));
            }
            append_work_records(plan.records_path, batch_records);
            records.insert(records.end(), batch_records.begin(), batch_records.end());
            done += batch;
        }

        std::sort(records.begin(), records.end(),
                  [](const WorkRecord& a, const WorkRecord& b) { return a.trajectory_index < b.trajectory_index; });
        const RatioEstimate est = estimate_ratio(records);
        json je;
        je["l"] = plan.l;
        je["direction"] = dir_name(plan.dir);
        je["log_ratio"] = est.log_ratio;
        je["err"] = est.err;
        je["mean_work"] = est.mean_work;
        je["n_trajectories"] = est.n_trajectories;
        je["equilibration_sweeps"] = equil;

        if (plan.dir == ProtocolSchedule::Direction::Forward) {
            fwd_by_l[plan.l] = est;
            std::optional<ScaleInfo> scale;
            if (cfg.n_tauc) scale = ScaleInfo{*cfg.n_tauc, std::nullopt};
            const CFunctionPoint p = c_function_point(est, cfg.geometry_spec(plan.l, true), scale);
            rows.push_back({p, cfg.n_tauc.value_or(0)});
        } else if (fwd_by_l.count(plan.l)) {
            const ReverseReport rep = reverse_consistency(fwd_by_l[plan.l], est);
            je["reverse_discrepancy"] = rep.discrepancy;
            je["reverse_n_sigma"] = rep.n_sigma;
            je["reverse_flagged"] = rep.flagged;
            if (rep.flagged)
                log << "  warning: forward/reverse discrepancy " << rep.n_sigma << " sigma at l = " << plan.l
                    << "\n";
        }
        estimates.push_back(je);
    }

    write_points_csv((outdir / "points.csv").string(), rows);
    {
        std::ofstream out(outdir / "estimates.json");
        out << estimates.dump(2) << '\n';
    }
    log << "wrote " << (outdir / "points.csv").string() << "\n";
    return 0;
}

// --- analyze ----------------------------------------------------------------

namespace {

std::map<double, double> load_mg_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open m_g table '" + path + "'");
    std::map<double, double> t;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("beta", 0) == 0) continue;
        std::istringstream is(line);
        double beta, amg;
        char c;
        is >> beta >> c >> amg;
        if (is.fail()) throw std::runtime_error("malformed m_g table row: " + line);
        t[beta] = amg;
    }
    return t;
}

double mg_lookup(const std::map<double, double>& table, double beta) {
    double best = -1.0, bestd = 1e300;
    for (const auto& [b, v] : table) {
        const double d = std::abs(b - beta);
        if (d < bestd) {
            bestd = d;
            best = v;
        }
    }
    if (bestd > 1e-6) throw std::runtime_error("no m_g entry within 1e-6 of beta = " + std::to_string(beta));
    return best;
}

void write_svg_plot(const std::string& path, const std::vector<std::array<double, 3>>& pts,
                    const FitResult* ansatz, const FitResult* powerlaw, bool normalized) {
    // x = l m_g, y = (normalized) c-function; linear axes like figure scale
    double xmax = 0.0, ymax = 0.0;
    for (const auto& p : pts) {
        xmax = std::max(xmax, p[0]);
        ymax = std::max(ymax, p[1] + p[2]);
    }
    if (pts.empty()) {
        xmax = 3.0;
        ymax = 1.2;
    }
    xmax *= 1.1;
    ymax *= 1.15;
    const double w = 640, h = 440, ml = 70, mb = 50, mt = 20, mr = 20;
    auto X = [&](double x) { return ml + x / xmax * (w - ml - mr); };
    auto Y = [&](double y) { return h - mb - y / ymax * (h - mb - mt); };
    std::ofstream os(path);
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h << "'>\n";
    os << "<rect width='100%' height='100%' fill='white'/>\n";
    os << "<line x1='" << ml << "' y1='" << h - mb << "' x2='" << w - mr << "' y2='" << h - mb
       << "' stroke='black'/>\n";
    os << "<line x1='" << ml << "' y1='" << h - mb << "' x2='" << ml << "' y2='" << mt
       << "' stroke='black'/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double xv = xmax * i / 5.0, yv = ymax * i / 5.0;
        os << "<text x='" << X(xv) << "' y='" << h - mb + 18 << "' font-size='11' text-anchor='middle'>"
           << std::setprecision(3) << xv << "</text>\n";
        os << "<text x='" << ml - 8 << "' y='" << Y(yv) + 4 << "' font-size='11' text-anchor='end'>"
           << std::setprecision(3) << yv << "</text>\n";
    }
    os << "<text x='" << (ml + w - mr) / 2 << "' y='" << h - 12
       << "' font-size='13' text-anchor='middle'>l m_g</text>\n";
    os << "<text x='16' y='" << (mt + h - mb) / 2 << "' font-size='13' text-anchor='middle' transform='rotate(-90 16 "
       << (mt + h - mb) / 2 << ")'>" << (normalized ? "C2 / C2_CFT" : "C2") << "</text>\n";
    auto curve = [&](const FitResult& f, const char* color, bool is_ansatz) {
        os << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
        for (int i = 1; i <= 200; ++i) {
            const double x = xmax * i / 200.0;
            const double y = is_ansatz ? ansatz_model(x, f.p[0], f.p[1]) : powerlaw_model(x, f.p[0], f.p[1]);
            if (y >= 0.0 && y <= ymax) os << X(x) << ',' << Y(y) << ' ';
        }
        os << "'/>\n";
    };
    if (ansatz) curve(*ansatz, "#d62728", true);
    if (powerlaw) curve(*powerlaw, "#1f77b4", false);
    for (const auto& p : pts) {
        os << "<line x1='" << X(p[0]) << "' y1='" << Y(std::max(0.0, p[1] - p[2])) << "' x2='" << X(p[0])
           << "' y2='" << Y(p[1] + p[2]) << "' stroke='black' stroke-width='1'/>\n";
        os << "<circle cx='" << X(p[0]) << "' cy='" << Y(p[1]) << "' r='3' fill='#2ca02c'/>\n";
    }
    os << "</svg>\n";
}

}  // namespace

int cmd_analyze(const RunConfig& cfg, const std::string& points_csv, std::ostream& log) {
    const std::vector<PointRow> rows = read_points_csv(points_csv);
    if (rows.empty()) throw std::runtime_error("no points in " + points_csv);
    for (const PointRow& r : rows)
        if (r.n_tauc <= 0)
            throw std::runtime_error("analyze needs the scale reference n_tauc on every row");

    const fs::path outdir = fs::path(cfg.resolved_output_dir()) / "analysis";
    fs::create_directories(outdir);

    // --- thermodynamic limit: group by (n_tauc, l, beta), fit over N_s ------
    std::map<std::string, std::vector<const PointRow*>> groups;
    for (const PointRow& r : rows) {
        std::ostringstream key;
        key << "nt" << r.n_tauc << "_l" << r.point.l << "_b" << std::setprecision(10) << r.point.beta;
        groups[key.str()].push_back(&r);
    }
    std::vector<ThermoGroup> tgroups;
    std::vector<std::string> order;
    for (auto& [key, members] : groups) {
        ThermoGroup g;
        g.key = key;
        for (const PointRow* r : members)
            g.points.push_back({static_cast<double>(r->point.n_s) / r->n_tauc, r->point.value_mid,
                                r->point.err_mid > 0.0 ? r->point.err_mid : 1e-12, 0});
        tgroups.push_back(std::move(g));
        order.push_back(key);
    }
    const ThermoResult thermo = thermo_extrapolate(tgroups);
    int unextrapolated = 0;
    for (const auto& g : thermo.groups)
        if (!g.extrapolated) ++unextrapolated;
    if (unextrapolated > 0)
        log << "warning: " << unextrapolated
            << " group(s) with fewer than 3 volumes passed through unextrapolated\n";
    if (thermo.mass_constrained)
        log << "thermodynamic fit: M/Tc = " << thermo.mass << " +- " << thermo.mass_err
            << " (chi2_red = " << thermo.fit.chi2_red << ")\n";

    // --- continuum limit: group by l T_c ------------------------------------
    struct ContGroup {
        std::vector<ContinuumPoint> pts;
        double mg_over_tc_sum = 0.0;
        int mg_n = 0;
        double ltc = 0.0;
    };
    std::map<std::string, ContGroup> cont;
    std::map<double, double> mg_table;
    if (!cfg.mg_table.empty()) mg_table = load_mg_table(cfg.mg_table);

    for (std::size_t gi = 0; gi < thermo.groups.size(); ++gi) {
        const auto& members = groups[order[gi]];
        const PointRow& r0 = *members.front();
        const double ltc = static_cast<double>(r0.point.l) / r0.n_tauc;
        const double ratio = r0.point.value_mid != 0.0 ? r0.point.value_backward / r0.point.value_mid
                                                       : 1.0;  // exact prefactor ratio, volume independent
        std::ostringstream key;
        key << std::fixed << std::setprecision(6) << ltc;
        ContGroup& cg = cont[key.str()];
        cg.ltc = ltc;
        ContinuumPoint cp;
        cp.a = 1.0 / r0.n_tauc;
        cp.value_mid = thermo.groups[gi].c;
        cp.value_backward = thermo.groups[gi].c * ratio;
        cp.err = thermo.groups[gi].c_err > 0.0 ? thermo.groups[gi].c_err : 1e-12;
        cg.pts.push_back(cp);
        if (!mg_table.empty()) {
            cg.mg_over_tc_sum += mg_lookup(mg_table, r0.point.beta) * r0.n_tauc;
            cg.mg_n += 1;
        }
    }

    std::ofstream extra(outdir / "extrapolated.csv");
    extra << "l_tc,l_mg,value,stat_err,syst_err,total_err,extrapolated\n" << std::setprecision(12);
    std::vector<std::array<double, 3>> plot_pts;
    std::vector<DataPoint> fit_pts;
    int single_spacing = 0;
    for (auto& [key, cg] : cont) {
        ContinuumResult res = continuum_extrapolate(cg.pts);
        if (!res.extrapolated) ++single_spacing;
        double value = res.value, err = res.total_err;
        if (cfg.c2_cft) {
            value /= *cfg.c2_cft;
            err /= *cfg.c2_cft;
        }
        double lmg = 0.0;
        if (cg.mg_n > 0) {
            lmg = cg.ltc * (cg.mg_over_tc_sum / cg.mg_n);
            plot_pts.push_back({lmg, value, err});
            fit_pts.push_back({lmg, value, err > 0.0 ? err : 1e-12, 0});
        }
        extra << cg.ltc << ',' << lmg << ',' << value << ',' << res.stat_err << ',' << res.syst_err << ','
              << res.total_err << ',' << (res.extrapolated ? 1 : 0) << '\n';
    }
    if (single_spacing > 0)
        log << "warning: " << single_spacing << " point(s) at a single lattice spacing (no continuum fit)\n";
    if (mg_table.empty())
        log << "warning: no m_g table configured; skipping l m_g axes, model fits and plot\n";
    if (!cfg.c2_cft) log << "warning: analysis.c2_cft not set; values left unnormalized\n";

    json jfits = json::object();
    std::optional<FitResult> fa, fp;
    if (!fit_pts.empty()) {
        std::vector<DataPoint> wa, wp;
        for (const DataPoint& d : fit_pts) {
            if (d.x >= cfg.ansatz_window_min) wa.push_back(d);
            if (d.x <= cfg.powerlaw_window_max && d.x > 0.0) wp.push_back(d);
        }
        auto record = [&](const char* name, const FitResult& f) {
            json j;
            j["params"] = f.p;
            j["errors"] = f.err;
            j["names"] = f.names;
            j["chi2_red"] = f.chi2_red;
            j["dof"] = f.dof;
            j["converged"] = f.converged;
            j["flags"] = f.flags;
            jfits[name] = j;
            log << name << ": ";
            for (std::size_t i = 0; i < f.p.size(); ++i)
                log << f.names[i] << " = " << f.p[i] << " +- " << f.err[i] << "  ";
            log << "chi2_red = " << f.chi2_red << "\n";
        };
        if (wa.size() >= 3) {
            fa = fit_ansatz(wa);
            record("ansatz", *fa);
        }
        if (wp.size() >= 3) {
            fp = fit_powerlaw(wp);
            record("powerlaw", *fp);
        }
    }
    if (thermo.mass_constrained) {
        jfits["thermo"] = {{"M", thermo.mass}, {"M_err", thermo.mass_err}, {"chi2_red", thermo.fit.chi2_red}};
    }
    {
        std::ofstream jf(outdir / "fits.json");
        jf << jfits.dump(2) << '\n';
    }
    if (!mg_table.empty())
        write_svg_plot((outdir / "cfunction.svg").string(), plot_pts, fa ? &*fa : nullptr,
                       fp ? &*fp : nullptr, cfg.c2_cft.has_value());
    log << "wrote " << (outdir / "extrapolated.csv").string() << "\n";
    return 0;
}

}  // namespace renyicf

#include "renyicf/config.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "renyicf/analysis.hpp"
#include "renyicf/rng.hpp"

namespace renyicf {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

GeometryVariant parse_variant(const std::string& v, const std::string& where) {
    if (v == "standard_cut") return GeometryVariant::StandardCut;
    if (v == "enhanced_vertex") return GeometryVariant::EnhancedVertex;
    if (v == "central_plaquette") return GeometryVariant::CentralPlaquette;
    throw ConfigError(where + ": unknown geometry variant '" + v + "'");
}

Boundary parse_boundary(const std::string& v, const std::string& where) {
    if (v == "periodic") return Boundary::Periodic;
    if (v == "antiperiodic") return Boundary::Antiperiodic;
    if (v == "free") return Boundary::Free;
    throw ConfigError(where + ": unknown boundary condition '" + v + "'");
}

template <typename T>
T parse_num(const std::string& v, const std::string& where) {
    std::istringstream is(v);
    T out;
    is >> out;
    if (is.fail() || !trim(v.substr(is.tellg() == -1 ? v.size() : static_cast<std::size_t>(is.tellg()))).empty())
        throw ConfigError(where + ": cannot parse value '" + v + "'");
    return out;
}

bool parse_bool(const std::string& v, const std::string& where) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(where + ": cannot parse boolean '" + v + "'");
}

}  // namespace

RunConfig parse_config(std::istream& in, const std::string& origin) {
    RunConfig c;
    std::string section;
    std::string line;
    int lineno = 0;
    bool have_schema = false, have_slabs = false;

    while (std::getline(in, line)) {
        ++lineno;
        const auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line.erase(hash_pos);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = origin + ":" + std::to_string(lineno);

        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "geometry" && section != "physics" && section != "protocol" &&
                section != "analysis" && section != "io")
                throw ConfigError(where + ": unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));

        if (section.empty()) {
            if (key == "schema") {
                c.schema = parse_num<int>(val, where);
                if (c.schema != 1) throw ConfigError(where + ": unsupported schema version " + val);
                have_schema = true;
            } else {
                throw ConfigError(where + ": unknown top-level key '" + key + "'");
            }
        } else if (section == "geometry") {
            if (key == "dimension") c.dimension = parse_num<int>(val, where);
            else if (key == "n_tau") c.n_tau = parse_num<int>(val, where);
            else if (key == "n_s") c.n_s = parse_num<int>(val, where);
            else if (key == "n_s2") c.n_s2 = parse_num<int>(val, where);
            else if (key == "variant") c.variant = parse_variant(val, where);
            else if (key == "bc_tau") c.bc_tau = parse_boundary(val, where);
            else if (key == "bc_s") c.bc_s = parse_boundary(val, where);
            else if (key == "bc_s2") c.bc_s2 = parse_boundary(val, where);
            else if (key == "cut_offset") c.cut_offset = parse_num<int>(val, where);
            else if (key == "cut_slice") c.cut_slice = parse_num<int>(val, where);
            else throw ConfigError(where + ": unknown [geometry] key '" + key + "'");
        } else if (section == "physics") {
            if (key == "replicas") c.n_replicas = parse_num<int>(val, where);
            else if (key == "beta") c.beta = parse_num<double>(val, where);
            else if (key == "n_tauc") c.n_tauc = parse_num<int>(val, where);
            else if (key == "slab_lengths") {
                std::istringstream is(val);
                int l;
                c.slab_lengths.clear();
                while (is >> l) c.slab_lengths.push_back(l);
                if (c.slab_lengths.empty()) throw ConfigError(where + ": empty slab_lengths");
                have_slabs = true;
            } else throw ConfigError(where + ": unknown [physics] key '" + key + "'");
        } else if (section == "protocol") {
            if (key == "n_steps") c.n_steps = parse_num<int>(val, where);
            else if (key == "sweeps_per_step") c.sweeps_per_step = parse_num<int>(val, where);
            else if (key == "equilibration_sweeps")
                c.equilibration_sweeps = val == "auto" ? -1 : parse_num<int>(val, where);
            else if (key == "trajectories") c.n_trajectories = parse_num<int>(val, where);
            else if (key == "master_seed") c.master_seed = parse_num<std::uint64_t>(val, where);
            else if (key == "reverse") c.reverse = parse_bool(val, where);
            else throw ConfigError(where + ": unknown [protocol] key '" + key + "'");
        } else if (section == "analysis") {
            if (key == "c2_cft") c.c2_cft = parse_num<double>(val, where);
            else if (key == "mg_table") c.mg_table = val;
            else if (key == "ansatz_window_min") c.ansatz_window_min = parse_num<double>(val, where);
            else if (key == "powerlaw_window_max") c.powerlaw_window_max = parse_num<double>(val, where);
            else throw ConfigError(where + ": unknown [analysis] key '" + key + "'");
        } else if (section == "io") {
            if (key == "output_dir") c.output_dir = val;
            else if (key == "threads") c.threads = parse_num<int>(val, where);
            else if (key == "checkpoint_interval") c.checkpoint_interval = parse_num<int>(val, where);
            else throw ConfigError(where + ": unknown [io] key '" + key + "'");
        }
    }

    if (!have_schema) throw ConfigError(origin + ": missing required top-level 'schema = 1'");
    if (!have_slabs) c.slab_lengths = {1};
    if (c.beta && c.n_tauc) throw ConfigError(origin + ": give either physics.beta or physics.n_tauc, not both");
    if (!c.beta && !c.n_tauc) throw ConfigError(origin + ": one of physics.beta or physics.n_tauc is required");
    try {
        c.geometry_spec(c.slab_lengths.front(), false).validate();
        (void)c.resolved_beta();
    } catch (const std::exception& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in, path);
}

double RunConfig::resolved_beta() const {
    if (beta) return *beta;
    return scale_lookup(*n_tauc).beta_c;
}

ReplicaLatticeSpec RunConfig::geometry_spec(int slab_length, bool protocol) const {
    ReplicaLatticeSpec s;
    s.dimension = dimension;
    s.n_replicas = n_replicas;
    s.n_tau = n_tau;
    s.n_s = n_s;
    s.n_s2 = dimension == 3 ? n_s2 : 1;
    s.slab_length = slab_length;
    s.cut_offset = cut_offset;
    s.cut_slice = cut_slice;
    s.variant = variant;
    s.bc_tau = bc_tau;
    s.bc_s = bc_s;
    s.bc_s2 = bc_s2;
    s.protocol_bonds = protocol;
    return s;
}

std::string RunConfig::resolved_output_dir() const {
    if (!output_dir.empty()) return output_dir;
    if (const char* env = std::getenv("RENYICF_OUTPUT_DIR")) return env;
    return "runs";
}

std::uint64_t RunConfig::hash() const {
    std::ostringstream os;
    write_config(*this, os);
    const std::string s = os.str();
    return fnv1a(s.data(), s.size());
}

void write_config(const RunConfig& c, std::ostream& os) {
    os << "schema = " << c.schema << "\n\n[geometry]\n";
    os << "dimension = " << c.dimension << "\nn_tau = " << c.n_tau << "\nn_s = " << c.n_s
       << "\nn_s2 = " << c.n_s2 << "\nvariant = " << to_string(c.variant) << "\nbc_tau = " << to_string(c.bc_tau)
       << "\nbc_s = " << to_string(c.bc_s) << "\nbc_s2 = " << to_string(c.bc_s2)
       << "\ncut_offset = " << c.cut_offset << "\ncut_slice = " << c.cut_slice << "\n";
    os << "\n[physics]\nreplicas = " << c.n_replicas << "\n";
    if (c.beta) {
        os.precision(17);
        os << "beta = " << *c.beta << "\n";
    }
    if (c.n_tauc) os << "n_tauc = " << *c.n_tauc << "\n";
    os << "slab_lengths =";
    for (const int l : c.slab_lengths) os << ' ' << l;
    os << "\n\n[protocol]\nn_steps = " << c.n_steps << "\nsweeps_per_step = " << c.sweeps_per_step
       << "\nequilibration_sweeps = ";
    if (c.equilibration_sweeps < 0) os << "auto";
    else os << c.equilibration_sweeps;
    os << "\ntrajectories = " << c.n_trajectories << "\nmaster_seed = " << c.master_seed
       << "\nreverse = " << (c.reverse ? "true" : "false") << "\n";
    os << "\n[analysis]\n";
    if (c.c2_cft) os << "c2_cft = " << *c.c2_cft << "\n";
    if (!c.mg_table.empty()) os << "mg_table = " << c.mg_table << "\n";
    os << "ansatz_window_min = " << c.ansatz_window_min << "\npowerlaw_window_max = " << c.powerlaw_window_max
       << "\n";
    os << "\n[io]\n";
    if (!c.output_dir.empty()) os << "output_dir = " << c.output_dir << "\n";
    os << "threads = " << c.threads << "\ncheckpoint_interval = " << c.checkpoint_interval << "\n";
}

}  // namespace renyicf

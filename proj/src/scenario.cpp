#include "scrap/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "scrap/analysis.hpp"

namespace scrap {

namespace {

using ordered_json = nlohmann::ordered_json;

// 12 significant digits, locale-independent; the CSV number format.
std::string format_sig(double v) {
    std::array<char, 40> buf;
    const auto result =
        std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 12);
    return std::string(buf.data(), result.ptr);
}

struct KindName {
    ScenarioKind kind;
    const char* name;
};

constexpr KindName kKindNames[] = {
    {ScenarioKind::Fock, "fock"},
    {ScenarioKind::HalfScrap, "half_scrap"},
    {ScenarioKind::EntangleAtoms, "entangle_atoms"},
    {ScenarioKind::QstAtom, "qst_atom"},
    {ScenarioKind::QstCavity, "qst_cavity"},
    {ScenarioKind::Network, "network"},
    {ScenarioKind::Surface, "surface"},
    {ScenarioKind::Adiabaticity, "adiabaticity"},
};

ScenarioKind kind_from_name(const std::string& name) {
    for (const auto& entry : kKindNames)
        if (name == entry.name) return entry.kind;
    throw ConfigError("config: unknown scenario '" + name + "'");
}

void check_keys(const ordered_json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError("config: " + where + " must be an object");
    for (const auto& item : obj.items()) {
        const bool known = std::any_of(allowed.begin(), allowed.end(),
                                       [&](const char* k) { return item.key() == k; });
        if (!known)
            throw ConfigError("config: unknown key '" + item.key() + "' in " + where);
    }
}

const ordered_json& require(const ordered_json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key))
        throw ConfigError("config: missing key '" + std::string(key) + "' in " + where);
    return obj.at(key);
}

double require_number(const ordered_json& obj, const char* key, const std::string& where) {
    const ordered_json& v = require(obj, key, where);
    if (!v.is_number())
        throw ConfigError("config: '" + std::string(key) + "' in " + where + " must be a number");
    return v.get<double>();
}

double number_or(const ordered_json& obj, const char* key, const std::string& where,
                 double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_number())
        throw ConfigError("config: '" + std::string(key) + "' in " + where + " must be a number");
    return obj.at(key).get<double>();
}

std::string require_string(const ordered_json& obj, const char* key, const std::string& where) {
    const ordered_json& v = require(obj, key, where);
    if (!v.is_string())
        throw ConfigError("config: '" + std::string(key) + "' in " + where + " must be a string");
    return v.get<std::string>();
}

// Parses one pulse block; physical-units blocks define the reference
// duration T = w_c / v and are converted to T units on the spot.
PulseSchedule parse_pulse(const ordered_json& j, const std::string& where, double& t_ref) {
    PulseSchedule sched;
    t_ref = 0.0;
    if (j.contains("physical")) {
        check_keys(j, where, {"physical", "path"});
        const ordered_json& phys = require(j, "physical", where);
        const std::string inner = where + ".physical";
        check_keys(phys, inner, {"v", "w_c", "w_s", "d", "g0", "s0"});
        const double v = require_number(phys, "v", inner);
        const double w_c = require_number(phys, "w_c", inner);
        const double w_s = require_number(phys, "w_s", inner);
        const double d = require_number(phys, "d", inner);
        const double g0 = require_number(phys, "g0", inner);
        const double s0 = require_number(phys, "s0", inner);
        if (!(v > 0.0) || !(w_c > 0.0) || !(w_s > 0.0))
            throw ConfigError("config: " + inner + " requires v, w_c, w_s > 0");
        if (d < 0.0) throw ConfigError("config: " + inner + " requires d >= 0");
        t_ref = w_c / v;
        sched.t_c = 1.0;
        sched.t_s = (w_s / v) / t_ref;
        sched.tau = (d / v) / t_ref;
        sched.g0 = g0 * t_ref;
        sched.s0 = s0 * t_ref;
    } else {
        check_keys(j, where, {"g0", "t_c", "s0", "t_s", "tau", "path"});
        sched.g0 = require_number(j, "g0", where);
        sched.s0 = require_number(j, "s0", where);
        sched.tau = require_number(j, "tau", where);
        sched.t_c = number_or(j, "t_c", where, 1.0);
        sched.t_s = number_or(j, "t_s", where, 1.0);
    }
    const std::string path = require_string(j, "path", where);
    if (path == "stark_first")
        sched.path = PulsePath::StarkFirst;
    else if (path == "cavity_first")
        sched.path = PulsePath::CavityFirst;
    else
        throw ConfigError("config: " + where + ".path must be 'stark_first' or 'cavity_first'");
    sched.validate();
    return sched;
}

SystemParams parse_system(const ordered_json& j, const std::string& where, double t_ref) {
    SystemParams sys;
    if (j.contains("physical")) {
        check_keys(j, where, {"physical"});
        if (t_ref <= 0.0)
            throw ConfigError("config: " + where +
                              " uses physical units but the pulse block of the same pass does not");
        const ordered_json& phys = j.at("physical");
        const std::string inner = where + ".physical";
        check_keys(phys, inner, {"delta", "t_cav"});
        sys.delta = require_number(phys, "delta", inner) * t_ref;
        if (phys.contains("t_cav")) sys.t_cav = require_number(phys, "t_cav", inner) / t_ref;
    } else {
        check_keys(j, where, {"delta", "t_cav"});
        sys.delta = require_number(j, "delta", where);
        if (j.contains("t_cav")) sys.t_cav = require_number(j, "t_cav", where);
    }
    sys.validate();
    return sys;
}

Complex parse_complex_pair(const ordered_json& j, const char* key, const std::string& where) {
    const ordered_json& v = require(j, key, where);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ConfigError("config: '" + std::string(key) + "' in " + where +
                          " must be an [re, im] pair");
    return Complex(v[0].get<double>(), v[1].get<double>());
}

// Assigns per-pass modes and active sites implied by the scenario kind.
void wire_passes(ScenarioConfig& config) {
    auto expect_count = [&](std::size_t n) {
        if (config.passes.size() != n) {
            std::ostringstream msg;
            msg << "config: scenario '" << scenario_kind_name(config.kind) << "' needs " << n
                << " pass(es), got " << config.passes.size();
            throw ConfigError(msg.str());
        }
    };
    switch (config.kind) {
        case ScenarioKind::Fock:
        case ScenarioKind::HalfScrap:
            expect_count(1);
            config.passes[0].mode = config.kind == ScenarioKind::Fock ? PassMode::Scrap
                                                                      : PassMode::HalfScrap;
            break;
        case ScenarioKind::EntangleAtoms:
            expect_count(2);
            config.passes[0].mode = PassMode::HalfScrap;
            config.passes[1].mode = PassMode::Scrap;
            config.passes[1].atom_index = 1;
            break;
        case ScenarioKind::QstAtom:
            expect_count(2);
            config.passes[0].mode = PassMode::Scrap;
            config.passes[1].mode = PassMode::Scrap;
            config.passes[1].atom_index = 1;
            break;
        case ScenarioKind::QstCavity:
            expect_count(2);
            config.passes[0].mode = PassMode::Scrap;
            config.passes[1].mode = PassMode::Scrap;
            config.passes[1].cavity_index = 1;
            break;
        case ScenarioKind::Network: {
            if (config.nodes < 2) throw ConfigError("config: network needs nodes >= 2");
            expect_count(static_cast<std::size_t>(2 * (config.nodes - 1)));
            for (int j = 0; j < config.nodes - 1; ++j) {
                PassSpec& pickup = config.passes[static_cast<std::size_t>(2 * j)];
                PassSpec& deposit = config.passes[static_cast<std::size_t>(2 * j + 1)];
                pickup.mode = deposit.mode = PassMode::Scrap;
                pickup.atom_index = deposit.atom_index = j;
                pickup.cavity_index = j;
                deposit.cavity_index = j + 1;
            }
            break;
        }
        case ScenarioKind::Adiabaticity:
            if (config.passes.empty())
                throw ConfigError("config: adiabaticity scenario needs at least one pass");
            for (PassSpec& pass : config.passes) pass.mode = PassMode::Scrap;
            break;
        case ScenarioKind::Surface:
            if (!config.passes.empty())
                throw ConfigError("config: surface scenario takes no pulses");
            break;
    }
    for (const PassSpec& pass : config.passes) pass.validate();
}

}  // namespace

std::string scenario_kind_name(ScenarioKind kind) {
    for (const auto& entry : kKindNames)
        if (entry.kind == kind) return entry.name;
    return "unknown";
}

ScenarioConfig parse_scenario(const std::string& json_text) {
    ordered_json root;
    try {
        root = ordered_json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }

    try {
        ScenarioConfig config;
        config.kind = kind_from_name(require_string(root, "scenario", "config"));

        std::vector<const char*> allowed = {"scenario", "output"};
        const bool has_passes = config.kind != ScenarioKind::Surface;
        if (has_passes) {
            allowed.insert(allowed.end(), {"pulses", "system", "integrator", "rwa"});
        } else {
            allowed.push_back("surface");
        }
        const bool needs_inputs = config.kind == ScenarioKind::QstAtom ||
                                  config.kind == ScenarioKind::QstCavity ||
                                  config.kind == ScenarioKind::Network;
        if (needs_inputs) allowed.push_back("inputs");
        if (config.kind == ScenarioKind::Network) allowed.push_back("nodes");
        {
            // check_keys takes an initializer_list; rebuild through a vector-backed check.
            for (const auto& item : root.items()) {
                const bool known = std::any_of(allowed.begin(), allowed.end(),
                                               [&](const char* k) { return item.key() == k; });
                if (!known)
                    throw ConfigError("config: unknown key '" + item.key() + "' at top level");
            }
        }

        std::vector<double> t_refs;
        if (has_passes) {
            const ordered_json& pulses = require(root, "pulses", "config");
            const ordered_json& system = require(root, "system", "config");
            if (!pulses.is_array() || pulses.empty())
                throw ConfigError("config: 'pulses' must be a non-empty array");
            if (!system.is_array() || system.size() != pulses.size())
                throw ConfigError("config: 'system' must be an array parallel to 'pulses'");
            for (std::size_t i = 0; i < pulses.size(); ++i) {
                std::ostringstream pw, sw;
                pw << "pulses[" << i << "]";
                sw << "system[" << i << "]";
                PassSpec pass;
                double t_ref = 0.0;
                pass.sched = parse_pulse(pulses[i], pw.str(), t_ref);
                pass.sys = parse_system(system[i], sw.str(), t_ref);
                t_refs.push_back(t_ref);
                config.passes.push_back(std::move(pass));
            }
        }

        if (config.kind == ScenarioKind::Network) {
            if (root.contains("nodes")) {
                if (!root.at("nodes").is_number_integer())
                    throw ConfigError("config: 'nodes' must be an integer");
                config.nodes = root.at("nodes").get<int>();
            } else {
                config.nodes = static_cast<int>(config.passes.size() / 2) + 1;
            }
        }

        wire_passes(config);

        if (has_passes) {
            config.integrator = default_window(config.passes.front().sched);
            if (root.contains("integrator")) {
                const ordered_json& integ = root.at("integrator");
                check_keys(integ, "integrator",
                           {"t_start", "t_end", "dt", "norm_tolerance", "record_stride"});
                config.integrator.t_start =
                    number_or(integ, "t_start", "integrator", config.integrator.t_start);
                config.integrator.t_end =
                    number_or(integ, "t_end", "integrator", config.integrator.t_end);
                config.integrator.dt = number_or(integ, "dt", "integrator", config.integrator.dt);
                config.integrator.norm_tolerance = number_or(integ, "norm_tolerance", "integrator",
                                                             config.integrator.norm_tolerance);
                if (integ.contains("record_stride")) {
                    if (!integ.at("record_stride").is_number_integer())
                        throw ConfigError("config: integrator.record_stride must be an integer");
                    config.integrator.record_stride = integ.at("record_stride").get<int>();
                }
            }
            config.integrator.validate();
        }

        if (needs_inputs) {
            const ordered_json& inputs = require(root, "inputs", "config");
            check_keys(inputs, "inputs", {"alpha", "beta"});
            const Complex alpha = parse_complex_pair(inputs, "alpha", "inputs");
            const Complex beta = parse_complex_pair(inputs, "beta", "inputs");
            if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > 1e-10)
                throw ConfigError("config: inputs (alpha, beta) must satisfy "
                                  "|alpha|^2 + |beta|^2 = 1 to 1e-10");
            config.inputs = std::array<Complex, 2>{alpha, beta};
        }

        if (config.kind == ScenarioKind::Surface && root.contains("surface")) {
            const ordered_json& surf = root.at("surface");
            check_keys(surf, "surface", {"g_max", "s_min", "s_max", "resolution"});
            config.surface.g_max = number_or(surf, "g_max", "surface", config.surface.g_max);
            config.surface.s_min = number_or(surf, "s_min", "surface", config.surface.s_min);
            config.surface.s_max = number_or(surf, "s_max", "surface", config.surface.s_max);
            if (surf.contains("resolution")) {
                if (!surf.at("resolution").is_number_integer())
                    throw ConfigError("config: surface.resolution must be an integer");
                config.surface.resolution = surf.at("resolution").get<int>();
            }
            if (config.surface.resolution < 2)
                throw ConfigError("config: surface.resolution must be >= 2");
            if (!(config.surface.g_max > 0.0))
                throw ConfigError("config: surface.g_max must be > 0");
            if (!(config.surface.s_min < config.surface.s_max))
                throw ConfigError("config: surface needs s_min < s_max");
        }

        if (has_passes && root.contains("rwa")) {
            const ordered_json& rwa = root.at("rwa");
            check_keys(rwa, "rwa", {"omega0", "omega_c"});
            RwaFrequencies freqs;
            freqs.omega0 = require_number(rwa, "omega0", "rwa");
            freqs.omega_c = require_number(rwa, "omega_c", "rwa");
            if (!(freqs.omega0 > 0.0) || !(freqs.omega_c > 0.0))
                throw ConfigError("config: rwa frequencies must be > 0");
            config.rwa = freqs;
        }

        config.output_prefix = scenario_kind_name(config.kind);
        if (root.contains("output")) {
            const ordered_json& output = root.at("output");
            check_keys(output, "output", {"prefix", "format"});
            if (output.contains("prefix"))
                config.output_prefix = require_string(output, "prefix", "output");
            if (output.contains("format")) {
                const std::string fmt = require_string(output, "format", "output");
                if (fmt == "csv")
                    config.format = OutputFormat::Csv;
                else if (fmt == "json")
                    config.format = OutputFormat::Json;
                else
                    throw ConfigError("config: output.format must be 'csv' or 'json'");
            }
        }
        if (config.output_prefix.empty() ||
            config.output_prefix.find_first_of("/\\") != std::string::npos)
            throw ConfigError("config: output.prefix must be a plain file name prefix");

        return config;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

std::string serialize_scenario(const ScenarioConfig& config) {
    ordered_json root;
    root["scenario"] = scenario_kind_name(config.kind);
    if (!config.passes.empty()) {
        ordered_json pulses = ordered_json::array();
        ordered_json system = ordered_json::array();
        for (const PassSpec& pass : config.passes) {
            ordered_json pulse;
            pulse["g0"] = pass.sched.g0;
            pulse["t_c"] = pass.sched.t_c;
            pulse["s0"] = pass.sched.s0;
            pulse["t_s"] = pass.sched.t_s;
            pulse["tau"] = pass.sched.tau;
            pulse["path"] =
                pass.sched.path == PulsePath::StarkFirst ? "stark_first" : "cavity_first";
            pulses.push_back(std::move(pulse));
            ordered_json sys;
            sys["delta"] = pass.sys.delta;
            if (pass.sys.t_cav) sys["t_cav"] = *pass.sys.t_cav;
            system.push_back(std::move(sys));
        }
        root["pulses"] = std::move(pulses);
        root["system"] = std::move(system);
        ordered_json integ;
        integ["t_start"] = config.integrator.t_start;
        integ["t_end"] = config.integrator.t_end;
        integ["dt"] = config.integrator.dt;
        integ["norm_tolerance"] = config.integrator.norm_tolerance;
        integ["record_stride"] = config.integrator.record_stride;
        root["integrator"] = std::move(integ);
    }
    if (config.inputs) {
        ordered_json inputs;
        inputs["alpha"] = {(*config.inputs)[0].real(), (*config.inputs)[0].imag()};
        inputs["beta"] = {(*config.inputs)[1].real(), (*config.inputs)[1].imag()};
        root["inputs"] = std::move(inputs);
    }
    if (config.kind == ScenarioKind::Network) root["nodes"] = config.nodes;
    if (config.kind == ScenarioKind::Surface) {
        ordered_json surf;
        surf["g_max"] = config.surface.g_max;
        surf["s_min"] = config.surface.s_min;
        surf["s_max"] = config.surface.s_max;
        surf["resolution"] = config.surface.resolution;
        root["surface"] = std::move(surf);
    }
    if (config.rwa) {
        ordered_json rwa;
        rwa["omega0"] = config.rwa->omega0;
        rwa["omega_c"] = config.rwa->omega_c;
        root["rwa"] = std::move(rwa);
    }
    ordered_json output;
    output["prefix"] = config.output_prefix;
    output["format"] = config.format == OutputFormat::Csv ? "csv" : "json";
    root["output"] = std::move(output);
    return root.dump(2) + "\n";
}

ScenarioConfig load_scenario(const std::string& path_or_name, const std::string& user_dir) {
    namespace fs = std::filesystem;
    const auto read_file = [](const fs::path& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw ConfigError("config: cannot read '" + path.string() + "'");
        std::ostringstream text;
        text << in.rdbuf();
        return text.str();
    };

    if (fs::exists(path_or_name) && fs::is_regular_file(path_or_name))
        return parse_scenario(read_file(path_or_name));
    const auto& names = bundled_scenario_names();
    if (std::find(names.begin(), names.end(), path_or_name) != names.end())
        return parse_scenario(bundled_scenario_text(path_or_name));
    if (!user_dir.empty()) {
        const fs::path candidate = fs::path(user_dir) / (path_or_name + ".json");
        if (fs::exists(candidate) && fs::is_regular_file(candidate))
            return parse_scenario(read_file(candidate));
    }
    throw ConfigError("config: '" + path_or_name + "' is neither a readable file nor a known scenario");
}

std::vector<std::string> list_scenarios(const std::string& user_dir) {
    namespace fs = std::filesystem;
    std::vector<std::string> names = bundled_scenario_names();
    if (!user_dir.empty() && fs::is_directory(user_dir)) {
        std::vector<std::string> user_names;
        for (const auto& entry : fs::directory_iterator(user_dir))
            if (entry.is_regular_file() && entry.path().extension() == ".json")
                user_names.push_back(entry.path().stem().string());
        std::sort(user_names.begin(), user_names.end());
        names.insert(names.end(), user_names.begin(), user_names.end());
    }
    return names;
}

namespace {

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

// Joint populations over the whole protocol. Pass windows are concatenated
// on a monotonic global time axis; the amplitudes outside the active pair
// stay frozen within each pass.
Table joint_table(const std::vector<const PassResult*>& passes) {
    Table table;
    const JointState& first = passes.front()->before;
    const bool single = first.atom_count() == 1 && first.cavity_count() == 1;
    std::vector<std::size_t> label_indices;
    table.columns.push_back("t");
    if (single) {
        table.columns.push_back("P_plus0");
        table.columns.push_back("P_minus1");
        label_indices = {0b10, 0b01};
    } else {
        for (std::size_t i = 0; i < first.dim(); ++i) {
            table.columns.push_back("P_" + first.label(i));
            label_indices.push_back(i);
        }
    }
    table.columns.push_back("norm");

    double offset = 0.0;
    for (std::size_t p = 0; p < passes.size(); ++p) {
        const PassResult& pass = *passes[p];
        const Trajectory& traj = pass.active_trajectory;
        std::vector<double> base(pass.before.dim());
        for (std::size_t i = 0; i < pass.before.dim(); ++i) base[i] = pass.before.population(i);
        const double base_norm = pass.before.norm_sq();
        const double w = pass.pair_weight;

        if (p > 0) offset -= traj.times.front();
        for (std::size_t i = 0; i < traj.size(); ++i) {
            if (p > 0 && i == 0) continue;  // duplicate of the previous row
            std::vector<double> row;
            row.reserve(table.columns.size());
            row.push_back(offset + traj.times[i]);
            std::vector<double> pops = base;
            pops[pass.plus0_index] = w * traj.populations[i](0);
            pops[pass.minus1_index] = w * traj.populations[i](1);
            for (std::size_t idx : label_indices) row.push_back(pops[idx]);
            row.push_back(base_norm - w + w * traj.norms[i]);
            table.rows.push_back(std::move(row));
        }
        offset += traj.times.back();
    }
    return table;
}

std::string table_to_csv(const Table& table) {
    std::ostringstream out;
    for (std::size_t c = 0; c < table.columns.size(); ++c)
        out << (c ? "," : "") << table.columns[c];
    out << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_sig(row[c]);
        out << "\n";
    }
    return out.str();
}

std::string table_to_json(const Table& table) {
    ordered_json root;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        ordered_json column = ordered_json::array();
        for (const auto& row : table.rows) column.push_back(row[c]);
        root[table.columns[c]] = std::move(column);
    }
    return root.dump(2) + "\n";
}

void flatten_json(const ordered_json& node, const std::string& prefix,
                  std::vector<std::pair<std::string, std::string>>& out) {
    if (node.is_object()) {
        for (const auto& item : node.items()) {
            const std::string key = prefix.empty() ? item.key() : prefix + "." + item.key();
            flatten_json(item.value(), key, out);
        }
    } else if (node.is_array()) {
        for (std::size_t i = 0; i < node.size(); ++i)
            flatten_json(node[i], prefix + "." + std::to_string(i), out);
    } else if (node.is_number_float()) {
        out.emplace_back(prefix, format_sig(node.get<double>()));
    } else if (node.is_number_integer()) {
        out.emplace_back(prefix, std::to_string(node.get<long long>()));
    } else if (node.is_boolean()) {
        out.emplace_back(prefix, node.get<bool>() ? "true" : "false");
    } else if (node.is_string()) {
        std::string value = node.get<std::string>();
        if (value.find_first_of(",\"\n") != std::string::npos) {
            std::string quoted = "\"";
            for (char ch : value) {
                if (ch == '"') quoted += '"';
                quoted += ch;
            }
            quoted += '"';
            value = quoted;
        }
        out.emplace_back(prefix, value);
    } else {
        out.emplace_back(prefix, "null");
    }
}

std::string summary_to_csv(const ordered_json& summary) {
    std::vector<std::pair<std::string, std::string>> pairs;
    flatten_json(summary, "", pairs);
    std::ostringstream out;
    out << "key,value\n";
    for (const auto& [key, value] : pairs) out << key << "," << value << "\n";
    return out.str();
}

ordered_json adiabaticity_entry(const PassSpec& pass, std::size_t index) {
    ordered_json entry;
    entry["pass"] = index;
    try {
        const AdiabaticityReport report = check_adiabaticity(pass.sched, pass.sys);
        entry["applicable"] = true;
        entry["left_term"] = report.left_term;
        entry["middle_term"] = report.middle_term;
        entry["margin_lower"] = report.margin_lower;
        entry["margin_upper"] = report.margin_upper;
        entry["margin_factor"] = report.margin_factor;
        entry["satisfied"] = report.satisfied;
    } catch (const DomainError& e) {
        entry["applicable"] = false;
        entry["reason"] = e.what();
    }
    return entry;
}

ordered_json populations_json(const JointState& state) {
    ordered_json pops;
    for (std::size_t i = 0; i < state.dim(); ++i) pops["P_" + state.label(i)] = state.population(i);
    return pops;
}

ordered_json warnings_json(const ScenarioConfig& config,
                           const std::vector<const PassResult*>& passes) {
    ordered_json warnings = ordered_json::array();
    for (std::size_t p = 0; p < passes.size(); ++p) {
        for (const std::string& w : passes[p]->active_trajectory.warnings)
            warnings.push_back("pass " + std::to_string(p) + ": " + w);
        if (config.rwa)
            for (const std::string& w : validate_rwa(config.passes[p].sched, config.rwa->omega0,
                                                     config.rwa->omega_c))
                warnings.push_back("pass " + std::to_string(p) + ": " + w);
    }
    return warnings;
}

double max_drift(const std::vector<const PassResult*>& passes) {
    double drift = 0.0;
    for (const PassResult* pass : passes)
        if (!pass->active_trajectory.damped)
            drift = std::max(drift, pass->active_trajectory.max_norm_drift);
    return drift;
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& config, const std::string& out_dir) {
    namespace fs = std::filesystem;
    const std::string ext = config.format == OutputFormat::Csv ? ".csv" : ".json";

    ordered_json summary;
    summary["scenario"] = scenario_kind_name(config.kind);
    std::map<std::string, std::string> files;

    std::vector<const PassResult*> pass_ptrs;
    ordered_json metrics;

    // Protocol reports stay alive until the tables are built.
    std::optional<FockReport> fock;
    std::optional<AtomPhotonReport> atom_photon;
    std::optional<EntangleAtomsReport> entangle;
    std::optional<QstAtomReport> qst_atom;
    std::optional<QstCavityReport> qst_cavity;
    std::optional<NetworkReport> network;

    switch (config.kind) {
        case ScenarioKind::Fock: {
            fock.emplace(generate_fock(config.passes[0], config.integrator));
            pass_ptrs = {&fock->pass};
            metrics["p_plus0"] = fock->p_plus0;
            metrics["p_minus1"] = fock->p_minus1;
            metrics["edge_sensitivity_dP_dt"] = fock->edge_sensitivity;
            break;
        }
        case ScenarioKind::HalfScrap: {
            atom_photon.emplace(atom_photon_entangle(config.passes[0], config.integrator));
            pass_ptrs = {&atom_photon->pass};
            metrics["p_plus0"] = atom_photon->p_plus0;
            metrics["p_minus1"] = atom_photon->p_minus1;
            metrics["fidelity_raw"] = atom_photon->fidelity_raw;
            metrics["fidelity_optimized"] = atom_photon->fidelity_optimized;
            metrics["atom_entropy_bits"] = atom_photon->atom_entropy_bits;
            break;
        }
        case ScenarioKind::EntangleAtoms: {
            entangle.emplace(entangle_atoms(config.passes[0], config.passes[1], config.integrator));
            pass_ptrs = {&entangle->pass1, &entangle->pass2};
            metrics["p_plus_minus_0_mid"] = entangle->p_plus_minus_0_mid;
            metrics["p_minus_minus_1_mid"] = entangle->p_minus_minus_1_mid;
            metrics["concurrence"] = entangle->concurrence;
            metrics["p_vacuum"] = entangle->p_vacuum;
            break;
        }
        case ScenarioKind::QstAtom: {
            const auto& [alpha, beta] = *config.inputs;
            qst_atom.emplace(
                qst_atom_to_atom(alpha, beta, config.passes[0], config.passes[1], config.integrator));
            pass_ptrs = {&qst_atom->pass1, &qst_atom->pass2};
            metrics["cavity_fidelity_raw"] = qst_atom->cavity_fidelity_raw;
            metrics["cavity_fidelity_optimized"] = qst_atom->cavity_fidelity_optimized;
            metrics["atom2_fidelity_raw"] = qst_atom->atom2_fidelity_raw;
            metrics["atom2_fidelity_optimized"] = qst_atom->atom2_fidelity_optimized;
            metrics["atom1_p_minus"] = qst_atom->atom1_p_minus;
            metrics["p_vacuum"] = qst_atom->p_vacuum;
            break;
        }
        case ScenarioKind::QstCavity: {
            const auto& [alpha, beta] = *config.inputs;
            qst_cavity.emplace(qst_cavity_to_cavity(alpha, beta, config.passes[0], config.passes[1],
                                                    config.integrator));
            pass_ptrs = {&qst_cavity->pass_pickup, &qst_cavity->pass_deposit};
            metrics["cavity2_fidelity_raw"] = qst_cavity->cavity2_fidelity_raw;
            metrics["cavity2_fidelity_optimized"] = qst_cavity->cavity2_fidelity_optimized;
            metrics["cavity1_p_vacuum"] = qst_cavity->cavity1_p_vacuum;
            metrics["atom_p_minus"] = qst_cavity->atom_p_minus;
            break;
        }
        case ScenarioKind::Network: {
            const auto& [alpha, beta] = *config.inputs;
            network.emplace(
                network_chain(alpha, beta, config.nodes, config.passes, config.integrator));
            for (const PassResult& pass : network->passes) pass_ptrs.push_back(&pass);
            metrics["hop_fidelity_raw"] = network->hop_fidelity_raw;
            metrics["hop_fidelity_optimized"] = network->hop_fidelity_optimized;
            metrics["final_fidelity_optimized"] = network->final_fidelity_optimized;
            break;
        }
        case ScenarioKind::Surface: {
            const SurfaceGrid grid = surface_grid({0.0, config.surface.g_max},
                                                  {config.surface.s_min, config.surface.s_max},
                                                  config.surface.resolution);
            Table table;
            table.columns = {"g", "s", "e_plus", "e_minus"};
            double min_gap = std::numeric_limits<double>::infinity();
            double min_g = 0.0;
            double min_s = 0.0;
            for (Eigen::Index i = 0; i < grid.g_axis.size(); ++i) {
                for (Eigen::Index j = 0; j < grid.s_axis.size(); ++j) {
                    table.rows.push_back({grid.g_axis(i), grid.s_axis(j), grid.e_plus(i, j),
                                          grid.e_minus(i, j)});
                    const double gap = grid.e_plus(i, j) - grid.e_minus(i, j);
                    if (gap < min_gap) {
                        min_gap = gap;
                        min_g = grid.g_axis(i);
                        min_s = grid.s_axis(j);
                    }
                }
            }
            metrics["g_max"] = config.surface.g_max;
            metrics["s_min"] = config.surface.s_min;
            metrics["s_max"] = config.surface.s_max;
            metrics["resolution"] = config.surface.resolution;
            metrics["min_gap"] = min_gap;
            metrics["min_gap_g"] = min_g;
            metrics["min_gap_s"] = min_s;
            files[config.output_prefix + "_surface" + ext] =
                config.format == OutputFormat::Csv ? table_to_csv(table) : table_to_json(table);
            break;
        }
        case ScenarioKind::Adiabaticity:
            break;
    }

    summary["passes"] = config.passes.size();
    if (!pass_ptrs.empty()) {
        const JointState& final_state = pass_ptrs.back()->state;
        ordered_json final_block;
        final_block["norm"] = final_state.norm_sq();
        final_block["max_norm_drift"] = max_drift(pass_ptrs);
        final_block["populations"] = populations_json(final_state);
        summary["final"] = std::move(final_block);
    }
    summary["metrics"] = std::move(metrics);
    if (!config.passes.empty()) {
        ordered_json adiabaticity = ordered_json::array();
        for (std::size_t i = 0; i < config.passes.size(); ++i)
            adiabaticity.push_back(adiabaticity_entry(config.passes[i], i));
        summary["adiabaticity"] = std::move(adiabaticity);
    }
    summary["warnings"] = warnings_json(config, pass_ptrs);

    if (!pass_ptrs.empty()) {
        const Table table = joint_table(pass_ptrs);
        files[config.output_prefix + "_trajectory" + ext] =
            config.format == OutputFormat::Csv ? table_to_csv(table) : table_to_json(table);
    }
    files[config.output_prefix + "_summary" + ext] = config.format == OutputFormat::Csv
                                                         ? summary_to_csv(summary)
                                                         : summary.dump(2) + "\n";

    // All content is ready; only now touch the filesystem.
    RunResult result;
    result.summary = std::move(summary);
    fs::create_directories(out_dir.empty() ? "." : out_dir);
    for (const auto& [name, content] : files) {
        const fs::path path = fs::path(out_dir.empty() ? "." : out_dir) / name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write '" + path.string() + "'");
        out << content;
        result.files_written.push_back(path.string());
    }
    return result;
}

}  // namespace scrap

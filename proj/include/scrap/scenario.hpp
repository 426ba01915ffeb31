#pragma once

// Declarative scenario front end: strict JSON configs, bundled
// figure-reproduction scenarios, and deterministic CSV/JSON artifacts.

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "scrap/protocols.hpp"

namespace scrap {

enum class ScenarioKind {
    Fock,
    HalfScrap,
    EntangleAtoms,
    QstAtom,
    QstCavity,
    Network,
    Surface,
    Adiabaticity,
};

enum class OutputFormat { Csv, Json };

struct SurfaceRequest {
    double g_max = 3.0;
    double s_min = -3.0;
    double s_max = 3.0;
    int resolution = 121;
};

struct RwaFrequencies {
    double omega0 = 0.0;
    double omega_c = 0.0;
};

struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::Fock;
    std::vector<PassSpec> passes;
    IntegratorOptions integrator;
    std::optional<std::array<Complex, 2>> inputs;  // (alpha, beta)
    SurfaceRequest surface;
    std::optional<RwaFrequencies> rwa;
    int nodes = 2;  // network chains only
    std::string output_prefix;
    OutputFormat format = OutputFormat::Csv;
};

std::string scenario_kind_name(ScenarioKind kind);

// Strict parser: unknown keys are rejected at every level, physical-units
// pulse/system blocks are converted to T units, all invariants checked.
// Throws ConfigError.
ScenarioConfig parse_scenario(const std::string& json_text);

// Canonical JSON form; parse_scenario(serialize_scenario(c)) reproduces c.
std::string serialize_scenario(const ScenarioConfig& config);

// Bundled figure/protocol scenarios, in listing order.
const std::vector<std::string>& bundled_scenario_names();
const std::string& bundled_scenario_text(const std::string& name);

// Resolves an existing file path, then a bundled name, then
// <user_dir>/<name>.json.
ScenarioConfig load_scenario(const std::string& path_or_name, const std::string& user_dir = "");

// Bundled names followed by *.json stems found in user_dir (sorted).
std::vector<std::string> list_scenarios(const std::string& user_dir = "");

struct RunResult {
    nlohmann::ordered_json summary;
    std::vector<std::string> files_written;
};

// Executes the scenario and writes <prefix>_trajectory / <prefix>_summary
// (and <prefix>_surface) files into out_dir. All file content is built
// before anything is written; identical configs produce byte-identical
// files.
RunResult run_scenario(const ScenarioConfig& config, const std::string& out_dir);

}  // namespace scrap

#pragma once

// Declarative experiment description: YAML scenario files, shipped presets,
// and the reproducibility manifest written next to every output.

#include "tclsim/grid_model.hpp"
#include "tclsim/hybrid_sim.hpp"
#include "tclsim/tcl.hpp"
#include "tclsim/threshold_design.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tclsim {

struct GridConfig {
    enum class Kind { Governor, Inertia, Matrices };
    Kind kind = Kind::Governor;
    double M = 60.0;
    double D = 5.0;
    double Tg = 5.0;
    double Kp = 20.0;
    double Ki = 1.0;
    GenDynamics matrices;  // used when kind == Matrices

    bool operator==(const GridConfig& o) const;
};

struct ThresholdConfig {
    enum class Mode { Sampled, Allocate };
    Mode mode = Mode::Sampled;
    double delta = 1e-3;  // Hz
    double margin = 0.2;
    Range range{0.01, 0.26};
    bool operator==(const ThresholdConfig&) const = default;
};

struct ScenarioConfig {
    std::string name = "custom";
    std::uint64_t seed = 1;
    double horizon = 600.0;
    double max_step = 0.01;
    double event_tol = 1e-6;
    bool offset_demand = true;
    OmegaChannel channel = OmegaChannel::Coupled;
    unsigned threads = 1;
    std::string output_dir = "out";
    GridConfig grid;
    std::size_t n_loads = 200;
    double gamma = 10.0;
    ParamRanges ranges;
    ThresholdConfig thresholds;
    SchemeKind scheme = Conventional{};
    std::vector<DisturbanceStep> disturbance{{0.0, 0.0}};
    double hurwitz_tol = 1e-9;
    double one_norm_tol = 1e-8;
    double metrics_eps = 0.01;   // Hz
    double metrics_t_from = 0.0; // s
    double stats_horizon = 2e5;  // s
    std::size_t stats_pairs = 10;

    bool operator==(const ScenarioConfig& o) const;
};

/// Named presets; throws ConfigError for an unknown name.
ScenarioConfig preset(std::string_view name);
std::vector<std::string> preset_names();

/// Parses YAML. A top-level `preset:` key selects the base that the other
/// keys override. Errors carry the source name, line and offending key.
ScenarioConfig parse_scenario(std::string_view text, std::string_view source = "<scenario>");
ScenarioConfig load_scenario_file(const std::string& path);

/// Fully expanded YAML (no preset reference); parse(serialize(c)) == c.
std::string serialize_scenario(const ScenarioConfig& c);

SchemeKind parse_scheme_name(std::string_view name);

/// Certified grid model for the configuration (throws NumericError if not Hurwitz).
StateSpace build_grid(const GridConfig& g, double hurwitz_tol);

struct BuiltScenario {
    Scenario sim;
    double L_hat = 0.0;
    std::optional<Allocation> allocation;  // set when thresholds.mode == Allocate
};

/// Samples the population, computes the grid norm and, when requested,
/// allocates thresholds.
BuiltScenario build_scenario(const ScenarioConfig& c);

std::string sha256_hex(std::string_view data);

}  // namespace tclsim

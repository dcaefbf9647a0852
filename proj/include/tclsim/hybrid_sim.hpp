#pragma once

// Event-driven simulation of a TCL population coupled to the grid frequency.
// Between events the grid propagates exactly under piecewise-constant demand
// and each temperature follows its closed-form flow from a per-load anchor.
// Events are thermostat limits (solved analytically), deadband guards,
// frequency-threshold crossings (bracketed and bisected), randomized switching
// clocks, disturbance steps and the max_step sampling grid.

#include "tclsim/grid_model.hpp"
#include "tclsim/tcl.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tclsim {

struct DisturbanceStep {
    double time = 0.0;   // s
    double level = 0.0;  // p.u.
    bool operator==(const DisturbanceStep&) const = default;
};

/// What the loads see of the grid frequency.
enum class OmegaChannel {
    Coupled,  // loads see omega(t)
    Clamped,  // grid runs, loads see 0
    Open,     // no grid at all; omega = 0 (free-running population)
};

struct Scenario {
    StateSpace grid;
    std::vector<TclParams> population;
    SchemeKind scheme = Conventional{};
    std::vector<DisturbanceStep> disturbance{{0.0, 0.0}};  // piecewise-constant p_L
    double horizon = 600.0;
    double max_step = 0.01;
    std::uint64_t seed = 1;
    double event_tol = 1e-6;
    bool offset_demand = true;
    OmegaChannel channel = OmegaChannel::Coupled;
    unsigned threads = 1;     // worker threads for per-load kernels; 0 = hardware
    long zeno_max = 0;        // 0 = 10 * N
    double design_delta = 1e-3;  // delta used for the design-condition warning

    /// Throws ConfigError describing the first invalid field.
    void validate() const;
};

enum class SwitchCause : std::uint8_t { ThermostatHi, ThermostatLo, FreqOn, FreqOff, Randomized };

const char* cause_name(SwitchCause c);

struct SwitchEvent {
    double t = 0.0;
    std::size_t load = 0;
    int sigma = 0;      // new switch state
    SwitchCause cause = SwitchCause::ThermostatHi;
    double T = 0.0;     // temperature at the jump (flow endpoint and new anchor)
    bool operator==(const SwitchEvent&) const = default;
};

struct Sample {
    double t = 0.0;
    long jumps = 0;
    double omega = 0.0;
    double d_s = 0.0;
    double on_fraction = 0.0;
    bool operator==(const Sample&) const = default;
};

struct Trace {
    std::vector<Sample> samples;
    std::vector<double> x_hat;  // samples.size() * x_hat_dim, row-major
    std::size_t x_hat_dim = 0;
    std::vector<SwitchEvent> switch_events;

    std::vector<double> initial_T;   // per load, at t = 0
    std::vector<int> initial_sigma;  // per load, before the corrective pass
    std::vector<double> final_T;     // per load, at the horizon
    std::vector<double> min_T;       // per load, over the run
    std::vector<double> max_T;

    double horizon = 0.0;
    std::size_t n_loads = 0;
    long jump_passes = 0;
    long max_passes_at_instant = 0;
    long storm_instants = 0;        // instants needing more than one switching pass
    long frequency_events = 0;      // located threshold crossings
    long rate_redraws = 0;          // randomized clock re-samples after a rate change
    std::map<std::string, std::string> metadata;
    std::vector<std::string> warnings;

    std::span<const double> x_hat_at(std::size_t i) const
    {
        return {x_hat.data() + i * x_hat_dim, x_hat_dim};
    }
};

/// Runs the hybrid system. Throws ZenoError when more than zeno_max jumps
/// accumulate at one instant, NumericError on a non-Hurwitz grid or
/// non-finite state, ConfigError on invalid input.
Trace simulate(const Scenario& sc);

/// Empty string when (t, jumps) of the samples form a hybrid time domain.
std::string validate_time_domain(const Trace& tr);

/// Rebuilds every load's temperature history from the initial anchors and
/// the switch log. Empty when each recorded jump temperature equals the
/// reconstructed flow endpoint bit for bit and all values stay inside the
/// band widened by tol.
std::string validate_temperatures(const Trace& tr, const std::vector<TclParams>& pop, double tol = 1e-9);

enum class Region { Flow, Jump, Both };

const char* region_name(Region r);

struct LoadRegion {
    bool in_flow_set = false;  // sigma admissible in the flow map
    bool in_jump_set = false;  // outside the flow map, or on a jump-enabled boundary
    bool will_jump = false;    // the jump map would change sigma
    Region region = Region::Flow;
};

struct RegionReport {
    std::vector<LoadRegion> loads;
    Region global = Region::Flow;
};

/// Set membership of one load under the deterministic frequency scheme
/// (thresholds and deadbands from p). Conventional is the omega1 = inf case.
LoadRegion classify_load(const TclParams& p, double T, int sigma, double omega);

/// Per-load and global classification of a full state. Randomized schemes
/// are classified by their thermostat constraints only.
RegionReport classify_region(const std::vector<TclParams>& pop, const std::vector<TclState>& states, double omega,
                             const SchemeKind& scheme);

struct FrequencyMetrics {
    double peak_abs_omega = 0.0;
    double peak_time = 0.0;
    double eps = 0.0;
    double settle_time = 0.0;        // first t after which |omega| <= eps to the end; inf if never
    double longest_window = 0.0;     // longest contiguous sample run with |omega| <= eps
    double longest_window_start = 0.0;
    double min_interswitch_gap = 0.0;  // inf when no load switched twice
    std::vector<double> per_load_min_gap;
    std::map<std::size_t, std::size_t> switches_per_load;  // switch count -> number of loads
    std::size_t total_switches = 0;
};

/// Metrics over the samples at or after t_from.
FrequencyMetrics dwell_time_report(const Trace& tr, double eps, double t_from = 0.0);

double settle_time_into(const Trace& tr, double eps, double t_from = 0.0);
/// (length, start) of the longest run of consecutive samples with |omega| <= eps.
std::pair<double, double> longest_window_within(const Trace& tr, double eps, double t_from = 0.0);

struct SchemeRun {
    SchemeKind scheme;
    std::string label;  // (i)..(iv)
    Trace trace;
    FrequencyMetrics metrics;
};

/// The four schemes on identical grid, population, disturbance and seed.
/// Randomized gains are taken from base.scheme when it is one of them.
std::vector<SchemeRun> compare_schemes(const Scenario& base, double eps, double t_from = 0.0);

void write_trace_csv(std::ostream& os, const Trace& tr);
void write_events_csv(std::ostream& os, const Trace& tr);
void write_metrics(std::ostream& os, const FrequencyMetrics& m);

}  // namespace tclsim

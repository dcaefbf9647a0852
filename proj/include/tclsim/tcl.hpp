#pragma once

// Cooling TCL physics: thermostat hysteresis, closed-form temperature flow,
// frequency-responsive switching, periods and duty cycles.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tclsim/counter_rng.hpp"

namespace tclsim {

struct TclParams {
    double d_bar = 0.0;    // load magnitude, p.u.
    double T_lo = 0.0;     // lower temperature threshold, degC
    double T_hi = 0.0;     // upper temperature threshold, degC
    double k = 0.0;        // thermal insulation coefficient, 1/s
    double lambda = 0.0;   // coefficient of performance, degC per p.u.
    double T_amb = 0.0;    // ambient temperature, degC
    double omega1 = std::numeric_limits<double>::infinity();  // frequency threshold, Hz
    double eps = 0.0;      // temperature deadband, degC

    /// Steady-state temperature the flow converges to in switch state sigma.
    double target(int sigma) const { return T_amb - lambda * d_bar * sigma; }
};

/// Empty string when p is a valid cooling TCL, otherwise a description of the
/// first violated constraint.
std::string validate(const TclParams& p);

struct TclState {
    double T = 0.0;
    int sigma = 0;
};

struct Range {
    double lo = 0.0;
    double hi = 0.0;
    bool operator==(const Range&) const = default;
};

/// Sampling box for a population. `cop_load` is the product lambda*d_bar;
/// lambda is sampled as cop_load / d_bar.
struct ParamRanges {
    Range T_amb{15.0, 25.0};
    Range T_hi{5.0, 7.0};
    Range T_lo{2.0, 4.0};
    Range k{2e-4, 1e-3};
    Range cop_load{25.0, 35.0};
    Range omega1{0.01, 0.26};
    Range eps{0.001, 0.01};

    /// Bounds of the reference appliance table.
    static ParamRanges table_defaults() { return {}; }
    bool operator==(const ParamRanges&) const = default;
};

struct PopulationSpec {
    std::size_t n_loads = 0;
    double gamma = 0.0;  // aggregate magnitude, sum of d_bar
    ParamRanges ranges;
    std::uint64_t seed = 0;
    bool operator==(const PopulationSpec&) const = default;
};

/// Frequency-independent hysteresis.
struct Conventional {
    bool operator==(const Conventional&) const = default;
};
/// Deterministic threshold switching with temperature deadband guards.
struct DeterministicFreq {
    bool operator==(const DeterministicFreq&) const = default;
};
/// Randomized on/off transitions with frequency-modulated rates.
struct RandomizedFreq {
    double K_pi = 5.0;
    double v_des = 1.0;
    bool operator==(const RandomizedFreq&) const = default;
};
/// Same law as RandomizedFreq, used with a larger gain.
struct RandomizedFreqHighGain {
    double K_pi = 50.0;
    double v_des = 1.0;
    bool operator==(const RandomizedFreqHighGain&) const = default;
};

using SchemeKind = std::variant<Conventional, DeterministicFreq, RandomizedFreq, RandomizedFreqHighGain>;

std::string scheme_name(const SchemeKind& s);
bool is_randomized(const SchemeKind& s);
/// (K_pi, v_des) of a randomized scheme; (0, 1) otherwise.
std::pair<double, double> randomized_gains(const SchemeKind& s);
void validate_scheme(const SchemeKind& s);

/// n_loads parameter sets with d_bar = gamma/n_loads and every other field
/// drawn uniformly from the ranges. Deterministic in the seed and independent
/// of the platform's standard library.
std::vector<TclParams> sample_population(const PopulationSpec& spec);

struct Durations {
    double pi_on = 0.0;
    double pi_off = 0.0;
    double period() const { return pi_on + pi_off; }
};

Durations on_off_durations(const TclParams& p);
double duty_cycle(const TclParams& p);

struct PeriodPair {
    std::size_t i = 0;
    std::size_t j = 0;
    double ratio = 0.0;
    long p = 0;
    long q = 0;
};

/// Pairs whose period ratio is within rel_tol of a rational p/q with
/// p, q <= max_denominator. Empty when the distinctness proxy holds.
std::vector<PeriodPair> check_period_distinctness(const std::vector<TclParams>& pop, double rel_tol = 1e-6,
                                                  long max_denominator = 10);
/// Same test on raw periods.
std::vector<PeriodPair> check_period_distinctness(const std::vector<double>& periods, double rel_tol = 1e-6,
                                                  long max_denominator = 10);

/// Closed-form flow of the temperature over dt in switch state sigma.
double temp_flow(const TclParams& p, double T, int sigma, double dt);

/// Time for the flow from T in state sigma to reach `level`; +inf when the
/// level is not ahead of the flow, 0 when already at or past it.
double time_to_level(const TclParams& p, double T, int sigma, double level);

/// Time until the thermostat limit ahead of the flow (T_lo when ON, T_hi when OFF).
double next_thermostat_event(const TclParams& p, double T, int sigma);

/// Randomized-scheme transition rates.
struct Rates {
    double on = 0.0;
    double off = 0.0;
};
inline constexpr double kDefaultMaxRate = 1.0;  // 1/s

Rates randomized_rates(const TclParams& p, double omega, double K_pi, double v_des,
                       double r_max = kDefaultMaxRate);

/// Next switch state after an interval dt at (s, omega). `rng` is only
/// consulted by randomized schemes and may be null otherwise.
int switch_decision(const TclParams& p, const TclState& s, double omega, const SchemeKind& scheme,
                    CounterStream* rng, double dt);

/// Delimited dump of a population with derived pi_on, pi_off, alpha.
void write_population_csv(std::ostream& os, const std::vector<TclParams>& pop);

}  // namespace tclsim

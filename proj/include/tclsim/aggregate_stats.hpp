#pragma once

// Time-average statistics of piecewise-constant signals, computed by exact
// integration, plus brute-force oracles for the aggregate-demand variance and
// for pairwise independence of free-running loads.

#include "tclsim/hybrid_sim.hpp"
#include "tclsim/tcl.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace tclsim {

/// Right-continuous piecewise-constant signal on [times.front(), t_end]:
/// value[i] holds on [times[i], times[i+1]).
struct TimeSeries {
    std::vector<double> times;
    std::vector<double> values;
    double t_end = 0.0;

    void validate() const;
};

/// Aggregate demand d_s of a trace (last sample at each instant wins).
TimeSeries demand_series(const Trace& tr);

double time_average(const TimeSeries& ts, std::pair<double, double> window);
double time_variance(const TimeSeries& ts, std::pair<double, double> window);

/// Closed-form variance sum_j alpha_j (1 - alpha_j) d_bar_j^2. When the
/// magnitudes differ and `warning` is given, it receives a note.
double theoretical_variance(const std::vector<TclParams>& pop, std::string* warning = nullptr);

/// Gamma^2 / N for the population's total magnitude.
double variance_bound(const std::vector<TclParams>& pop);

/// Free-running thermostat cycle seen as a square wave: ON for alpha*period
/// starting at `phase` (mod period), amplitude when ON.
struct SquareWave {
    double period = 0.0;
    double alpha = 0.0;
    double amplitude = 0.0;
    double phase = 0.0;

    static SquareWave from_params(const TclParams& p, double phase = 0.0);
    double value(double t) const;
};

/// (1/horizon) * integral over [0, horizon] of a(t) b(t), exact.
double cross_term_oracle(const SquareWave& a, const SquareWave& b, double horizon);
double cross_term_oracle(const TclParams& p_i, const TclParams& p_j, double horizon);

/// Star discrepancy of the points frac(k * ratio), k = 1..n_terms.
double star_discrepancy_rotation(double ratio, std::size_t n_terms);
/// Same for ratio = pi_i / pi_j of two loads.
double phase_uniformity(const TclParams& p_i, const TclParams& p_j, std::size_t n_terms);
/// Exact star discrepancy of a point set in [0, 1).
double star_discrepancy(std::vector<double> points);

struct CrossTermRow {
    std::size_t i = 0;
    std::size_t j = 0;
    double measured = 0.0;
    double predicted = 0.0;  // alpha_i alpha_j d_bar_i d_bar_j
    double rel_error = 0.0;
};

struct StatsReport {
    std::size_t n_loads = 0;
    double gamma = 0.0;
    double horizon = 0.0;
    double measured_variance = 0.0;
    double theoretical_variance = 0.0;
    double bound = 0.0;  // Gamma^2 / N
    double mean_demand = 0.0;
    double predicted_mean = 0.0;
    std::vector<CrossTermRow> pairs;
    std::string warning;
};

/// Free-running population (Conventional, no grid) over the horizon, with
/// `pairs` cross-term spot checks on a seeded random subset of load pairs.
StatsReport population_stats(const std::vector<TclParams>& pop, double horizon, std::uint64_t seed,
                             std::size_t pairs, unsigned threads = 1);

void write_stats_report(std::ostream& os, const StatsReport& r);
void write_cross_terms_csv(std::ostream& os, const StatsReport& r);

}  // namespace tclsim

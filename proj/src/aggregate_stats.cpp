#include "tclsim/aggregate_stats.hpp"

#include "tclsim/counter_rng.hpp"
#include "tclsim/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <set>

namespace tclsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Integral of f(value) over [a, b] for a piecewise-constant series.
template <class F>
double integrate(const TimeSeries& ts, double a, double b, F&& f)
{
    auto it = std::upper_bound(ts.times.begin(), ts.times.end(), a);
    std::size_t i = static_cast<std::size_t>(it - ts.times.begin()) - 1;
    double total = 0.0;
    double t = a;
    while (t < b) {
        const double seg_end = i + 1 < ts.times.size() ? std::min(ts.times[i + 1], b) : b;
        total += f(ts.values[i]) * (seg_end - t);
        t = seg_end;
        ++i;
    }
    return total;
}

void check_window(const TimeSeries& ts, std::pair<double, double> w)
{
    ts.validate();
    if (!(w.second > w.first))
        throw ConfigError("time window is empty");
    if (w.first < ts.times.front() || w.second > ts.t_end)
        throw ConfigError(fmt::format("time window [{}, {}] lies outside the series support [{}, {}]", w.first,
                                      w.second, ts.times.front(), ts.t_end));
}

}  // namespace

void TimeSeries::validate() const
{
    if (times.empty() || times.size() != values.size())
        throw ConfigError("time series: times and values must be non-empty and of equal length");
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1]))
            throw ConfigError("time series: times must be strictly increasing");
    }
    if (t_end < times.back())
        throw ConfigError("time series: t_end precedes the last breakpoint");
}

TimeSeries demand_series(const Trace& tr)
{
    TimeSeries ts;
    for (const Sample& s : tr.samples) {
        if (!ts.times.empty() && ts.times.back() == s.t) {
            ts.values.back() = s.d_s;
            continue;
        }
        if (!ts.values.empty() && ts.values.back() == s.d_s)
            continue;
        ts.times.push_back(s.t);
        ts.values.push_back(s.d_s);
    }
    ts.t_end = std::max(tr.horizon, ts.times.empty() ? 0.0 : ts.times.back());
    return ts;
}

double time_average(const TimeSeries& ts, std::pair<double, double> window)
{
    check_window(ts, window);
    return integrate(ts, window.first, window.second, [](double v) { return v; }) / (window.second - window.first);
}

double time_variance(const TimeSeries& ts, std::pair<double, double> window)
{
    check_window(ts, window);
    const double len = window.second - window.first;
    const double mean = integrate(ts, window.first, window.second, [](double v) { return v; }) / len;
    // Centered second moment avoids cancellation in E(x^2) - E(x)^2.
    const double var = integrate(ts, window.first, window.second, [&](double v) { return (v - mean) * (v - mean); });
    return var / len;
}

double theoretical_variance(const std::vector<TclParams>& pop, std::string* warning)
{
    double v = 0.0;
    bool equal = true;
    for (const auto& p : pop) {
        const double a = duty_cycle(p);
        v += a * (1.0 - a) * p.d_bar * p.d_bar;
        equal = equal && p.d_bar == pop.front().d_bar;
    }
    if (!equal && warning)
        *warning = "load magnitudes differ; using sum alpha(1-alpha) d_bar^2";
    return v;
}

double variance_bound(const std::vector<TclParams>& pop)
{
    if (pop.empty())
        return 0.0;
    double gamma = 0.0;
    for (const auto& p : pop)
        gamma += p.d_bar;
    return gamma * gamma / static_cast<double>(pop.size());
}

SquareWave SquareWave::from_params(const TclParams& p, double phase)
{
    const Durations d = on_off_durations(p);
    return {d.period(), d.pi_on / d.period(), p.d_bar, phase};
}

double SquareWave::value(double t) const
{
    double r = std::fmod(t - phase, period);
    if (r < 0.0)
        r += period;
    return r < alpha * period ? amplitude : 0.0;
}

double cross_term_oracle(const SquareWave& a, const SquareWave& b, double horizon)
{
    if (!(horizon > 0.0))
        throw ConfigError("cross_term_oracle: horizon must be positive");
    if (!(a.period > 0.0) || !(b.period > 0.0))
        throw ConfigError("cross_term_oracle: periods must be positive");
    // ON intervals [phase + k P, phase + k P + alpha P), generated from their
    // index so endpoints carry no accumulated rounding.
    auto first_k = [](const SquareWave& w) { return std::floor((0.0 - w.phase) / w.period) - 1.0; };
    double ka = first_k(a);
    double kb = first_k(b);
    auto interval = [](const SquareWave& w, double k) {
        const double s = w.phase + k * w.period;
        return std::pair{s, s + w.alpha * w.period};
    };
    double overlap = 0.0;
    auto ia = interval(a, ka);
    auto ib = interval(b, kb);
    while (ia.first < horizon && ib.first < horizon) {
        const double lo = std::max({ia.first, ib.first, 0.0});
        const double hi = std::min({ia.second, ib.second, horizon});
        if (hi > lo)
            overlap += hi - lo;
        if (ia.second < ib.second)
            ia = interval(a, ++ka);
        else
            ib = interval(b, ++kb);
    }
    return overlap * a.amplitude * b.amplitude / horizon;
}

double cross_term_oracle(const TclParams& p_i, const TclParams& p_j, double horizon)
{
    return cross_term_oracle(SquareWave::from_params(p_i), SquareWave::from_params(p_j), horizon);
}

double star_discrepancy(std::vector<double> points)
{
    if (points.empty())
        return 0.0;
    std::sort(points.begin(), points.end());
    const double n = static_cast<double>(points.size());
    double d = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double x = points[i];
        d = std::max({d, static_cast<double>(i + 1) / n - x, x - static_cast<double>(i) / n});
    }
    return d;
}

double star_discrepancy_rotation(double ratio, std::size_t n_terms)
{
    std::vector<double> pts;
    pts.reserve(n_terms);
    for (std::size_t k = 1; k <= n_terms; ++k) {
        const double v = static_cast<double>(k) * ratio;
        pts.push_back(v - std::floor(v));
    }
    return star_discrepancy(std::move(pts));
}

double phase_uniformity(const TclParams& p_i, const TclParams& p_j, std::size_t n_terms)
{
    const double ratio = on_off_durations(p_i).period() / on_off_durations(p_j).period();
    return star_discrepancy_rotation(ratio, n_terms);
}

StatsReport population_stats(const std::vector<TclParams>& pop, double horizon, std::uint64_t seed,
                             std::size_t pairs, unsigned threads)
{
    if (pop.size() < 2 && pairs > 0)
        throw ConfigError("stats: cross-term checks need at least two loads");
    Scenario sc;
    sc.population = pop;
    sc.scheme = Conventional{};
    sc.channel = OmegaChannel::Open;
    sc.offset_demand = false;
    sc.horizon = horizon;
    sc.max_step = horizon;
    sc.seed = seed;
    sc.threads = threads;
    const Trace tr = simulate(sc);

    StatsReport r;
    r.n_loads = pop.size();
    for (const auto& p : pop) {
        r.gamma += p.d_bar;
        r.predicted_mean += duty_cycle(p) * p.d_bar;
    }
    r.horizon = horizon;
    const TimeSeries ts = demand_series(tr);
    r.measured_variance = time_variance(ts, {0.0, horizon});
    r.mean_demand = time_average(ts, {0.0, horizon});
    r.theoretical_variance = theoretical_variance(pop, &r.warning);
    r.bound = variance_bound(pop);

    // Each load's wave is anchored at its first thermostat switch-on.
    std::vector<double> phase(pop.size(), 0.0);
    std::vector<bool> seen(pop.size(), false);
    for (const SwitchEvent& e : tr.switch_events) {
        if (e.cause == SwitchCause::ThermostatHi && !seen[e.load]) {
            seen[e.load] = true;
            phase[e.load] = e.t;
        }
    }
    const std::size_t n = pop.size();
    const std::size_t max_pairs = n * (n - 1) / 2;
    if (pairs > max_pairs)
        throw ConfigError(fmt::format("stats: {} pairs requested but only {} exist", pairs, max_pairs));
    std::set<std::pair<std::size_t, std::size_t>> chosen;
    std::uint64_t counter = 0;
    while (chosen.size() < pairs) {
        auto i = static_cast<std::size_t>(counter_uniform(seed, 0x5041495253ULL, counter++) * static_cast<double>(n));
        auto j = static_cast<std::size_t>(counter_uniform(seed, 0x5041495253ULL, counter++) * static_cast<double>(n));
        i = std::min(i, n - 1);
        j = std::min(j, n - 1);
        if (i == j)
            continue;
        if (i > j)
            std::swap(i, j);
        if (!chosen.insert({i, j}).second)
            continue;
        CrossTermRow row;
        row.i = i;
        row.j = j;
        const SquareWave a = SquareWave::from_params(pop[i], phase[i]);
        const SquareWave b = SquareWave::from_params(pop[j], phase[j]);
        row.measured = cross_term_oracle(a, b, horizon);
        row.predicted = a.alpha * b.alpha * a.amplitude * b.amplitude;
        row.rel_error = row.measured / row.predicted - 1.0;
        r.pairs.push_back(row);
    }
    return r;
}

void write_stats_report(std::ostream& os, const StatsReport& r)
{
    os << fmt::format("n_loads: {}\n", r.n_loads);
    os << fmt::format("gamma: {:.17g}\n", r.gamma);
    os << fmt::format("horizon: {:.17g}\n", r.horizon);
    os << fmt::format("mean_demand: {:.17g}\n", r.mean_demand);
    os << fmt::format("predicted_mean: {:.17g}\n", r.predicted_mean);
    os << fmt::format("measured_variance: {:.17g}\n", r.measured_variance);
    os << fmt::format("theoretical_variance: {:.17g}\n", r.theoretical_variance);
    os << fmt::format("variance_bound: {:.17g}\n", r.bound);
    os << fmt::format("below_bound: {}\n", r.measured_variance < r.bound ? "true" : "false");
    os << fmt::format("cross_term_pairs: {}\n", r.pairs.size());
    if (!r.warning.empty())
        os << "warning: " << r.warning << '\n';
}

void write_cross_terms_csv(std::ostream& os, const StatsReport& r)
{
    os << "i,j,measured,predicted,rel_error\n";
    for (const auto& p : r.pairs)
        os << fmt::format("{},{},{:.17g},{:.17g},{:.17g}\n", p.i, p.j, p.measured, p.predicted, p.rel_error);
}

}  // namespace tclsim

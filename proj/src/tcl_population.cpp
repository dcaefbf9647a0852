#include "tclsim/tcl.hpp"

#include "tclsim/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace tclsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum Field : std::uint64_t { kTamb, kThi, kTlo, kK, kCop, kOmega1, kEps };

double draw(std::uint64_t seed, std::size_t load, Field f, const Range& r)
{
    const double u = counter_uniform(seed, static_cast<std::uint64_t>(load), f);
    return r.lo + (r.hi - r.lo) * u;
}

std::string check_range(const char* name, const Range& r)
{
    if (!(std::isfinite(r.lo) && std::isfinite(r.hi)) || r.lo > r.hi)
        return fmt::format("range {} = [{}, {}] is empty or non-finite", name, r.lo, r.hi);
    return {};
}

}  // namespace

std::string validate(const TclParams& p)
{
    if (!(p.d_bar > 0.0))
        return "d_bar must be positive";
    if (!(p.T_lo > 0.0))
        return "T_lo must be positive";
    if (!(p.T_hi > p.T_lo))
        return "T_hi must exceed T_lo";
    if (!(p.k > 0.0))
        return "k must be positive";
    if (!(p.lambda > 0.0))
        return "lambda must be positive";
    if (!(p.T_amb > p.T_hi))
        return "T_amb must exceed T_hi (cooling device)";
    if (!(p.T_amb - p.lambda * p.d_bar < p.T_lo))
        return "T_amb - lambda*d_bar must be below T_lo (cooling device)";
    if (!(p.omega1 > 0.0))
        return "omega1 must be positive";
    if (!(p.eps > 0.0 && p.eps < 0.5 * (p.T_hi - p.T_lo)))
        return "eps must lie in (0, (T_hi - T_lo)/2)";
    return {};
}

std::string scheme_name(const SchemeKind& s)
{
    switch (s.index()) {
    case 0: return "conventional";
    case 1: return "deterministic";
    case 2: return "randomized";
    default: return "randomized-high-gain";
    }
}

bool is_randomized(const SchemeKind& s)
{
    return std::holds_alternative<RandomizedFreq>(s) || std::holds_alternative<RandomizedFreqHighGain>(s);
}

std::pair<double, double> randomized_gains(const SchemeKind& s)
{
    if (const auto* r = std::get_if<RandomizedFreq>(&s))
        return {r->K_pi, r->v_des};
    if (const auto* r = std::get_if<RandomizedFreqHighGain>(&s))
        return {r->K_pi, r->v_des};
    return {0.0, 1.0};
}

void validate_scheme(const SchemeKind& s)
{
    const auto [K, v] = randomized_gains(s);
    if (!(K >= 0.0))
        throw ConfigError("scheme: K_pi must be non-negative");
    if (!(v > 0.0))
        throw ConfigError("scheme: v_des must be positive");
}

std::vector<TclParams> sample_population(const PopulationSpec& spec)
{
    if (spec.n_loads == 0)
        throw ConfigError("population: n_loads must be at least 1");
    if (!(spec.gamma > 0.0))
        throw ConfigError("population: gamma must be positive");

    const ParamRanges& r = spec.ranges;
    for (auto [name, range] : {std::pair{"T_amb", r.T_amb}, {"T_hi", r.T_hi}, {"T_lo", r.T_lo}, {"k", r.k},
                               {"cop_load", r.cop_load}, {"omega1", r.omega1}, {"eps", r.eps}}) {
        if (auto msg = check_range(name, range); !msg.empty())
            throw ConfigError("population: " + msg);
    }
    // Every corner of the box must satisfy the per-load invariants.
    if (!(r.T_lo.lo > 0.0))
        throw ConfigError("population: T_lo range must be positive");
    if (!(r.T_hi.lo > r.T_lo.hi))
        throw ConfigError("population: T_hi range must lie above the T_lo range");
    if (!(r.T_amb.lo > r.T_hi.hi))
        throw ConfigError("population: T_amb range must lie above the T_hi range");
    if (!(r.T_amb.hi - r.cop_load.lo < r.T_lo.lo))
        throw ConfigError("population: T_amb - lambda*d_bar can reach T_lo; no limit cycle");
    if (!(r.k.lo > 0.0))
        throw ConfigError("population: k range must be positive");
    if (!(r.cop_load.lo > 0.0))
        throw ConfigError("population: cop_load range must be positive");
    if (!(r.omega1.lo > 0.0))
        throw ConfigError("population: omega1 range must be positive");
    if (!(r.eps.lo > 0.0 && r.eps.hi < 0.5 * (r.T_hi.lo - r.T_lo.hi)))
        throw ConfigError("population: eps range must lie in (0, (T_hi - T_lo)/2) for every load");

    const double d_bar = spec.gamma / static_cast<double>(spec.n_loads);
    std::vector<TclParams> pop(spec.n_loads);
    for (std::size_t j = 0; j < spec.n_loads; ++j) {
        TclParams& p = pop[j];
        p.d_bar = d_bar;
        p.T_amb = draw(spec.seed, j, kTamb, r.T_amb);
        p.T_hi = draw(spec.seed, j, kThi, r.T_hi);
        p.T_lo = draw(spec.seed, j, kTlo, r.T_lo);
        p.k = draw(spec.seed, j, kK, r.k);
        p.lambda = draw(spec.seed, j, kCop, r.cop_load) / d_bar;
        p.omega1 = draw(spec.seed, j, kOmega1, r.omega1);
        p.eps = draw(spec.seed, j, kEps, r.eps);
    }
    return pop;
}

Durations on_off_durations(const TclParams& p)
{
    if (auto msg = validate(p); !msg.empty())
        throw ConfigError("on_off_durations: " + msg);
    const double c = p.lambda * p.d_bar;
    const double band = p.T_hi - p.T_lo;
    // ln((T_hi + c - T_amb)/(T_lo + c - T_amb)) and ln((T_amb - T_lo)/(T_amb - T_hi)).
    Durations d;
    d.pi_on = std::log1p(band / (p.T_lo + c - p.T_amb)) / p.k;
    d.pi_off = std::log1p(band / (p.T_amb - p.T_hi)) / p.k;
    return d;
}

double duty_cycle(const TclParams& p)
{
    const Durations d = on_off_durations(p);
    return d.pi_on / d.period();
}

std::vector<PeriodPair> check_period_distinctness(const std::vector<double>& periods, double rel_tol,
                                                  long max_denominator)
{
    std::vector<PeriodPair> out;
    for (std::size_t i = 0; i < periods.size(); ++i) {
        for (std::size_t j = i + 1; j < periods.size(); ++j) {
            const double big = std::max(periods[i], periods[j]);
            const double small = std::min(periods[i], periods[j]);
            const double rho = big / small;
            for (long q = 1; q <= max_denominator; ++q) {
                const long p = std::lround(rho * static_cast<double>(q));
                if (p < 1 || p > max_denominator)
                    continue;
                const double approx = static_cast<double>(p) / static_cast<double>(q);
                if (std::abs(rho - approx) <= rel_tol * rho) {
                    out.push_back({i, j, periods[i] / periods[j], p, q});
                    break;
                }
            }
        }
    }
    return out;
}

std::vector<PeriodPair> check_period_distinctness(const std::vector<TclParams>& pop, double rel_tol,
                                                  long max_denominator)
{
    std::vector<double> periods;
    periods.reserve(pop.size());
    for (const auto& p : pop)
        periods.push_back(on_off_durations(p).period());
    return check_period_distinctness(periods, rel_tol, max_denominator);
}

double temp_flow(const TclParams& p, double T, int sigma, double dt)
{
    const double target = p.target(sigma);
    return T + (target - T) * -std::expm1(-p.k * dt);
}

double time_to_level(const TclParams& p, double T, int sigma, double level)
{
    const double target = p.target(sigma);
    if (target < T) {  // falling
        if (T <= level)
            return 0.0;
        if (level <= target)
            return kInf;
        return std::log1p((T - level) / (level - target)) / p.k;
    }
    if (target > T) {  // rising
        if (T >= level)
            return 0.0;
        if (level >= target)
            return kInf;
        return std::log1p((level - T) / (target - level)) / p.k;
    }
    return T == level ? 0.0 : kInf;
}

double next_thermostat_event(const TclParams& p, double T, int sigma)
{
    return time_to_level(p, T, sigma, sigma ? p.T_lo : p.T_hi);
}

Rates randomized_rates(const TclParams& p, double omega, double K_pi, double v_des, double r_max)
{
    const Durations d = on_off_durations(p);
    const double gain = std::isfinite(p.omega1) ? K_pi * omega / p.omega1 : 0.0;
    Rates r;
    r.on = std::clamp(v_des / d.pi_off * std::max(0.0, 1.0 + gain), 0.0, r_max);
    r.off = std::clamp(v_des / d.pi_on * std::max(0.0, 1.0 - gain), 0.0, r_max);
    return r;
}

int switch_decision(const TclParams& p, const TclState& s, double omega, const SchemeKind& scheme,
                    CounterStream* rng, double dt)
{
    if (s.T >= p.T_hi)
        return 1;
    if (s.T <= p.T_lo)
        return 0;

    if (std::holds_alternative<DeterministicFreq>(scheme)) {
        if (s.sigma == 0 && omega >= p.omega1 && s.T >= p.T_lo + p.eps)
            return 1;
        if (s.sigma == 1 && omega <= -p.omega1 && s.T <= p.T_hi - p.eps)
            return 0;
        return s.sigma;
    }
    if (is_randomized(scheme)) {
        if (rng == nullptr)
            throw ConfigError("switch_decision: randomized scheme needs a random stream");
        const auto [K, v] = randomized_gains(scheme);
        const Rates r = randomized_rates(p, omega, K, v);
        const double rate = s.sigma ? r.off : r.on;
        const double prob = -std::expm1(-rate * dt);
        if (rng->uniform() < prob)
            return 1 - s.sigma;
        return s.sigma;
    }
    return s.sigma;
}

void write_population_csv(std::ostream& os, const std::vector<TclParams>& pop)
{
    os << "index,d_bar,T_lo,T_hi,k,lambda,T_amb,omega1,eps,pi_on,pi_off,alpha\n";
    for (std::size_t j = 0; j < pop.size(); ++j) {
        const TclParams& p = pop[j];
        const Durations d = on_off_durations(p);
        os << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n",
                          j, p.d_bar, p.T_lo, p.T_hi, p.k, p.lambda, p.T_amb, p.omega1, p.eps, d.pi_on,
                          d.pi_off, d.pi_on / d.period());
    }
}

}  // namespace tclsim

#include "catch_amalgamated.hpp"

#include "tclsim/counter_rng.hpp"
#include "tclsim/error.hpp"
#include "tclsim/tcl.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace tclsim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

TclParams reference_load()
{
    TclParams p;
    p.k = 5e-4;
    p.T_amb = 20.0;
    p.T_hi = 6.0;
    p.T_lo = 3.0;
    p.d_bar = 1.0;
    p.lambda = 30.0;
    p.omega1 = 0.05;
    p.eps = 0.01;
    return p;
}

// Time for temp_flow from T0 to reach `level`, by bisection on the flow itself.
double bisect_crossing(const TclParams& p, double T0, int sigma, double level)
{
    double lo = 0.0;
    double hi = 1.0;
    auto reached = [&](double t) {
        const double T = temp_flow(p, T0, sigma, t);
        return sigma ? T <= level : T >= level;
    };
    while (!reached(hi))
        hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (reached(mid) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("reference load durations")
{
    const TclParams p = reference_load();
    const Durations d = on_off_durations(p);
    CHECK_THAT(d.pi_off, WithinRel(2000.0 * std::log(17.0 / 14.0), 1e-12));
    CHECK_THAT(d.pi_on, WithinRel(2000.0 * std::log(16.0 / 13.0), 1e-12));
    CHECK_THAT(d.pi_off, WithinAbs(388.31, 0.01));
    CHECK_THAT(d.pi_on, WithinAbs(415.28, 0.01));
    CHECK_THAT(d.pi_off, WithinRel(bisect_crossing(p, p.T_lo, 0, p.T_hi), 1e-10));
    CHECK_THAT(d.pi_on, WithinRel(bisect_crossing(p, p.T_hi, 1, p.T_lo), 1e-10));
    CHECK(d.period() == d.pi_on + d.pi_off);
    CHECK_THAT(duty_cycle(p), WithinAbs(0.5168, 1e-4));
    CHECK_THAT(duty_cycle(p), WithinRel(d.pi_on / d.period(), 1e-15));

    TclParams fast = p;
    fast.k *= 2.0;
    CHECK_THAT(on_off_durations(fast).pi_on, WithinRel(0.5 * d.pi_on, 1e-14));
    CHECK_THAT(on_off_durations(fast).pi_off, WithinRel(0.5 * d.pi_off, 1e-14));
}

TEST_CASE("symmetric load has duty cycle one half")
{
    TclParams p = reference_load();
    p.lambda = 31.0;  // T_hi + 31 - T_amb = 17, T_lo + 31 - T_amb = 14
    CHECK_THAT(duty_cycle(p), WithinAbs(0.5, 1e-15));
}

TEST_CASE("durations on random loads match the bisection oracle")
{
    const auto pop = sample_population({200, 10.0, {}, 7});
    for (const TclParams& p : pop) {
        const Durations d = on_off_durations(p);
        CHECK_THAT(d.pi_on, WithinRel(bisect_crossing(p, p.T_hi, 1, p.T_lo), 1e-9));
        CHECK_THAT(d.pi_off, WithinRel(bisect_crossing(p, p.T_lo, 0, p.T_hi), 1e-9));
        const double a = duty_cycle(p);
        CHECK((a > 0.0 && a < 1.0));
    }
}

TEST_CASE("invalid parameters are rejected")
{
    TclParams p = reference_load();
    p.lambda = 10.0;  // target 10 degC > T_lo: ON flow never reaches T_lo
    CHECK_FALSE(validate(p).empty());
    CHECK_THROWS_AS(on_off_durations(p), ConfigError);
    p = reference_load();
    p.eps = 2.0;
    CHECK_FALSE(validate(p).empty());
    CHECK(validate(reference_load()).empty());
}

TEST_CASE("population sampling")
{
    const auto pop = sample_population({4, 1.0, {}, 3});
    REQUIRE(pop.size() == 4);
    for (const auto& p : pop)
        CHECK(p.d_bar == 0.25);

    const auto a = sample_population({50, 5.0, {}, 11});
    const auto b = sample_population({50, 5.0, {}, 11});
    const auto c = sample_population({50, 5.0, {}, 12});
    bool same = true, differ = false;
    for (std::size_t j = 0; j < a.size(); ++j) {
        same = same && a[j].T_amb == b[j].T_amb && a[j].k == b[j].k && a[j].lambda == b[j].lambda &&
               a[j].omega1 == b[j].omega1 && a[j].eps == b[j].eps;
        differ = differ || a[j].T_amb != c[j].T_amb;
    }
    CHECK(same);
    CHECK(differ);

    const ParamRanges r;
    for (const auto& p : sample_population({500, 25.0, r, 2019})) {
        INFO(validate(p));
        CHECK(validate(p).empty());
        CHECK((p.lambda * p.d_bar >= r.cop_load.lo && p.lambda * p.d_bar <= r.cop_load.hi));
        CHECK((p.omega1 >= r.omega1.lo && p.omega1 <= r.omega1.hi));
        CHECK((p.eps >= r.eps.lo && p.eps <= r.eps.hi));
    }

    ParamRanges bad;
    bad.T_amb = {4.0, 10.0};
    CHECK_THROWS_AS(sample_population({10, 1.0, bad, 1}), ConfigError);
    CHECK_THROWS_AS(sample_population({0, 1.0, {}, 1}), ConfigError);
}

TEST_CASE("period distinctness proxy")
{
    const TclParams p = reference_load();
    CHECK(check_period_distinctness(std::vector<TclParams>{p, p}).size() == 1);
    CHECK(check_period_distinctness(std::vector<double>{100.0, 100.0 * std::sqrt(2.0)}, 1e-6).empty());
    const auto flagged = check_period_distinctness(std::vector<double>{100.0, 150.0000001}, 1e-6);
    REQUIRE(flagged.size() == 1);
    CHECK(flagged[0].p == 3);
    CHECK(flagged[0].q == 2);
    // Far from any p/q with small denominators.
    CHECK(check_period_distinctness(std::vector<double>{100.0, 100.0 * (1.0 + std::sqrt(5.0)) / 2.0}).empty());
}

TEST_CASE("temperature flow")
{
    const TclParams p = reference_load();
    CHECK(temp_flow(p, 4.5, 0, 0.0) == 4.5);
    CHECK_THAT(temp_flow(p, 4.5, 0, 1e6), WithinAbs(p.T_amb, 1e-9));
    CHECK_THAT(temp_flow(p, 6.0, 1, on_off_durations(p).pi_on), WithinAbs(3.0, 1e-9));
    for (double T : {3.0, 4.2, 6.0}) {
        for (int s : {0, 1}) {
            const double one = temp_flow(p, T, s, 250.0);
            const double two = temp_flow(p, temp_flow(p, T, s, 100.0), s, 150.0);
            CHECK_THAT(two, WithinAbs(one, 1e-12));
        }
    }
}

TEST_CASE("thermostat event times")
{
    const TclParams p = reference_load();
    CHECK(next_thermostat_event(p, p.T_hi, 0) == 0.0);
    CHECK_THAT(next_thermostat_event(p, p.T_hi, 1), WithinRel(on_off_durations(p).pi_on, 1e-14));
    const double mid = 0.5 * (p.T_lo + p.T_hi);
    CHECK_THAT(next_thermostat_event(p, mid, 0), WithinRel(bisect_crossing(p, mid, 0, p.T_hi), 1e-10));
    CHECK_THAT(next_thermostat_event(p, mid, 1), WithinRel(bisect_crossing(p, mid, 1, p.T_lo), 1e-10));
    // Limits are always reachable for valid loads.
    for (const auto& q : sample_population({100, 10.0, {}, 5})) {
        CHECK(std::isfinite(next_thermostat_event(q, q.T_lo, 0)));
        CHECK(std::isfinite(next_thermostat_event(q, q.T_hi, 1)));
    }
    CHECK(std::isinf(time_to_level(p, 4.0, 0, 25.0)));
    CHECK(time_to_level(p, 4.0, 1, 5.0) == 0.0);
    CHECK(std::isinf(time_to_level(p, 4.0, 1, -20.0)));
}

TEST_CASE("switch decisions")
{
    const TclParams p = reference_load();
    const double w = 2.0 * p.omega1;
    const SchemeKind det = DeterministicFreq{};
    CHECK(switch_decision(p, {p.T_lo + p.eps / 2.0, 0}, w, det, nullptr, 0.01) == 0);
    CHECK(switch_decision(p, {p.T_lo + 2.0 * p.eps, 0}, w, det, nullptr, 0.01) == 1);
    CHECK(switch_decision(p, {p.T_hi - 2.0 * p.eps, 1}, -w, det, nullptr, 0.01) == 0);
    CHECK(switch_decision(p, {p.T_hi - p.eps / 2.0, 1}, -w, det, nullptr, 0.01) == 1);
    // Below the threshold the frequency branch is inert.
    CHECK(switch_decision(p, {4.5, 0}, 0.5 * p.omega1, det, nullptr, 0.01) == 0);
    CHECK(switch_decision(p, {4.5, 1}, -0.5 * p.omega1, det, nullptr, 0.01) == 1);

    CounterStream rng(1, 0);
    for (const SchemeKind& s : {SchemeKind{Conventional{}}, det, SchemeKind{RandomizedFreq{}}, SchemeKind{RandomizedFreqHighGain{}}}) {
        for (double om : {-1.0, 0.0, 1.0}) {
            CHECK(switch_decision(p, {p.T_hi, 0}, om, s, &rng, 0.01) == 1);
            CHECK(switch_decision(p, {p.T_hi + 0.1, 1}, om, s, &rng, 0.01) == 1);
            CHECK(switch_decision(p, {p.T_lo, 1}, om, s, &rng, 0.01) == 0);
        }
    }
    CHECK(switch_decision(p, {4.5, 1}, 0.0, Conventional{}, nullptr, 0.01) == 1);
    CHECK(switch_decision(p, {4.5, 0}, 5.0, Conventional{}, nullptr, 0.01) == 0);
    CHECK_THROWS_AS(switch_decision(p, {4.5, 0}, 0.0, RandomizedFreq{}, nullptr, 0.01), ConfigError);
}

TEST_CASE("randomized rates")
{
    const TclParams p = reference_load();
    const Durations d = on_off_durations(p);
    const Rates r0 = randomized_rates(p, 0.0, 5.0, 1.0);
    CHECK(r0.on == 1.0 / d.pi_off);
    CHECK(r0.off == 1.0 / d.pi_on);
    const Rates k0 = randomized_rates(p, 0.07, 0.0, 1.0);
    CHECK(k0.on == r0.on);
    CHECK(k0.off == r0.off);
    const Rates up = randomized_rates(p, 0.01, 5.0, 1.0);
    CHECK_THAT(up.on, WithinRel(r0.on * 2.0, 1e-14));
    CHECK(up.off == 0.0);
    CHECK(randomized_rates(p, 100.0, 50.0, 1.0).on == kDefaultMaxRate);
    CHECK_THROWS_AS(validate_scheme(RandomizedFreq{-1.0, 1.0}), ConfigError);
    CHECK_THROWS_AS(validate_scheme(RandomizedFreq{5.0, 0.0}), ConfigError);
}

TEST_CASE("randomized chain at zero frequency spends fraction alpha ON")
{
    // Interior temperature held fixed isolates the two-state Markov chain.
    const TclParams p = reference_load();
    const Durations d = on_off_durations(p);
    const double alpha = d.pi_on / d.period();
    const double dt = 1.0;
    const long steps = 2'000'000;
    CounterStream rng(99, 4);
    TclState s{4.5, 0};
    long on = 0;
    for (long i = 0; i < steps; ++i) {
        s.sigma = switch_decision(p, s, 0.0, RandomizedFreq{}, &rng, dt);
        on += s.sigma;
    }
    const double frac = static_cast<double>(on) / static_cast<double>(steps);
    // Time average of a two-state chain: variance ~ 2 alpha (1 - alpha) tau_c / horizon.
    const double tau_c = d.pi_on * d.pi_off / d.period();
    const double sd = std::sqrt(2.0 * alpha * (1.0 - alpha) * tau_c / (dt * static_cast<double>(steps)));
    CHECK(std::abs(frac - alpha) < 3.0 * sd);
}

TEST_CASE("population dump has a header and one row per load")
{
    const auto pop = sample_population({3, 1.0, {}, 1});
    std::ostringstream os;
    write_population_csv(os, pop);
    const std::string out = os.str();
    CHECK(out.rfind("index,d_bar,T_lo,T_hi,k,lambda,T_amb,omega1,eps,pi_on,pi_off,alpha\n", 0) == 0);
    CHECK(std::count(out.begin(), out.end(), '\n') == 4);
}

#include "catch_amalgamated.hpp"

#include "../support/dense_grid.hpp"
#include "tclsim/counter_rng.hpp"
#include "tclsim/error.hpp"
#include "tclsim/threshold_design.hpp"

#include <cmath>
#include <sstream>

using namespace tclsim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

TclParams load_with_alpha_half(double d_bar, double omega1)
{
    // lambda*d_bar = 31 with T_amb 20, T_hi 6, T_lo 3 gives pi_on == pi_off.
    TclParams p;
    p.k = 5e-4;
    p.T_amb = 20.0;
    p.T_hi = 6.0;
    p.T_lo = 3.0;
    p.d_bar = d_bar;
    p.lambda = 31.0 / d_bar;
    p.omega1 = omega1;
    p.eps = 0.01;
    return p;
}

}  // namespace

TEST_CASE("zeta is the larger of alpha and 1 - alpha")
{
    CHECK_THAT(zeta(load_with_alpha_half(1.0, 0.1)), WithinAbs(0.5, 1e-15));
    TclParams p = load_with_alpha_half(1.0, 0.1);
    p.lambda = 30.0;
    CHECK_THAT(zeta(p), WithinAbs(0.5168, 1e-4));
    CHECK(zeta(p) == duty_cycle(p));
    p.lambda = 80.0;  // strong cooling: short ON strokes
    CHECK(duty_cycle(p) < 0.5);
    CHECK(zeta(p) == 1.0 - duty_cycle(p));
}

TEST_CASE("two-load design examples")
{
    // zeta * d_bar = 0.3 for each load.
    const std::vector<TclParams> pop{load_with_alpha_half(0.6, 1.0), load_with_alpha_half(0.6, 2.0)};
    const DesignReport ok = verify_design_condition(pop, 1.0, 0.1);
    CHECK(ok.satisfied);
    CHECK(ok.violations.empty());
    CHECK(ok.breakpoints == 2);
    CHECK_THAT(ok.worst_point.omega_bar, WithinAbs(1.0, 0.0));

    const DesignReport bad = verify_design_condition(pop, 1.0, 0.8);
    CHECK_FALSE(bad.satisfied);
    REQUIRE(bad.violations.size() == 1);
    CHECK(bad.worst_point.omega_bar == 1.0);
    CHECK_THAT(bad.worst_point.lhs, WithinAbs(0.3, 1e-12));
    CHECK_THAT(bad.worst_point.rhs, WithinAbs(0.2, 1e-12));

    const DesignReport single = verify_design_condition({load_with_alpha_half(1.0, 0.05)}, 1.0, 0.1);
    CHECK_FALSE(single.satisfied);
    CHECK_FALSE(single.delta_below_min_threshold);
    CHECK(single.worst_point.rhs == 0.0);

    const DesignReport empty = verify_design_condition({}, 1.0, 0.1);
    CHECK(empty.satisfied);
    CHECK_FALSE(empty.note.empty());
    CHECK_THROWS_AS(verify_design_condition(pop, 0.0, 0.1), ConfigError);
    CHECK_THROWS_AS(verify_design_condition(pop, 1.0, 0.0), ConfigError);
}

TEST_CASE("loads sharing a threshold are counted together")
{
    const std::vector<TclParams> pop{load_with_alpha_half(0.6, 1.0), load_with_alpha_half(0.6, 1.0)};
    const DesignReport r = verify_design_condition(pop, 1.0, 0.5);
    CHECK(r.breakpoints == 1);
    CHECK_THAT(r.worst_point.lhs, WithinAbs(0.6, 1e-12));
    CHECK_FALSE(r.satisfied);
}

TEST_CASE("breakpoint verification agrees with a dense grid")
{
    const std::size_t n_grid = 10000;
    int violated = 0, satisfied = 0;
    for (std::uint64_t trial = 0; trial < 60; ++trial) {
        auto pop = sample_population({20 + trial % 30, 1.0 + static_cast<double>(trial % 7), {}, trial});
        // Thresholds on grid points so that every breakpoint is a grid sample.
        const double h = 2.0 * 0.26 / static_cast<double>(n_grid);
        for (std::size_t j = 0; j < pop.size(); ++j) {
            const auto k = 1 + static_cast<std::size_t>(counter_uniform(trial, 77, j) * 4999.0);
            pop[j].omega1 = static_cast<double>(k) * h;
        }
        pop[0].omega1 = 5000.0 * h;
        const double L_hat = 0.002 + 0.05 * counter_uniform(trial, 78, 0);
        const double delta = 1e-3 + 0.02 * counter_uniform(trial, 78, 1);
        const DesignReport r = verify_design_condition(pop, L_hat, delta);
        const auto dense = testing::dense_grid_verify(pop, L_hat, delta, h, n_grid);
        CHECK(r.satisfied == dense.satisfied);
        CHECK(r.worst_point.omega_bar == dense.worst_omega);
        (r.satisfied ? satisfied : violated)++;
    }
    CHECK(violated > 0);
    CHECK(satisfied > 0);
}

TEST_CASE("removing a load never breaks a satisfied design")
{
    auto pop = sample_population({40, 0.4, {}, 9});
    const double L_hat = 0.05;
    const DesignReport base = verify_design_condition(pop, L_hat, 1e-3);
    REQUIRE(base.satisfied);
    for (std::size_t j = 0; j < pop.size(); ++j) {
        auto fewer = pop;
        fewer.erase(fewer.begin() + static_cast<std::ptrdiff_t>(j));
        CHECK(verify_design_condition(fewer, L_hat, 1e-3).satisfied);
    }
}

TEST_CASE("scaling magnitudes scales every left-hand side")
{
    auto pop = sample_population({30, 3.0, {}, 21});
    const double L_hat = 0.03;
    for (double c : {0.5, 2.0, 10.0}) {
        auto scaled = pop;
        for (auto& p : scaled) {
            p.d_bar *= c;
            p.lambda /= c;
        }
        const DesignReport r = verify_design_condition(scaled, L_hat, 1e-3);
        // Recompute the verdict from the scaled sums directly.
        bool holds = true;
        for (const auto& q : scaled) {
            double lhs = 0.0;
            for (const auto& p : pop)
                if (p.omega1 <= q.omega1)
                    lhs += zeta(p) * p.d_bar;
            holds = holds && c * lhs <= std::max((q.omega1 - 1e-3) / L_hat, 0.0);
            if (q.omega1 == r.worst_point.omega_bar)
                CHECK_THAT(r.worst_point.lhs, WithinRel(c * lhs, 1e-9));
        }
        CHECK(r.satisfied == holds);
    }
}

TEST_CASE("allocator")
{
    SECTION("small population fits at the lower bound")
    {
        const auto pop = sample_population({5, 0.01, {}, 1});
        const Allocation a = allocate_thresholds(pop, 0.03, 1e-3, 0.2, {0.01, 0.26});
        for (const auto& p : a.population)
            CHECK(p.omega1 == 0.01);
        CHECK(a.inactive.empty());
        CHECK(a.report.satisfied);
    }
    SECTION("desk-scale population is monotone and verified")
    {
        const auto pop = sample_population({500, 25.0, {}, 20190101});
        const double L_hat = 0.115;
        const Allocation a = allocate_thresholds(pop, L_hat, 1e-3, 0.2, {0.01, 0.26});
        CHECK(a.report.satisfied);
        CHECK(verify_design_condition(a.population, L_hat, 1e-3).satisfied);
        CHECK_FALSE(a.inactive.empty());
        double cumulative = 0.0;
        double last = 0.0;
        for (std::size_t j = 0; j < a.population.size(); ++j) {
            const auto& p = a.population[j];
            if (!std::isfinite(p.omega1))
                continue;
            cumulative += zeta(p) * p.d_bar;
            CHECK(p.omega1 >= last);
            CHECK((p.omega1 >= 0.01 && p.omega1 <= 0.26));
            CHECK(cumulative <= (p.omega1 - 1e-3) / L_hat);
            last = p.omega1;
        }
    }
    SECTION("output always re-verifies")
    {
        for (std::uint64_t s = 0; s < 50; ++s) {
            const auto pop = sample_population({10 + s, 0.5 + static_cast<double>(s), {}, s});
            const double L_hat = 0.005 + 0.002 * static_cast<double>(s);
            const double margin = 0.05 * static_cast<double>(s % 10);
            const Allocation a = allocate_thresholds(pop, L_hat, 1e-3, margin, {0.01, 0.26});
            CHECK(verify_design_condition(a.population, L_hat, 1e-3).satisfied);
            CHECK(a.report.satisfied);
        }
    }
    SECTION("infeasible inputs")
    {
        const auto pop = sample_population({5, 1.0, {}, 1});
        CHECK_THROWS_AS(allocate_thresholds(pop, 0.03, 0.3, 0.2, {0.01, 0.26}), ConfigError);
        CHECK_THROWS_AS(allocate_thresholds(pop, 0.03, 1e-3, 1.0, {0.01, 0.26}), ConfigError);
    }
}

TEST_CASE("design report serializes its verdict")
{
    const std::vector<TclParams> pop{load_with_alpha_half(0.6, 1.0), load_with_alpha_half(0.6, 2.0)};
    std::ostringstream os;
    write_design_report(os, verify_design_condition(pop, 1.0, 0.8));
    CHECK(os.str().find("satisfied: false") != std::string::npos);
    CHECK(os.str().find("violations: 1") != std::string::npos);
}

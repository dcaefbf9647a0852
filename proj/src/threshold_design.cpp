#include "tclsim/threshold_design.hpp"

#include "tclsim/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

namespace tclsim {

double zeta(const TclParams& p)
{
    const double a = duty_cycle(p);
    return std::max(a, 1.0 - a);
}

DesignReport verify_design_condition(const std::vector<TclParams>& pop, double L_hat, double delta)
{
    if (!(L_hat > 0.0))
        throw ConfigError("design condition: L_hat must be positive");
    if (!(delta > 0.0))
        throw ConfigError("design condition: delta must be positive");

    DesignReport rep;
    rep.delta = delta;
    rep.L_hat = L_hat;
    rep.worst_point = {0.0, 0.0, 0.0};
    if (pop.empty()) {
        rep.note = "empty population: trivially satisfied";
        rep.omega_min = std::numeric_limits<double>::infinity();
        return rep;
    }

    std::vector<std::size_t> order;
    order.reserve(pop.size());
    for (std::size_t j = 0; j < pop.size(); ++j) {
        if (std::isfinite(pop[j].omega1))
            order.push_back(j);
        else
            ++rep.inactive_loads;
    }
    if (order.empty()) {
        rep.note = "no frequency-responsive loads: trivially satisfied";
        rep.omega_min = std::numeric_limits<double>::infinity();
        return rep;
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return pop[a].omega1 < pop[b].omega1; });
    rep.omega_min = pop[order.front()].omega1;
    rep.delta_below_min_threshold = delta < rep.omega_min;

    double cumulative = 0.0;
    double worst_gap = -std::numeric_limits<double>::infinity();
    for (std::size_t idx = 0; idx < order.size();) {
        const double w = pop[order[idx]].omega1;
        // Loads sharing a threshold all belong to S(w).
        while (idx < order.size() && pop[order[idx]].omega1 == w) {
            const TclParams& p = pop[order[idx]];
            cumulative += zeta(p) * p.d_bar;
            ++idx;
        }
        ++rep.breakpoints;
        const DesignPoint pt{w, cumulative, std::max((w - delta) / L_hat, 0.0)};
        const double gap = pt.lhs - pt.rhs;
        if (gap > worst_gap) {
            worst_gap = gap;
            rep.worst_point = pt;
        }
        const double used = pt.rhs > 0.0 ? pt.lhs / pt.rhs : std::numeric_limits<double>::infinity();
        rep.margin_used = std::max(rep.margin_used, used);
        if (pt.lhs > pt.rhs)
            rep.violations.push_back(pt);
    }
    rep.satisfied = rep.violations.empty();
    if (!rep.delta_below_min_threshold)
        rep.note = "delta is not below the smallest threshold; the condition cannot hold";
    return rep;
}

Allocation allocate_thresholds(const std::vector<TclParams>& pop, double L_hat, double delta, double margin,
                               Range range)
{
    if (!(L_hat > 0.0))
        throw ConfigError("allocate_thresholds: L_hat must be positive");
    if (!(delta > 0.0))
        throw ConfigError("allocate_thresholds: delta must be positive");
    if (!(margin >= 0.0 && margin < 1.0))
        throw ConfigError("allocate_thresholds: margin must lie in [0, 1)");
    if (!(range.lo > 0.0 && range.lo <= range.hi))
        throw ConfigError("allocate_thresholds: invalid threshold range");
    if (delta >= range.hi)
        throw ConfigError("allocate_thresholds: delta >= upper threshold bound, no feasible thresholds");

    Allocation out;
    out.population = pop;
    const double scale = L_hat / (1.0 - margin);
    double cumulative = 0.0;
    for (std::size_t j = 0; j < out.population.size(); ++j) {
        TclParams& p = out.population[j];
        const double next = cumulative + zeta(p) * p.d_bar;
        double w = std::max(range.lo, delta + scale * next);
        // Round up until the unmargined inequality holds exactly in floating point.
        while (w <= range.hi && next > (w - delta) / L_hat)
            w = std::nextafter(w, std::numeric_limits<double>::infinity());
        if (w > range.hi) {
            p.omega1 = std::numeric_limits<double>::infinity();
            out.inactive.push_back(j);
            continue;
        }
        p.omega1 = w;
        cumulative = next;
    }
    out.report = verify_design_condition(out.population, L_hat, delta);
    return out;
}

void write_design_report(std::ostream& os, const DesignReport& r)
{
    os << fmt::format("satisfied: {}\n", r.satisfied ? "true" : "false");
    os << fmt::format("L_hat: {:.17g}\n", r.L_hat);
    os << fmt::format("delta: {:.17g}\n", r.delta);
    os << fmt::format("omega_min: {:.17g}\n", r.omega_min);
    os << fmt::format("delta_below_min_threshold: {}\n", r.delta_below_min_threshold ? "true" : "false");
    os << fmt::format("breakpoints: {}\n", r.breakpoints);
    os << fmt::format("inactive_loads: {}\n", r.inactive_loads);
    os << fmt::format("margin_used: {:.17g}\n", r.margin_used);
    os << fmt::format("worst_point: {{omega_bar: {:.17g}, lhs: {:.17g}, rhs: {:.17g}}}\n", r.worst_point.omega_bar,
                      r.worst_point.lhs, r.worst_point.rhs);
    os << fmt::format("violations: {}\n", r.violations.size());
    for (const auto& v : r.violations)
        os << fmt::format("  - {{omega_bar: {:.17g}, lhs: {:.17g}, rhs: {:.17g}}}\n", v.omega_bar, v.lhs, v.rhs);
    if (!r.note.empty())
        os << "note: " << r.note << "\n";
}

}  // namespace tclsim

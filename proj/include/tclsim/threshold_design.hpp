#pragma once

// Certification and synthesis of frequency thresholds against the coupling
// bound  sum_{j : omega1_j <= w} zeta_j d_bar_j <= max((w - delta)/L, 0)  for all w > 0.

#include "tclsim/tcl.hpp"

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace tclsim {

struct DesignPoint {
    double omega_bar = 0.0;  // Hz
    double lhs = 0.0;        // p.u.
    double rhs = 0.0;        // p.u.
};

struct DesignReport {
    bool satisfied = true;
    double delta = 0.0;
    double L_hat = 0.0;
    /// Largest lhs/rhs over the breakpoints (share of the allowed budget used).
    double margin_used = 0.0;
    DesignPoint worst_point;  // breakpoint maximizing lhs - rhs
    std::vector<DesignPoint> violations;
    std::size_t breakpoints = 0;
    std::size_t inactive_loads = 0;  // loads with infinite threshold
    double omega_min = 0.0;          // smallest finite threshold
    bool delta_below_min_threshold = true;
    std::string note;
};

/// max(alpha, 1 - alpha).
double zeta(const TclParams& p);

/// Checks the inequality at each distinct threshold value, which is
/// necessary and sufficient since the left side is a right-continuous step
/// function of w and the right side is non-decreasing.
DesignReport verify_design_condition(const std::vector<TclParams>& pop, double L_hat, double delta);

struct Allocation {
    std::vector<TclParams> population;  // copy with thresholds rewritten
    std::vector<std::size_t> inactive;  // loads that did not fit (omega1 = inf)
    DesignReport report;                // verification of the result
};

/// Greedy ascending fill in load-index order: each load gets the smallest
/// threshold in [range.lo, range.hi] keeping the cumulative zeta*d_bar within
/// (1 - margin)(w - delta)/L. Loads that do not fit are made frequency-inactive.
Allocation allocate_thresholds(const std::vector<TclParams>& pop, double L_hat, double delta, double margin,
                               Range range);

void write_design_report(std::ostream& os, const DesignReport& r);

}  // namespace tclsim

#pragma once

// Brute-force design-condition check on a uniform grid of frequencies.

#include "tclsim/threshold_design.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace tclsim::testing {

struct DenseVerdict {
    bool satisfied = true;
    double worst_omega = 0.0;
    double worst_gap = -std::numeric_limits<double>::infinity();
};

// Grid points w_i = i * h, i = 0..n. Each point sums every load with
// omega1 <= w_i from scratch.
inline DenseVerdict dense_grid_verify(const std::vector<TclParams>& pop, double L_hat, double delta, double h,
                                      std::size_t n)
{
    DenseVerdict v;
    for (std::size_t i = 0; i <= n; ++i) {
        const double w = static_cast<double>(i) * h;
        double lhs = 0.0;
        bool any = false;
        for (const auto& p : pop) {
            if (p.omega1 <= w) {
                lhs += zeta(p) * p.d_bar;
                any = true;
            }
        }
        if (!any)
            continue;
        const double rhs = std::max((w - delta) / L_hat, 0.0);
        if (lhs > rhs)
            v.satisfied = false;
        if (lhs - rhs > v.worst_gap) {
            v.worst_gap = lhs - rhs;
            v.worst_omega = w;
        }
    }
    return v;
}

}  // namespace tclsim::testing

#pragma once

// Data-parallel inner loops over a TCL population, stored as structure of
// arrays. Every kernel has a scalar reference and (on x86-64) an AVX2
// variant chosen at runtime. The variants execute the same IEEE operation
// sequence, so their results are bit-identical, not merely close.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace tclsim::kernels {

/// Per-load candidate event inputs for next_event.
struct EventView {
    std::span<const double> sigma;      // 0.0 or 1.0
    std::span<const double> t_thermo;   // absolute time the thermostat limit is reached
    std::span<const double> t_guard;    // absolute time the deadband guard is reached
    std::span<const double> t_random;   // absolute time of the next randomized switch
    std::span<const double> omega1;     // thresholds (inf = inactive)
};

struct MinResult {
    double time = 0.0;
    std::size_t index = 0;  // lowest index attaining the minimum; npos when none finite
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

/// Anchored closed-form temperature: T0 + (target - T0)(1 - exp(-k (t - t0))).
struct FlowView {
    std::span<const double> t0;
    std::span<const double> T0;
    std::span<const double> target;
    std::span<const double> k;
};

struct KernelTable {
    std::string_view name;

    /// exp(x) for x in [-708, 709] (clamped outside), accurate to a few ulp.
    void (*exp)(std::span<const double> x, std::span<double> out);

    /// sum_j w_j * s_j in the canonical 4-lane order: lane accumulators over
    /// full blocks of 4, combined as (l0 + l1) + (l2 + l3), then the tail in
    /// index order.
    double (*weighted_sum)(std::span<const double> w, std::span<const double> s);

    /// Earliest candidate: min over loads of min(t_thermo, t_random, guard),
    /// where the guard time counts only when its frequency condition holds at
    /// omega ((sigma=0 and omega >= omega1) or (sigma=1 and omega <= -omega1)).
    MinResult (*next_event)(const EventView& v, double omega, bool use_guard);

    /// Loads whose jump condition holds at time t: thermostat or random time
    /// reached, or (use_guard) the frequency condition holds and the guard
    /// time is reached. Writes 1/0 flags.
    void (*due)(const EventView& v, double t, double omega, bool use_guard, std::span<std::uint8_t> flags);

    /// Temperatures of all loads at time t.
    void (*eval_temperatures)(const FlowView& v, double t, std::span<double> out);

    /// Randomized transition rates: gain = (K*omega)/omega1,
    /// on = clamp(base_on * max(0, 1 + gain), 0, r_max), off likewise with 1 - gain.
    void (*rates)(std::span<const double> base_on, std::span<const double> base_off,
                  std::span<const double> omega1, double K, double omega, double r_max, std::span<double> on,
                  std::span<double> off);
};

/// Scalar exp with the exact operation sequence of the vector kernels.
double exp_reference(double x);

/// One-load form of eval_temperatures, bit-identical to every backend.
double anchored_temperature(double t0, double T0, double target, double k, double t);

enum class Backend { Auto, Scalar, Avx2 };

const KernelTable& scalar_table();
/// Null when the AVX2 variant was not compiled in or the CPU lacks AVX2.
const KernelTable* avx2_table();

/// Currently selected table. Chosen on first use from TCLSIM_KERNELS
/// (scalar|avx2|auto) or CPU detection.
const KernelTable& active();
/// Overrides the active table; throws ConfigError if unavailable.
void select(Backend b);
std::vector<std::string_view> available();

}  // namespace tclsim::kernels

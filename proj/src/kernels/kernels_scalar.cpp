#include "kernels_internal.hpp"

#include "exp_poly.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>

namespace tclsim::kernels {

namespace {

using namespace detail;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Mirror _mm256_max_pd / _mm256_min_pd exactly (second operand on ties and NaN).
inline double maxv(double a, double b) { return a > b ? a : b; }
inline double minv(double a, double b) { return a < b ? a : b; }

void exp_scalar(std::span<const double> x, std::span<double> out)
{
    for (std::size_t i = 0; i < x.size(); ++i)
        out[i] = exp_reference(x[i]);
}

double weighted_sum_scalar(std::span<const double> w, std::span<const double> s)
{
    const std::size_t n = w.size();
    const std::size_t blocks = n / 4 * 4;
    double lane[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < blocks; i += 4)
        for (std::size_t l = 0; l < 4; ++l)
            lane[l] = lane[l] + w[i + l] * s[i + l];
    double acc = (lane[0] + lane[1]) + (lane[2] + lane[3]);
    for (std::size_t i = blocks; i < n; ++i)
        acc = acc + w[i] * s[i];
    return acc;
}

inline bool guard_active(double sigma, double omega, double omega1)
{
    return sigma == 0.0 ? omega >= omega1 : omega <= -omega1;
}

MinResult next_event_scalar(const EventView& v, double omega, bool use_guard)
{
    MinResult best{kInf, MinResult::npos};
    const std::size_t n = v.sigma.size();
    for (std::size_t i = 0; i < n; ++i) {
        double c = minv(v.t_thermo[i], v.t_random[i]);
        if (use_guard)
            c = minv(c, guard_active(v.sigma[i], omega, v.omega1[i]) ? v.t_guard[i] : kInf);
        if (c < best.time) {
            best.time = c;
            best.index = i;
        }
    }
    return best;
}

void due_scalar(const EventView& v, double t, double omega, bool use_guard, std::span<std::uint8_t> flags)
{
    const std::size_t n = v.sigma.size();
    for (std::size_t i = 0; i < n; ++i) {
        bool d = t >= v.t_thermo[i] || t >= v.t_random[i];
        if (use_guard && guard_active(v.sigma[i], omega, v.omega1[i]) && t >= v.t_guard[i])
            d = true;
        flags[i] = d ? 1 : 0;
    }
}

void eval_temperatures_scalar(const FlowView& v, double t, std::span<double> out)
{
    for (std::size_t i = 0; i < v.t0.size(); ++i)
        out[i] = anchored_temperature(v.t0[i], v.T0[i], v.target[i], v.k[i], t);
}

void rates_scalar(std::span<const double> base_on, std::span<const double> base_off,
                  std::span<const double> omega1, double K, double omega, double r_max, std::span<double> on,
                  std::span<double> off)
{
    const double num = K * omega;
    for (std::size_t i = 0; i < base_on.size(); ++i) {
        const double g = num / omega1[i];
        const double a = base_on[i] * maxv(1.0 + g, 0.0);
        const double b = base_off[i] * maxv(1.0 - g, 0.0);
        on[i] = minv(maxv(a, 0.0), r_max);
        off[i] = minv(maxv(b, 0.0), r_max);
    }
}

}  // namespace

double exp_reference(double x)
{
    x = maxv(x, kExpMinArg);
    x = minv(x, kExpMaxArg);
    const double t = x * kLog2e + kRoundMagic;
    const double n = t - kRoundMagic;
    double r = x - n * kLn2Hi;
    r = r - n * kLn2Lo;
    double p = kExpCoeffs[0];
    for (int c = 1; c < kExpTerms; ++c)
        p = p * r + kExpCoeffs[c];
    const std::int64_t ni = std::bit_cast<std::int64_t>(t) - std::bit_cast<std::int64_t>(kRoundMagic);
    const double scale = std::bit_cast<double>(static_cast<std::uint64_t>(ni + 1023) << 52);
    return p * scale;
}

double anchored_temperature(double t0, double T0, double target, double k, double t)
{
    const double e = exp_reference(-(k * (t - t0)));
    return T0 + (target - T0) * (1.0 - e);
}

const KernelTable& scalar_table()
{
    static const KernelTable table{"scalar",          exp_scalar,   weighted_sum_scalar, next_event_scalar,
                                   due_scalar,        eval_temperatures_scalar,          rates_scalar};
    return table;
}

}  // namespace tclsim::kernels

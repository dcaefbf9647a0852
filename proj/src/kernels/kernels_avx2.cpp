// Compiled with -mavx2 only (no FMA, no contraction) so each intrinsic maps to
// the same IEEE operation as the scalar reference.

#include "kernels_internal.hpp"

#include "exp_poly.hpp"

#include <immintrin.h>

#include <bit>
#include <cstdint>
#include <limits>

namespace tclsim::kernels {

namespace {

using namespace detail;

constexpr double kInf = std::numeric_limits<double>::infinity();

inline __m256d exp4(__m256d x)
{
    const __m256d magic = _mm256_set1_pd(kRoundMagic);
    x = _mm256_max_pd(x, _mm256_set1_pd(kExpMinArg));
    x = _mm256_min_pd(x, _mm256_set1_pd(kExpMaxArg));
    const __m256d t = _mm256_add_pd(_mm256_mul_pd(x, _mm256_set1_pd(kLog2e)), magic);
    const __m256d n = _mm256_sub_pd(t, magic);
    __m256d r = _mm256_sub_pd(x, _mm256_mul_pd(n, _mm256_set1_pd(kLn2Hi)));
    r = _mm256_sub_pd(r, _mm256_mul_pd(n, _mm256_set1_pd(kLn2Lo)));
    __m256d p = _mm256_set1_pd(kExpCoeffs[0]);
    for (int c = 1; c < kExpTerms; ++c)
        p = _mm256_add_pd(_mm256_mul_pd(p, r), _mm256_set1_pd(kExpCoeffs[c]));
    const __m256i ni = _mm256_sub_epi64(_mm256_castpd_si256(t),
                                        _mm256_set1_epi64x(std::bit_cast<std::int64_t>(kRoundMagic)));
    const __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(ni, _mm256_set1_epi64x(1023)), 52);
    return _mm256_mul_pd(p, _mm256_castsi256_pd(bits));
}

inline __m256d negate(__m256d v) { return _mm256_xor_pd(v, _mm256_set1_pd(-0.0)); }

void exp_avx2(std::span<const double> x, std::span<double> out)
{
    const std::size_t n = x.size();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out.data() + i, exp4(_mm256_loadu_pd(x.data() + i)));
    for (; i < n; ++i)
        out[i] = exp_reference(x[i]);
}

double weighted_sum_avx2(std::span<const double> w, std::span<const double> s)
{
    const std::size_t n = w.size();
    const std::size_t blocks = n / 4 * 4;
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t i = 0; i < blocks; i += 4)
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(w.data() + i), _mm256_loadu_pd(s.data() + i)));
    alignas(32) double lane[4];
    _mm256_store_pd(lane, acc);
    double total = (lane[0] + lane[1]) + (lane[2] + lane[3]);
    for (std::size_t i = blocks; i < n; ++i)
        total = total + w[i] * s[i];
    return total;
}

inline __m256d guard_mask(__m256d sigma, __m256d omega, __m256d w1)
{
    const __m256d off = _mm256_cmp_pd(sigma, _mm256_setzero_pd(), _CMP_EQ_OQ);
    const __m256d up = _mm256_cmp_pd(omega, w1, _CMP_GE_OQ);
    const __m256d down = _mm256_cmp_pd(omega, negate(w1), _CMP_LE_OQ);
    return _mm256_or_pd(_mm256_and_pd(off, up), _mm256_andnot_pd(off, down));
}

MinResult next_event_avx2(const EventView& v, double omega, bool use_guard)
{
    const std::size_t n = v.sigma.size();
    const __m256d inf = _mm256_set1_pd(kInf);
    const __m256d om = _mm256_set1_pd(omega);
    __m256d best = inf;
    __m256d best_idx = _mm256_set1_pd(-1.0);
    __m256d idx = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
    const __m256d four = _mm256_set1_pd(4.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d c = _mm256_min_pd(_mm256_loadu_pd(v.t_thermo.data() + i), _mm256_loadu_pd(v.t_random.data() + i));
        if (use_guard) {
            const __m256d act = guard_mask(_mm256_loadu_pd(v.sigma.data() + i), om,
                                           _mm256_loadu_pd(v.omega1.data() + i));
            c = _mm256_min_pd(c, _mm256_blendv_pd(inf, _mm256_loadu_pd(v.t_guard.data() + i), act));
        }
        const __m256d lt = _mm256_cmp_pd(c, best, _CMP_LT_OQ);
        best = _mm256_blendv_pd(best, c, lt);
        best_idx = _mm256_blendv_pd(best_idx, idx, lt);
        idx = _mm256_add_pd(idx, four);
    }
    alignas(32) double bv[4];
    alignas(32) double bi[4];
    _mm256_store_pd(bv, best);
    _mm256_store_pd(bi, best_idx);
    MinResult res{kInf, MinResult::npos};
    for (int l = 0; l < 4; ++l) {
        if (bi[l] < 0.0)
            continue;
        const auto li = static_cast<std::size_t>(bi[l]);
        if (bv[l] < res.time || (bv[l] == res.time && li < res.index)) {
            res.time = bv[l];
            res.index = li;
        }
    }
    for (; i < n; ++i) {
        double c = v.t_thermo[i] < v.t_random[i] ? v.t_thermo[i] : v.t_random[i];
        if (use_guard) {
            const bool act = v.sigma[i] == 0.0 ? omega >= v.omega1[i] : omega <= -v.omega1[i];
            const double g = act ? v.t_guard[i] : kInf;
            c = c < g ? c : g;
        }
        if (c < res.time) {
            res.time = c;
            res.index = i;
        }
    }
    return res;
}

void due_avx2(const EventView& v, double t, double omega, bool use_guard, std::span<std::uint8_t> flags)
{
    const std::size_t n = v.sigma.size();
    const __m256d tv = _mm256_set1_pd(t);
    const __m256d om = _mm256_set1_pd(omega);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_or_pd(_mm256_cmp_pd(tv, _mm256_loadu_pd(v.t_thermo.data() + i), _CMP_GE_OQ),
                                 _mm256_cmp_pd(tv, _mm256_loadu_pd(v.t_random.data() + i), _CMP_GE_OQ));
        if (use_guard) {
            const __m256d act = guard_mask(_mm256_loadu_pd(v.sigma.data() + i), om,
                                           _mm256_loadu_pd(v.omega1.data() + i));
            d = _mm256_or_pd(d, _mm256_and_pd(act, _mm256_cmp_pd(tv, _mm256_loadu_pd(v.t_guard.data() + i),
                                                                  _CMP_GE_OQ)));
        }
        const int m = _mm256_movemask_pd(d);
        flags[i] = m & 1;
        flags[i + 1] = (m >> 1) & 1;
        flags[i + 2] = (m >> 2) & 1;
        flags[i + 3] = (m >> 3) & 1;
    }
    for (; i < n; ++i) {
        bool d = t >= v.t_thermo[i] || t >= v.t_random[i];
        if (use_guard) {
            const bool act = v.sigma[i] == 0.0 ? omega >= v.omega1[i] : omega <= -v.omega1[i];
            if (act && t >= v.t_guard[i])
                d = true;
        }
        flags[i] = d ? 1 : 0;
    }
}

void eval_temperatures_avx2(const FlowView& v, double t, std::span<double> out)
{
    const std::size_t n = v.t0.size();
    const __m256d tv = _mm256_set1_pd(t);
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d T0 = _mm256_loadu_pd(v.T0.data() + i);
        const __m256d dt = _mm256_sub_pd(tv, _mm256_loadu_pd(v.t0.data() + i));
        const __m256d e = exp4(negate(_mm256_mul_pd(_mm256_loadu_pd(v.k.data() + i), dt)));
        const __m256d span = _mm256_sub_pd(_mm256_loadu_pd(v.target.data() + i), T0);
        _mm256_storeu_pd(out.data() + i, _mm256_add_pd(T0, _mm256_mul_pd(span, _mm256_sub_pd(one, e))));
    }
    for (; i < n; ++i)
        out[i] = anchored_temperature(v.t0[i], v.T0[i], v.target[i], v.k[i], t);
}

void rates_avx2(std::span<const double> base_on, std::span<const double> base_off,
                std::span<const double> omega1, double K, double omega, double r_max, std::span<double> on,
                std::span<double> off)
{
    const std::size_t n = base_on.size();
    const double num_s = K * omega;
    const __m256d num = _mm256_set1_pd(num_s);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d rmax = _mm256_set1_pd(r_max);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d g = _mm256_div_pd(num, _mm256_loadu_pd(omega1.data() + i));
        const __m256d a = _mm256_mul_pd(_mm256_loadu_pd(base_on.data() + i), _mm256_max_pd(_mm256_add_pd(one, g), zero));
        const __m256d b = _mm256_mul_pd(_mm256_loadu_pd(base_off.data() + i), _mm256_max_pd(_mm256_sub_pd(one, g), zero));
        _mm256_storeu_pd(on.data() + i, _mm256_min_pd(_mm256_max_pd(a, zero), rmax));
        _mm256_storeu_pd(off.data() + i, _mm256_min_pd(_mm256_max_pd(b, zero), rmax));
    }
    for (; i < n; ++i) {
        const double g = num_s / omega1[i];
        const double y1 = 1.0 + g;
        const double y2 = 1.0 - g;
        const double a = base_on[i] * (y1 > 0.0 ? y1 : 0.0);
        const double b = base_off[i] * (y2 > 0.0 ? y2 : 0.0);
        const double ca = a > 0.0 ? a : 0.0;
        const double cb = b > 0.0 ? b : 0.0;
        on[i] = ca < r_max ? ca : r_max;
        off[i] = cb < r_max ? cb : r_max;
    }
}

}  // namespace

const KernelTable& avx2_table_unchecked()
{
    static const KernelTable table{"avx2",   exp_avx2, weighted_sum_avx2,      next_event_avx2,
                                   due_avx2, eval_temperatures_avx2, rates_avx2};
    return table;
}

}  // namespace tclsim::kernels

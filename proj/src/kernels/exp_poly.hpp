#pragma once

// Shared constants of the exp kernel. Both variants evaluate
//   n = rint(x / ln2),  r = (x - n*ln2_hi) - n*ln2_lo,  exp(x) = 2^n * P13(r)
// with Horner's rule using the same operation order, and are compiled
// without floating-point contraction.

namespace tclsim::kernels::detail {

inline constexpr double kExpMinArg = -708.0;
inline constexpr double kExpMaxArg = 709.0;
inline constexpr double kLog2e = 1.44269504088896338700e+00;
inline constexpr double kLn2Hi = 6.93147180369123816490e-01;
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;
inline constexpr double kRoundMagic = 6755399441055744.0;  // 1.5 * 2^52

// Taylor coefficients 1/k!, highest degree first.
inline constexpr double kExpCoeffs[] = {
    1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0, 1.0 / 362880.0,
    1.0 / 40320.0,      1.0 / 5040.0,      1.0 / 720.0,      1.0 / 120.0,     1.0 / 24.0,
    1.0 / 6.0,          1.0 / 2.0,         1.0,              1.0,
};
inline constexpr int kExpTerms = sizeof(kExpCoeffs) / sizeof(kExpCoeffs[0]);

}  // namespace tclsim::kernels::detail

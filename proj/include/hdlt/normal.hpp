#pragma once

#include <cmath>
#include <numbers>

#include "hdlt/error.hpp"

namespace hdlt::normal {

inline double pdf(double x)
{
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

/// Standard normal CDF through erfc, accurate in both tails.
inline double cdf(double x)
{
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

/// Upper tail 1 - Phi(x) without cancellation.
inline double upper_tail(double x)
{
    return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

/// Two-sided tail G(t) = 2 - 2 Phi(t).
inline double two_sided_tail(double t)
{
    return std::erfc(t / std::numbers::sqrt2);
}

namespace detail {

// Acklam's rational approximation, relative error ~1e-9 before refinement.
inline double quantile_initial(double q)
{
    constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                            1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                            6.680131188771972e+01,  -1.328068155288572e+01};
    constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                            -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                            3.754408661907416e+00};
    constexpr double low = 0.02425;

    if (q < low) {
        const double r = std::sqrt(-2.0 * std::log(q));
        return (((((c[0] * r + c[1]) * r + c[2]) * r + c[3]) * r + c[4]) * r + c[5]) /
               ((((d[0] * r + d[1]) * r + d[2]) * r + d[3]) * r + 1.0);
    }
    if (q > 1.0 - low) {
        const double r = std::sqrt(-2.0 * std::log1p(-q));
        return -(((((c[0] * r + c[1]) * r + c[2]) * r + c[3]) * r + c[4]) * r + c[5]) /
               ((((d[0] * r + d[1]) * r + d[2]) * r + d[3]) * r + 1.0);
    }
    const double s = q - 0.5;
    const double r = s * s;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * s /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

} // namespace detail

/// Inverse standard normal CDF; rational start refined by Halley steps on erfc.
inline double quantile(double q)
{
    if (!(q > 0.0 && q < 1.0)) {
        throw invalid_input("normal quantile: probability must lie in (0,1)");
    }
    double x = detail::quantile_initial(q);
    for (int step = 0; step < 3; ++step) {
        // Work in whichever tail keeps the residual relative-accurate.
        const double e = (x <= 0.0) ? cdf(x) - q : (1.0 - q) - upper_tail(x);
        const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
        const double next = x - u / (1.0 + 0.5 * x * u);
        if (next == x) {
            break;
        }
        x = next;
    }
    return x;
}

/// G^{-1}(z) for z in (0,1]: the t >= 0 with 2 - 2 Phi(t) = z.
inline double two_sided_tail_inverse(double z)
{
    if (!(z > 0.0 && z <= 1.0)) {
        throw invalid_input("two-sided tail inverse: argument must lie in (0,1]");
    }
    if (z == 1.0) {
        return 0.0;
    }
    return -quantile(0.5 * z);
}

} // namespace hdlt::normal

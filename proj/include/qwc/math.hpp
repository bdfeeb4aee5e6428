#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <vector>

namespace qwc {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

inline bool is_power_of_two(std::int64_t n) { return n > 0 && (n & (n - 1)) == 0; }

inline std::int64_t next_power_of_two(std::int64_t n) {
    std::int64_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

inline double sq(double x) { return x * x; }

namespace detail {

// Rational pieces of Wichura's AS 241 (PPND16) normal quantile, applied to
// the positive half only; the tail argument r = sqrt(-log(tail)) is computed
// by the caller from the exact tail 1 - |x|.
inline double quantile_central(double q) {
    const double r = 0.180625 - q * q;
    const double num =
        (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
              6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
            1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
          1.3314166789178437745e+2) * r + 3.3871328727963666080e+0);
    const double den =
        (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
              3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
            5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
          4.2313330701600911252e+1) * r + 1.0);
    return q * num / den;
}

inline double quantile_tail(double r) {
    double num, den;
    if (r <= 5.0) {
        r -= 1.6;
        num = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                    2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
                  3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
                4.63033784615654529590e+0) * r + 1.42343711074968357734e+0);
        den = (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                    1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                  6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
                2.05319162663775882187e+0) * r + 1.0);
    } else {
        r -= 5.0;
        num = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                    1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                  2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
                5.46378491116411436990e+0) * r + 6.65790464350110377720e+0);
        den = (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                    1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                  1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                5.99832206555887937690e-1) * r + 1.0);
    }
    return num / den;
}

} // namespace detail

/// Inverse error function, exactly odd in x. erf_inv(erf(y)) = y to near
/// machine precision; returns +/-infinity at x = +/-1 and NaN outside [-1, 1].
inline double erf_inv(double x) {
    if (std::isnan(x) || x < -1.0 || x > 1.0)
        return std::numeric_limits<double>::quiet_NaN();
    if (x == 0.0) return 0.0;
    const double ax = std::abs(x);
    const double sign = x < 0.0 ? -1.0 : 1.0;
    if (ax == 1.0) return sign * std::numeric_limits<double>::infinity();

    // erf_inv(x) = Phi^{-1}((x+1)/2) / sqrt(2); the AS 241 pieces split at
    // |x| = 0.85, with the tail evaluated from 1 - |x| (no cancellation).
    double y;
    if (ax <= 0.85) {
        y = detail::quantile_central(0.5 * ax) / std::sqrt(2.0);
    } else {
        const double r = std::sqrt(-std::log(0.5 * (1.0 - ax)));
        y = detail::quantile_tail(r) / std::sqrt(2.0);
    }
    // Newton polish where erf still resolves the residual in double.
    if (ax <= 0.9999) {
        for (int it = 0; it < 2; ++it) {
            const double err = std::erf(y) - ax;
            y -= err * (std::sqrt(pi) / 2.0) * std::exp(y * y);
        }
    }
    return sign * y;
}

/// Cumulative trapezoidal integral on a uniform grid; result[0] = 0.
inline std::vector<double> cumtrapz(const std::vector<double>& f, double dx) {
    std::vector<double> out(f.size(), 0.0);
    for (std::size_t j = 1; j < f.size(); ++j)
        out[j] = out[j - 1] + 0.5 * dx * (f[j - 1] + f[j]);
    return out;
}

} // namespace qwc

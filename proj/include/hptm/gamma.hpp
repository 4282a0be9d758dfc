#ifndef HPTM_GAMMA_HPP
#define HPTM_GAMMA_HPP

#include <cmath>
#include <stdexcept>
#include <string>

// Gamma-function kernel backing every fractional-integral coefficient.
//
// ln Gamma is evaluated by an eight-term Stirling series after shifting the
// argument into z >= 16, all in long double.  The extra mantissa bits matter:
// ratios Gamma(q+1)/Gamma(q+alpha+1) must stay accurate to ~1e-15 relative
// even when both log-gamma values are ~1e2, which plain double differencing
// cannot deliver.

namespace hptm {

namespace detail {

// Stirling coefficients B_{2k} / (2k (2k-1)), A&S 6.1.41.
inline constexpr long double kStirling[8] = {
    1.0L / 12.0L,     -1.0L / 360.0L,      1.0L / 1260.0L, -1.0L / 1680.0L,
    1.0L / 1188.0L,   -691.0L / 360360.0L, 1.0L / 156.0L,  -3617.0L / 122400.0L,
};

inline constexpr long double kHalfLogTwoPi =
    0.918938533204672741780329736405617639862L;

// ln Gamma(z) for z > 0. Truncation error of the series is ~1e-21 at z = 16.
inline long double log_gamma_ld(long double z) {
    long double shift = 1.0L;
    while (z < 16.0L) {
        shift *= z;
        z += 1.0L;
    }
    const long double r = 1.0L / (z * z);
    long double series = kStirling[7];
    for (int i = 6; i >= 0; --i) {
        series = series * r + kStirling[i];
    }
    long double value = (z - 0.5L) * std::log(z) - z + kHalfLogTwoPi + series / z;
    if (shift != 1.0L) {
        value -= std::log(shift);
    }
    return value;
}

}  // namespace detail

/// Natural log of Gamma(z) for z > 0.
inline double log_gamma(double z) {
    if (!(z > 0.0) || !std::isfinite(z)) {
        throw std::domain_error("log_gamma: argument must be positive and finite, got " +
                                std::to_string(z));
    }
    return static_cast<double>(detail::log_gamma_ld(static_cast<long double>(z)));
}

/// Gamma(q+1) / Gamma(q+alpha+1), the power-rule coefficient of the
/// fractional integral J^alpha t^q.  Computed in log space so high orders
/// (q ~ 40) cannot overflow.
inline double frac_integral_coeff(double q, double alpha) {
    if (!(alpha > 0.0) || !(alpha <= 1.0)) {
        throw std::domain_error("frac_integral_coeff: alpha must lie in (0,1], got " +
                                std::to_string(alpha));
    }
    if (!(q >= 0.0) || !std::isfinite(q)) {
        throw std::domain_error("frac_integral_coeff: exponent must be >= 0, got " +
                                std::to_string(q));
    }
    const long double lq = static_cast<long double>(q);
    const long double la = static_cast<long double>(alpha);
    return static_cast<double>(
        std::exp(detail::log_gamma_ld(lq + 1.0L) - detail::log_gamma_ld(lq + la + 1.0L)));
}

}  // namespace hptm

#endif  // HPTM_GAMMA_HPP

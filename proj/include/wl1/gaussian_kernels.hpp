/**
 * @file gaussian_kernels.hpp
 * @brief Scalar Gaussian special functions behind the threshold formulas.
 *
 * phi(t) is the excess-tail second moment
 *   sqrt(2/pi) * int_t^inf (x - t)^2 exp(-x^2/2) dx,
 * evaluated through its erfc closed form.
 */
#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace wl1 {

/// sqrt(2/pi)
inline constexpr double kSqrt2OverPi = 0.79788456080286535587989211986876;

/// Beyond this argument exp(-t^2/2) underflows and phi, phi' are exactly zero.
inline constexpr double kKernelCutoff = 50.0;

namespace detail {
inline void require_non_negative(double t, const char* who) {
    if (!(t >= 0.0)) {
        throw std::domain_error(std::string(who) + ": argument must be >= 0, got " + std::to_string(t));
    }
}
}  // namespace detail

/// Complementary error function. Thin wrapper over the C library erfc,
/// which is accurate to a few ulp on the whole real line.
inline double erfc_scaled_tail(double t) noexcept { return std::erfc(t); }

/// Positive part.
inline constexpr double pos(double x) noexcept { return x > 0.0 ? x : 0.0; }

/// phi(t) = (1 + t^2) erfc(t/sqrt2) - t sqrt(2/pi) exp(-t^2/2),  t >= 0.
inline double phi(double t) {
    detail::require_non_negative(t, "phi");
    if (t > kKernelCutoff) return 0.0;
    const double tail = erfc_scaled_tail(t / std::numbers::sqrt2);
    const double dens = kSqrt2OverPi * std::exp(-0.5 * t * t);
    return pos((1.0 + t * t) * tail - t * dens);
}

/// d phi / dt = -2 (sqrt(2/pi) exp(-t^2/2) - t erfc(t/sqrt2)).
inline double phi_prime(double t) {
    detail::require_non_negative(t, "phi_prime");
    if (t > kKernelCutoff) return 0.0;
    const double tail = erfc_scaled_tail(t / std::numbers::sqrt2);
    const double dens = kSqrt2OverPi * std::exp(-0.5 * t * t);
    return -2.0 * pos(dens - t * tail);
}

/// sqrt(2/pi) * int_t^inf (x - t) exp(-x^2/2) dx, i.e. -phi'(t)/2.
inline double first_tail_moment(double t) { return -0.5 * phi_prime(t); }

}  // namespace wl1

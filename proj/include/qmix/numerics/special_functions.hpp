#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qmix {

namespace detail {

inline void require(bool condition, const std::string& message) {
    if (!condition) throw std::domain_error(message);
}

// Lanczos coefficients, g = 7, n = 9 (Godfrey's set).
inline constexpr double kLanczos[9] = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

inline double log_gamma_lanczos(double x) {
    // valid for x >= 0.5
    double acc = kLanczos[0];
    for (int k = 1; k < 9; ++k) acc += kLanczos[k] / (x - 1.0 + k);
    const double t = x + 6.5;  // x + g - 0.5
    return 0.5 * std::log(2.0 * std::numbers::pi) + (x - 0.5) * std::log(t) - t +
           std::log(acc);
}

}  // namespace detail

/// Natural log of the gamma function for x > 0.
inline double log_gamma(double x) {
    detail::require(std::isfinite(x) && x > 0.0, "log_gamma: x must be positive and finite");
    if (x >= 0.5) return detail::log_gamma_lanczos(x);
    // reflection keeps the small-argument range accurate
    return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) -
           detail::log_gamma_lanczos(1.0 - x);
}

inline double normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

/// Standard normal CDF. Built from the upper-tail mass of |x| so that the
/// x -> -x reflection is exact to a half ulp.
inline double normal_cdf(double x) {
    detail::require(!std::isnan(x), "normal_cdf: x must not be NaN");
    const double tail = 0.5 * std::erfc(std::abs(x) * std::numbers::sqrt2 / 2.0);
    return x >= 0.0 ? 1.0 - tail : tail;
}

/// Regularized lower incomplete gamma P(a, x).
inline double gamma_p(double a, double x) {
    detail::require(a > 0.0 && std::isfinite(a), "gamma_p: shape must be positive");
    detail::require(x >= 0.0, "gamma_p: x must be nonnegative");
    if (x == 0.0) return 0.0;
    const double log_prefactor = a * std::log(x) - x - log_gamma(a);
    if (x < a + 1.0) {
        // series representation
        double term = 1.0 / a;
        double sum = term;
        for (int n = 1; n < 1000; ++n) {
            term *= x / (a + n);
            sum += term;
            if (std::abs(term) < std::abs(sum) * 1e-16) break;
        }
        return std::min(1.0, sum * std::exp(log_prefactor));
    }
    // continued fraction for Q(a, x), modified Lentz
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 1000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return 1.0 - std::exp(log_prefactor) * h;
}

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
inline double gamma_q(double a, double x) {
    detail::require(a > 0.0 && std::isfinite(a), "gamma_q: shape must be positive");
    detail::require(x >= 0.0, "gamma_q: x must be nonnegative");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p(a, x);
    const double log_prefactor = a * std::log(x) - x - log_gamma(a);
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 1000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(log_prefactor) * h;
}

inline double chi_square_cdf(double x, double dof) {
    detail::require(dof > 0.0, "chi_square_cdf: dof must be positive");
    if (x <= 0.0) return 0.0;
    return gamma_p(0.5 * dof, 0.5 * x);
}

inline double log_beta(double a, double b) {
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

}  // namespace qmix

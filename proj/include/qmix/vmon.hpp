#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmix/mixing_law.hpp"
#include "qmix/numerics/quadrature.hpp"
#include "qmix/numerics/random.hpp"
#include "qmix/qgaussian.hpp"

namespace qmix {

/// Constant of the Laplace-transform identity
///   C'_q [1 + (q-1)x^2]^(-1/(q-1)) = int_0^inf exp(-x^2 t) exp(-t/(q-1)) t^((2-q)/(q-1)) dt.
/// C'_q = Gamma(1/(q-1)) (q-1)^(1/(q-1)); the positive exponent on (q-1) is
/// forced by evaluating both sides at x = 0.
inline double c_q_prime(double q) {
    detail::require(q > 1.0 && q < 3.0, "c_q_prime: q must lie in (1, 3)");
    const double a = 1.0 / (q - 1.0);
    return std::exp(log_gamma(a) + a * std::log(q - 1.0));
}

/// Density of V*Z at x, evaluated by mixing the normal kernel over f_V.
/// The integral is split at the f_V mode to tame the essential decay at 0+.
inline double vz_density(const MixingLaw& law, double x, QuadTolerance tol = {}) {
    auto log_integrand = [&law, x](double v) {
        return -x * x / (2.0 * v * v) - 0.5 * std::log(2.0 * std::numbers::pi) - std::log(v) +
               law.log_density(v);
    };
    auto integrand = [&log_integrand](double v) {
        return v > 0.0 ? std::exp(log_integrand(v)) : 0.0;
    };
    // split where the integrand peaks so adaptive panels always see it
    const double peak = std::abs(x) / std::sqrt(law.dof() + 2.0);
    const double split = std::max(law.mode(), peak);
    const double head = integrate(integrand, 0.0, split, tol).value;
    const double tail = integrate_half_line(integrand, split, tol).value;
    return head + tail;
}

struct IdentityReport {
    double sup_error = 0.0;
    double worst_x = 0.0;
    double tol = 0.0;
    bool pass = false;
};

/// Numerical check of the variance-mixture identity
///   g_q(x) = int_0^inf (1/(sqrt(2 pi) v)) exp(-x^2/(2 v^2)) f_V(v) dv.
inline IdentityReport verify_mixture(double q, const std::vector<double>& x_grid, double tol,
                                     QuadTolerance quad_tol = {}) {
    detail::require(!x_grid.empty(), "verify_mixture: empty grid");
    const MixingLaw mixing(q);
    const QGaussianLaw law(q);
    IdentityReport report;
    report.tol = tol;
    for (double x : x_grid) {
        const double lhs = law.density(x);
        const double rhs = vz_density(mixing, x, quad_tol);
        const double err = std::abs(lhs - rhs);
        if (err > report.sup_error) {
            report.sup_error = err;
            report.worst_x = x;
        }
    }
    report.pass = report.sup_error < tol;
    return report;
}

/// Numerical check of the Laplace-transform identity behind the mixture proof.
inline IdentityReport exp_mixture_check(double q, const std::vector<double>& x_grid, double tol,
                                        QuadTolerance quad_tol = {}) {
    detail::require(q > 1.0 && q < 3.0, "exp_mixture_check: q must lie in (1, 3)");
    detail::require(!x_grid.empty(), "exp_mixture_check: empty grid");
    const double cp = c_q_prime(q);
    const double alpha = (2.0 - q) / (q - 1.0);
    const double b = 1.0 / (q - 1.0);

    auto rhs_at = [&](double x) {
        const double s = x * x + b;
        if (q <= 2.0) {
            // integrand t^alpha e^{-s t} with alpha >= 0: integrate directly
            auto f = [&](double t) { return std::pow(t, alpha) * std::exp(-s * t); };
            const double split = std::max(1.0, (alpha + 1.0)) / s;
            return integrate(f, 0.0, split, quad_tol).value +
                   integrate_half_line(f, split, quad_tol).value;
        }
        // alpha in (-1, 0): substitute t = w^(q-1), which removes the endpoint
        // singularity: integrand becomes (q-1) exp(-s w^(q-1))
        auto f = [&](double w) { return (q - 1.0) * std::exp(-s * std::pow(w, q - 1.0)); };
        const double split = std::pow(1.0 / s, 1.0 / (q - 1.0));
        return integrate(f, 0.0, split, quad_tol).value +
               integrate_half_line(f, split, quad_tol).value;
    };

    IdentityReport report;
    report.tol = tol;
    for (double x : x_grid) {
        const double lhs = cp * std::pow(1.0 + (q - 1.0) * x * x, -1.0 / (q - 1.0));
        const double rhs = rhs_at(x);
        const double err = std::abs(lhs - rhs);
        if (err > report.sup_error) {
            report.sup_error = err;
            report.worst_x = x;
        }
    }
    report.pass = report.sup_error < tol;
    return report;
}

/// A user-supplied variance mixture of normals: any positive mixing variable
/// with an optional CDF for goodness-of-fit targets.
struct GenericVMON {
    std::function<double(RandomStream&)> mixing_sampler;
    std::function<double(double)> mixing_cdf;  // may be empty
    std::string label;
};

inline std::vector<double> generic_vmon_sample(const GenericVMON& vmon, RandomStream& stream,
                                               std::size_t n) {
    detail::require(n >= 1, "generic_vmon_sample: n must be at least 1");
    detail::require(static_cast<bool>(vmon.mixing_sampler),
                    "generic_vmon_sample: mixing_sampler must be set");
    std::vector<double> out(n);
    for (auto& value : out) {
        const double v = vmon.mixing_sampler(stream);
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw std::runtime_error("generic_vmon_sample: mixing sampler returned a "
                                     "nonpositive value, violating the V > 0 contract");
        }
        value = v * stream.normal();
    }
    return out;
}

inline std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
    detail::require(n >= 2 && hi > lo, "uniform_grid: need hi > lo and n >= 2");
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
        g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return g;
}

}  // namespace qmix

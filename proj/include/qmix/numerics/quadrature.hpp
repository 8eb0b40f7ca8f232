#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmix/numerics/special_functions.hpp"

namespace qmix {

struct QuadTolerance {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_depth = 60;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;  // estimated absolute error
    bool converged = false;
    int subdivisions = 0;
};

class QuadratureError : public std::runtime_error {
  public:
    QuadratureError(const std::string& what, QuadResult best)
        : std::runtime_error(what), best_estimate(best) {}
    QuadResult best_estimate;
};

namespace detail {

// 15-point Kronrod nodes (positive half) with embedded 7-point Gauss rule.
inline constexpr double kKronrodNodes[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691, 0.7415311855993944,
    0.5860872354676911, 0.4058451513773972, 0.2077849550078985, 0.0};
inline constexpr double kKronrodWeights[8] = {
    0.0229353220105292, 0.0630920926299785, 0.1047900103222502, 0.1406532597155259,
    0.1690047266392679, 0.1903505780647854, 0.2044329400752989, 0.2094821410847278};
inline constexpr double kGaussWeights[4] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189, 0.4179591836734694};

struct Panel {
    double a, b;
    double value;
    double error;
    int depth;
    bool operator<(const Panel& other) const { return error < other.error; }
};

template <class F>
Panel gk15(F&& f, double a, double b, int depth) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double kronrod = 0.0;
    double gauss = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double dx = half * kKronrodNodes[i];
        double fsum;
        if (i == 7) {
            fsum = f(center);
        } else {
            fsum = f(center - dx) + f(center + dx);
        }
        kronrod += kKronrodWeights[i] * fsum;
        if (i % 2 == 1 || i == 7) gauss += kGaussWeights[i / 2] * fsum;
    }
    kronrod *= half;
    gauss *= half;
    return Panel{a, b, kronrod, std::abs(kronrod - gauss), depth};
}

inline void validate(const QuadTolerance& tol) {
    require(tol.abs_tol > 0.0 && tol.rel_tol > 0.0 && tol.max_depth >= 1,
            "quadrature tolerance: abs_tol > 0, rel_tol > 0, max_depth >= 1 required");
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod integration over a finite interval.
template <class F>
QuadResult try_integrate(F&& f, double a, double b, QuadTolerance tol = {}) {
    detail::validate(tol);
    detail::require(std::isfinite(a) && std::isfinite(b),
                    "try_integrate: endpoints must be finite");
    QuadResult out;
    if (a == b) {
        out.converged = true;
        return out;
    }
    double sign = 1.0;
    if (a > b) {
        std::swap(a, b);
        sign = -1.0;
    }

    std::priority_queue<detail::Panel> heap;
    detail::Panel first = detail::gk15(f, a, b, 0);
    double total_value = first.value;
    double total_error = first.error;
    double frozen_error = 0.0;  // error stuck at max_depth panels
    heap.push(first);
    int subdivisions = 0;

    auto target = [&] { return std::max(tol.abs_tol, tol.rel_tol * std::abs(total_value)); };

    while (total_error > target() && !heap.empty() && subdivisions < 200000) {
        detail::Panel worst = heap.top();
        heap.pop();
        if (worst.depth >= tol.max_depth) {
            frozen_error += worst.error;
            if (frozen_error > target()) break;
            continue;
        }
        const double mid = 0.5 * (worst.a + worst.b);
        detail::Panel left = detail::gk15(f, worst.a, mid, worst.depth + 1);
        detail::Panel right = detail::gk15(f, mid, worst.b, worst.depth + 1);
        total_value += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++subdivisions;
    }

    out.value = sign * total_value;
    out.error = total_error;
    out.subdivisions = subdivisions;
    out.converged = std::isfinite(total_value) && total_error <= target();
    return out;
}

template <class F>
QuadResult integrate(F&& f, double a, double b, QuadTolerance tol = {}) {
    QuadResult r = try_integrate(std::forward<F>(f), a, b, tol);
    if (!r.converged) {
        throw QuadratureError("quadrature did not converge within max_depth on [" +
                                  std::to_string(a) + ", " + std::to_string(b) + "]",
                              r);
    }
    return r;
}

/// Integral over [a, infinity) via the algebraic map x = a + u/(1-u).
/// The integrand must decay fast enough that f(x) * (1+x-a)^2 stays integrable.
template <class F>
QuadResult try_integrate_half_line(F&& f, double a, QuadTolerance tol = {}) {
    auto mapped = [&f, a](double u) {
        const double inv = 1.0 / (1.0 - u);
        const double x = a + u * inv;
        return f(x) * inv * inv;
    };
    return try_integrate(mapped, 0.0, 1.0, tol);
}

template <class F>
QuadResult integrate_half_line(F&& f, double a, QuadTolerance tol = {}) {
    QuadResult r = try_integrate_half_line(std::forward<F>(f), a, tol);
    if (!r.converged) {
        throw QuadratureError("semi-infinite quadrature did not converge from a = " +
                                  std::to_string(a),
                              r);
    }
    return r;
}

}  // namespace qmix

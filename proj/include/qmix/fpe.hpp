#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmix/numerics/special_functions.hpp"
#include "qmix/qgaussian.hpp"

namespace qmix {

// ---------------------------------------------------------------------------
// Nonlinear Fokker-Planck (fast diffusion) solver for
//   dP/dt = (1/2) d^2/dx^2 [ P^(2-q) ],   1 < q < 2,
// with the linear heat equation as the q = 1 branch. Conservative explicit
// flux-form update on a uniform grid with zero-flux boundaries; dt follows
// the CFL bound for the effective diffusivity D(P) = (2-q) P^(1-q) / 2,
// which is largest at the smallest density present. Cells are held at or
// above a density floor, and mass injected by the floor is accounted.

struct FpeGridSpec {
    double x_min = -20.0;
    double x_max = 20.0;
    std::size_t nodes = 2048;
};

struct FpeOptions {
    double density_floor = 1e-12;
    double cfl_safety = 0.4;
    std::size_t max_steps = 50000000;
};

struct FpeState {
    double q = 1.0;
    double t = 0.0;
    double dx = 0.0;
    double dt_last = 0.0;
    std::vector<double> x;
    std::vector<double> p;
    double floor_mass_added = 0.0;
    std::size_t steps = 0;

    double mass() const {
        double acc = 0.5 * (p.front() + p.back());
        for (std::size_t i = 1; i + 1 < p.size(); ++i) acc += p[i];
        return acc * dx;
    }
};

namespace detail {

inline void fpe_step(std::vector<double>& p, std::vector<double>& u, double q, double lam,
                     double floor, double dx, double& floor_mass) {
    const std::size_t n = p.size();
    if (q == 1.0) {
        for (std::size_t i = 0; i < n; ++i) u[i] = p[i];
    } else {
        const double e = 2.0 - q;
        for (std::size_t i = 0; i < n; ++i) u[i] = std::pow(p[i], e);
    }
    // zero-flux boundaries: mirror ghost values
    double left = u[0];
    for (std::size_t i = 0; i < n; ++i) {
        const double right = (i + 1 < n) ? u[i + 1] : u[i];
        const double lap = right - 2.0 * u[i] + left;
        left = u[i];
        p[i] += lam * lap;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (p[i] < floor) {
            floor_mass += (floor - p[i]) * dx;
            p[i] = floor;
        }
    }
}

}  // namespace detail

/// Evolves the initial profile to each requested snapshot time. The profile
/// is normalized to unit mass on the grid before stepping. Throws when the
/// CFL-limited step count exceeds the budget, naming the binding constraint.
inline std::vector<FpeState> fpe_solve(const std::function<double(double)>& initial, double q,
                                       double t_end, FpeGridSpec grid,
                                       std::vector<double> snapshot_times,
                                       FpeOptions options = {}) {
    detail::require(q == 1.0 || (q > 1.0 && q < 2.0),
                    "fpe_solve: q must be 1 (linear) or lie in (1, 2); the u = P^(2-q) update "
                    "needs a positive exponent");
    detail::require(grid.nodes >= 16, "fpe_solve: need at least 16 nodes");
    detail::require(grid.x_max > grid.x_min, "fpe_solve: empty domain");
    detail::require(t_end > 0.0, "fpe_solve: t_end must be positive");
    detail::require(options.density_floor > 0.0, "fpe_solve: floor must be positive");
    detail::require(options.cfl_safety > 0.0 && options.cfl_safety <= 1.0,
                    "fpe_solve: cfl_safety must lie in (0, 1]");

    FpeState state;
    state.q = q;
    state.dx = (grid.x_max - grid.x_min) / static_cast<double>(grid.nodes - 1);
    state.x.resize(grid.nodes);
    state.p.resize(grid.nodes);
    for (std::size_t i = 0; i < grid.nodes; ++i) {
        state.x[i] = grid.x_min + state.dx * static_cast<double>(i);
        state.p[i] = initial(state.x[i]);
        detail::require(std::isfinite(state.p[i]) && state.p[i] >= 0.0,
                        "fpe_solve: initial profile must be nonnegative and finite");
    }
    const double mass0 = state.mass();
    detail::require(mass0 > 0.0, "fpe_solve: initial profile has no mass");
    for (auto& v : state.p) v /= mass0;
    for (auto& v : state.p) {
        if (v < options.density_floor) {
            state.floor_mass_added += (options.density_floor - v) * state.dx;
            v = options.density_floor;
        }
    }

    std::sort(snapshot_times.begin(), snapshot_times.end());
    detail::require(snapshot_times.empty() || snapshot_times.front() > 0.0,
                    "fpe_solve: snapshot times must be positive");
    detail::require(snapshot_times.empty() || snapshot_times.back() <= t_end,
                    "fpe_solve: snapshot times must not exceed t_end");
    if (snapshot_times.empty() || snapshot_times.back() < t_end) {
        snapshot_times.push_back(t_end);
    }

    std::vector<FpeState> snapshots;
    snapshots.reserve(snapshot_times.size());
    std::vector<double> u(grid.nodes);

    const double dx2 = state.dx * state.dx;
    for (double target : snapshot_times) {
        while (state.t < target) {
            const double p_min =
                std::max(*std::min_element(state.p.begin(), state.p.end()),
                         options.density_floor);
            const double diffusivity =
                q == 1.0 ? 0.5 : 0.5 * (2.0 - q) * std::pow(p_min, 1.0 - q);
            double dt = options.cfl_safety * dx2 / (2.0 * diffusivity);
            const double remaining = target - state.t;
            if (dt >= remaining) {
                dt = remaining;
            } else if (state.steps + (remaining / dt) > static_cast<double>(options.max_steps)) {
                throw std::runtime_error(
                    "fpe_solve: CFL unattainable within the step budget: the smallest density "
                    "(floor " + std::to_string(options.density_floor) + ", current minimum " +
                    std::to_string(p_min) + ") forces dt = " + std::to_string(dt) +
                    " on dx = " + std::to_string(state.dx) +
                    "; raise the floor, coarsen the grid, or shrink the domain");
            }
            const double lam = 0.5 * dt / dx2;
            detail::fpe_step(state.p, u, q, lam, options.density_floor, state.dx,
                             state.floor_mass_added);
            state.t += dt;
            state.dt_last = dt;
            ++state.steps;
        }
        state.t = target;  // kill accumulated roundoff in the clock
        snapshots.push_back(state);
    }
    return snapshots;
}

/// Quantile of the piecewise-linear density profile via its trapezoid CDF.
inline double profile_quantile(const FpeState& state, double prob) {
    detail::require(prob > 0.0 && prob < 1.0, "profile_quantile: prob must lie in (0,1)");
    const double total = state.mass();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < state.p.size(); ++i) {
        const double cell = 0.5 * (state.p[i] + state.p[i + 1]) * state.dx;
        if (acc + cell >= prob * total) {
            const double frac = (prob * total - acc) / cell;
            return state.x[i] + frac * state.dx;
        }
        acc += cell;
    }
    return state.x.back();
}

inline double profile_iqr(const FpeState& state) {
    return profile_quantile(state, 0.75) - profile_quantile(state, 0.25);
}

/// Linear interpolation of the profile density at x.
inline double profile_density(const FpeState& state, double x) {
    if (x <= state.x.front() || x >= state.x.back()) return 0.0;
    const double pos = (x - state.x.front()) / state.dx;
    const std::size_t i = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(i);
    return state.p[i] * (1.0 - frac) + state.p[i + 1] * frac;
}

struct WidthFit {
    double exponent = 0.0;
    std::size_t points = 0;
};

/// Least-squares slope of log IQR against log t over the snapshots.
inline WidthFit fit_width_exponent(const std::vector<FpeState>& snapshots) {
    detail::require(snapshots.size() >= 2, "fit_width_exponent: need at least two snapshots");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t m = 0;
    for (const auto& s : snapshots) {
        if (s.t <= 0.0) continue;
        const double lx = std::log(s.t);
        const double ly = std::log(profile_iqr(s));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++m;
    }
    detail::require(m >= 2, "fit_width_exponent: need at least two positive-time snapshots");
    WidthFit fit;
    const double dm = static_cast<double>(m);
    fit.exponent = (dm * sxy - sx * sy) / (dm * sxx - sx * sx);
    fit.points = m;
    return fit;
}

/// Sup-distance between the IQR-rescaled profile and the reference q-Gaussian
/// shape over the central region holding `central_mass` of the law.
inline double self_similar_shape_error(const FpeState& state, const QGaussianLaw& reference,
                                       double central_mass = 0.95) {
    detail::require(central_mass > 0.0 && central_mass < 1.0,
                    "self_similar_shape_error: central_mass must lie in (0,1)");
    const double scale = profile_iqr(state) /
                         (reference.quantile(0.75) - reference.quantile(0.25));
    const double edge = reference.quantile(0.5 + 0.5 * central_mass);
    double sup = 0.0;
    const std::size_t n_probe = 801;
    for (std::size_t i = 0; i < n_probe; ++i) {
        const double x =
            -edge + 2.0 * edge * static_cast<double>(i) / static_cast<double>(n_probe - 1);
        const double rescaled = scale * profile_density(state, scale * x);
        sup = std::max(sup, std::abs(rescaled - reference.density(x)));
    }
    return sup;
}

}  // namespace qmix

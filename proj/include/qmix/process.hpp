#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qmix/mixing_law.hpp"
#include "qmix/numerics/parallel.hpp"
#include "qmix/numerics/quadrature.hpp"
#include "qmix/numerics/random.hpp"
#include "qmix/numerics/special_functions.hpp"

namespace qmix {

// ---------------------------------------------------------------------------
// q-Brownian motion: one latent scale per path, Brownian increments given it.
//
// Kernel-variance convention: for 1 < q < 3 increments are N(0, v^2 dt) with
// v drawn from the mixing law, so the time-1 marginal is exactly g_q. At
// q = 1 the mixing law collapses to a point mass at 1/sqrt(2) (its weak
// limit), which carries the variance-1/2 kernel the q -> 1 density requires.

struct QbmPath {
    double q = 1.0;
    std::vector<double> times;
    std::vector<double> values;
    double latent_v = 1.0;
};

class QbmSampler {
  public:
    explicit QbmSampler(double q) : q_(q) {
        detail::require(q >= 1.0 && q < 3.0, "QbmSampler: q must lie in [1, 3)");
        if (q > 1.0) mixing_.emplace(q);
    }

    double q() const { return q_; }

    double sample_latent(RandomStream& stream) const {
        return mixing_ ? mixing_->sample(stream) : std::numbers::sqrt2 / 2.0;
    }

    QbmPath operator()(std::span<const double> times, RandomStream& stream) const {
        detail::require(times.size() >= 2, "qbm path: need at least two time points");
        detail::require(times[0] == 0.0, "qbm path: times must start at 0");
        for (std::size_t i = 0; i + 1 < times.size(); ++i) {
            detail::require(times[i] < times[i + 1],
                            "qbm path: times must be strictly increasing");
        }
        QbmPath path;
        path.q = q_;
        path.times.assign(times.begin(), times.end());
        path.values.resize(times.size());
        path.latent_v = sample_latent(stream);
        path.values[0] = 0.0;
        for (std::size_t i = 1; i < times.size(); ++i) {
            const double dt = times[i] - times[i - 1];
            path.values[i] =
                path.values[i - 1] + path.latent_v * std::sqrt(dt) * stream.normal();
        }
        return path;
    }

  private:
    double q_;
    std::optional<MixingLaw> mixing_;
};

inline QbmPath sample_qbm_path(double q, std::span<const double> times, RandomStream& stream) {
    return QbmSampler(q)(times, stream);
}

inline std::vector<QbmPath> sample_qbm_ensemble(double q, std::span<const double> times,
                                                std::size_t n_paths, std::uint64_t seed,
                                                int workers = 1) {
    const QbmSampler sampler(q);
    std::vector<QbmPath> paths(n_paths);
    run_replications(n_paths, workers, [&](std::size_t r) {
        RandomStream stream(seed, r);
        paths[r] = sampler(times, stream);
    });
    return paths;
}

/// Transition density P(t, x | y) = int p_v(t, x | y) f_V(v) dv where p_v is
/// the Gaussian kernel with variance v^2 t. Symmetric in x - y; the process
/// is Markov only conditionally on V, so Chapman-Kolmogorov fails for this
/// mixture (see chapman_kolmogorov_residual).
inline double qbm_transition_density(const MixingLaw& mixing, double t, double x, double y,
                                     QuadTolerance tol = {}) {
    detail::require(t > 0.0, "qbm_transition_density: t must be positive");
    const double d2 = (x - y) * (x - y);
    const double log_norm = -0.5 * std::log(2.0 * std::numbers::pi * t);
    auto integrand = [&](double v) {
        if (v <= 0.0) return 0.0;
        return std::exp(log_norm - std::log(v) - d2 / (2.0 * v * v * t) +
                        mixing.log_density(v));
    };
    // the integrand peaks near v* = |x-y| / sqrt((dof+2) t); splitting there
    // keeps the peak at a panel edge however far out it sits
    const double peak = std::sqrt(d2 / ((mixing.dof() + 2.0) * t));
    const double split = std::max(mixing.mode(), peak);
    return integrate(integrand, 0.0, split, tol).value +
           integrate_half_line(integrand, split, tol).value;
}

inline double qbm_transition_density(double q, double t, double x, double y,
                                     QuadTolerance tol = {}) {
    return qbm_transition_density(MixingLaw(q), t, x, y, tol);
}

/// | int P(s, x | z) P(t, z | y) dz  -  P(s+t, x | y) |.
/// A detectable gap witnesses that the mixture is not Markov.
inline double chapman_kolmogorov_residual(const MixingLaw& mixing, double s, double t,
                                          double x, double y, QuadTolerance tol = {}) {
    auto inner = [&](double z) {
        return qbm_transition_density(mixing, s, x, z, tol) *
               qbm_transition_density(mixing, t, z, y, tol);
    };
    QuadTolerance outer_tol{1e-8, 1e-8, 40};
    const double center_lo = std::min(x, y) - 1.0;
    const double center_hi = std::max(x, y) + 1.0;
    const double middle = integrate(inner, center_lo, center_hi, outer_tol).value;
    const double upper = integrate_half_line(inner, center_hi, outer_tol).value;
    const double lower =
        integrate_half_line([&inner](double u) { return inner(-u); }, -center_lo, outer_tol)
            .value;
    const double composed = lower + middle + upper;
    return std::abs(composed - qbm_transition_density(mixing, s + t, x, y, tol));
}

// ---------------------------------------------------------------------------
// Superstatistics: a fluctuating inverse temperature beta with density k
// generalizes the Boltzmann factor to B(E) = int k(beta) e^(-beta E) dbeta.

/// Law of the inverse temperature beta.
class BetaLaw {
  public:
    static BetaLaw point_mass(double beta0) {
        detail::require(beta0 > 0.0, "BetaLaw::point_mass: beta must be positive");
        BetaLaw law;
        law.kind_ = Kind::kPointMass;
        law.beta0_ = beta0;
        law.label_ = "point mass at " + std::to_string(beta0);
        return law;
    }

    static BetaLaw gamma(double shape, double scale) {
        detail::require(shape > 0.0 && scale > 0.0,
                        "BetaLaw::gamma: shape and scale must be positive");
        BetaLaw law;
        law.kind_ = Kind::kGamma;
        law.shape_ = shape;
        law.scale_ = scale;
        law.label_ = "gamma(" + std::to_string(shape) + ", " + std::to_string(scale) + ")";
        return law;
    }

    /// The beta law under which the Langevin stationary mixture is g_q:
    /// beta = 1/(2 V^2) ~ Gamma((3-q)/(2(q-1)), q-1).
    static BetaLaw tsallis(double q) {
        detail::require(q > 1.0 && q < 3.0, "BetaLaw::tsallis: q must lie in (1, 3)");
        return gamma((3.0 - q) / (2.0 * (q - 1.0)), q - 1.0);
    }

    double sample(RandomStream& stream) const {
        switch (kind_) {
            case Kind::kPointMass:
                return beta0_;
            case Kind::kGamma:
            default:
                return stream.gamma(shape_, scale_);
        }
    }

    bool has_density() const { return kind_ == Kind::kGamma; }

    double density(double beta) const {
        detail::require(kind_ == Kind::kGamma, "BetaLaw::density: point mass has no density");
        if (beta <= 0.0) return 0.0;
        return std::exp((shape_ - 1.0) * std::log(beta) - beta / scale_ - log_gamma(shape_) -
                        shape_ * std::log(scale_));
    }

    bool is_point_mass() const { return kind_ == Kind::kPointMass; }
    double point() const { return beta0_; }
    double gamma_shape() const { return shape_; }
    double gamma_scale() const { return scale_; }
    const std::string& label() const { return label_; }

  private:
    enum class Kind { kPointMass, kGamma };
    Kind kind_ = Kind::kPointMass;
    double beta0_ = 1.0;
    double shape_ = 1.0;
    double scale_ = 1.0;
    std::string label_;
};

/// Generalized Boltzmann factor B(E) = int k(beta) e^(-beta E) dbeta,
/// with B(0) = 1, nonincreasing and completely monotone in E.
inline double superstat_factor(double E, const BetaLaw& beta_law, QuadTolerance tol = {}) {
    detail::require(E >= 0.0, "superstat_factor: E must be nonnegative");
    if (beta_law.is_point_mass()) return std::exp(-beta_law.point() * E);

    const double s = beta_law.gamma_shape();
    const double theta = beta_law.gamma_scale();
    const double rate = 1.0 / theta + E;
    if (s >= 1.0) {
        auto f = [&](double b) { return beta_law.density(b) * std::exp(-b * E); };
        const double split = s * theta;
        return integrate(f, 0.0, split, tol).value +
               integrate_half_line(f, split, tol).value;
    }
    // s < 1: substitute beta = w^(1/s) to remove the beta^(s-1) endpoint
    // singularity; integrand becomes exp(-rate * w^(1/s)) / (s Gamma(s) theta^s)
    const double log_front = -log_gamma(s) - s * std::log(theta) - std::log(s);
    auto f = [&](double w) {
        return std::exp(log_front - rate * std::pow(w, 1.0 / s));
    };
    const double split = std::pow(1.0 / rate, s);
    return integrate(f, 0.0, split, tol).value + integrate_half_line(f, split, tol).value;
}

// ---------------------------------------------------------------------------
// Superstatistical Langevin dynamics: dv = -gamma v dt + sigma dB with one
// (gamma, sigma) draw per path via beta = gamma / sigma^2. The conditional
// stationary law is N(0, 1/(2 beta)).

struct LangevinConfig {
    double friction = 1.0;  // gamma > 0, units 1/time
    BetaLaw beta_law = BetaLaw::point_mass(1.0);
    double dt = 0.01;
    std::size_t burn_in = 1000;       // steps discarded before sampling
    std::size_t n_paths = 1;
    std::size_t samples_per_path = 1;
    std::size_t thin = 1;             // steps between retained samples
    double v0 = 0.0;
    bool euler = false;  // Euler-Maruyama instead of the exact one-step law
};

/// Returns n_paths * samples_per_path velocity samples, grouped by path.
/// The default stepper uses the exact Ornstein-Uhlenbeck one-step update
///   v' = v e^(-g dt) + sigma sqrt((1 - e^(-2 g dt)) / (2 g)) Z,
/// which has no discretization bias; Euler mode exists for comparison.
inline std::vector<double> langevin_simulate(const LangevinConfig& config, std::uint64_t seed,
                                             int workers = 1) {
    detail::require(config.friction > 0.0, "langevin: friction must be positive");
    detail::require(config.dt > 0.0, "langevin: dt must be positive");
    detail::require(config.n_paths >= 1 && config.samples_per_path >= 1,
                    "langevin: need at least one path and one sample");
    detail::require(config.thin >= 1, "langevin: thin must be at least 1");

    const double g = config.friction;
    const double a = std::exp(-g * config.dt);
    std::vector<double> out(config.n_paths * config.samples_per_path);
    run_replications(config.n_paths, workers, [&](std::size_t p) {
        RandomStream stream(seed, p);
        const double beta = config.beta_law.sample(stream);
        const double sigma = std::sqrt(g / beta);
        const double exact_sd = sigma * std::sqrt((1.0 - a * a) / (2.0 * g));
        const double euler_sd = sigma * std::sqrt(config.dt);
        double v = config.v0;
        auto step = [&] {
            if (config.euler) {
                v += -g * v * config.dt + euler_sd * stream.normal();
            } else {
                v = a * v + exact_sd * stream.normal();
            }
        };
        for (std::size_t i = 0; i < config.burn_in; ++i) step();
        for (std::size_t sample = 0; sample < config.samples_per_path; ++sample) {
            for (std::size_t i = 0; i < config.thin; ++i) step();
            out[p * config.samples_per_path + sample] = v;
        }
    });
    return out;
}

}  // namespace qmix

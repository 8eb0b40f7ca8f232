#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "qmix/numerics/special_functions.hpp"

namespace qmix {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace detail

/// Seeded, splittable random stream. Streams with equal (master_seed,
/// stream_id) replay the same sequence on any platform; distinct stream ids
/// decorrelate, so replications can fan out across workers and still merge
/// deterministically.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t master_seed, std::uint64_t stream_id = 0)
        : master_seed_(master_seed),
          stream_id_(stream_id),
          engine_(detail::splitmix64(master_seed ^ detail::splitmix64(stream_id))) {}

    std::uint64_t master_seed() const { return master_seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform draw on the open interval (0, 1).
    double uniform() {
        double u;
        do {
            u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        } while (u == 0.0);
        return u;
    }

    /// Standard normal via the Marsaglia polar method.
    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        cached_ = v * m;
        has_cached_ = true;
        return u * m;
    }

    /// Gamma(shape, scale) by Marsaglia-Tsang rejection; exact in distribution.
    double gamma(double shape, double scale) {
        detail::require(shape > 0.0 && std::isfinite(shape),
                        "gamma sampler: shape must be positive");
        detail::require(scale > 0.0 && std::isfinite(scale),
                        "gamma sampler: scale must be positive");
        if (shape < 1.0) {
            // boost: G(a) = G(a+1) * U^{1/a}
            const double g = gamma(shape + 1.0, 1.0);
            return scale * g * std::pow(uniform(), 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return scale * d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return scale * d * v;
        }
    }

    double chi_square(double dof) {
        detail::require(dof > 0.0, "chi_square sampler: dof must be positive");
        return gamma(0.5 * dof, 2.0);
    }

    double rademacher() { return (engine_() & 1ULL) ? 1.0 : -1.0; }

    /// Mean-zero, variance-one uniform on [-sqrt(3), sqrt(3)].
    double uniform_centered() {
        return (2.0 * uniform() - 1.0) * std::sqrt(3.0);
    }

    bool bernoulli(double p) { return uniform() < p; }

  private:
    std::uint64_t master_seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
    bool has_cached_ = false;
    double cached_ = 0.0;
};

}  // namespace qmix

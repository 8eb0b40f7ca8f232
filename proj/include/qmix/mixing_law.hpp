#pragma once

#include <cmath>
#include <limits>
#include <numbers>

#include "qmix/numerics/random.hpp"
#include "qmix/numerics/special_functions.hpp"

namespace qmix {

/// Mixing distribution of the scale variable V in the variance-mixture
/// representation of the q-Gaussian family for 1 < q < 3:
///
///   f_V(v) = C_V exp(-1 / (2(q-1)v^2)) v^(-2/(q-1)),
///   1/C_V  = Gamma((3-q)/(2(q-1))) * (1/2) * (2(q-1))^((3-q)/(2(q-1))).
///
/// Matching this density through the change of variables forces the sampler
/// V = 1 / sqrt((q-1) * chi2(dof)) with dof = 2/(q-1) - 1; the bare
/// 1/sqrt(chi2) form without the (q-1) factor has a different density.
class MixingLaw {
  public:
    explicit MixingLaw(double q) : q_(q) {
        detail::require(q > 1.0, "MixingLaw: q must exceed 1");
        detail::require(q <= 3.0 - 1e-6,
                        "MixingLaw: q must stay at or below 3 - 1e-6; the law degenerates at q = 3");
        dof_ = 2.0 / (q - 1.0) - 1.0;
        shape_ = 0.5 * dof_;  // also (3-q)/(2(q-1))
        log_c_ = std::log(2.0) - shape_ * std::log(2.0 * (q - 1.0)) - log_gamma(shape_);
    }

    double q() const { return q_; }
    double dof() const { return dof_; }
    double c_vq() const { return std::exp(log_c_); }

    double log_density(double v) const {
        detail::require(v > 0.0, "MixingLaw::log_density: v must be positive");
        const double qm1 = q_ - 1.0;
        return log_c_ - 1.0 / (2.0 * qm1 * v * v) - (2.0 / qm1) * std::log(v);
    }

    double density(double v) const { return std::exp(log_density(v)); }

    /// P(V <= v) from the chi-square survival function.
    double cdf(double v) const {
        if (v <= 0.0) return 0.0;
        const double y = 1.0 / (2.0 * (q_ - 1.0) * v * v);
        return gamma_q(shape_, y);
    }

    double quantile(double p) const {
        detail::require(p > 0.0 && p < 1.0, "MixingLaw::quantile: p must lie in (0,1)");
        double lo = mode(), hi = mode();
        while (cdf(lo) > p) lo *= 0.5;
        while (cdf(hi) < p) hi *= 2.0;
        for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
            const double mid = 0.5 * (lo + hi);
            (cdf(mid) < p ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }

    double sample(RandomStream& stream) const {
        double g;
        do {
            g = stream.chi_square(dof_);
        } while (g <= 0.0);
        return 1.0 / std::sqrt((q_ - 1.0) * g);
    }

    /// argmax of f_V; independent of q.
    double mode() const { return std::numbers::sqrt2 / 2.0; }

    struct SecondMoment {
        bool finite;
        double value;
    };

    /// E[V^2] = 1/((q-1)(dof-2)), finite iff dof > 2 iff q < 5/3.
    SecondMoment second_moment() const {
        if (dof_ <= 2.0) return {false, std::numeric_limits<double>::infinity()};
        return {true, 1.0 / ((q_ - 1.0) * (dof_ - 2.0))};
    }

  private:
    double q_;
    double dof_;
    double shape_;
    double log_c_;
};

}  // namespace qmix

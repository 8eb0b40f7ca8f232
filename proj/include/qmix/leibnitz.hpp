#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "qmix/numerics/quadrature.hpp"
#include "qmix/numerics/special_functions.hpp"

namespace qmix {

/// Probability measure on [0, 1] used to mix Bernoulli rows: either a Beta
/// family (closed-form moments) or a discrete set of atoms.
class MixingMeasure {
  public:
    static MixingMeasure uniform() { return beta(1.0, 1.0); }

    static MixingMeasure beta(double a, double b) {
        detail::require(a > 0.0 && b > 0.0, "MixingMeasure::beta: parameters must be positive");
        MixingMeasure m;
        m.kind_ = Kind::kBeta;
        m.a_ = a;
        m.b_ = b;
        m.label_ = "beta(" + std::to_string(a) + ", " + std::to_string(b) + ")";
        return m;
    }

    static MixingMeasure point_mass(double p) {
        return discrete({p}, {1.0});
    }

    static MixingMeasure discrete(std::vector<double> atoms, std::vector<double> weights) {
        detail::require(!atoms.empty() && atoms.size() == weights.size(),
                        "MixingMeasure::discrete: atoms and weights must match and be nonempty");
        double total = 0.0;
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            detail::require(atoms[i] >= 0.0 && atoms[i] <= 1.0,
                            "MixingMeasure::discrete: atoms must lie in [0, 1]");
            detail::require(weights[i] >= 0.0,
                            "MixingMeasure::discrete: weights must be nonnegative");
            total += weights[i];
        }
        detail::require(std::abs(total - 1.0) <= 1e-12,
                        "MixingMeasure::discrete: weights must sum to 1 within 1e-12");
        MixingMeasure m;
        m.kind_ = Kind::kDiscrete;
        m.atoms_ = std::move(atoms);
        m.weights_ = std::move(weights);
        m.label_ = "discrete(" + std::to_string(m.atoms_.size()) + " atoms)";
        return m;
    }

    /// E[p^n_ones (1-p)^n_zeros] under the measure.
    double bernoulli_moment(unsigned n_ones, unsigned n_zeros) const {
        if (kind_ == Kind::kBeta) {
            return std::exp(log_beta(a_ + n_ones, b_ + n_zeros) - log_beta(a_, b_));
        }
        double acc = 0.0;
        for (std::size_t i = 0; i < atoms_.size(); ++i) {
            acc += weights_[i] * pow_or_one(atoms_[i], n_ones) *
                   pow_or_one(1.0 - atoms_[i], n_zeros);
        }
        return acc;
    }

    const std::string& label() const { return label_; }

  private:
    static double pow_or_one(double base, unsigned e) {
        return e == 0 ? 1.0 : std::pow(base, static_cast<double>(e));
    }

    enum class Kind { kBeta, kDiscrete };
    Kind kind_ = Kind::kBeta;
    double a_ = 1.0, b_ = 1.0;
    std::vector<double> atoms_, weights_;
    std::string label_;
};

/// Triangular array r_{N,n} = E[p^n (1-p)^(N-n)] for 0 <= n <= N <= n_max.
/// The marginal-consistency rule r_{N,n} + r_{N,n+1} = r_{N-1,n} holds
/// identically for any mixing measure.
struct LeibnitzTriangle {
    std::size_t n_max = 0;
    std::vector<std::vector<double>> rows;  // rows[N][n]
    std::string mixing_label;

    double rule_residual() const {
        double worst = 0.0;
        for (std::size_t N = 1; N < rows.size(); ++N) {
            for (std::size_t n = 0; n < N; ++n) {
                worst = std::max(worst,
                                 std::abs(rows[N][n] + rows[N][n + 1] - rows[N - 1][n]));
            }
        }
        return worst;
    }

    double row_sum_error() const {
        double worst = 0.0;
        for (std::size_t N = 0; N < rows.size(); ++N) {
            double acc = 0.0;
            double binom = 1.0;  // C(N, n), exact in double for N <= 50
            for (std::size_t n = 0; n <= N; ++n) {
                acc += binom * rows[N][n];
                binom = binom * static_cast<double>(N - n) / static_cast<double>(n + 1);
            }
            worst = std::max(worst, std::abs(acc - 1.0));
        }
        return worst;
    }
};

inline LeibnitzTriangle leibnitz_from_mixing(const MixingMeasure& measure, std::size_t n_max) {
    detail::require(n_max >= 1, "leibnitz_from_mixing: n_max must be at least 1");
    LeibnitzTriangle triangle;
    triangle.n_max = n_max;
    triangle.mixing_label = measure.label();
    triangle.rows.resize(n_max + 1);
    for (std::size_t N = 0; N <= n_max; ++N) {
        triangle.rows[N].resize(N + 1);
        for (std::size_t n = 0; n <= N; ++n) {
            triangle.rows[N][n] = measure.bernoulli_moment(static_cast<unsigned>(n),
                                                           static_cast<unsigned>(N - n));
        }
    }
    return triangle;
}

}  // namespace qmix

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "qmix/numerics/special_functions.hpp"

namespace qmix {

/// Cubic Hermite interpolant with a Fritsch-Carlson clamp on the supplied
/// derivatives, so monotone data stays monotone after interpolation.
class MonotoneCubicTable {
  public:
    MonotoneCubicTable() = default;

    MonotoneCubicTable(std::vector<double> x, std::vector<double> y, std::vector<double> dy)
        : x_(std::move(x)), y_(std::move(y)), d_(std::move(dy)) {
        detail::require(x_.size() >= 2 && x_.size() == y_.size() && x_.size() == d_.size(),
                        "MonotoneCubicTable: need matching x/y/dy with at least two nodes");
        detail::require(std::is_sorted(x_.begin(), x_.end()),
                        "MonotoneCubicTable: nodes must be increasing");
        clamp_derivatives();
    }

    bool empty() const { return x_.empty(); }
    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }
    double y_min() const { return y_.front(); }
    double y_max() const { return y_.back(); }

    double operator()(double x) const {
        if (x <= x_.front()) return y_.front();
        if (x >= x_.back()) return y_.back();
        const std::size_t i =
            static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin()) - 1;
        const double h = x_[i + 1] - x_[i];
        const double t = (x - x_[i]) / h;
        const double t2 = t * t;
        const double t3 = t2 * t;
        const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        const double h10 = t3 - 2.0 * t2 + t;
        const double h01 = -2.0 * t3 + 3.0 * t2;
        const double h11 = t3 - t2;
        return h00 * y_[i] + h10 * h * d_[i] + h01 * y_[i + 1] + h11 * h * d_[i + 1];
    }

  private:
    void clamp_derivatives() {
        for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
            const double h = x_[i + 1] - x_[i];
            const double slope = (y_[i + 1] - y_[i]) / h;
            if (slope == 0.0) {
                d_[i] = 0.0;
                d_[i + 1] = 0.0;
                continue;
            }
            const double alpha = d_[i] / slope;
            const double beta = d_[i + 1] / slope;
            if (alpha < 0.0) d_[i] = 0.0;
            if (beta < 0.0) d_[i + 1] = 0.0;
            const double norm2 = alpha * alpha + beta * beta;
            if (norm2 > 9.0) {
                const double tau = 3.0 / std::sqrt(norm2);
                d_[i] = tau * alpha * slope;
                d_[i + 1] = tau * beta * slope;
            }
        }
    }

    std::vector<double> x_, y_, d_;
};

}  // namespace qmix

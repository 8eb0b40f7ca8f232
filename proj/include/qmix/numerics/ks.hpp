#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "qmix/numerics/special_functions.hpp"

namespace qmix {

struct KsReport {
    double statistic = 0.0;
    std::size_t sample_size = 0;
    double threshold = 0.0;
    bool pass = false;
    std::string target_name;
};

/// Asymptotic one-sample critical value: sqrt(-ln(alpha/2)/2) / sqrt(m).
/// At the default 1% level this is 1.6276/sqrt(m).
inline double ks_critical_value(std::size_t m, double alpha = 0.01) {
    detail::require(m > 0, "ks_critical_value: sample size must be positive");
    detail::require(alpha > 0.0 && alpha < 1.0, "ks_critical_value: alpha in (0,1) required");
    return std::sqrt(-0.5 * std::log(0.5 * alpha)) / std::sqrt(static_cast<double>(m));
}

/// One-sample Kolmogorov-Smirnov statistic against a target CDF.
/// The sample must already be sorted ascending.
template <class Cdf>
KsReport ks_statistic(const std::vector<double>& sorted_sample, Cdf&& target_cdf,
                      std::string target_name, double threshold = -1.0) {
    detail::require(!sorted_sample.empty(), "ks_statistic: sample must be nonempty");
    detail::require(std::is_sorted(sorted_sample.begin(), sorted_sample.end()),
                    "ks_statistic: sample must be sorted");
    const double m = static_cast<double>(sorted_sample.size());
    double sup = 0.0;
    for (std::size_t i = 0; i < sorted_sample.size(); ++i) {
        const double F = target_cdf(sorted_sample[i]);
        const double lo = static_cast<double>(i) / m;
        const double hi = static_cast<double>(i + 1) / m;
        sup = std::max(sup, std::max(std::abs(hi - F), std::abs(lo - F)));
    }
    KsReport report;
    report.statistic = sup;
    report.sample_size = sorted_sample.size();
    report.threshold = threshold > 0.0 ? threshold : ks_critical_value(sorted_sample.size());
    report.pass = report.statistic <= report.threshold;
    report.target_name = std::move(target_name);
    return report;
}

template <class Cdf>
KsReport ks_test(std::vector<double> sample, Cdf&& target_cdf, std::string target_name,
                 double threshold = -1.0) {
    std::sort(sample.begin(), sample.end());
    return ks_statistic(sample, std::forward<Cdf>(target_cdf), std::move(target_name), threshold);
}

/// Two-sample KS statistic between two sorted samples.
inline KsReport ks_two_sample(const std::vector<double>& a, const std::vector<double>& b,
                              std::string label, double alpha = 0.01) {
    detail::require(!a.empty() && !b.empty(), "ks_two_sample: samples must be nonempty");
    detail::require(std::is_sorted(a.begin(), a.end()) && std::is_sorted(b.begin(), b.end()),
                    "ks_two_sample: samples must be sorted");
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double sup = 0.0;
    while (i < a.size() && j < b.size()) {
        // advance both samples through a tied value before comparing EDFs
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        sup = std::max(sup, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    KsReport report;
    report.statistic = sup;
    report.sample_size = a.size() + b.size();
    report.threshold =
        std::sqrt(-0.5 * std::log(0.5 * alpha)) * std::sqrt((na + nb) / (na * nb));
    report.pass = report.statistic <= report.threshold;
    report.target_name = std::move(label);
    return report;
}

inline KsReport ks_two_sample_unsorted(std::vector<double> a, std::vector<double> b,
                                       std::string label, double alpha = 0.01) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return ks_two_sample(a, b, std::move(label), alpha);
}

}  // namespace qmix

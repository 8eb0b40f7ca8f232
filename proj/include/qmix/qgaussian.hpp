#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <vector>

#include "qmix/mixing_law.hpp"
#include "qmix/numerics/interp.hpp"
#include "qmix/numerics/quadrature.hpp"
#include "qmix/numerics/random.hpp"
#include "qmix/numerics/special_functions.hpp"

namespace qmix {

/// Normalizing constant C_q of the q-Gaussian density, three branches.
/// Evaluated in log space so the branches stay usable arbitrarily close to
/// q = 1 on either side.
inline double q_gaussian_normalization(double q) {
    detail::require(std::isfinite(q) && q < 3.0,
                    "q-Gaussian: q must be below 3 (density is not normalizable otherwise)");
    const double half_log_pi = 0.5 * std::log(std::numbers::pi);
    if (q == 1.0) return std::exp(-half_log_pi);
    if (q < 1.0) {
        const double omq = 1.0 - q;
        // 1/C = 2 sqrt(pi) Gamma(1/(1-q)) / ((3-q) sqrt(1-q) Gamma((3-q)/(2(1-q))))
        const double log_inv = std::log(2.0) + half_log_pi + log_gamma(1.0 / omq) -
                               std::log(3.0 - q) - 0.5 * std::log(omq) -
                               log_gamma((3.0 - q) / (2.0 * omq));
        return std::exp(-log_inv);
    }
    const double qm1 = q - 1.0;
    // C = sqrt(q-1) Gamma(1/(q-1)) / (sqrt(pi) Gamma((3-q)/(2(q-1))))
    return std::exp(0.5 * std::log(qm1) + log_gamma(1.0 / qm1) - half_log_pi -
                    log_gamma((3.0 - q) / (2.0 * qm1)));
}

/// The q-Gaussian family g_q(x) = C_q [1 - (1-q) x^2]^(1/(1-q)) for q < 3.
///
/// Conventions follow the density formula itself: the q -> 1 limit is the
/// normal density exp(-x^2)/sqrt(pi), i.e. variance 1/2, while for 1 < q < 3
/// the law equals V * Z with Z standard normal and V drawn from MixingLaw(q).
/// No unit-variance rescaling is applied anywhere.
class QGaussianLaw {
  public:
    explicit QGaussianLaw(double q, QuadTolerance quad_tol = {})
        : q_(q), quad_tol_(quad_tol), c_q_(q_gaussian_normalization(q)) {
        log_c_q_ = std::log(c_q_);
        if (near(q_, 1.0)) {
            kind_ = Kind::kGaussLimit;
        } else if (q_ < 1.0) {
            kind_ = Kind::kCompact;
            support_radius_ = 1.0 / std::sqrt(1.0 - q_);
        } else {
            kind_ = Kind::kHeavy;
            nu_ = 2.0 / (q_ - 1.0) - 1.0;
            cauchy_closed_form_ = near(q_, 2.0);
            if (q_ <= 3.0 - 1e-6) mixing_.emplace(q_);
        }
        if ((kind_ == Kind::kHeavy && !cauchy_closed_form_) || kind_ == Kind::kCompact) {
            build_tables();
        }
    }

    double q() const { return q_; }
    double c_q() const { return c_q_; }
    bool compact_support() const { return kind_ == Kind::kCompact; }

    /// Half-width of the support: finite for q < 1, infinite otherwise.
    double support_radius() const {
        return kind_ == Kind::kCompact ? support_radius_
                                       : std::numeric_limits<double>::infinity();
    }

    const MixingLaw& mixing() const {
        detail::require(mixing_.has_value(),
                        "QGaussianLaw::mixing: only defined for 1 < q <= 3 - 1e-6");
        return *mixing_;
    }

    double density(double x) const {
        switch (kind_) {
            case Kind::kGaussLimit:
                return c_q_ * std::exp(-x * x);
            case Kind::kCompact: {
                const double bracket = 1.0 - (1.0 - q_) * x * x;
                if (bracket <= 0.0) return 0.0;
                return c_q_ * std::pow(bracket, 1.0 / (1.0 - q_));
            }
            case Kind::kHeavy:
            default:
                return std::exp(log_density(x));
        }
    }

    double log_density(double x) const {
        switch (kind_) {
            case Kind::kGaussLimit:
                return log_c_q_ - x * x;
            case Kind::kCompact: {
                const double bracket = 1.0 - (1.0 - q_) * x * x;
                if (bracket <= 0.0) return -std::numeric_limits<double>::infinity();
                return log_c_q_ + std::log(bracket) / (1.0 - q_);
            }
            case Kind::kHeavy:
            default:
                return log_c_q_ - log1p_qm1_x2(x) / (q_ - 1.0);
        }
    }

    double cdf(double x) const {
        if (std::isnan(x)) throw std::domain_error("QGaussianLaw::cdf: NaN argument");
        if (x >= 0.0) return positive_cdf(x);
        return 1.0 - positive_cdf(-x);
    }

    double quantile(double p) const {
        detail::require(p > 0.0 && p < 1.0, "QGaussianLaw::quantile: p must lie in (0,1)");
        if (p == 0.5) return 0.0;
        const bool upper = p >= 0.5;
        const double mass = upper ? p : 1.0 - p;
        const double x = positive_quantile(mass);
        return upper ? x : -x;
    }

    /// Power-tail order 2/(q-1) of the density, defined for 1 < q < 3.
    double tail_exponent() const {
        detail::require(kind_ == Kind::kHeavy,
                        "tail_exponent: only defined for 1 < q < 3 (no power tail otherwise)");
        return 2.0 / (q_ - 1.0);
    }

    struct Moment {
        bool finite;
        double value;
    };

    /// Even moment E[X^k]; finite for q <= 1 and, in the heavy regime, exactly
    /// when the tail order exceeds k+1.
    Moment moment(int k) const {
        detail::require(k >= 2 && k % 2 == 0, "moment: k must be an even integer >= 2");
        if (kind_ == Kind::kHeavy && !(nu_ > static_cast<double>(k))) {
            return {false, std::numeric_limits<double>::infinity()};
        }
        return {true, moment_by_quadrature(k)};
    }

    double sample_one(RandomStream& stream) const {
        switch (kind_) {
            case Kind::kGaussLimit:
                return stream.normal() * inv_sqrt2();
            case Kind::kHeavy: {
                detail::require(mixing_.has_value(),
                                "sample: mixing law unavailable this close to q = 3");
                return mixing_->sample(stream) * stream.normal();
            }
            case Kind::kCompact:
            default: {
                // uniform envelope over the compact support; acceptance
                // probability is 1 / (2 * support_radius * C_q)
                for (;;) {
                    const double x = (2.0 * stream.uniform() - 1.0) * support_radius_;
                    if (stream.uniform() * c_q_ <= density(x)) return x;
                }
            }
        }
    }

    std::vector<double> sample(RandomStream& stream, std::size_t n) const {
        detail::require(n >= 1, "sample: n must be at least 1");
        std::vector<double> out(n);
        for (auto& v : out) v = sample_one(stream);
        return out;
    }

    /// P(X > x) for x > 0 computed by direct quadrature (no tables); used as a
    /// cross-check for the interpolated CDF.
    double tail_mass_quadrature(double x) const {
        detail::require(x > 0.0, "tail_mass_quadrature: x must be positive");
        switch (kind_) {
            case Kind::kGaussLimit:
                return 0.5 * std::erfc(x);
            case Kind::kCompact: {
                if (x >= support_radius_) return 0.0;
                return integrate([this](double t) { return density(t); }, x, support_radius_,
                                 quad_tol_)
                    .value;
            }
            case Kind::kHeavy:
            default: {
                const double z_hi = std::exp(-nu_ * std::log(x));
                return integrate([this](double z) { return tail_integrand(z); }, 0.0, z_hi,
                                 quad_tol_)
                    .value;
            }
        }
    }

  private:
    enum class Kind { kCompact, kGaussLimit, kHeavy };

    static bool near(double a, double b) { return std::abs(a - b) < 1e-12; }
    static double inv_sqrt2() { return std::numbers::sqrt2 / 2.0; }

    double log1p_qm1_x2(double x) const {
        const double t = (q_ - 1.0) * x * x;
        if (t < 1e15) return std::log1p(t);
        return std::log(q_ - 1.0) + 2.0 * std::log(std::abs(x));
    }

    // dG/dz of the upper-tail mass G(z) = P(X > z^(-1/nu)) in the transformed
    // variable z = x^(-nu); smooth and bounded on [0, z0], which is what makes
    // the heavy tail integrable to machine accuracy.
    double tail_integrand(double z) const {
        if (z <= 0.0) return tail_integrand_at_zero();
        return tail_integrand_log(std::log(z));
    }

    double tail_integrand_at_zero() const {
        // limit of the above as z -> 0+
        return std::exp(log_c_q_ - std::log(q_ - 1.0) / (q_ - 1.0) - std::log(nu_));
    }

    void build_tables() {
        const double x_hi =
            kind_ == Kind::kCompact ? support_radius_ * (1.0 - 1e-12) : inner_cutoff();
        const std::size_t n_nodes = 2001;
        std::vector<double> xs(n_nodes), Fs(n_nodes), ds(n_nodes);
        for (std::size_t i = 0; i < n_nodes; ++i) {
            xs[i] = x_hi * static_cast<double>(i) / static_cast<double>(n_nodes - 1);
            ds[i] = density(xs[i]);
        }
        Fs[0] = 0.5;
        QuadTolerance panel_tol{1e-13, 1e-13, 30};
        for (std::size_t i = 0; i + 1 < n_nodes; ++i) {
            const QuadResult r =
                try_integrate([this](double t) { return density(t); }, xs[i], xs[i + 1],
                              panel_tol);
            Fs[i + 1] = Fs[i] + r.value;
        }
        inner_cdf_ = MonotoneCubicTable(std::move(xs), std::move(Fs), std::move(ds));

        if (kind_ != Kind::kHeavy) return;

        // Decide whether the tail beyond the inner cutoff carries any mass at
        // double precision; the power-tail integral is about g(X0) X0 / nu.
        // For q near 1 it does not, and the table is skipped (which also keeps
        // z0 = X0^(-nu) away from underflow).
        const double log_tail_estimate = log_density(inner_cutoff()) +
                                         std::log(inner_cutoff()) - std::log(nu_);
        if (log_tail_estimate < -35.0) return;

        const double z0 = std::exp(-nu_ * std::log(inner_cutoff()));
        const std::size_t n_z = 513;
        std::vector<double> zs(n_z), Gs(n_z), dGs(n_z);
        for (std::size_t i = 0; i < n_z; ++i) {
            zs[i] = z0 * static_cast<double>(i) / static_cast<double>(n_z - 1);
            dGs[i] = tail_integrand(zs[i]);
        }
        Gs[0] = 0.0;
        for (std::size_t i = 0; i + 1 < n_z; ++i) {
            const QuadResult r = try_integrate([this](double z) { return tail_integrand(z); },
                                               zs[i], zs[i + 1], panel_tol);
            Gs[i + 1] = Gs[i] + r.value;
        }
        tail_cdf_.emplace(std::move(zs), std::move(Gs), std::move(dGs));
    }

    static double inner_cutoff() { return 10.0; }

    double positive_cdf(double x) const {
        switch (kind_) {
            case Kind::kGaussLimit:
                return normal_cdf(x * std::numbers::sqrt2);
            case Kind::kCompact:
                if (x >= support_radius_) return 1.0;
                return inner_cdf_(x);
            case Kind::kHeavy:
            default: {
                if (cauchy_closed_form_) return 0.5 + std::atan(x) / std::numbers::pi;
                if (x <= inner_cutoff()) return inner_cdf_(x);
                if (!tail_cdf_) return 1.0;
                const double z = std::exp(-nu_ * std::log(x));
                return 1.0 - (*tail_cdf_)(z);
            }
        }
    }

    double positive_quantile(double mass) const {
        switch (kind_) {
            case Kind::kGaussLimit:
                return bisect_cdf(mass, 0.0, 42.0);
            case Kind::kCompact:
                return bisect_cdf(mass, 0.0, support_radius_);
            case Kind::kHeavy:
            default: {
                if (cauchy_closed_form_) return std::tan(std::numbers::pi * (mass - 0.5));
                if (mass <= inner_cdf_.y_max()) return bisect_cdf(mass, 0.0, inner_cutoff());
                if (!tail_cdf_) return inner_cutoff();
                // invert the tail table: G(z) = 1 - mass, increasing in z
                const double target = 1.0 - mass;
                double lo = 0.0, hi = tail_cdf_->x_max();
                for (int i = 0; i < 200 && hi - lo > 1e-18 + 1e-15 * hi; ++i) {
                    const double mid = 0.5 * (lo + hi);
                    ((*tail_cdf_)(mid) < target ? lo : hi) = mid;
                }
                const double z = 0.5 * (lo + hi);
                const double log_x = -std::log(z) / nu_;
                if (log_x > 700.0) return std::numeric_limits<double>::infinity();
                return std::exp(log_x);
            }
        }
    }

    double bisect_cdf(double mass, double lo, double hi) const {
        for (int i = 0; i < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(hi)); ++i) {
            const double mid = 0.5 * (lo + hi);
            (positive_cdf(mid) < mass ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }

    double moment_by_quadrature(int k) const {
        auto integrand = [this, k](double x) { return std::pow(x, k) * density(x); };
        switch (kind_) {
            case Kind::kGaussLimit:
                return 2.0 * integrate_half_line(integrand, 0.0, quad_tol_).value;
            case Kind::kCompact:
                return 2.0 * integrate(integrand, 0.0, support_radius_, quad_tol_).value;
            case Kind::kHeavy:
            default: {
                const double head =
                    integrate(integrand, 0.0, inner_cutoff(), quad_tol_).value;
                // tail: z = x^(-nu), then z = w^gamma with gamma = nu/(nu-k),
                // which absorbs the z^(-k/nu) endpoint singularity exactly.
                const double gamma_exp = nu_ / (nu_ - static_cast<double>(k));
                const double z0 = std::exp(-nu_ * std::log(inner_cutoff()));
                const double w0 = std::pow(z0, 1.0 / gamma_exp);
                auto tail_f = [this, gamma_exp](double w) {
                    const double log_w = std::log(w);
                    const double log_z = gamma_exp * log_w;
                    return gamma_exp * tail_integrand_log(log_z);
                };
                const double tail = integrate(tail_f, 0.0, w0, quad_tol_).value;
                return 2.0 * (head + tail);
            }
        }
    }

    double tail_integrand_log(double log_z) const {
        const double log_x = -log_z / nu_;
        double log_bracket;
        if (2.0 * log_x > 30.0) {
            log_bracket = std::log(q_ - 1.0) + 2.0 * log_x +
                          std::log1p(std::exp(-std::log(q_ - 1.0) - 2.0 * log_x));
        } else {
            log_bracket = std::log1p((q_ - 1.0) * std::exp(2.0 * log_x));
        }
        return std::exp(log_c_q_ - log_bracket / (q_ - 1.0) - (1.0 + 1.0 / nu_) * log_z -
                        std::log(nu_));
    }

    double q_;
    QuadTolerance quad_tol_;
    double c_q_;
    double log_c_q_ = 0.0;
    Kind kind_ = Kind::kHeavy;
    double support_radius_ = std::numeric_limits<double>::infinity();
    double nu_ = 0.0;  // tail_exponent - 1, the chi-square dof of the mixing law
    bool cauchy_closed_form_ = false;
    std::optional<MixingLaw> mixing_;
    MonotoneCubicTable inner_cdf_;
    std::optional<MonotoneCubicTable> tail_cdf_;
};

// ---------------------------------------------------------------------------
// Complete-monotonicity check of h(x) = g_q(sqrt(x)).

struct CmReport {
    int order_checked = 0;
    std::vector<double> grid;
    bool is_cm_consistent = false;
    struct Violation {
        int order;
        double x;
        double value;  // signed (-1)^n * forward difference that went negative
    };
    std::optional<Violation> first_violation;
    // For q >= 1, |h^(n)| = coeff[n] * C_q (1+(q-1)x)^(-1/(q-1)-n) with signs
    // alternating by construction; all chain entries positive certifies the
    // alternation analytically.
    std::vector<double> derivative_coefficient_chain;
};

/// Checks (-1)^n * (nth forward difference of g_q(sqrt(.))) >= -tol on the
/// grid for n = 0..max_order. Violations smaller than rel_tol times the local
/// function scale are treated as finite-difference noise.
inline CmReport cm_check(const QGaussianLaw& law, int max_order,
                         const std::vector<double>& grid, double rel_tol = 1e-9) {
    detail::require(max_order >= 2, "cm_check: max_order must be at least 2");
    detail::require(!grid.empty(), "cm_check: grid must be nonempty");
    const double image_hi = law.compact_support()
                                ? law.support_radius() * law.support_radius()
                                : std::numeric_limits<double>::infinity();
    double prev = 0.0;
    for (double g : grid) {
        detail::require(g > prev, "cm_check: grid must be positive and strictly increasing");
        detail::require(g < image_hi, "cm_check: grid point outside the support image");
        prev = g;
    }

    auto h = [&law](double t) { return law.density(std::sqrt(t)); };

    CmReport report;
    report.order_checked = max_order;
    report.grid = grid;
    report.is_cm_consistent = true;

    std::vector<double> values(static_cast<std::size_t>(max_order) + 1);
    std::vector<double> diffs;
    for (double x : grid) {
        const double step = 0.25 * x;
        double scale = 0.0;
        for (int k = 0; k <= max_order; ++k) {
            values[static_cast<std::size_t>(k)] = h(x + k * step);
            scale = std::max(scale, std::abs(values[static_cast<std::size_t>(k)]));
        }
        const double tol = rel_tol * scale;
        diffs = values;
        std::size_t len = diffs.size();
        double sign = 1.0;
        for (int n = 0; n <= max_order; ++n, sign = -sign) {
            const double signed_diff = sign * diffs[0];
            if (signed_diff < -tol) {
                report.is_cm_consistent = false;
                if (!report.first_violation) {
                    report.first_violation = CmReport::Violation{n, x, signed_diff};
                }
            }
            for (std::size_t k = 0; k + 1 < len; ++k) diffs[k] = diffs[k + 1] - diffs[k];
            --len;
        }
    }

    if (law.q() >= 1.0 - 1e-12) {
        const double q = std::max(law.q(), 1.0);
        report.derivative_coefficient_chain.resize(static_cast<std::size_t>(max_order) + 1);
        double log_coeff = 0.0;
        report.derivative_coefficient_chain[0] = 1.0;
        for (int n = 1; n <= max_order; ++n) {
            if (q == 1.0) {
                report.derivative_coefficient_chain[static_cast<std::size_t>(n)] = 1.0;
            } else {
                log_coeff += std::log(1.0 / (q - 1.0) + (n - 1)) + std::log(q - 1.0);
                report.derivative_coefficient_chain[static_cast<std::size_t>(n)] =
                    std::exp(log_coeff);
            }
        }
    }
    return report;
}

/// Geometric grid for cm_check, kept inside the support image.
inline std::vector<double> default_cm_grid(const QGaussianLaw& law, std::size_t n_points = 200) {
    const double lo = 1e-3;
    const double hi = law.compact_support()
                          ? law.support_radius() * law.support_radius() * (1.0 - 1e-9)
                          : 100.0;
    std::vector<double> grid(n_points);
    const double ratio = std::log(hi / lo) / static_cast<double>(n_points - 1);
    for (std::size_t i = 0; i < n_points; ++i) {
        grid[i] = lo * std::exp(ratio * static_cast<double>(i));
    }
    return grid;
}

}  // namespace qmix

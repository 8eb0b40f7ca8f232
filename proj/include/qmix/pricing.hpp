#pragma once

#include <cmath>
#include <span>
#include <utility>

#include "qmix/mixing_law.hpp"
#include "qmix/numerics/quadrature.hpp"
#include "qmix/numerics/special_functions.hpp"

namespace qmix {

enum class OptionKind { kCall, kPut };

struct OptionSpec {
    double spot = 100.0;
    double strike = 100.0;
    double rate = 0.0;        // flat continuously-compounded rate, 1/time
    double maturity = 1.0;    // time
    OptionKind kind = OptionKind::kCall;
    double base_vol = 0.2;    // sigma_0, 1/sqrt(time)
};

namespace detail {

inline void validate(const OptionSpec& spec) {
    require(spec.spot > 0.0, "option spec: spot must be positive");
    require(spec.strike > 0.0, "option spec: strike must be positive");
    require(spec.maturity > 0.0, "option spec: maturity must be positive");
    require(spec.base_vol > 0.0, "option spec: base_vol must be positive");
    require(std::isfinite(spec.rate), "option spec: rate must be finite");
}

}  // namespace detail

/// Black-Scholes price at the given volatility. The put is priced through
/// put-call parity, so C - P = S - K e^(-rT) holds exactly.
inline double bs_price(const OptionSpec& spec, double vol) {
    detail::validate(spec);
    detail::require(vol > 0.0 && std::isfinite(vol), "bs_price: vol must be positive");
    const double sqrt_t = std::sqrt(spec.maturity);
    const double sd = vol * sqrt_t;
    const double discounted_strike = spec.strike * std::exp(-spec.rate * spec.maturity);
    const double d1 = std::log(spec.spot / discounted_strike) / sd + 0.5 * sd;
    const double d2 = d1 - sd;
    const double call = spec.spot * normal_cdf(d1) - discounted_strike * normal_cdf(d2);
    if (spec.kind == OptionKind::kCall) return call;
    return call - spec.spot + discounted_strike;
}

struct PricingResult {
    double price = 0.0;
    double quadrature_error = 0.0;  // quadrature estimate plus truncation bound
    double v_lo = 0.0;              // mixing-variable truncation window
    double v_hi = 0.0;
};

/// Price under the variance-mixture model: given V = v the terminal price is
/// lognormal with volatility v * base_vol, and the price is the mixture
///   int bs_price(spec, v sigma_0) f_V(v) dv.
/// V is truncated at extreme mixing quantiles; the discarded tails are
/// bounded by the model-free price bound (spot for calls, discounted strike
/// for puts) and folded into quadrature_error. This makes the evaluation
/// rigorous even when E[V^2] is infinite (q >= 5/3), since the integrand
/// itself stays bounded.
inline PricingResult mixed_price(const OptionSpec& spec, const MixingLaw& mixing,
                                 QuadTolerance tol = {}) {
    detail::validate(spec);
    PricingResult result;
    result.v_lo = mixing.quantile(1e-8);
    result.v_hi = mixing.quantile(1.0 - 1e-8);
    auto integrand = [&](double v) {
        return bs_price(spec, v * spec.base_vol) * mixing.density(v);
    };
    const double split = std::min(std::max(mixing.mode(), result.v_lo), result.v_hi);
    const QuadResult head = integrate(integrand, result.v_lo, split, tol);
    const QuadResult tail = integrate(integrand, split, result.v_hi, tol);
    const double bound = spec.kind == OptionKind::kCall
                             ? spec.spot
                             : spec.strike * std::exp(-spec.rate * spec.maturity);
    const double clipped_mass = mixing.cdf(result.v_lo) + (1.0 - mixing.cdf(result.v_hi));
    result.price = head.value + tail.value;
    result.quadrature_error = head.error + tail.error + clipped_mass * bound;
    return result;
}

/// Mixture over a discrete mixing law given as (scale, weight) atoms; the
/// degenerate single-atom case reproduces bs_price exactly.
inline PricingResult mixed_price(const OptionSpec& spec,
                                 std::span<const std::pair<double, double>> atoms) {
    detail::validate(spec);
    detail::require(!atoms.empty(), "mixed_price: need at least one mixing atom");
    double total_weight = 0.0;
    PricingResult result;
    result.v_lo = atoms.front().first;
    result.v_hi = atoms.front().first;
    for (const auto& [v, w] : atoms) {
        detail::require(v > 0.0, "mixed_price: mixing atoms must be positive");
        detail::require(w >= 0.0, "mixed_price: mixing weights must be nonnegative");
        total_weight += w;
        result.v_lo = std::min(result.v_lo, v);
        result.v_hi = std::max(result.v_hi, v);
    }
    detail::require(std::abs(total_weight - 1.0) <= 1e-12,
                    "mixed_price: mixing weights must sum to 1 within 1e-12");
    for (const auto& [v, w] : atoms) result.price += w * bs_price(spec, v * spec.base_vol);
    return result;
}

}  // namespace qmix

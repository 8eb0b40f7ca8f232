#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <utility>
#include <vector>

#include "oracles.hpp"
#include "qmix/mixing_law.hpp"
#include "qmix/numerics/random.hpp"
#include "qmix/pricing.hpp"

using namespace qmix;

namespace {

OptionSpec atm_call() {
    OptionSpec spec;
    spec.spot = 100.0;
    spec.strike = 100.0;
    spec.rate = 0.0;
    spec.maturity = 1.0;
    spec.kind = OptionKind::kCall;
    spec.base_vol = 0.2;
    return spec;
}

// Monte Carlo price under the conditional-lognormal terminal model.
struct McPrice {
    double price;
    double se;
};

McPrice mc_mixed_price(const OptionSpec& spec, const MixingLaw& mixing, std::size_t n,
                       std::uint64_t seed) {
    RandomStream stream(seed, 0);
    double acc = 0.0, acc2 = 0.0;
    const double sqrt_t = std::sqrt(spec.maturity);
    const double discount = std::exp(-spec.rate * spec.maturity);
    for (std::size_t i = 0; i < n; ++i) {
        const double vol = mixing.sample(stream) * spec.base_vol;
        const double growth = (spec.rate - 0.5 * vol * vol) * spec.maturity;
        const double terminal = spec.spot * std::exp(growth + vol * sqrt_t * stream.normal());
        const double payoff = spec.kind == OptionKind::kCall
                                  ? std::max(terminal - spec.strike, 0.0)
                                  : std::max(spec.strike - terminal, 0.0);
        const double discounted = discount * payoff;
        acc += discounted;
        acc2 += discounted * discounted;
    }
    const double m = static_cast<double>(n);
    const double mean = acc / m;
    const double var = std::max(0.0, acc2 / m - mean * mean);
    return {mean, std::sqrt(var / m)};
}

// Same model, conditioned on V: averages the fixed-v price over V draws.
// The summand is bounded by spot, so the 3-sigma band stays meaningful even
// where the terminal payoff has an infinite second moment.
McPrice mc_conditional_price(const OptionSpec& spec, const MixingLaw& mixing, std::size_t n,
                             std::uint64_t seed) {
    RandomStream stream(seed, 0);
    double acc = 0.0, acc2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double value = bs_price(spec, mixing.sample(stream) * spec.base_vol);
        acc += value;
        acc2 += value * value;
    }
    const double m = static_cast<double>(n);
    const double mean = acc / m;
    const double var = std::max(0.0, acc2 / m - mean * mean);
    return {mean, std::sqrt(var / m)};
}

}  // namespace

TEST_CASE("bs_price: zero-volatility limit is the discounted intrinsic value") {
    OptionSpec spec = atm_call();
    spec.spot = 120.0;
    spec.rate = 0.05;
    const double intrinsic = spec.spot - spec.strike * std::exp(-spec.rate * spec.maturity);
    CHECK(bs_price(spec, 1e-10) == Catch::Approx(intrinsic).margin(1e-10));
    spec.spot = 80.0;
    CHECK(bs_price(spec, 1e-10) == Catch::Approx(0.0).margin(1e-10));
    CHECK_THROWS_AS(bs_price(spec, 0.0), std::domain_error);
    CHECK_THROWS_AS(bs_price(spec, -0.1), std::domain_error);
}

TEST_CASE("bs_price: put-call parity is exact") {
    OptionSpec call = atm_call();
    call.spot = 95.0;
    call.rate = 0.03;
    OptionSpec put = call;
    put.kind = OptionKind::kPut;
    for (double vol : {0.05, 0.2, 0.8}) {
        const double lhs = bs_price(call, vol) - bs_price(put, vol);
        const double rhs = call.spot - call.strike * std::exp(-call.rate * call.maturity);
        CHECK(lhs == Catch::Approx(rhs).margin(1e-13));
    }
}

TEST_CASE("bs_price: ATM closed form and Monte Carlo cross-check") {
    const OptionSpec spec = atm_call();
    // with r = 0 and S = K: price = S (2 Phi(sd/2) - 1)
    const double sd = spec.base_vol * std::sqrt(spec.maturity);
    const double expected = spec.spot * (2.0 * oracle::normal_cdf(0.5 * sd) - 1.0);
    CHECK(bs_price(spec, spec.base_vol) == Catch::Approx(expected).margin(1e-10));

    RandomStream stream(60, 0);
    double acc = 0.0, acc2 = 0.0;
    const std::size_t n = 1000000;
    for (std::size_t i = 0; i < n; ++i) {
        const double terminal =
            spec.spot * std::exp(-0.5 * sd * sd + sd * stream.normal());
        const double payoff = std::max(terminal - spec.strike, 0.0);
        acc += payoff;
        acc2 += payoff * payoff;
    }
    const double mc = acc / static_cast<double>(n);
    const double se =
        std::sqrt((acc2 / static_cast<double>(n) - mc * mc) / static_cast<double>(n));
    CHECK(bs_price(spec, spec.base_vol) == Catch::Approx(mc).margin(3.0 * se));
}

TEST_CASE("mixed_price: degenerate mixing equals plain Black-Scholes") {
    const OptionSpec spec = atm_call();
    const std::vector<std::pair<double, double>> point{{1.0, 1.0}};
    const auto result = mixed_price(spec, point);
    CHECK(result.price == bs_price(spec, spec.base_vol));
    CHECK(result.quadrature_error == 0.0);

    const std::vector<std::pair<double, double>> bad{{1.0, 0.9}};
    CHECK_THROWS_AS(mixed_price(spec, bad), std::domain_error);
}

TEST_CASE("mixed_price: parity carries through the mixture") {
    OptionSpec call = atm_call();
    call.rate = 0.04;
    call.spot = 105.0;
    OptionSpec put = call;
    put.kind = OptionKind::kPut;
    for (double q : {1.3, 1.7, 2.0}) {
        MixingLaw mixing(q);
        const auto c = mixed_price(call, mixing);
        const auto p = mixed_price(put, mixing);
        const double rhs = call.spot - call.strike * std::exp(-call.rate * call.maturity);
        INFO("q = " << q);
        CHECK(std::abs((c.price - p.price) - rhs) <=
              2.0 * (c.quadrature_error + p.quadrature_error));
    }
}

TEST_CASE("mixed_price matches the Monte Carlo oracle") {
    const OptionSpec spec = atm_call();
    // conditional MC: valid at every q in (1,3)
    for (double q : {1.2, 1.5, 2.0}) {
        MixingLaw mixing(q);
        const auto quad = mixed_price(spec, mixing);
        const auto mc = mc_conditional_price(spec, mixing, 1000000, 61);
        INFO("q = " << q << " quad = " << quad.price << " mc = " << mc.price << " +- "
                    << mc.se);
        CHECK(quad.price == Catch::Approx(mc.price).margin(3.0 * mc.se));
    }
    // raw terminal-price MC where its variance is tame
    {
        MixingLaw mixing(1.2);
        const auto quad = mixed_price(spec, mixing);
        const auto mc = mc_mixed_price(spec, mixing, 1000000, 62);
        INFO("terminal-price mc = " << mc.price << " +- " << mc.se);
        CHECK(quad.price == Catch::Approx(mc.price).margin(3.0 * mc.se));
    }
}

TEST_CASE("mixed_price converges for q >= 5/3 where E[V^2] is infinite") {
    const OptionSpec spec = atm_call();
    MixingLaw mixing(2.0);
    const auto result = mixed_price(spec, mixing);
    CHECK(std::isfinite(result.price));
    CHECK(result.price > bs_price(spec, 1e-8));
    CHECK(result.price < spec.spot);
    // truncation accounting is part of the reported error
    CHECK(result.quadrature_error >= 2e-8 * spec.spot * 0.5);
    CHECK(result.v_hi > 1e3);
}

TEST_CASE("price bounds: intrinsic value and spot") {
    OptionSpec spec = atm_call();
    spec.rate = 0.05;
    MixingLaw mixing(1.5);
    const auto result = mixed_price(spec, mixing);
    const double intrinsic =
        std::max(spec.spot - spec.strike * std::exp(-spec.rate * spec.maturity), 0.0);
    CHECK(result.price >= intrinsic);
    CHECK(result.price <= spec.spot);
}

TEST_CASE("monotonicity in base_vol and maturity") {
    MixingLaw mixing(1.4);
    double previous = 0.0;
    for (double vol : {0.05, 0.1, 0.2, 0.4, 0.8}) {
        OptionSpec spec = atm_call();
        spec.base_vol = vol;
        const double price = mixed_price(spec, mixing).price;
        CHECK(price > previous);
        previous = price;
    }
    previous = 0.0;
    for (double maturity : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        OptionSpec spec = atm_call();
        spec.maturity = maturity;
        const double price = mixed_price(spec, mixing).price;
        CHECK(price > previous);
        previous = price;
    }
}

TEST_CASE("convexity in strike") {
    MixingLaw mixing(1.5);
    const double dk = 5.0;
    std::vector<double> prices;
    for (double strike = 60.0; strike <= 140.0; strike += dk) {
        OptionSpec spec = atm_call();
        spec.strike = strike;
        prices.push_back(mixed_price(spec, mixing).price);
    }
    for (std::size_t i = 1; i + 1 < prices.size(); ++i) {
        const double second = (prices[i + 1] - 2.0 * prices[i] + prices[i - 1]) / (dk * dk);
        CHECK(second >= -1e-8);
    }
}

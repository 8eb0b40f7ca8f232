#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "qmix/numerics/ks.hpp"
#include "qmix/process.hpp"
#include "qmix/qgaussian.hpp"

using namespace qmix;

namespace {
const std::vector<double> kTimes{0.0, 0.25, 0.5, 0.75, 1.0};
}

TEST_CASE("qbm path contract checks") {
    RandomStream stream(1, 0);
    const std::vector<double> bad1{0.5, 1.0};
    const std::vector<double> bad2{0.0, 0.7, 0.6};
    CHECK_THROWS_AS(sample_qbm_path(1.5, bad1, stream), std::domain_error);
    CHECK_THROWS_AS(sample_qbm_path(1.5, bad2, stream), std::domain_error);
    CHECK_THROWS_AS(QbmSampler(0.9), std::domain_error);
    CHECK_THROWS_AS(QbmSampler(3.0), std::domain_error);

    const auto path = sample_qbm_path(1.5, kTimes, stream);
    CHECK(path.values[0] == 0.0);
    CHECK(path.values.size() == kTimes.size());
    CHECK(path.latent_v > 0.0);
}

TEST_CASE("qbm marginal at t = 1 matches g_q") {
    for (double q : {1.0, 1.5, 2.0}) {
        QGaussianLaw law(q);
        const auto paths = sample_qbm_ensemble(q, kTimes, 30000, 200 + static_cast<int>(q));
        std::vector<double> marginals(paths.size());
        for (std::size_t i = 0; i < paths.size(); ++i) marginals[i] = paths[i].values.back();
        std::sort(marginals.begin(), marginals.end());
        const auto report =
            ks_statistic(marginals, [&law](double x) { return law.cdf(x); }, "g_q at t=1");
        INFO("q = " << q << " ks = " << report.statistic);
        CHECK(report.pass);
    }
}

TEST_CASE("qbm q = 1 latent is the point-mass limit of the mixing law") {
    RandomStream stream(7, 0);
    const auto path = sample_qbm_path(1.0, kTimes, stream);
    CHECK(path.latent_v == Catch::Approx(std::numbers::sqrt2 / 2.0).epsilon(1e-15));
    // and the mixing law indeed concentrates there as q -> 1+
    MixingLaw nearly_gaussian(1.001);
    CHECK(nearly_gaussian.quantile(0.5) ==
          Catch::Approx(std::numbers::sqrt2 / 2.0).margin(0.02));
}

TEST_CASE("qbm increments are stationary across the ensemble") {
    const auto paths = sample_qbm_ensemble(1.5, kTimes, 30000, 31);
    std::vector<double> early(paths.size()), late(paths.size());
    for (std::size_t i = 0; i < paths.size(); ++i) {
        early[i] = paths[i].values[1] - paths[i].values[0];
        late[i] = paths[i].values[4] - paths[i].values[3];
    }
    CHECK(ks_two_sample_unsorted(early, late, "increments at different t").pass);
}

TEST_CASE("qbm increments over disjoint equal intervals are exchangeable") {
    const auto paths = sample_qbm_ensemble(1.5, kTimes, 30000, 33);
    std::vector<double> forward(paths.size()), swapped(paths.size());
    for (std::size_t i = 0; i < paths.size(); ++i) {
        const double i1 = paths[i].values[2] - paths[i].values[1];
        const double i2 = paths[i].values[4] - paths[i].values[3];
        forward[i] = i1 + 2.0 * i2;
        swapped[i] = i2 + 2.0 * i1;
    }
    CHECK(ks_two_sample_unsorted(forward, swapped, "increment pair swapped").pass);
}

TEST_CASE("qbm conditional independence: normalized successive increments") {
    const auto paths = sample_qbm_ensemble(1.5, kTimes, 50000, 37);
    double acc = 0.0, acc2 = 0.0;
    std::size_t m = 0;
    for (const auto& path : paths) {
        const double v2 = path.latent_v * path.latent_v;
        for (std::size_t j = 2; j < path.values.size(); ++j) {
            const double a = (path.values[j - 1] - path.values[j - 2]) / v2;
            const double b = (path.values[j] - path.values[j - 1]);
            const double prod = a * b;
            acc += prod;
            acc2 += prod * prod;
            ++m;
        }
    }
    const double mean = acc / static_cast<double>(m);
    const double se = std::sqrt((acc2 / static_cast<double>(m) - mean * mean) /
                                static_cast<double>(m));
    CHECK(std::abs(mean) < 3.0 * se);
}

TEST_CASE("transition density: Cauchy case and normalization") {
    MixingLaw mixing(2.0);
    for (double x : {0.0, 0.7, 2.0}) {
        CHECK(qbm_transition_density(mixing, 1.0, x, 0.0) ==
              Catch::Approx(1.0 / (std::numbers::pi * (1.0 + x * x))).margin(1e-9));
    }
    // integrates to one in x; the inner density is held to a tighter
    // tolerance than the outer sweep so tail contributions stay faithful
    QuadTolerance inner_tol{1e-14, 1e-12, 60};
    auto f = [&](double x) { return qbm_transition_density(mixing, 1.0, x, 0.3, inner_tol); };
    QuadTolerance tol{1e-9, 1e-9, 40};
    const double mass = integrate(f, -8.0, 8.0, tol).value +
                        integrate_half_line(f, 8.0, tol).value +
                        integrate_half_line([&f](double u) { return f(-u); }, -(-8.0), tol).value;
    CHECK(mass == Catch::Approx(1.0).margin(1e-8));
}

TEST_CASE("transition density equals the scaled V*Z density (mixture identity)") {
    MixingLaw mixing(1.5);
    QGaussianLaw law(1.5);
    for (double t : {1.0, 2.5}) {
        for (double dx : {0.0, 1.0, 3.0}) {
            const double lhs = qbm_transition_density(mixing, t, dx + 0.4, 0.4);
            const double rhs = law.density(dx / std::sqrt(t)) / std::sqrt(t);
            CHECK(lhs == Catch::Approx(rhs).margin(1e-9));
        }
    }
    CHECK_THROWS_AS(qbm_transition_density(mixing, 0.0, 1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(qbm_transition_density(mixing, -1.0, 1.0, 0.0), std::domain_error);
}

TEST_CASE("transition density is symmetric in x - y") {
    MixingLaw mixing(1.7);
    CHECK(qbm_transition_density(mixing, 0.7, 1.9, 0.4) ==
          Catch::Approx(qbm_transition_density(mixing, 0.7, 0.4, 1.9)).epsilon(1e-10));
    CHECK(qbm_transition_density(mixing, 0.7, 2.5, 1.0) ==
          Catch::Approx(qbm_transition_density(mixing, 0.7, 4.0, 2.5)).epsilon(1e-10));
}

TEST_CASE("Chapman-Kolmogorov fails for the unconditional mixture") {
    MixingLaw mixing(2.0);
    const double residual = chapman_kolmogorov_residual(mixing, 1.0, 1.0, 0.0, 0.0);
    // analytic witness at the origin: Cauchy*Cauchy gives 1/(2 pi) while the
    // time-2 mixture density is sqrt(2)/(2 pi)
    const double expected = (std::numbers::sqrt2 - 1.0) / (2.0 * std::numbers::pi);
    CHECK(residual == Catch::Approx(expected).margin(1e-4));
    CHECK(residual > 1e-3);
}

TEST_CASE("langevin: deterministic beta has the OU stationary law") {
    LangevinConfig config;
    config.friction = 1.0;
    config.beta_law = BetaLaw::point_mass(1.0);
    config.dt = 0.05;
    config.burn_in = 300;
    config.n_paths = 20000;
    auto samples = langevin_simulate(config, 41);
    std::sort(samples.begin(), samples.end());
    // N(0, 1/(2 beta)) = N(0, 1/2)
    const auto report = ks_statistic(
        samples, [](double v) { return normal_cdf(v * std::numbers::sqrt2); }, "N(0,1/2)");
    INFO("ks = " << report.statistic);
    CHECK(report.pass);
}

TEST_CASE("langevin: Tsallis beta law pools to the q-Gaussian") {
    const double q = 1.5;
    LangevinConfig config;
    config.friction = 1.0;
    config.beta_law = BetaLaw::tsallis(q);
    config.dt = 0.05;
    config.burn_in = 300;
    config.n_paths = 30000;
    auto samples = langevin_simulate(config, 43);
    QGaussianLaw law(q);
    std::sort(samples.begin(), samples.end());
    const auto report =
        ks_statistic(samples, [&law](double v) { return law.cdf(v); }, "g_q stationary");
    INFO("ks = " << report.statistic);
    CHECK(report.pass);
}

TEST_CASE("langevin: burn-in is required from a displaced start") {
    LangevinConfig config;
    config.friction = 1.0;
    config.beta_law = BetaLaw::point_mass(1.0);
    config.dt = 0.05;
    config.n_paths = 10000;
    config.v0 = 10.0;

    config.burn_in = 0;
    auto early = langevin_simulate(config, 47);
    std::sort(early.begin(), early.end());
    const auto report_early = ks_statistic(
        early, [](double v) { return normal_cdf(v * std::numbers::sqrt2); }, "N(0,1/2)");
    CHECK_FALSE(report_early.pass);

    // OU relaxation time is 1/friction = 1; 300 steps of dt = 0.05 is 15
    // relaxation times
    config.burn_in = 300;
    auto relaxed = langevin_simulate(config, 47);
    std::sort(relaxed.begin(), relaxed.end());
    CHECK(ks_statistic(relaxed, [](double v) { return normal_cdf(v * std::numbers::sqrt2); },
                       "N(0,1/2)")
              .pass);
}

TEST_CASE("langevin: euler stepping stays close for small dt") {
    LangevinConfig config;
    config.friction = 1.0;
    config.beta_law = BetaLaw::point_mass(1.0);
    config.dt = 0.002;
    config.burn_in = 5000;
    config.n_paths = 10000;
    config.euler = true;
    auto samples = langevin_simulate(config, 53);
    std::sort(samples.begin(), samples.end());
    CHECK(ks_statistic(samples, [](double v) { return normal_cdf(v * std::numbers::sqrt2); },
                       "N(0,1/2)")
              .pass);
}

TEST_CASE("superstat factor: point mass recovers the classical Boltzmann factor") {
    const auto law = BetaLaw::point_mass(2.0);
    for (double E : {0.0, 0.5, 3.0}) {
        CHECK(superstat_factor(E, law) == Catch::Approx(std::exp(-2.0 * E)).epsilon(1e-14));
    }
    CHECK_THROWS_AS(superstat_factor(-0.1, law), std::domain_error);
}

TEST_CASE("superstat factor: gamma mixing has the closed Laplace transform") {
    for (double s : {0.5, 1.5, 3.0}) {
        for (double theta : {0.5, 1.0}) {
            const auto law = BetaLaw::gamma(s, theta);
            CHECK(superstat_factor(0.0, law) == Catch::Approx(1.0).margin(1e-9));
            for (double E : {0.3, 1.0, 4.0, 20.0}) {
                const double expected = std::pow(1.0 + theta * E, -s);
                CHECK(superstat_factor(E, law) == Catch::Approx(expected).margin(1e-9));
            }
        }
    }
}

TEST_CASE("superstat factor: Tsallis beta law gives the q-exponential factor") {
    const double q = 1.5;
    const auto law = BetaLaw::tsallis(q);
    const double s = (3.0 - q) / (2.0 * (q - 1.0));
    for (double E : {0.1, 1.0, 5.0}) {
        const double expected = std::pow(1.0 + (q - 1.0) * E, -s);
        CHECK(superstat_factor(E, law) == Catch::Approx(expected).margin(1e-9));
    }
}

TEST_CASE("superstat factor is nonincreasing and completely monotone on a grid") {
    const auto law = BetaLaw::gamma(2.0, 0.7);
    std::vector<double> values;
    const double h = 0.5;
    for (int i = 0; i <= 12; ++i) values.push_back(superstat_factor(h * i, law));
    // forward differences alternate in sign through order 3
    for (int order = 1; order <= 3; ++order) {
        std::vector<double> next(values.size() - 1);
        for (std::size_t i = 0; i + 1 < values.size(); ++i) next[i] = values[i + 1] - values[i];
        values = next;
        for (double d : values) {
            CHECK((order % 2 == 1 ? d <= 1e-12 : d >= -1e-12));
        }
    }
}

TEST_CASE("langevin config validation") {
    LangevinConfig config;
    config.friction = -1.0;
    CHECK_THROWS_AS(langevin_simulate(config, 1), std::domain_error);
    config.friction = 1.0;
    config.dt = 0.0;
    CHECK_THROWS_AS(langevin_simulate(config, 1), std::domain_error);
    CHECK_THROWS_AS(BetaLaw::gamma(-1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(BetaLaw::tsallis(1.0), std::domain_error);
}

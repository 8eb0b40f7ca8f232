#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "qmix/numerics/ks.hpp"
#include "qmix/qgaussian.hpp"
#include "qmix/vmon.hpp"

using namespace qmix;

namespace {

double normalization_by_quadrature(const QGaussianLaw& law) {
    if (law.compact_support()) {
        return 2.0 * integrate([&law](double x) { return law.density(x); }, 0.0,
                               law.support_radius())
                         .value;
    }
    const double head =
        integrate([&law](double x) { return law.density(x); }, 0.0, 10.0).value;
    return 2.0 * (head + law.tail_mass_quadrature(10.0));
}

}  // namespace

TEST_CASE("normalizing constant: exact branch values") {
    CHECK(q_gaussian_normalization(1.0) ==
          Catch::Approx(1.0 / std::sqrt(std::numbers::pi)).margin(1e-12));
    // q = 2 from the 1<q<3 branch; oracle: int (1+x^2)^-1 dx = pi
    const double pi_by_quadrature =
        2.0 * integrate_half_line([](double y) { return 1.0 / (1.0 + y * y); }, 0.0).value;
    CHECK(q_gaussian_normalization(2.0) == Catch::Approx(1.0 / pi_by_quadrature).margin(1e-9));
    CHECK(q_gaussian_normalization(2.0) == Catch::Approx(1.0 / std::numbers::pi).margin(1e-10));
}

TEST_CASE("normalizing constant: continuity across q = 1") {
    const double c1 = 1.0 / std::sqrt(std::numbers::pi);
    const double below = q_gaussian_normalization(1.0 - 1e-6);
    const double above = q_gaussian_normalization(1.0 + 1e-6);
    // C_q has slope ~0.212 in q at q=1, so the one-sided gaps are ~2.1e-7;
    // the symmetric average cancels the slope and lands much closer.
    CHECK(std::abs(below - c1) < 1e-6);
    CHECK(std::abs(above - c1) < 1e-6);
    CHECK(std::abs(0.5 * (below + above) - c1) < 5e-9);
}

TEST_CASE("normalizing constant rejects q >= 3") {
    CHECK_THROWS_AS(q_gaussian_normalization(3.0), std::domain_error);
    CHECK_THROWS_AS(QGaussianLaw(3.2), std::domain_error);
}

TEST_CASE("density values") {
    QGaussianLaw cauchy(2.0);
    CHECK(cauchy.density(0.0) == Catch::Approx(1.0 / std::numbers::pi).epsilon(1e-12));

    QGaussianLaw compact(0.5);
    const double edge = 1.0 / std::sqrt(0.5);
    // the bracket vanishes at the boundary; with the positive exponent
    // 1/(1-q) = 2 the density is zero there up to representation noise
    CHECK(compact.density(edge) < 1e-30);
    CHECK(compact.density(edge + 0.1) == 0.0);
    CHECK(compact.density(2.0 * edge) == 0.0);
    CHECK(compact.support_radius() == Catch::Approx(edge));

    QGaussianLaw gauss(1.0);
    CHECK(gauss.density(1.0) ==
          Catch::Approx(std::exp(-1.0) / std::sqrt(std::numbers::pi)).epsilon(1e-12));
}

TEST_CASE("density normalizes to one across the q range") {
    for (double q : {-1.0, 0.0, 0.5, 1.0, 1.2, 1.5, 2.0, 2.5, 2.9}) {
        QGaussianLaw law(q);
        CHECK(normalization_by_quadrature(law) == Catch::Approx(1.0).margin(1e-8));
    }
}

TEST_CASE("density is even") {
    for (double q : {0.5, 1.0, 1.7, 2.5}) {
        QGaussianLaw law(q);
        for (double x : {0.1, 0.77, 2.0, 9.5}) {
            CHECK(law.density(x) == law.density(-x));
        }
    }
}

TEST_CASE("cdf: symmetry point and Cauchy closed form") {
    for (double q : {0.5, 1.0, 1.5, 2.0, 2.5}) {
        QGaussianLaw law(q);
        CHECK(law.cdf(0.0) == Catch::Approx(0.5).margin(1e-12));
    }
    QGaussianLaw cauchy(2.0);
    CHECK(cauchy.cdf(1.0) == Catch::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("cdf agrees with an independent Simpson oracle") {
    QGaussianLaw law(1.5);
    for (double x : {0.3, 1.0, 2.5, 6.0, 9.0}) {
        const double ref =
            0.5 + oracle::simpson([&law](double t) { return law.density(t); }, 0.0, x, 16384);
        CHECK(law.cdf(x) == Catch::Approx(ref).margin(1e-8));
    }
    // far tail: interpolated cdf matches direct tail quadrature at the
    // absolute accuracy the cdf contract promises
    for (double x : {12.0, 40.0, 300.0}) {
        CHECK(1.0 - law.cdf(x) == Catch::Approx(law.tail_mass_quadrature(x)).margin(1e-10));
    }
    QGaussianLaw gauss(1.0);
    for (double x : {0.5, 1.5, 3.0}) {
        CHECK(gauss.cdf(x) ==
              Catch::Approx(oracle::normal_cdf(x * std::numbers::sqrt2)).margin(1e-12));
    }
}

TEST_CASE("quantile inverts the cdf") {
    for (double q : {0.5, 1.0, 1.5, 2.0, 2.5}) {
        QGaussianLaw law(q);
        for (double p : {0.001, 0.1, 0.25, 0.5, 0.9, 0.999}) {
            const double x = law.quantile(p);
            CHECK(law.cdf(x) == Catch::Approx(p).margin(1e-8));
        }
        for (double x : {-2.0, -0.3, 0.0, 0.5, 1.9}) {
            if (law.compact_support() && std::abs(x) >= law.support_radius()) continue;
            CHECK(law.quantile(law.cdf(x)) == Catch::Approx(x).margin(1e-8));
        }
    }
    CHECK_THROWS_AS(QGaussianLaw(1.5).quantile(0.0), std::domain_error);
    CHECK_THROWS_AS(QGaussianLaw(1.5).quantile(1.0), std::domain_error);
}

TEST_CASE("sampling matches the analytic cdf by KS") {
    const std::size_t m = 100000;
    for (double q : {1.0, 1.5, 2.0, 2.5}) {
        QGaussianLaw law(q);
        RandomStream stream(1234, 0);
        auto sample = law.sample(stream, m);
        std::sort(sample.begin(), sample.end());
        const auto report =
            ks_statistic(sample, [&law](double x) { return law.cdf(x); }, "g_q");
        INFO("q = " << q << " ks = " << report.statistic);
        CHECK(report.pass);
    }
}

TEST_CASE("sampling respects the compact support") {
    QGaussianLaw law(0.5);
    RandomStream stream(5, 0);
    const double edge = std::sqrt(2.0);
    auto sample = law.sample(stream, 20000);
    CHECK(std::all_of(sample.begin(), sample.end(),
                      [edge](double x) { return std::abs(x) <= edge; }));
    // distribution check on the compact branch as well
    std::sort(sample.begin(), sample.end());
    CHECK(ks_statistic(sample, [&law](double x) { return law.cdf(x); }, "g_0.5").pass);
}

TEST_CASE("tail exponent") {
    CHECK(QGaussianLaw(2.0).tail_exponent() == Catch::Approx(2.0));
    CHECK(QGaussianLaw(1.5).tail_exponent() == Catch::Approx(4.0));
    CHECK(QGaussianLaw(2.999).tail_exponent() == Catch::Approx(2.0 / 1.999).epsilon(1e-12));
    CHECK_THROWS_AS(QGaussianLaw(1.0).tail_exponent(), std::domain_error);
    CHECK_THROWS_AS(QGaussianLaw(0.5).tail_exponent(), std::domain_error);
}

TEST_CASE("log-density slope approaches the tail law at large x") {
    for (double q : {1.2, 1.5, 2.0, 2.9}) {
        QGaussianLaw law(q);
        const double x = 1e6;
        const double slope =
            (law.log_density(2.0 * x) - law.log_density(x)) / std::log(2.0);
        CHECK(slope == Catch::Approx(-2.0 / (q - 1.0)).epsilon(0.01));
    }
}

TEST_CASE("moments: values and finiteness rule") {
    QGaussianLaw law15(1.5);
    const auto m2 = law15.moment(2);
    REQUIRE(m2.finite);
    CHECK(m2.value == Catch::Approx(2.0).margin(1e-7));
    // cross-oracle: E[(VZ)^2] = E[V^2] with Z standard
    const auto v2 = MixingLaw(1.5).second_moment();
    REQUIRE(v2.finite);
    CHECK(m2.value == Catch::Approx(v2.value).margin(1e-7));

    CHECK_FALSE(QGaussianLaw(2.0).moment(2).finite);

    QGaussianLaw compact(0.5);
    const auto mc = compact.moment(2);
    REQUIRE(mc.finite);
    const double ref = 2.0 * oracle::simpson(
                                 [&compact](double x) { return x * x * compact.density(x); },
                                 0.0, compact.support_radius(), 32768);
    CHECK(mc.value == Catch::Approx(ref).margin(1e-8));

    QGaussianLaw gauss(1.0);
    CHECK(gauss.moment(2).value == Catch::Approx(0.5).margin(1e-10));
    CHECK(gauss.moment(4).value == Catch::Approx(0.75).margin(1e-9));

    CHECK_THROWS_AS(law15.moment(3), std::domain_error);
    CHECK_THROWS_AS(law15.moment(0), std::domain_error);
}

TEST_CASE("second-moment finiteness flips exactly at q = 5/3") {
    CHECK(QGaussianLaw(5.0 / 3.0 - 1e-3).moment(2).finite);
    CHECK_FALSE(QGaussianLaw(5.0 / 3.0 + 1e-3).moment(2).finite);
    CHECK_FALSE(QGaussianLaw(5.0 / 3.0).moment(2).finite);  // boundary diverges
    // fourth moment flips at q = 7/5
    CHECK(QGaussianLaw(1.4 - 1e-3).moment(4).finite);
    CHECK_FALSE(QGaussianLaw(1.4 + 1e-3).moment(4).finite);
}

TEST_CASE("complete monotonicity holds for q >= 1") {
    for (double q : {1.0, 1.2, 1.5, 2.0, 2.5}) {
        QGaussianLaw law(q);
        const auto report = cm_check(law, 8, default_cm_grid(law));
        INFO("q = " << q);
        CHECK(report.is_cm_consistent);
        CHECK_FALSE(report.first_violation.has_value());
        REQUIRE(report.derivative_coefficient_chain.size() == 9);
        for (double coeff : report.derivative_coefficient_chain) CHECK(coeff > 0.0);
    }
}

TEST_CASE("complete monotonicity fails for q < 1") {
    for (double q : {0.0, 0.5}) {
        QGaussianLaw law(q);
        const auto report = cm_check(law, 8, default_cm_grid(law));
        INFO("q = " << q);
        CHECK_FALSE(report.is_cm_consistent);
        REQUIRE(report.first_violation.has_value());
        CHECK(report.first_violation->order <= 8);
        CHECK(report.derivative_coefficient_chain.empty());
    }
}

TEST_CASE("cm_check input contracts") {
    QGaussianLaw law(0.5);
    // support image is (0, 2): a grid point at 3 is outside the domain
    CHECK_THROWS_AS(cm_check(law, 8, {0.5, 3.0}), std::domain_error);
    CHECK_THROWS_AS(cm_check(law, 1, {0.5}), std::domain_error);
    CHECK_THROWS_AS(cm_check(law, 8, {0.5, 0.4}), std::domain_error);
}

TEST_CASE("laws arbitrarily close to q = 1 behave like the Gaussian limit") {
    // the tail table is skipped here; the inner table must carry everything.
    // The law itself sits O(q-1) away from the Gaussian limit, so the margin
    // scales with that distance.
    for (double q : {1.000001, 1.01, 0.999999}) {
        QGaussianLaw law(q);
        const double margin = std::max(1e-7, 0.2 * std::abs(q - 1.0));
        CHECK(law.cdf(0.0) == Catch::Approx(0.5).margin(1e-12));
        for (double x : {0.5, 1.5, 3.0}) {
            CHECK(law.cdf(x) ==
                  Catch::Approx(oracle::normal_cdf(x * std::numbers::sqrt2)).margin(margin));
        }
        CHECK(law.quantile(law.cdf(1.1)) == Catch::Approx(1.1).margin(1e-8));
        CHECK(law.cdf(50.0) == Catch::Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("sampling is deterministic per stream") {
    QGaussianLaw law(1.7);
    RandomStream a(77, 3), b(77, 3);
    CHECK(law.sample(a, 50) == law.sample(b, 50));
}

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "qmix/mixing_law.hpp"
#include "qmix/numerics/ks.hpp"
#include "qmix/numerics/parallel.hpp"
#include "qmix/numerics/quadrature.hpp"
#include "qmix/numerics/random.hpp"
#include "qmix/qgaussian.hpp"

namespace qmix {

// ---------------------------------------------------------------------------
// Mixands: the conditionally i.i.d. coordinate laws. All entries are mean
// zero; every choice except the variance-1/2 normal is normalized to unit
// variance so the CLT targets stay auditable.

enum class Mixand { kNormal, kNormalHalfVariance, kRademacher, kCenteredUniform };

inline double sample_mixand(Mixand mixand, RandomStream& stream) {
    switch (mixand) {
        case Mixand::kNormal:
            return stream.normal();
        case Mixand::kNormalHalfVariance:
            return stream.normal() * std::numbers::sqrt2 / 2.0;
        case Mixand::kRademacher:
            return stream.rademacher();
        case Mixand::kCenteredUniform:
        default:
            return stream.uniform_centered();
    }
}

inline double mixand_sd(Mixand mixand) {
    return mixand == Mixand::kNormalHalfVariance ? std::numbers::sqrt2 / 2.0 : 1.0;
}

inline const char* mixand_name(Mixand mixand) {
    switch (mixand) {
        case Mixand::kNormal:
            return "normal";
        case Mixand::kNormalHalfVariance:
            return "normal-half-variance";
        case Mixand::kRademacher:
            return "rademacher";
        case Mixand::kCenteredUniform:
        default:
            return "centered-uniform";
    }
}

// ---------------------------------------------------------------------------
// De Finetti generators. Within one generated sequence the latent draw is
// fixed; conditionally on it the entries are i.i.d.

/// X_i = V * (Y_i + mixand_shift) with V > 0 latent.
struct ScaleMixture {
    std::function<double(RandomStream&)> latent_sampler;
    std::function<double(double)> latent_cdf;  // law of V, used by LLN targets
    Mixand mixand = Mixand::kNormal;
    double mixand_shift = 0.0;  // nonzero breaks the case-i centering contract
    std::function<double(double)> limit_cdf;  // law of sd(mixand) * V * Z
    std::string label;
};

/// X_i = Y + eps_i with Y latent and eps mean-zero noise.
struct ShiftMixture {
    std::function<double(RandomStream&)> latent_sampler;
    std::function<double(double)> latent_cdf;
    Mixand noise = Mixand::kNormal;
    std::string label;
};

/// X_i = Bernoulli(p) - offset with p latent on [0, 1].
struct BernoulliMixture {
    std::function<double(RandomStream&)> latent_sampler;
    std::function<double(double)> latent_cdf;
    double offset = 0.0;
    std::string label;
};

using ExchangeableModel = std::variant<ScaleMixture, ShiftMixture, BernoulliMixture>;

/// Scale mixture whose latent is the explicit mixing law of the q-Gaussian
/// family; with a unit-variance mixand the case-i limit is exactly g_q.
inline ScaleMixture scale_mixture_qgaussian(double q, Mixand mixand = Mixand::kNormal) {
    auto mixing = std::make_shared<MixingLaw>(q);
    auto law = std::make_shared<QGaussianLaw>(q);
    const double sd = mixand_sd(mixand);
    ScaleMixture model;
    model.latent_sampler = [mixing](RandomStream& s) { return mixing->sample(s); };
    model.latent_cdf = [mixing](double v) { return mixing->cdf(v); };
    model.mixand = mixand;
    model.limit_cdf = [law, sd](double x) { return law->cdf(x / sd); };
    model.label = "q-gaussian scale mixture (q=" + std::to_string(q) + ", " +
                  mixand_name(mixand) + ")";
    return model;
}

/// Degenerate latent V = v; the case-i limit is a centered normal.
inline ScaleMixture scale_mixture_fixed(double v, Mixand mixand = Mixand::kNormal) {
    detail::require(v > 0.0, "scale_mixture_fixed: scale must be positive");
    const double sd = v * mixand_sd(mixand);
    ScaleMixture model;
    model.latent_sampler = [v](RandomStream&) { return v; };
    model.latent_cdf = [v](double x) { return x >= v ? 1.0 : 0.0; };
    model.mixand = mixand;
    model.limit_cdf = [sd](double x) { return normal_cdf(x / sd); };
    model.label = "fixed-scale mixture (v=" + std::to_string(v) + ")";
    return model;
}

inline ShiftMixture shift_mixture_uniform_latent(Mixand noise = Mixand::kNormal) {
    ShiftMixture model;
    model.latent_sampler = [](RandomStream& s) { return s.uniform(); };
    model.latent_cdf = [](double y) { return y <= 0.0 ? 0.0 : (y >= 1.0 ? 1.0 : y); };
    model.noise = noise;
    model.label = "shift mixture, uniform latent";
    return model;
}

inline ShiftMixture shift_mixture_constant_latent(double c, Mixand noise = Mixand::kNormal) {
    ShiftMixture model;
    model.latent_sampler = [c](RandomStream&) { return c; };
    model.latent_cdf = [c](double y) { return y >= c ? 1.0 : 0.0; };
    model.noise = noise;
    model.label = "shift mixture, constant latent";
    return model;
}

inline BernoulliMixture bernoulli_mixture_uniform(double offset = 0.0) {
    BernoulliMixture model;
    model.latent_sampler = [](RandomStream& s) { return s.uniform(); };
    model.latent_cdf = [](double p) { return p <= 0.0 ? 0.0 : (p >= 1.0 ? 1.0 : p); };
    model.offset = offset;
    model.label = "bernoulli mixture, uniform mixing";
    return model;
}

inline BernoulliMixture bernoulli_mixture_constant(double p, double offset = 0.0) {
    detail::require(p >= 0.0 && p <= 1.0, "bernoulli_mixture_constant: p must lie in [0,1]");
    BernoulliMixture model;
    model.latent_sampler = [p](RandomStream&) { return p; };
    model.latent_cdf = [p](double x) { return x >= p ? 1.0 : 0.0; };
    model.offset = offset;
    model.label = "bernoulli mixture, constant p";
    return model;
}

// ---------------------------------------------------------------------------
// Sequence generation.

struct SequenceSample {
    double latent = 0.0;
    std::vector<double> values;
};

inline SequenceSample generate_sequence(const ScaleMixture& model, RandomStream& stream,
                                        std::size_t n) {
    detail::require(n >= 1, "generate_sequence: n must be at least 1");
    SequenceSample out;
    out.latent = model.latent_sampler(stream);
    out.values.resize(n);
    for (auto& x : out.values) {
        x = out.latent * (sample_mixand(model.mixand, stream) + model.mixand_shift);
    }
    return out;
}

inline SequenceSample generate_sequence(const ShiftMixture& model, RandomStream& stream,
                                        std::size_t n) {
    detail::require(n >= 1, "generate_sequence: n must be at least 1");
    SequenceSample out;
    out.latent = model.latent_sampler(stream);
    out.values.resize(n);
    for (auto& x : out.values) x = out.latent + sample_mixand(model.noise, stream);
    return out;
}

inline SequenceSample generate_sequence(const BernoulliMixture& model, RandomStream& stream,
                                        std::size_t n) {
    detail::require(n >= 1, "generate_sequence: n must be at least 1");
    SequenceSample out;
    out.latent = model.latent_sampler(stream);
    out.values.resize(n);
    for (auto& x : out.values) {
        x = (stream.bernoulli(out.latent) ? 1.0 : 0.0) - model.offset;
    }
    return out;
}

inline SequenceSample generate_sequence(const ExchangeableModel& model, RandomStream& stream,
                                        std::size_t n) {
    return std::visit([&](const auto& m) { return generate_sequence(m, stream, n); }, model);
}

// ---------------------------------------------------------------------------
// Monte Carlo experiments for the exchangeable limit theorems. Each
// replication draws a fresh latent; n is the convergence knob.

struct CltExperimentResult {
    KsReport ks;
    std::vector<double> latents;          // one per replication
    std::vector<double> normalized_sums;  // one per replication, in rep order
};

/// Case i: S_n / sqrt(n) against the law of sd(mixand) * V * Z.
inline CltExperimentResult clt_case_i(const ScaleMixture& model, std::size_t n,
                                      std::size_t replications, std::uint64_t seed,
                                      int workers = 1) {
    detail::require(n >= 1 && replications >= 1, "clt_case_i: n and replications >= 1");
    if (model.mixand_shift != 0.0) {
        throw std::invalid_argument(
            "clt_case_i: mixand mean must be zero (case i requires E[xi|G] = 0 a.s.); "
            "a shifted model belongs to case ii");
    }
    CltExperimentResult result;
    result.latents.resize(replications);
    result.normalized_sums.resize(replications);
    const double root_n = std::sqrt(static_cast<double>(n));
    run_replications(replications, workers, [&](std::size_t r) {
        RandomStream stream(seed, r);
        const double v = model.latent_sampler(stream);
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += sample_mixand(model.mixand, stream);
        result.latents[r] = v;
        result.normalized_sums[r] = v * sum / root_n;
    });
    std::vector<double> sorted = result.normalized_sums;
    std::sort(sorted.begin(), sorted.end());
    result.ks = ks_statistic(sorted, model.limit_cdf, model.label);
    return result;
}

/// Case ii: S_n / n against the law of the latent conditional mean.
inline CltExperimentResult lln_case_ii(const ExchangeableModel& model, std::size_t n,
                                       std::size_t replications, std::uint64_t seed,
                                       int workers = 1) {
    detail::require(n >= 1 && replications >= 1, "lln_case_ii: n and replications >= 1");
    CltExperimentResult result;
    result.latents.resize(replications);
    result.normalized_sums.resize(replications);
    run_replications(replications, workers, [&](std::size_t r) {
        RandomStream stream(seed, r);
        const auto seq = generate_sequence(model, stream, n);
        double sum = 0.0;
        for (double x : seq.values) sum += x;
        result.latents[r] = seq.latent;
        result.normalized_sums[r] = sum / static_cast<double>(n);
    });

    // target: law of E[X_1 | G]
    std::function<double(double)> target;
    std::string label;
    if (const auto* scale = std::get_if<ScaleMixture>(&model)) {
        const double shift = scale->mixand_shift;
        if (shift == 0.0) {
            target = [](double x) { return x >= 0.0 ? 1.0 : 0.0; };  // degenerate at 0
            label = scale->label + " [conditional mean 0]";
        } else {
            auto latent_cdf = scale->latent_cdf;
            target = [latent_cdf, shift](double x) { return latent_cdf(x / shift); };
            label = scale->label + " [V*shift]";
        }
    } else if (const auto* shift_model = std::get_if<ShiftMixture>(&model)) {
        target = shift_model->latent_cdf;
        label = shift_model->label + " [latent Y]";
    } else {
        const auto& bern = std::get<BernoulliMixture>(model);
        auto latent_cdf = bern.latent_cdf;
        const double offset = bern.offset;
        target = [latent_cdf, offset](double x) { return latent_cdf(x + offset); };
        label = bern.label + " [p - offset]";
    }

    std::vector<double> sorted = result.normalized_sums;
    std::sort(sorted.begin(), sorted.end());
    result.ks = ks_statistic(sorted, target, label);
    return result;
}

// ---------------------------------------------------------------------------
// Triangular arrays: rowwise exchangeable rows embedded in infinite
// exchangeable sequences. Row n is
//   xi_{n,i} = row_perturbation(n) * V * Y_i + U * n^(alpha - 1),
// so Var(xi_{n,1}) -> (sd(Y) V)^2 and n^(1-alpha) E[xi_{n,1} | latent] = U.

struct TriangularRowModel {
    std::function<double(RandomStream&)> latent_v_sampler;
    std::function<double(RandomStream&)> latent_u_sampler;
    std::function<double(double)> u_cdf;       // law of U (part-2 target)
    std::function<double(double)> part1_cdf;   // law of V*Z + U (part-1 target)
    Mixand mixand = Mixand::kNormal;
    double alpha = 1.0;  // drift exponent, must exceed 1/2 for part 2
    std::function<double(std::size_t)> row_perturbation;  // -> 1 as n grows
    std::string label;
};

enum class TriangularPart { kSqrtN, kPowerAlpha };

inline CltExperimentResult clt_triangular(const TriangularRowModel& model, std::size_t n,
                                          std::size_t replications, std::uint64_t seed,
                                          TriangularPart part, int workers = 1) {
    detail::require(n >= 1 && replications >= 1, "clt_triangular: n and replications >= 1");
    if (part == TriangularPart::kPowerAlpha) {
        detail::require(model.alpha > 0.5, "clt_triangular: alpha must exceed 1/2 for part 2");
    }
    const double perturbation = model.row_perturbation ? model.row_perturbation(n) : 1.0;
    CltExperimentResult result;
    result.latents.resize(replications);
    result.normalized_sums.resize(replications);
    const double norm = part == TriangularPart::kSqrtN
                            ? std::sqrt(static_cast<double>(n))
                            : std::pow(static_cast<double>(n), model.alpha);
    run_replications(replications, workers, [&](std::size_t r) {
        RandomStream stream(seed, r);
        const double v = model.latent_v_sampler(stream);
        const double u = model.latent_u_sampler(stream);
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += sample_mixand(model.mixand, stream);
        result.latents[r] = v;
        // the row drift (U/sqrt(n) per entry in part 1, U n^(alpha-1) in
        // part 2) sums to U times the normalization, leaving exactly u here
        result.normalized_sums[r] = perturbation * v * sum / norm + u;
    });
    std::vector<double> sorted = result.normalized_sums;
    std::sort(sorted.begin(), sorted.end());
    result.ks = ks_statistic(sorted,
                             part == TriangularPart::kSqrtN ? model.part1_cdf : model.u_cdf,
                             model.label);
    return result;
}

/// Part-1 model with the q-Gaussian mixing latent and standard-normal U:
/// the limit V*Z + U has cdf E_V[Phi(x / sqrt(1 + V^2))].
inline TriangularRowModel triangular_qgaussian_plus_normal(double q,
                                                           Mixand mixand = Mixand::kNormal) {
    auto mixing = std::make_shared<MixingLaw>(q);
    TriangularRowModel model;
    model.latent_v_sampler = [mixing](RandomStream& s) { return mixing->sample(s); };
    model.latent_u_sampler = [](RandomStream& s) { return s.normal(); };
    model.u_cdf = [](double x) { return normal_cdf(x); };
    model.part1_cdf = [mixing](double x) {
        auto f = [mixing, x](double v) {
            return normal_cdf(x / std::sqrt(1.0 + v * v)) * mixing->density(v);
        };
        return integrate(f, 0.0, mixing->mode()).value +
               integrate_half_line(f, mixing->mode()).value;
    };
    model.mixand = mixand;
    model.alpha = 1.0;
    model.row_perturbation = [](std::size_t n) {
        return 1.0 + 1.0 / static_cast<double>(n);
    };
    model.label = "triangular rows, q-gaussian scale + normal drift (q=" + std::to_string(q) +
                  ")";
    return model;
}

/// Part-2 model: small fixed scale, uniform U, drift exponent alpha.
inline TriangularRowModel triangular_uniform_drift(double v_scale, double alpha,
                                                   Mixand mixand = Mixand::kNormal) {
    detail::require(v_scale > 0.0, "triangular_uniform_drift: scale must be positive");
    TriangularRowModel model;
    model.latent_v_sampler = [v_scale](RandomStream&) { return v_scale; };
    model.latent_u_sampler = [](RandomStream& s) { return s.uniform(); };
    model.u_cdf = [](double x) { return x <= 0.0 ? 0.0 : (x >= 1.0 ? 1.0 : x); };
    model.part1_cdf = [v_scale](double x) { return normal_cdf(x / v_scale); };
    model.mixand = mixand;
    model.alpha = alpha;
    model.row_perturbation = [](std::size_t) { return 1.0; };
    model.label = "triangular rows, uniform drift (alpha=" + std::to_string(alpha) + ")";
    return model;
}

// ---------------------------------------------------------------------------
// Exchangeability diagnostics.

struct PairDiagnostic {
    double corr = 0.0;
    double corr_squares = 0.0;
    double se = 0.0;  // ~ 1/sqrt(pairs) Monte Carlo scale for both estimates
    std::size_t pairs = 0;
};

inline std::vector<std::array<double, 2>> generate_pairs(const ExchangeableModel& model,
                                                         std::size_t replications,
                                                         std::uint64_t seed, int workers = 1) {
    std::vector<std::array<double, 2>> out(replications);
    run_replications(replications, workers, [&](std::size_t r) {
        RandomStream stream(seed, r);
        const auto seq = generate_sequence(model, stream, 2);
        out[r] = {seq.values[0], seq.values[1]};
    });
    return out;
}

/// Estimates corr(X1, X2) and corr(X1^2, X2^2) across replications.
inline PairDiagnostic exchangeability_diagnostic(
    const std::vector<std::array<double, 2>>& pairs) {
    detail::require(pairs.size() >= 2, "exchangeability_diagnostic: need at least two pairs");
    const double m = static_cast<double>(pairs.size());
    double ma = 0.0, mb = 0.0, ma2 = 0.0, mb2 = 0.0;
    for (const auto& p : pairs) {
        ma += p[0];
        mb += p[1];
        ma2 += p[0] * p[0];
        mb2 += p[1] * p[1];
    }
    ma /= m;
    mb /= m;
    ma2 /= m;
    mb2 /= m;
    double saa = 0.0, sbb = 0.0, sab = 0.0, s2aa = 0.0, s2bb = 0.0, s2ab = 0.0;
    for (const auto& p : pairs) {
        const double da = p[0] - ma;
        const double db = p[1] - mb;
        const double da2 = p[0] * p[0] - ma2;
        const double db2 = p[1] * p[1] - mb2;
        saa += da * da;
        sbb += db * db;
        sab += da * db;
        s2aa += da2 * da2;
        s2bb += db2 * db2;
        s2ab += da2 * db2;
    }
    PairDiagnostic d;
    d.corr = sab / std::sqrt(saa * sbb);
    d.corr_squares = s2ab / std::sqrt(s2aa * s2bb);
    d.se = 1.0 / std::sqrt(m);
    d.pairs = pairs.size();
    return d;
}

/// Permutation-invariance witness: two-sample KS between the projections
/// X1 + 2 X2 and X2 + 2 X1 of the pair ensemble.
inline KsReport permutation_invariance_check(const std::vector<std::array<double, 2>>& pairs,
                                             double alpha = 0.01) {
    std::vector<double> forward(pairs.size()), swapped(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        forward[i] = pairs[i][0] + 2.0 * pairs[i][1];
        swapped[i] = pairs[i][1] + 2.0 * pairs[i][0];
    }
    return ks_two_sample_unsorted(std::move(forward), std::move(swapped),
                                  "joint law under coordinate swap", alpha);
}

/// Plain covariance estimate of (X1, X2) with its Monte Carlo scale.
struct CovarianceEstimate {
    double value = 0.0;
    double se = 0.0;
};

inline CovarianceEstimate pair_covariance(const std::vector<std::array<double, 2>>& pairs) {
    detail::require(pairs.size() >= 2, "pair_covariance: need at least two pairs");
    const double m = static_cast<double>(pairs.size());
    double ma = 0.0, mb = 0.0;
    for (const auto& p : pairs) {
        ma += p[0];
        mb += p[1];
    }
    ma /= m;
    mb /= m;
    double acc = 0.0, acc2 = 0.0;
    for (const auto& p : pairs) {
        const double prod = (p[0] - ma) * (p[1] - mb);
        acc += prod;
        acc2 += prod * prod;
    }
    CovarianceEstimate est;
    est.value = acc / m;
    est.se = std::sqrt(std::max(0.0, acc2 / m - est.value * est.value) / m);
    return est;
}

}  // namespace qmix

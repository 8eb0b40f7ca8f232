// qmix: command-line front end for the q-Gaussian variance-mixture toolkit.
//
// Exit codes: 0 success (and statistical checks passed), 1 usage or domain
// error, 2 a statistical or identity check failed. Every randomized
// subcommand is fully determined by its flags plus --seed; the resolved
// configuration is echoed into every artifact so runs can be reproduced.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qmix/exchangeable.hpp"
#include "qmix/fpe.hpp"
#include "qmix/leibnitz.hpp"
#include "qmix/mixing_law.hpp"
#include "qmix/numerics/ks.hpp"
#include "qmix/numerics/quadrature.hpp"
#include "qmix/numerics/random.hpp"
#include "qmix/pricing.hpp"
#include "qmix/process.hpp"
#include "qmix/qgaussian.hpp"
#include "qmix/serialize.hpp"
#include "qmix/vmon.hpp"

namespace {

constexpr std::uint64_t kDefaultSeed = 123456789;

struct CommonOptions {
    std::uint64_t seed = kDefaultSeed;
    double tol = 1e-10;
    std::string out;
    std::string format = "csv";
    int workers = 1;
};

qmix::QuadTolerance quad_tol(const CommonOptions& common) {
    return qmix::QuadTolerance{common.tol, common.tol, 60};
}

std::vector<double> parse_grid(const std::string& spec) {
    // "lo:hi:count"
    double lo = 0.0, hi = 0.0;
    std::size_t count = 0;
    char c1 = 0, c2 = 0;
    std::istringstream in(spec);
    if (!(in >> lo >> c1 >> hi >> c2 >> count) || c1 != ':' || c2 != ':' || count < 2 ||
        hi <= lo) {
        throw std::domain_error("grid spec must be lo:hi:count with hi > lo and count >= 2");
    }
    return qmix::uniform_grid(lo, hi, count);
}

std::vector<double> parse_time_list(const std::string& spec) {
    std::vector<double> times;
    std::istringstream in(spec);
    std::string token;
    while (std::getline(in, token, ',')) {
        if (!token.empty()) times.push_back(std::stod(token));
    }
    if (times.empty()) throw std::domain_error("expected a comma-separated list of times");
    return times;
}

qmix::Mixand parse_mixand(const std::string& name) {
    if (name == "normal") return qmix::Mixand::kNormal;
    if (name == "normal-half") return qmix::Mixand::kNormalHalfVariance;
    if (name == "rademacher") return qmix::Mixand::kRademacher;
    if (name == "uniform") return qmix::Mixand::kCenteredUniform;
    throw std::domain_error("unknown mixand '" + name +
                            "' (expected normal, normal-half, rademacher, uniform)");
}

qmix::BetaLaw parse_beta_law(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (kind == "point") return qmix::BetaLaw::point_mass(std::stod(args));
    if (kind == "q") return qmix::BetaLaw::tsallis(std::stod(args));
    if (kind == "gamma") {
        const auto comma = args.find(',');
        if (comma == std::string::npos) {
            throw std::domain_error("gamma beta law needs gamma:shape,scale");
        }
        return qmix::BetaLaw::gamma(std::stod(args.substr(0, comma)),
                                    std::stod(args.substr(comma + 1)));
    }
    throw std::domain_error("unknown beta law '" + spec +
                            "' (expected point:b, gamma:shape,scale, or q:value)");
}

qmix::MixingMeasure parse_mixing_measure(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (kind == "uniform") return qmix::MixingMeasure::uniform();
    if (kind == "point") return qmix::MixingMeasure::point_mass(std::stod(args));
    if (kind == "beta") {
        const auto comma = args.find(',');
        if (comma == std::string::npos) throw std::domain_error("beta measure needs beta:a,b");
        return qmix::MixingMeasure::beta(std::stod(args.substr(0, comma)),
                                         std::stod(args.substr(comma + 1)));
    }
    throw std::domain_error("unknown mixing measure '" + spec +
                            "' (expected uniform, point:p, or beta:a,b)");
}

// ---------------------------------------------------------------------------
// Artifact writing. CSV artifacts carry the resolved configuration as
// leading comment lines; JSON artifacts embed it as a "config" object.

class Artifact {
  public:
    Artifact(std::string subcommand, const CommonOptions& common)
        : subcommand_(std::move(subcommand)), out_(common.out), format_(common.format) {
        if (format_ != "csv" && format_ != "json") {
            throw std::domain_error("--format must be csv or json");
        }
        config_.add("subcommand", subcommand_);
    }

    template <class T>
    Artifact& config(const std::string& key, T value) {
        config_.add(key, value);
        return *this;
    }

    qmix::JsonObject& config_json() { return config_; }

    void write_rows(const std::vector<std::string>& columns,
                    const std::vector<std::vector<double>>& rows) const {
        if (out_.empty()) return;
        std::ofstream file(out_);
        if (!file) throw std::runtime_error("cannot open output file " + out_);
        if (format_ == "csv") {
            file << "# qmix " << subcommand_ << "\n";
            file << "# config " << config_.str() << "\n";
            for (std::size_t i = 0; i < columns.size(); ++i) {
                file << (i ? "," : "") << columns[i];
            }
            file << "\n";
            for (const auto& row : rows) {
                for (std::size_t i = 0; i < row.size(); ++i) {
                    file << (i ? "," : "") << qmix::format_double(row[i]);
                }
                file << "\n";
            }
        } else {
            file << "{\"config\": " << config_.str() << ", \"columns\": [";
            for (std::size_t i = 0; i < columns.size(); ++i) {
                file << (i ? ", " : "") << "\"" << columns[i] << "\"";
            }
            file << "], \"rows\": [";
            for (std::size_t r = 0; r < rows.size(); ++r) {
                file << (r ? ", " : "") << "[";
                for (std::size_t i = 0; i < rows[r].size(); ++i) {
                    file << (i ? ", " : "") << qmix::format_double(rows[r][i]);
                }
                file << "]";
            }
            file << "]}\n";
        }
    }

  private:
    std::string subcommand_;
    std::string out_;
    std::string format_;
    qmix::JsonObject config_;
};

qmix::JsonObject ks_json(const qmix::KsReport& report) {
    qmix::JsonObject obj;
    obj.add("statistic", report.statistic)
        .add("sample_size", report.sample_size)
        .add("threshold", report.threshold)
        .add("pass", report.pass)
        .add("target_name", report.target_name);
    return obj;
}

void print_summary(const Artifact& artifact, qmix::JsonObject summary) {
    (void)artifact;
    std::cout << summary.str() << "\n";
}

int exit_by_pass(bool pass) { return pass ? 0 : 2; }

// ---------------------------------------------------------------------------

int run_density(double q, std::optional<double> x, const std::string& grid_spec, bool log_mode,
                const CommonOptions& common) {
    qmix::QGaussianLaw law(q, quad_tol(common));
    Artifact artifact("density", common);
    artifact.config("q", q).config("log", log_mode);
    if (x.has_value()) {
        std::cout << qmix::format_double(log_mode ? law.log_density(*x) : law.density(*x))
                  << "\n";
        return 0;
    }
    const auto grid = parse_grid(grid_spec);
    std::vector<std::vector<double>> rows;
    rows.reserve(grid.size());
    for (double g : grid) {
        rows.push_back({g, log_mode ? law.log_density(g) : law.density(g)});
    }
    artifact.config("grid", grid_spec);
    artifact.write_rows({"x", log_mode ? "log_density" : "density"}, rows);
    qmix::JsonObject summary;
    summary.add_object("config", artifact.config_json())
        .add("points", rows.size())
        .add("c_q", law.c_q());
    print_summary(artifact, std::move(summary));
    return 0;
}

int run_cdf(double q, std::optional<double> x, std::optional<double> p,
            const std::string& grid_spec, const CommonOptions& common) {
    qmix::QGaussianLaw law(q, quad_tol(common));
    Artifact artifact("cdf", common);
    artifact.config("q", q);
    if (p.has_value()) {
        std::cout << qmix::format_double(law.quantile(*p)) << "\n";
        return 0;
    }
    if (x.has_value()) {
        std::cout << qmix::format_double(law.cdf(*x)) << "\n";
        return 0;
    }
    const auto grid = parse_grid(grid_spec);
    std::vector<std::vector<double>> rows;
    for (double g : grid) rows.push_back({g, law.cdf(g)});
    artifact.config("grid", grid_spec);
    artifact.write_rows({"x", "cdf"}, rows);
    qmix::JsonObject summary;
    summary.add_object("config", artifact.config_json()).add("points", rows.size());
    print_summary(artifact, std::move(summary));
    return 0;
}

int run_sample(double q, std::size_t n, const CommonOptions& common) {
    qmix::QGaussianLaw law(q, quad_tol(common));
    qmix::RandomStream stream(common.seed, 0);
    const auto draws = law.sample(stream, n);
    Artifact artifact("sample", common);
    artifact.config("q", q).config("n", n).config("seed", common.seed);
    std::vector<std::vector<double>> rows;
    rows.reserve(draws.size());
    for (double d : draws) rows.push_back({d});
    artifact.write_rows({"value"}, rows);
    if (common.out.empty()) {
        std::cout << "# config " << artifact.config_json().str() << "\n";
        for (double d : draws) std::cout << qmix::format_double(d) << "\n";
        return 0;
    }
    double mean = 0.0;
    for (double d : draws) mean += d;
    mean /= static_cast<double>(draws.size());
    qmix::JsonObject summary;
    summary.add_object("config", artifact.config_json())
        .add("n", draws.size())
        .add("sample_mean", mean);
    print_summary(artifact, std::move(summary));
    return 0;
}

int run_mixing(double q, std::optional<double> v, const std::string& grid_spec,
               std::size_t n_sample, const CommonOptions& common) {
    qmix::MixingLaw mixing(q);
    Artifact artifact("mixing", common);
    artifact.config("q", q).config("seed", common.seed);
    if (v.has_value()) {
        std::cout << qmix::format_double(mixing.density(*v)) << "\n";
        return 0;
    }
    if (n_sample > 0) {
        qmix::RandomStream stream(common.seed, 0);
        std::vector<std::vector<double>> rows;
        rows.reserve(n_sample);
        for (std::size_t i = 0; i < n_sample; ++i) rows.push_back({mixing.sample(stream)});
        artifact.config("n", n_sample);
        artifact.write_rows({"value"}, rows);
        if (common.out.empty()) {
            std::cout << "# config " << artifact.config_json().str() << "\n";
            for (const auto& row : rows) std::cout << qmix::format_double(row[0]) << "\n";
            return 0;
        }
    } else if (!grid_spec.empty()) {
        const auto grid = parse_grid(grid_spec);
        std::vector<std::vector<double>> rows;
        for (double g : grid) rows.push_back({g, mixing.density(g)});
        artifact.config("grid", grid_spec);
        artifact.write_rows({"v", "density"}, rows);
    }
    qmix::JsonObject summary;
    summary.add_object("config", artifact.config_json())
        .add("dof", mixing.dof())
        .add("c_vq", mixing.c_vq());
    print_summary(artifact, std::move(summary));
    return 0;
}

int run_verify_mixture(double q, double identity_tol, const std::string& grid_spec,
                       bool laplace, const CommonOptions& common) {
    const auto grid = parse_grid(grid_spec);
    // keep the quadrature well below the identity tolerance being certified,
    // floored at what double precision can deliver
    const double inner = std::max(1e-13, std::min(common.tol, 1e-2 * identity_tol));
    const qmix::QuadTolerance qt{inner, inner, 60};
    const auto report = laplace ? qmix::exp_mixture_check(q, grid, identity_tol, qt)
                                : qmix::verify_mixture(q, grid, identity_tol, qt);
    Artifact artifact(laplace ? "verify-mixture --laplace" : "verify-mixture", common);
    artifact.config("q", q).config("tol", identity_tol).config("grid", grid_spec);
    qmix::JsonObject summary;
    summary.add_object("config", artifact.config_json())
        .add("sup_error", report.sup_error)
        .add("worst_x", report.worst_x)
        .add("tol", report.tol)
        .add("pass", report.pass);
    print_summary(artifact, std::move(summary));
    return exit_by_pass(report.pass);
}

int run_cm_check(double q, int order, const CommonOptions& common) {
    qmix::QGaussianLaw law(q, quad_tol(common));
    const auto report = qmix::cm_check(law, order, qmix::default_cm_grid(law));
    Artifact artifact("cm-check", common);
    artifact.config("q", q).config("order", order);
    qmix::JsonObject summary;
    summary.add_object("config", artifact.config_json())
        .add("order_checked", report.order_checked)
        .add("is_cm_consistent", report.is_cm_consistent);
    if (report.first_violation) {
        qmix::JsonObject violation;
        violation.add("order", report.first_violation->order)
            .add("x", report.first_violation->x)
            .add("value", report.first_violation->value);
        summary.add_object("first_violation", violation);
    }
    if (!report.derivative_coefficient_chain.empty()) {
        summary.add("derivative_coefficient_chain", report.derivative_coefficient_chain);
    }
    print_summary(artifact, std::move(summary));
    // q-Gaussians are variance mixtures exactly when q >= 1, so consistency
    // there (and a detected violation below 1) is the expected outcome
    const bool expectation_met =
        (q >= 1.0 && report.is_cm_consistent) || (q < 1.0 && !report.is_cm_consistent);
    return exit_by_pass(expectation_met);
}

int run_clt(const std::string& model_name, double q, std::size_t n, std::size_t reps,
            const std::string& mixand_name, double alpha, const CommonOptions& common) {
    Artifact artifact("clt", common);
    artifact.config("model", model_name)
        .config("q", q)
        .config("n", n)
        .config("reps", reps)
        .config("mixand", mixand_name)
        .config("alpha", alpha)
        .config("seed", common.seed);

    const qmix::Mixand mixand = parse_mixand(mixand_name);
    qmix::CltExperimentResult result;
    if (model_name == "scale") {
        result = qmix::clt_case_i(qmix::scale_mixture_qgaussian(q, mixand), n, reps,
                                  common.seed, common.workers);
    } else if (model_name == "shift") {
        result = qmix::lln_case_ii(
            qmix::ExchangeableModel(qmix::shift_mixture_uniform_latent(mixand)), n, reps,
            common.seed, common.workers);
    } else if (model_name == "bernoulli") {
        result = qmix::lln_case_ii(qmix::ExchangeableModel(qmix::bernoulli_mixture_uniform()),
                                   n, reps, common.seed, common.workers);
    } else if (model_name == "tri1") {
        result = qmix::clt_triangular(qmix::triangular_qgaussian_plus_normal(q, mixand), n,
                                      reps, common.seed, qmix::TriangularPart::kSqrtN,
                                      common.workers);
    } else if (model_name == "tri2") {
        result = qmix::clt_triangular(qmix::triangular_uniform_drift(0.05, alpha, mixand), n,
                                      reps, common.seed, qmix::TriangularPart::kPowerAlpha,
                                      common.workers);
    } else {
        throw std::domain_error("unknown model '" + model_name +
                                "' (expected scale, shift, bernoulli, tri1, tri2)");
    }

    std::vector<std::vector<double>> rows;
    rows.reserve(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        rows.push_back({static_cast<double>(r), result.latents[r],
                        result.normalized_sums[r]});
    }
    artifact.write_rows({"replication", "latent", "normalized_sum"}, rows);

    qmix::JsonObject summary;
    summary.add_object("config", artifact.config_json()).add_object("ks", ks_json(result.ks));
    print_summary(artifact, std::move(summary));
    return exit_by_pass(result.ks.pass);
}

int run_triangle(const std::string& mixing_spec, std::size_t n_max,
                 const CommonOptions& common) {
    const auto measure = parse_mixing_measure(mixing_spec);
    const auto triangle = qmix::leibnitz_from_mixing(measure, n_max);
    Artifact artifact("triangle", common);
    artifact.config("mixing", mixing_spec).config("nmax", n_max);
    std::vector<std::vector<double>> rows;
    for (std::size_t N = 0; N <= n_max; ++N) {
        for (std::size_t k = 0; k <= N; ++k) {
            rows.push_back({static_cast<double>(N), static_cast<double>(k),
                            triangle.rows[N][k]});
        }
    }
    artifact.write_rows({"N", "n", "r"}, rows);
    const double residual = triangle.rule_residual();
    const double row_sum_error = triangle.row_sum_error();
    qmix::JsonObject summary;
    summary.add_object("config", artifact.config_json())
        .add("rule_residual", residual)
        .add("row_sum_error", row_sum_error)
        .add("pass", residual < 1e-12 && row_sum_error < 1e-12);
    print_summary(artifact, std::move(summary));
    return exit_by_pass(residual < 1e-12 && row_sum_error < 1e-12);
}

int run_qbm(double q, std::size_t paths, std::size_t steps, double t_end,
            const CommonOptions& common) {
    qmix::detail::require(steps >= 1 && t_end > 0.0, "qbm: need steps >= 1 and t-end > 0");
    std::vector<double> times(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) {
        times[i] = t_end * static_cast<double>(i) / static_cast<double>(steps);
    }
    const auto ensemble = qmix::sample_qbm_ensemble(q, times, paths, common.seed,
                                                    common.workers);
    Artifact artifact("qbm", common);
    artifact.config("q", q)
        .config("paths", paths)
        .config("steps", steps)
        .config("t_end", t_end)
        .config("seed", common.seed);

    std::vector<std::vector<double>> rows;
    rows.reserve(paths * (steps + 1));
    for (std::size_t p = 0; p < ensemble.size(); ++p) {
        for (std::size_t i = 0; i < ensemble[p].times.size(); ++i) {
            rows.push_back({static_cast<double>(p), ensemble[p].times[i],
                            ensemble[p].values[i]});
        }
    }
    artifact.write_rows({"path_id", "time", "value"}, rows);

    // distributional check: the t_end marginal rescaled by sqrt(t) follows g_q
    qmix::QGaussianLaw law(q);
    std::vector<double> marginals(ensemble.size());
    const double root_t = std::sqrt(t_end);
    for (std::size_t p = 0; p < ensemble.size(); ++p) {
        marginals[p] = ensemble[p].values.back() / root_t;
    }
    std::sort(marginals.begin(), marginals.end());
    const auto report = qmix::ks_statistic(
        marginals, [&law](double x) { return law.cdf(x); }, "g_q marginal at t_end");

    qmix::JsonObject summary;
    summary.add_object("config", artifact.config_json()).add_object("ks", ks_json(report));
    print_summary(artifact, std::move(summary));
    return exit_by_pass(report.pass);
}

int run_fpe(double q, double t_end, std::size_t nodes, double domain_half_width,
            const std::string& snapshot_spec, double floor, const CommonOptions& common) {
    qmix::FpeGridSpec grid{-domain_half_width, domain_half_width, nodes};
    qmix::FpeOptions options;
    options.density_floor = floor;
    std::vector<double> snapshots =
        snapshot_spec.empty() ? std::vector<double>{t_end} : parse_time_list(snapshot_spec);

    // reference profile: the q-Gaussian shape itself (heat mode uses its
    // q = 1 Gaussian limit)
    qmix::QGaussianLaw law(q == 1.0 ? 1.0 : q);
    const auto states = qmix::fpe_solve([&law](double x) { return law.density(x); }, q, t_end,
                                        grid, snapshots, options);

    Artifact artifact("fpe", common);
    artifact.config("q", q)
        .config("t_end", t_end)
        .config("nodes", nodes)
        .config("domain", domain_half_width)
        .config("snapshots", snapshot_spec.empty() ? std::string("final") : snapshot_spec)
        .config("floor", floor);

    std::vector<std::vector<double>> rows;
    for (const auto& state : states) {
        for (std::size_t i = 0; i < state.x.size(); ++i) {
            rows.push_back({state.t, state.x[i], state.p[i]});
        }
    }
    artifact.write_rows({"t", "x", "p"}, rows);

    double worst_mass_error = 0.0;
    std::vector<double> iqrs;
    for (const auto& state : states) {
        worst_mass_error = std::max(worst_mass_error, std::abs(state.mass() - 1.0));
        iqrs.push_back(qmix::profile_iqr(state));
    }
    qmix::JsonObject summary;
    summary.add_object("config", artifact.config_json())
        .add("mass_error", worst_mass_error)
        .add("floor_mass_added", states.back().floor_mass_added)
        .add("steps", states.back().steps)
        .add("iqr", iqrs);
    if (states.size() >= 2) {
        summary.add("width_exponent", qmix::fit_width_exponent(states).exponent);
    }
    // mass budget: 1e-6 per unit time (the trapezoid reading of the
    // conserved cell sum drifts with the boundary density on long runs)
    const bool pass = worst_mass_error < 1e-6 * std::max(1.0, t_end);
    summary.add("pass", pass);
    print_summary(artifact, std::move(summary));
    return exit_by_pass(pass);
}

int run_langevin(const std::string& beta_spec, double friction, double dt,
                 std::size_t burn_in, std::size_t paths, std::size_t samples_per_path,
                 bool euler, const CommonOptions& common) {
    qmix::LangevinConfig config;
    config.beta_law = parse_beta_law(beta_spec);
    config.friction = friction;
    config.dt = dt;
    config.burn_in = burn_in;
    config.n_paths = paths;
    config.samples_per_path = samples_per_path;
    config.euler = euler;
    auto samples = qmix::langevin_simulate(config, common.seed, common.workers);

    Artifact artifact("langevin", common);
    artifact.config("beta_law", beta_spec)
        .config("friction", friction)
        .config("dt", dt)
        .config("burn_in", burn_in)
        .config("paths", paths)
        .config("samples_per_path", samples_per_path)
        .config("euler", euler)
        .config("seed", common.seed);

    std::vector<std::vector<double>> rows;
    rows.reserve(samples.size());
    for (double s : samples) rows.push_back({s});
    artifact.write_rows({"velocity"}, rows);

    // stationary target: g_q for the Tsallis beta law, N(0, 1/(2 beta))
    // for a point mass; other gamma laws report the statistic untested
    std::sort(samples.begin(), samples.end());
    std::optional<qmix::KsReport> report;
    if (beta_spec.rfind("q:", 0) == 0) {
        const double q = std::stod(beta_spec.substr(2));
        auto law = std::make_shared<qmix::QGaussianLaw>(q);
        report = qmix::ks_statistic(
            samples, [law](double v) { return law->cdf(v); }, "g_q stationary");
    } else if (config.beta_law.is_point_mass()) {
        const double sd = std::sqrt(0.5 / config.beta_law.point());
        report = qmix::ks_statistic(
            samples, [sd](double v) { return qmix::normal_cdf(v / sd); },
            "conditional OU stationary law");
    }

    qmix::JsonObject summary;
    summary.add_object("config", artifact.config_json()).add("samples", samples.size());
    if (report) summary.add_object("ks", ks_json(*report));
    print_summary(artifact, std::move(summary));
    return exit_by_pass(!report || report->pass);
}

int run_superstat(const std::string& beta_spec, std::optional<double> energy,
                  const std::string& grid_spec, const CommonOptions& common) {
    const auto beta_law = parse_beta_law(beta_spec);
    Artifact artifact("superstat", common);
    artifact.config("beta_law", beta_spec);
    if (energy.has_value()) {
        std::cout << qmix::format_double(
                         qmix::superstat_factor(*energy, beta_law, quad_tol(common)))
                  << "\n";
        return 0;
    }
    const auto grid = parse_grid(grid_spec);
    std::vector<std::vector<double>> rows;
    for (double e : grid) {
        rows.push_back({e, qmix::superstat_factor(e, beta_law, quad_tol(common))});
    }
    artifact.config("grid", grid_spec);
    artifact.write_rows({"energy", "boltzmann_factor"}, rows);
    qmix::JsonObject summary;
    summary.add_object("config", artifact.config_json()).add("points", rows.size());
    print_summary(artifact, std::move(summary));
    return 0;
}

int run_price(double spot, double strike, double rate, double maturity,
              const std::string& kind_name, double vol, std::optional<double> q,
              const CommonOptions& common) {
    qmix::OptionSpec spec;
    spec.spot = spot;
    spec.strike = strike;
    spec.rate = rate;
    spec.maturity = maturity;
    spec.base_vol = vol;
    if (kind_name == "call") {
        spec.kind = qmix::OptionKind::kCall;
    } else if (kind_name == "put") {
        spec.kind = qmix::OptionKind::kPut;
    } else {
        throw std::domain_error("--kind must be call or put");
    }

    Artifact artifact("price", common);
    artifact.config("spot", spot)
        .config("strike", strike)
        .config("rate", rate)
        .config("maturity", maturity)
        .config("kind", kind_name)
        .config("vol", vol);

    qmix::JsonObject summary;
    if (q.has_value()) {
        artifact.config("q", *q);
        const qmix::MixingLaw mixing(*q);
        const auto result = qmix::mixed_price(spec, mixing, quad_tol(common));
        summary.add_object("config", artifact.config_json())
            .add("price", result.price)
            .add("quadrature_error", result.quadrature_error)
            .add("v_lo", result.v_lo)
            .add("v_hi", result.v_hi);
    } else {
        summary.add_object("config", artifact.config_json())
            .add("price", qmix::bs_price(spec, vol))
            .add("quadrature_error", 0.0);
    }
    print_summary(artifact, std::move(summary));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"q-Gaussian distributions as variance mixtures of normals: sampling, "
                 "identity checks, exchangeable CLT experiments, q-Brownian motion, "
                 "fast-diffusion PDE, superstatistics, and option pricing"};
    app.require_subcommand(1);

    CommonOptions common;
    double q = 1.5;
    std::optional<double> x_opt, p_opt, v_opt, energy_opt, q_opt;
    std::string grid_spec = "-10:10:201";
    std::string mixing_grid;
    std::string superstat_grid = "0:10:101";
    std::size_t n = 10;
    std::size_t reps = 1000;
    bool log_mode = false;
    bool laplace = false;
    double identity_tol = 1e-8;
    int cm_order = 8;
    std::string model_name = "scale";
    std::string mixand_name = "normal";
    double alpha = 0.75;
    std::string mixing_spec = "uniform";
    std::size_t n_max = 30;
    std::size_t paths = 1000;
    std::size_t steps = 8;
    double t_end = 1.0;
    std::size_t nodes = 2048;
    double domain_half_width = 40.0;
    std::string snapshot_spec;
    double floor = 1e-12;
    std::string beta_spec = "q:1.5";
    double friction = 1.0;
    double dt = 0.05;
    std::size_t burn_in = 300;
    std::size_t samples_per_path = 1;
    bool euler = false;
    double spot = 100.0, strike = 100.0, rate = 0.0, maturity = 1.0, vol = 0.2;
    std::string kind_name = "call";
    std::size_t n_sample = 0;

    auto add_common = [&](CLI::App* sub, bool randomized, bool with_quad_tol = true) {
        if (randomized) {
            sub->add_option("--seed", common.seed, "master seed (echoed into the output)");
            sub->add_option("--workers", common.workers, "worker threads for replications");
        }
        if (with_quad_tol) {
            sub->add_option("--tol", common.tol, "quadrature tolerance (abs and rel)");
        }
        sub->add_option("--out", common.out, "artifact path");
        sub->add_option("--format", common.format, "artifact format: csv or json");
    };

    auto* density = app.add_subcommand("density", "evaluate the q-Gaussian density");
    density->add_option("--q", q, "entropic index, q < 3")->required();
    density->add_option("--x", x_opt, "evaluation point");
    density->add_option("--grid", grid_spec, "grid lo:hi:count");
    density->add_flag("--log", log_mode, "emit the log density");
    add_common(density, false);

    auto* cdf = app.add_subcommand("cdf", "evaluate the CDF or a quantile");
    cdf->add_option("--q", q, "entropic index, q < 3")->required();
    cdf->add_option("--x", x_opt, "evaluation point");
    cdf->add_option("--p", p_opt, "quantile level in (0,1)");
    cdf->add_option("--grid", grid_spec, "grid lo:hi:count");
    add_common(cdf, false);

    auto* sample = app.add_subcommand("sample", "draw from the q-Gaussian law");
    sample->add_option("--q", q, "entropic index, q < 3")->required();
    sample->add_option("--n", n, "number of draws")->required();
    add_common(sample, true);

    auto* mixing = app.add_subcommand("mixing", "mixing law of the scale variable V");
    mixing->add_option("--q", q, "entropic index in (1,3)")->required();
    mixing->add_option("--v", v_opt, "density evaluation point");
    mixing->add_option("--grid", mixing_grid, "density grid lo:hi:count, v > 0");
    mixing->add_option("--sample", n_sample, "draw this many V samples");
    add_common(mixing, true);

    auto* verify = app.add_subcommand("verify-mixture",
                                      "check the variance-mixture identity numerically");
    verify->add_option("--q", q, "entropic index in (1,3)")->required();
    verify->add_option("--tol", identity_tol, "sup-error tolerance on the identity");
    verify->add_option("--grid", grid_spec, "grid lo:hi:count");
    verify->add_flag("--laplace", laplace, "check the Laplace-transform identity instead");
    add_common(verify, false, /*with_quad_tol=*/false);

    auto* cm = app.add_subcommand("cm-check", "complete-monotonicity check of g_q(sqrt(x))");
    cm->add_option("--q", q, "entropic index, q < 3")->required();
    cm->add_option("--order", cm_order, "highest difference order");
    add_common(cm, false);

    auto* clt = app.add_subcommand("clt", "exchangeable CLT / LLN experiments");
    clt->add_option("--model", model_name, "scale | shift | bernoulli | tri1 | tri2");
    clt->add_option("--q", q, "entropic index for scale/tri1 latents");
    clt->add_option("--n", n, "sequence length per replication")->required();
    clt->add_option("--reps", reps, "number of replications")->required();
    clt->add_option("--mixand", mixand_name, "normal | normal-half | rademacher | uniform");
    clt->add_option("--alpha", alpha, "drift exponent for tri2 (> 1/2)");
    add_common(clt, true);

    auto* triangle = app.add_subcommand("triangle", "mixed-Bernoulli triangular array");
    triangle->add_option("--mixing", mixing_spec, "uniform | point:p | beta:a,b");
    triangle->add_option("--nmax", n_max, "largest row index");
    add_common(triangle, false);

    auto* qbm = app.add_subcommand("qbm", "sample q-Brownian-motion paths");
    qbm->add_option("--q", q, "entropic index in [1,3)")->required();
    qbm->add_option("--paths", paths, "ensemble size");
    qbm->add_option("--steps", steps, "time steps per path");
    qbm->add_option("--t-end", t_end, "final time");
    add_common(qbm, true);

    auto* fpe = app.add_subcommand("fpe", "nonlinear Fokker-Planck (fast diffusion) solver");
    fpe->add_option("--q", q, "1 (linear) or in (1,2)")->required();
    fpe->add_option("--t-end", t_end, "final time")->required();
    fpe->add_option("--nodes", nodes, "grid nodes");
    fpe->add_option("--domain", domain_half_width, "domain half-width");
    fpe->add_option("--snapshots", snapshot_spec, "comma-separated snapshot times");
    fpe->add_option("--floor", floor, "density floor");
    add_common(fpe, false);

    auto* langevin = app.add_subcommand("langevin", "superstatistical Langevin sampler");
    langevin->add_option("--beta-law", beta_spec, "point:b | gamma:shape,scale | q:value");
    langevin->add_option("--friction", friction, "friction coefficient");
    langevin->add_option("--dt", dt, "time step");
    langevin->add_option("--burn-in", burn_in, "burn-in steps per path");
    langevin->add_option("--paths", paths, "number of paths");
    langevin->add_option("--samples-per-path", samples_per_path, "retained samples per path");
    langevin->add_flag("--euler", euler, "Euler-Maruyama stepping instead of the exact law");
    add_common(langevin, true);

    auto* superstat = app.add_subcommand("superstat", "generalized Boltzmann factor");
    superstat->add_option("--beta-law", beta_spec, "point:b | gamma:shape,scale | q:value");
    superstat->add_option("--energy", energy_opt, "single energy value");
    superstat->add_option("--grid", superstat_grid, "energy grid lo:hi:count");
    add_common(superstat, false);

    auto* price = app.add_subcommand("price", "Black-Scholes and mixture option prices");
    price->add_option("--spot", spot, "spot price");
    price->add_option("--strike", strike, "strike");
    price->add_option("--rate", rate, "flat rate");
    price->add_option("--maturity", maturity, "maturity in years");
    price->add_option("--vol", vol, "base volatility");
    price->add_option("--kind", kind_name, "call | put");
    price->add_option("--q", q_opt, "mix over the q mixing law (omit for plain BS)");
    add_common(price, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }

    try {
        if (app.got_subcommand(density)) return run_density(q, x_opt, grid_spec, log_mode, common);
        if (app.got_subcommand(cdf)) return run_cdf(q, x_opt, p_opt, grid_spec, common);
        if (app.got_subcommand(sample)) return run_sample(q, n, common);
        if (app.got_subcommand(mixing)) return run_mixing(q, v_opt, mixing_grid, n_sample, common);
        if (app.got_subcommand(verify)) {
            return run_verify_mixture(q, identity_tol, grid_spec, laplace, common);
        }
        if (app.got_subcommand(cm)) return run_cm_check(q, cm_order, common);
        if (app.got_subcommand(clt)) {
            return run_clt(model_name, q, n, reps, mixand_name, alpha, common);
        }
        if (app.got_subcommand(triangle)) return run_triangle(mixing_spec, n_max, common);
        if (app.got_subcommand(qbm)) return run_qbm(q, paths, steps, t_end, common);
        if (app.got_subcommand(fpe)) {
            return run_fpe(q, t_end, nodes, domain_half_width, snapshot_spec, floor, common);
        }
        if (app.got_subcommand(langevin)) {
            return run_langevin(beta_spec, friction, dt, burn_in, paths, samples_per_path,
                                euler, common);
        }
        if (app.got_subcommand(superstat)) {
            return run_superstat(beta_spec, energy_opt, superstat_grid, common);
        }
        if (app.got_subcommand(price)) {
            return run_price(spot, strike, rate, maturity, kind_name, vol, q_opt, common);
        }
    } catch (const std::domain_error& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

#pragma once

// Monte Carlo drivers for clustered ROC designs: data generation from
// (log)normal compound-symmetry models, bias/RMSE/coverage and power studies,
// and the parametric / logistic-score AUC baselines.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cwauc/covariance.hpp"
#include "cwauc/data.hpp"
#include "cwauc/design.hpp"
#include "cwauc/errors.hpp"
#include "cwauc/estimators.hpp"
#include "cwauc/inference.hpp"
#include "cwauc/normal.hpp"
#include "cwauc/parallel.hpp"
#include "cwauc/weight_measure.hpp"

namespace cwauc::sim {

enum class Family { Normal, LogNormal };

inline const char* to_string(Family f) { return f == Family::Normal ? "normal" : "lognormal"; }

// ---- multivariate normal ----------------------------------------------------------

// Draws from N(mu, cov) through the lower Cholesky factor of cov.
class MvnSampler {
public:
    MvnSampler(Eigen::VectorXd mu, const Eigen::MatrixXd& cov) : mu_(std::move(mu)) {
        if (cov.rows() != mu_.size() || cov.cols() != mu_.size())
            throw InputError("mean and covariance dimensions differ");
        Eigen::LLT<Eigen::MatrixXd> llt(cov);
        if (llt.info() != Eigen::Success) throw NumericalError("covariance matrix is not positive definite");
        lower_ = llt.matrixL();
    }

    template <class Rng>
    Eigen::VectorXd operator()(Rng& rng) const {
        std::normal_distribution<double> z;
        Eigen::VectorXd e(mu_.size());
        for (Eigen::Index i = 0; i < e.size(); ++i) e[i] = z(rng);
        return mu_ + lower_ * e;
    }

    Eigen::Index dimension() const { return mu_.size(); }

private:
    Eigen::VectorXd mu_;
    Eigen::MatrixXd lower_;
};

template <class Rng>
Eigen::VectorXd sample_mvn(const Eigen::VectorXd& mu, const Eigen::MatrixXd& cov, Rng& rng,
                           Family family = Family::Normal) {
    Eigen::VectorXd v = MvnSampler(mu, cov)(rng);
    if (family == Family::LogNormal) v = v.array().exp();
    return v;
}

// Exchangeable correlation rho scaled by per-component variances.
inline Eigen::MatrixXd compound_symmetry(const std::vector<double>& variances, double rho) {
    const auto n = static_cast<Eigen::Index>(variances.size());
    Eigen::MatrixXd c(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            c(i, j) = (i == j ? 1.0 : rho) * std::sqrt(variances[static_cast<std::size_t>(i)] *
                                                       variances[static_cast<std::size_t>(j)]);
    return c;
}

// ---- true wAUC under the binormal model -------------------------------------------

// ROC(u) = Phi((mu_x - mu_y + sd_y Phi^-1(u)) / sd_x). Lognormal shares ranks with
// normal, so log-scale parameters are used for both families.
inline double true_roc(double mu_x, double sd_x, double mu_y, double sd_y, double u) {
    return normal::cdf((mu_x - mu_y + sd_y * normal::quantile(u)) / sd_x);
}

inline double true_wauc(Family, double mu_x, double sd_x, double mu_y, double sd_y, const WeightMeasure& w) {
    if (!(sd_x > 0.0 && sd_y > 0.0)) throw InputError("standard deviations must be positive");
    auto roc = [&](double u) { return true_roc(mu_x, sd_x, mu_y, sd_y, u); };
    auto integrate = [&](double a, double b) {
        double err = 0.0;
        return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(roc, a, b, 15, 1e-10, &err);
    };
    return std::visit(
        [&](const auto& k) -> double {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, FullAuc>) {
                return normal::cdf((mu_x - mu_y) / std::sqrt(sd_x * sd_x + sd_y * sd_y));
            } else if constexpr (std::is_same_v<T, PartialAuc>) {
                const double v = integrate(k.u1, k.u2);
                return k.normalized ? v / (k.u2 - k.u1) : v;
            } else if constexpr (std::is_same_v<T, PointMass>) {
                return roc(k.u0);
            } else {
                double total = 0.0;
                for (const auto& a : k.atoms) total += a.mass * roc(a.u);
                return total;
            }
        },
        w.kind());
}

// ---- scenarios ---------------------------------------------------------------------

enum class StudyKind { Coverage, Power, Baseline };

// Per-subject generating model. A subject with cluster size c contributes
// L * K * c values, ordered marker-major, then time, then replicate; every
// component of marker l has mean mu[l] and variance variances[l], and all
// components share the exchangeable correlation of its group.
struct ScenarioSpec {
    std::string name = "custom";
    StudyKind kind = StudyKind::Coverage;
    Family family = Family::Normal;
    StudyDesign design = StudyDesign::multi_reader(3);
    int n_markers = 6;
    int n_times = 1;
    std::vector<double> mu_x;
    std::vector<double> mu_y;
    std::vector<double> variances;
    double rho_x = 0.0;
    double rho_y = 0.0;
    // Replicates per (marker, time) cell for the first and second half of each group.
    std::pair<int, int> cluster_x{1, 1};
    std::pair<int, int> cluster_y{1, 1};
    int n_diseased = 50;
    int n_nondiseased = 50;
    int n_reps = 1000;
    std::uint64_t seed = 1;
    WeightMeasure measure = WeightMeasure::full_auc();
    std::vector<WeightMethod> methods{WeightMethod::Equal};
    double alpha = 0.05;
    unsigned threads = 1;

    void check() const {
        if (n_markers < 1 || n_times < 1) throw InputError("scenario needs markers and times");
        const auto L = static_cast<std::size_t>(n_markers);
        if (mu_x.size() != L || mu_y.size() != L || variances.size() != L)
            throw InputError("scenario means/variances must have one entry per marker");
        for (double v : variances)
            if (!(v > 0.0)) throw InputError("scenario variances must be positive");
        if (n_diseased < 2 || n_nondiseased < 2) throw InputError("scenario needs at least two subjects per group");
        if (n_reps < 1) throw InputError("scenario needs at least one replicate");
        for (int c : {cluster_x.first, cluster_x.second, cluster_y.first, cluster_y.second})
            if (c < 1) throw InputError("cluster sizes must be >= 1");
        if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
        if (methods.empty()) throw InputError("scenario needs at least one weight method");
        // positive definiteness of every covariance that will be sampled
        for (int c : {cluster_x.first, cluster_x.second}) covariance(true, c);
        for (int c : {cluster_y.first, cluster_y.second}) covariance(false, c);
    }

    Eigen::MatrixXd covariance(bool diseased, int cluster) const {
        std::vector<double> var;
        for (int l = 0; l < n_markers; ++l)
            for (int k = 0; k < n_times * cluster; ++k) var.push_back(variances[static_cast<std::size_t>(l)]);
        Eigen::MatrixXd cov = compound_symmetry(var, diseased ? rho_x : rho_y);
        if (Eigen::LLT<Eigen::MatrixXd>(cov).info() != Eigen::Success)
            throw InputError("scenario covariance is not positive definite");
        return cov;
    }

    Eigen::VectorXd mean(bool diseased, int cluster) const {
        const auto& mu = diseased ? mu_x : mu_y;
        Eigen::VectorXd m(n_markers * n_times * cluster);
        Eigen::Index idx = 0;
        for (int l = 0; l < n_markers; ++l)
            for (int k = 0; k < n_times * cluster; ++k) m[idx++] = mu[static_cast<std::size_t>(l)];
        return m;
    }
};

// Study presets. `measure` selects AUC or the (0, 0.6) partial AUC.
namespace scenarios {

inline WeightMeasure pauc_06() { return WeightMeasure::partial_auc(0.0, 0.6); }

inline ScenarioSpec multi_reader_base(Family family, double rho, int n, WeightMeasure measure) {
    ScenarioSpec s;
    s.family = family;
    s.design = StudyDesign::multi_reader(3);
    s.n_markers = 6;
    s.n_times = 1;
    s.mu_y.assign(6, 0.0);
    s.rho_x = s.rho_y = rho;
    s.n_diseased = s.n_nondiseased = n;
    s.measure = std::move(measure);
    return s;
}

// Null-difference coverage design (bias, RMSE, CI coverage of equal-weight difference).
inline ScenarioSpec table1(Family family, double rho, int n, WeightMeasure measure) {
    auto s = multi_reader_base(family, rho, n, std::move(measure));
    s.name = "table1";
    s.kind = StudyKind::Coverage;
    s.mu_x.assign(6, 1.0);
    s.variances = {1.0, 1.5, 2.0, 1.0, 1.5, 2.0};
    s.methods = {WeightMethod::Equal};
    return s;
}

// Empirical vs parametric vs logistic-score AUC difference.
inline ScenarioSpec table2(Family family, double rho, int n) {
    auto s = multi_reader_base(family, rho, n, WeightMeasure::full_auc());
    s.name = "table2";
    s.kind = StudyKind::Baseline;
    s.mu_x = {1.0, 1.0, 1.0, 1.5, 2.0, 2.5};
    s.variances = {1.0, 1.5, 2.0, 1.0, 1.5, 2.0};
    s.methods = {WeightMethod::Equal};
    return s;
}

// Equal vs optimal weight power.
inline ScenarioSpec table3(double rho, int n, WeightMeasure measure) {
    auto s = multi_reader_base(Family::Normal, rho, n, std::move(measure));
    s.name = "table3";
    s.kind = StudyKind::Power;
    s.mu_x = {2.0, 1.0, 1.0, 1.0, 1.0, 1.0};
    s.variances = {1.0, 1.5, 2.0, 2.0, 3.0, 2.0};
    s.methods = {WeightMethod::Equal, WeightMethod::Optimal};
    return s;
}

// Longitudinal clustered design: L = 2, K = 3, mixed cluster sizes.
inline ScenarioSpec table4(Family family, int n, WeightMeasure measure) {
    ScenarioSpec s;
    s.name = "table4";
    s.kind = StudyKind::Coverage;
    s.family = family;
    s.design = StudyDesign::longitudinal(3);
    s.n_markers = 2;
    s.n_times = 3;
    s.mu_x = {2.0, 1.0};
    s.mu_y = {0.0, 0.0};
    s.variances = {1.0, 1.0};
    s.rho_x = 0.4;
    s.rho_y = 0.3;
    s.cluster_x = {2, 4};
    s.cluster_y = {5, 3};
    s.n_diseased = s.n_nondiseased = n;
    s.measure = std::move(measure);
    s.methods = {WeightMethod::Equal};
    return s;
}

// Identical modalities in every reader: the difference is zero under any weights.
inline ScenarioSpec null_modalities(double rho, int n, WeightMeasure measure) {
    auto s = multi_reader_base(Family::Normal, rho, n, std::move(measure));
    s.name = "null";
    s.kind = StudyKind::Coverage;
    s.mu_x.assign(6, 1.0);
    s.variances = {1.0, 1.5, 2.0, 1.0, 1.5, 2.0};
    s.methods = {WeightMethod::Equal, WeightMethod::Optimal};
    return s;
}

}  // namespace scenarios

// Generating models for one scenario, with Cholesky factors cached per cluster size.
class ScenarioGenerator {
public:
    explicit ScenarioGenerator(const ScenarioSpec& spec) : spec_(spec) {
        spec.check();
        for (bool d : {true, false}) {
            const auto [a, b] = d ? spec.cluster_x : spec.cluster_y;
            for (int c : {a, b})
                if (!samplers_.count({d, c}))
                    samplers_.emplace(std::pair{d, c}, MvnSampler(spec.mean(d, c), spec.covariance(d, c)));
        }
    }

    template <class Rng>
    MarkerDataset operator()(Rng& rng) const {
        MarkerDataset data;
        data.n_markers = spec_.n_markers;
        data.n_times = spec_.n_times;
        fill(data.diseased, true, spec_.n_diseased, spec_.cluster_x, "d", rng);
        fill(data.nondiseased, false, spec_.n_nondiseased, spec_.cluster_y, "nd", rng);
        return data;
    }

private:
    template <class Rng>
    void fill(std::vector<SubjectRecord>& out, bool diseased, int count, std::pair<int, int> halves,
              const char* prefix, Rng& rng) const {
        out.reserve(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) {
            const int c = i < count / 2 ? halves.first : halves.second;
            Eigen::VectorXd v = samplers_.at({diseased, c})(rng);
            if (spec_.family == Family::LogNormal) v = v.array().exp();
            SubjectRecord rec;
            rec.subject_id = prefix + std::to_string(i + 1);
            Eigen::Index idx = 0;
            for (int l = 1; l <= spec_.n_markers; ++l)
                for (int k = 1; k <= spec_.n_times; ++k) {
                    auto& cell = rec.measurements[{l, k}];
                    for (int p = 0; p < c; ++p) cell.push_back(v[idx++]);
                }
            out.push_back(std::move(rec));
        }
    }

    ScenarioSpec spec_;
    std::map<std::pair<bool, int>, MvnSampler> samplers_;
};

// True wAUC of every design entry, from the marginal model.
inline std::vector<double> true_wauc_vector(const ScenarioSpec& spec) {
    std::vector<double> out;
    for (const auto& s : spec.design.strata()) {
        const auto l = static_cast<std::size_t>(s.marker - 1);
        const double sd = std::sqrt(spec.variances[l]);
        out.push_back(true_wauc(spec.family, spec.mu_x[l], sd, spec.mu_y[l], sd, spec.measure));
    }
    return out;
}

// ---- baselines ---------------------------------------------------------------------

struct ParametricAuc {
    double auc = 0.5;
    double variance = 0.0;
};

// Binormal plug-in Phi((xbar - ybar) / sqrt(sx^2 + sy^2)); delta-method variance
// from normal-theory moments of the sample means and variances.
inline ParametricAuc baseline_parametric_auc(std::span<const double> x, std::span<const double> y) {
    if (x.size() < 2 || y.size() < 2) throw InputError("parametric AUC needs two values per group");
    auto moments = [](std::span<const double> v) {
        const double n = static_cast<double>(v.size());
        double mean = 0.0;
        for (double a : v) mean += a;
        mean /= n;
        double ss = 0.0;
        for (double a : v) ss += (a - mean) * (a - mean);
        return std::pair{mean, ss / (n - 1.0)};
    };
    const auto [mx, vx] = moments(x);
    const auto [my, vy] = moments(y);
    const double s2 = vx + vy;
    if (!(s2 > 0.0)) throw NumericalError("zero pooled variance");
    const double m = static_cast<double>(x.size()), n = static_cast<double>(y.size());
    const double diff = mx - my;
    const double d = diff / std::sqrt(s2);
    const double var_d = (vx / m + vy / n) / s2 +
                         diff * diff / (4.0 * s2 * s2 * s2) * (2.0 * vx * vx / (m - 1.0) + 2.0 * vy * vy / (n - 1.0));
    const double dens = normal::pdf(d);
    return {normal::cdf(d), dens * dens * var_d};
}

struct SemiparametricAuc {
    double auc = 0.5;
    double beta0 = 0.0;
    double beta1 = 0.0;
    bool converged = true;
};

// Logistic regression of status on value (Newton-Raphson), then the empirical
// AUC of the fitted linear scores.
inline SemiparametricAuc baseline_semiparametric_auc(std::span<const double> x, std::span<const double> y) {
    if (x.empty() || y.empty()) throw InputError("semiparametric AUC needs non-empty samples");
    std::vector<double> z(x.begin(), x.end());
    z.insert(z.end(), y.begin(), y.end());
    const double n = static_cast<double>(z.size());
    double mean = 0.0;
    for (double v : z) mean += v;
    mean /= n;
    double sd = 0.0;
    for (double v : z) sd += (v - mean) * (v - mean);
    sd = std::sqrt(sd / n);

    SemiparametricAuc out;
    const EmpiricalSurvival ys(y);
    const double xmin = *std::min_element(x.begin(), x.end()), xmax = *std::max_element(x.begin(), x.end());
    const double ymin = *std::min_element(y.begin(), y.end()), ymax = *std::max_element(y.begin(), y.end());
    if (!(sd > 0.0) || xmin > ymax || xmax < ymin) {
        out.auc = auc(x, ys);
        out.converged = false;
        return out;
    }

    // fit on the standardized scale
    Eigen::Vector2d beta = Eigen::Vector2d::Zero();
    bool converged = false;
    for (int iter = 0; iter < 50; ++iter) {
        Eigen::Vector2d score = Eigen::Vector2d::Zero();
        Eigen::Matrix2d info = Eigen::Matrix2d::Zero();
        for (std::size_t i = 0; i < z.size(); ++i) {
            const double t = (z[i] - mean) / sd;
            const double p = 1.0 / (1.0 + std::exp(-(beta[0] + beta[1] * t)));
            const double status = i < x.size() ? 1.0 : 0.0;
            const Eigen::Vector2d row(1.0, t);
            score += (status - p) * row;
            info += p * (1.0 - p) * row * row.transpose();
        }
        if (score.norm() < 1e-10) {
            converged = true;
            break;
        }
        beta += info.ldlt().solve(score);
        if (!beta.allFinite()) break;
    }
    if (!converged) {
        out.auc = auc(x, ys);
        out.converged = false;
        return out;
    }
    out.beta1 = beta[1] / sd;
    out.beta0 = beta[0] - beta[1] * mean / sd;

    std::vector<double> sx, sy;
    for (double v : x) sx.push_back(out.beta0 + out.beta1 * v);
    for (double v : y) sy.push_back(out.beta0 + out.beta1 * v);
    out.auc = auc(sx, EmpiricalSurvival(sy));
    return out;
}

// ---- study drivers -----------------------------------------------------------------

struct CellResult {
    std::string label;
    double true_delta = 0.0;
    double mean_estimate = 0.0;
    double bias = 0.0;
    double bias_percent = 0.0;  // 100 * bias
    double rmse = 0.0;
    double coverage = 0.0;
    double power = 0.0;
    double mc_se_coverage = 0.0;
    double mc_se_power = 0.0;
    double mean_variance = 0.0;  // average analytic variance
    double mc_variance = 0.0;    // empirical variance of the estimates
    std::size_t n_ok = 0;
    std::size_t n_failed = 0;
    std::size_t n_fallback = 0;  // optimal weights replaced by equal weights
};

struct StudyReport {
    ScenarioSpec spec;
    std::vector<CellResult> cells;
    std::vector<std::string> failures;  // first few failure messages
    std::size_t slope_mismatches = 0;   // baseline study: positive-slope logistic AUC != empirical
    std::size_t slope_positive = 0;
};

namespace detail {

struct RepOutcome {
    bool ok = false;
    std::string error;
    double estimate = 0.0;
    double variance = 0.0;
    double truth = 0.0;
    bool covered = false;
    bool rejected = false;
    bool fallback = false;
};

inline CellResult summarize(std::string label, const std::vector<RepOutcome>& reps) {
    CellResult c;
    c.label = std::move(label);
    double sum_est = 0.0, sum_err = 0.0, sum_sq = 0.0, sum_var = 0.0, sum_truth = 0.0;
    std::size_t covered = 0, rejected = 0;
    for (const auto& r : reps) {
        if (!r.ok) {
            ++c.n_failed;
            continue;
        }
        ++c.n_ok;
        sum_est += r.estimate;
        sum_truth += r.truth;
        sum_err += r.estimate - r.truth;
        sum_sq += (r.estimate - r.truth) * (r.estimate - r.truth);
        sum_var += r.variance;
        covered += r.covered;
        rejected += r.rejected;
        c.n_fallback += r.fallback;
    }
    if (c.n_ok == 0) return c;
    const double n = static_cast<double>(c.n_ok);
    c.mean_estimate = sum_est / n;
    c.true_delta = sum_truth / n;
    c.bias = sum_err / n;
    c.bias_percent = 100.0 * c.bias;
    c.rmse = std::sqrt(sum_sq / n);
    c.mean_variance = sum_var / n;
    c.coverage = static_cast<double>(covered) / n;
    c.power = static_cast<double>(rejected) / n;
    c.mc_se_coverage = std::sqrt(c.coverage * (1.0 - c.coverage) / n);
    c.mc_se_power = std::sqrt(c.power * (1.0 - c.power) / n);
    double ss = 0.0;
    for (const auto& r : reps)
        if (r.ok) ss += (r.estimate - c.mean_estimate) * (r.estimate - c.mean_estimate);
    c.mc_variance = n > 1 ? ss / (n - 1.0) : 0.0;
    return c;
}

}  // namespace detail

// Runs every replicate of a coverage or power scenario and aggregates one cell
// per weight method. Replicate r uses stream (seed, r), so the report is
// independent of the thread count.
inline StudyReport run_study(const ScenarioSpec& spec) {
    if (spec.kind == StudyKind::Baseline) throw InputError("use run_baseline_study for baseline scenarios");
    const ScenarioGenerator gen(spec);
    const auto truth = true_wauc_vector(spec);
    const auto reps = static_cast<std::size_t>(spec.n_reps);
    const std::size_t methods = spec.methods.size();
    std::vector<std::vector<detail::RepOutcome>> outcomes(methods, std::vector<detail::RepOutcome>(reps));

    parallel_for(reps, spec.threads, [&](std::size_t r) {
        auto rng = stream_rng(spec.seed, r);
        const MarkerDataset data = gen(rng);
        std::optional<ComparisonAnalysis> analysis;
        std::string error;
        try {
            const auto strata = design_samples(data, spec.design);
            analysis = ComparisonAnalysis{estimate_wauc(strata, spec.design, spec.measure),
                                          sigma_matrix(strata, spec.design.labels(), spec.measure), {}};
        } catch (const std::exception& e) {
            error = e.what();
        }
        for (std::size_t m = 0; m < methods; ++m) {
            auto& out = outcomes[m][r];
            if (!analysis) {
                out.error = error;
                continue;
            }
            try {
                CompareOptions opt;
                opt.method = spec.methods[m];
                opt.alpha = spec.alpha;
                const auto res = compare_paired(analysis->wauc, analysis->covariance, opt);
                out.ok = true;
                out.estimate = res.estimate;
                out.variance = res.variance;
                out.truth = weighted_difference(truth, res.weights);
                out.covered = res.ci_lo <= out.truth && out.truth <= res.ci_hi;
                out.rejected = res.p_two_sided < spec.alpha;
                out.fallback = res.weights.fallback;
            } catch (const std::exception& e) {
                out.error = e.what();
            }
        }
    });

    StudyReport report{spec, {}, {}, 0, 0};
    for (std::size_t m = 0; m < methods; ++m) {
        report.cells.push_back(detail::summarize(to_string(spec.methods[m]), outcomes[m]));
        for (const auto& o : outcomes[m])
            if (!o.ok && report.failures.size() < 10) report.failures.push_back(o.error);
    }
    return report;
}

inline StudyReport run_coverage_study(const ScenarioSpec& spec) { return run_study(spec); }

inline StudyReport run_power_study(ScenarioSpec spec) {
    spec.methods = {WeightMethod::Equal, WeightMethod::Optimal};
    return run_study(spec);
}

// Equal-weight paired AUC difference by three estimators: empirical (proposed),
// logistic-score semiparametric, and binormal parametric.
inline StudyReport run_baseline_study(const ScenarioSpec& spec) {
    if (spec.design.kind() != StudyDesign::Kind::MultiReader)
        throw InputError("baseline study needs a multi-reader design");
    const ScenarioGenerator gen(spec);
    const auto truth = true_wauc_vector(spec);
    const auto w = equal_weights(static_cast<std::size_t>(spec.design.pair_count()));
    const double true_delta = weighted_difference(truth, w);
    const auto reps = static_cast<std::size_t>(spec.n_reps);
    std::vector<std::vector<detail::RepOutcome>> outcomes(3, std::vector<detail::RepOutcome>(reps));
    std::vector<std::size_t> positive(reps, 0), mismatched(reps, 0);

    parallel_for(reps, spec.threads, [&](std::size_t r) {
        auto rng = stream_rng(spec.seed, r);
        const MarkerDataset data = gen(rng);
        try {
            std::vector<double> emp, semi, par;
            for (const auto& s : spec.design.strata()) {
                const auto st = StratumSamples::from(data, s);
                const double e = auc(st.diseased.values, st.y);
                const auto sp = baseline_semiparametric_auc(st.diseased.values, st.nondiseased.values);
                if (sp.converged && sp.beta1 > 0.0) {
                    ++positive[r];
                    if (sp.auc != e) ++mismatched[r];
                }
                emp.push_back(e);
                semi.push_back(sp.auc);
                par.push_back(baseline_parametric_auc(st.diseased.values, st.nondiseased.values).auc);
            }
            const std::vector<double>* sets[3] = {&emp, &semi, &par};
            for (int k = 0; k < 3; ++k) {
                auto& o = outcomes[static_cast<std::size_t>(k)][r];
                o.ok = true;
                o.estimate = weighted_difference(*sets[k], w);
                o.truth = true_delta;
            }
        } catch (const std::exception& e) {
            for (auto& o : outcomes) o[r].error = e.what();
        }
    });

    StudyReport report{spec, {}, {}, 0, 0};
    const char* labels[3] = {"empirical", "semiparametric", "parametric"};
    for (int k = 0; k < 3; ++k) report.cells.push_back(detail::summarize(labels[k], outcomes[static_cast<std::size_t>(k)]));
    for (std::size_t r = 0; r < reps; ++r) {
        report.slope_positive += positive[r];
        report.slope_mismatches += mismatched[r];
    }
    for (const auto& o : outcomes[0])
        if (!o.ok && report.failures.size() < 10) report.failures.push_back(o.error);
    return report;
}

inline StudyReport run_scenario(const ScenarioSpec& spec) {
    switch (spec.kind) {
        case StudyKind::Coverage: return run_coverage_study(spec);
        case StudyKind::Power: return run_power_study(spec);
        case StudyKind::Baseline: return run_baseline_study(spec);
    }
    return {};
}

}  // namespace cwauc::sim

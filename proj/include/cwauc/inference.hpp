#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cwauc/contrast.hpp"
#include "cwauc/covariance.hpp"
#include "cwauc/data.hpp"
#include "cwauc/design.hpp"
#include "cwauc/errors.hpp"
#include "cwauc/estimators.hpp"
#include "cwauc/normal.hpp"
#include "cwauc/weight_measure.hpp"

namespace cwauc {

// Positive combination weights over readers or time points. Stored as given;
// statistics use the canonical form w / max(w), so proportional vectors give
// bit-identical results.
struct WeightVector {
    std::vector<double> values;
    bool fallback = false;  // optimal weights were non-positive and equal weights were used

    double sum() const { return std::accumulate(values.begin(), values.end(), 0.0); }

    std::vector<double> canonical() const {
        std::vector<double> out(values);
        const double top = *std::max_element(out.begin(), out.end());
        for (auto& v : out) v /= top;
        return out;
    }

    std::vector<double> normalized() const {
        std::vector<double> out(values);
        const double s = sum();
        for (auto& v : out) v /= s;
        return out;
    }

    static WeightVector custom(std::vector<double> w) {
        if (w.empty()) throw InputError("weight vector is empty");
        for (double v : w)
            if (!(v > 0.0) || !std::isfinite(v)) throw InputError("weights must be positive and finite");
        return {std::move(w), false};
    }
};

enum class WeightMethod { Equal, Optimal, Custom };

inline const char* to_string(WeightMethod m) {
    switch (m) {
        case WeightMethod::Equal: return "equal";
        case WeightMethod::Optimal: return "optimal";
        case WeightMethod::Custom: return "custom";
    }
    return "";
}

inline WeightVector equal_weights(std::size_t n) {
    if (n < 1) throw InputError("equal weights need n >= 1");
    return {std::vector<double>(n, 1.0 / static_cast<double>(n)), false};
}

// Solves (cov_diff + ridge I) w = 1. With no ridge given, 1e-8 * trace / R is
// used; an explicit ridge of 0 turns a singular system into an error. A
// solution with any non-positive entry is replaced by equal weights.
inline WeightVector optimal_weights(const Eigen::MatrixXd& cov_diff, std::optional<double> ridge = std::nullopt) {
    const auto R = cov_diff.rows();
    if (R < 1 || cov_diff.cols() != R) throw InputError("covariance of differences must be square");
    const double scale = std::max(1e-300, cov_diff.cwiseAbs().maxCoeff());
    if ((cov_diff - cov_diff.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw InputError("covariance of differences must be symmetric");
    const double lambda = ridge.value_or(1e-8 * cov_diff.trace() / static_cast<double>(R));
    if (lambda < 0.0) throw InputError("ridge must be non-negative");

    const Eigen::MatrixXd a = cov_diff + lambda * Eigen::MatrixXd::Identity(R, R);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible())
        throw NumericalError("covariance of differences is singular; supply a positive ridge");
    const Eigen::VectorXd w = lu.solve(Eigen::VectorXd::Ones(R));

    WeightVector out{std::vector<double>(w.data(), w.data() + R), false};
    const bool positive = std::all_of(out.values.begin(), out.values.end(),
                                      [](double v) { return v > 0.0 && std::isfinite(v); });
    if (!positive) {
        out = equal_weights(static_cast<std::size_t>(R));
        out.fallback = true;
    }
    return out;
}

// (sum w)^-1 sum_r w_r (omega_r - omega_{R+r}) over a paired layout of length 2R.
inline double weighted_difference(std::span<const double> omega, const WeightVector& w) {
    const std::size_t R = w.values.size();
    if (R == 0 || omega.size() != 2 * R)
        throw InputError("paired layout needs 2 x " + std::to_string(R) + " entries, got " +
                         std::to_string(omega.size()));
    const auto c = w.canonical();
    double total = 0.0, s = 0.0;
    for (std::size_t r = 0; r < R; ++r) {
        total += c[r] * (omega[r] - omega[R + r]);
        s += c[r];
    }
    return total / s;
}

inline double delta_m(const WaucVector& wauc, const WeightVector& w) {
    if (wauc.design.kind() != StudyDesign::Kind::MultiReader)
        throw InputError("delta_m requires a multi-reader multi-test design");
    return weighted_difference(wauc.values, w);
}

inline double delta_longitudinal(const WaucVector& grid, const WeightVector& w) {
    if (grid.design.kind() != StudyDesign::Kind::Longitudinal)
        throw InputError("longitudinal difference requires a longitudinal design");
    return weighted_difference(grid.values, w);
}

// Coefficients c with c'omega equal to the weighted paired difference.
inline std::vector<double> paired_coefficients(const WeightVector& w) {
    const std::size_t R = w.values.size();
    const auto k = w.canonical();
    const double s = std::accumulate(k.begin(), k.end(), 0.0);
    std::vector<double> c(2 * R);
    for (std::size_t r = 0; r < R; ++r) {
        c[r] = k[r] / s;
        c[R + r] = -k[r] / s;
    }
    return c;
}

inline double delta_h(std::span<const double> omega, const ContrastFunction& h) { return h(omega); }
inline double delta_h(const WaucVector& wauc, const ContrastFunction& h) { return h(wauc.values); }

struct VarianceDecomposition {
    double total = 0.0;
    double diseased = 0.0;
    double nondiseased = 0.0;
};

// Delta method: grad h' Sigma grad h at the estimate, reported per group.
inline VarianceDecomposition variance_delta(const CovarianceEstimate& cov, const ContrastFunction& h,
                                            std::span<const double> at) {
    if (static_cast<Eigen::Index>(at.size()) != cov.sigma.rows())
        throw InputError("covariance dimension does not match the wAUC vector");
    const auto g = h.gradient(at);
    const Eigen::Map<const Eigen::VectorXd> grad(g.data(), static_cast<Eigen::Index>(g.size()));
    auto quad = [&](const Eigen::MatrixXd& m) {
        const double v = grad.dot(m * grad);
        if (v < -1e-12) throw NumericalError("negative delta-method variance: covariance is not PSD");
        return std::max(v, 0.0);
    };
    VarianceDecomposition out;
    out.diseased = quad(cov.sigma1);
    out.nondiseased = quad(cov.sigma2);
    out.total = quad(cov.sigma);
    return out;
}

inline VarianceDecomposition variance_delta(const CovarianceEstimate& cov, const ContrastFunction& h,
                                            const WaucVector& at) {
    return variance_delta(cov, h, std::span<const double>(at.values));
}

struct ComparisonResult {
    double estimate = 0.0;
    double variance = 0.0;
    double z = 0.0;
    double p_two_sided = 1.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double alpha = 0.05;
    WeightVector weights;
    WeightMethod method = WeightMethod::Equal;
    VarianceDecomposition decomposition;
};

inline ComparisonResult z_test(double estimate, double variance, double alpha = 0.05) {
    if (!(variance > 0.0) || !std::isfinite(variance)) throw NumericalError("z-test needs a positive variance");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
    ComparisonResult r;
    r.estimate = estimate;
    r.variance = variance;
    r.alpha = alpha;
    const double se = std::sqrt(variance);
    r.z = estimate / se;
    r.p_two_sided = std::min(1.0, 2.0 * normal::sf(std::abs(r.z)));
    const double crit = normal::quantile(1.0 - alpha / 2.0);
    r.ci_lo = estimate - crit * se;
    r.ci_hi = estimate + crit * se;
    r.decomposition.total = variance;
    return r;
}

struct CompareOptions {
    WeightMethod method = WeightMethod::Equal;
    std::vector<double> custom_weights;
    double alpha = 0.05;
    std::optional<double> ridge;
    CovarianceOptions covariance;
};

// Everything a paired comparison produces, kept for reporting.
struct ComparisonAnalysis {
    WaucVector wauc;
    CovarianceEstimate covariance;
    ComparisonResult result;
};

// Weighted paired comparison given an estimated wAUC vector and its covariance.
// Optimal weights are plugged in from the same covariance.
inline ComparisonResult compare_paired(const WaucVector& wauc, const CovarianceEstimate& cov,
                                       const CompareOptions& opt) {
    const int R = wauc.design.pair_count();
    if (R < 1) throw InputError("comparison needs a paired design (multi-reader or longitudinal)");
    WeightVector w;
    switch (opt.method) {
        case WeightMethod::Equal: w = equal_weights(static_cast<std::size_t>(R)); break;
        case WeightMethod::Optimal:
            w = optimal_weights(contrast_covariance(cov, modality_contrast(R)), opt.ridge);
            break;
        case WeightMethod::Custom:
            w = WeightVector::custom(opt.custom_weights);
            if (w.values.size() != static_cast<std::size_t>(R))
                throw InputError("custom weights need " + std::to_string(R) + " entries");
            break;
    }
    const auto h = ContrastFunction::linear(paired_coefficients(w));
    const double estimate = weighted_difference(wauc.values, w);
    const auto var = variance_delta(cov, h, wauc);
    auto result = z_test(estimate, var.total, opt.alpha);
    result.weights = w;
    result.method = opt.method;
    result.decomposition = var;
    return result;
}

inline ComparisonAnalysis analyze_comparison(const MarkerDataset& data, const StudyDesign& design,
                                             const WeightMeasure& w, const CompareOptions& opt = {}) {
    const auto strata = design_samples(data, design);
    ComparisonAnalysis out{estimate_wauc(strata, design, w, opt.covariance.ties),
                           sigma_matrix(strata, design.labels(), w, opt.covariance),
                           {}};
    out.result = compare_paired(out.wauc, out.covariance, opt);
    return out;
}

inline ComparisonResult compare_modalities(const MarkerDataset& data, const StudyDesign& design,
                                           const WeightMeasure& w, WeightMethod method, double alpha = 0.05) {
    CompareOptions opt;
    opt.method = method;
    opt.alpha = alpha;
    return analyze_comparison(data, design, w, opt).result;
}

}  // namespace cwauc

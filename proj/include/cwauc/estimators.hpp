#pragma once

// Nonparametric wAUC point estimators built on pooled empirical survival
// functions. All estimators use strict indicators I(X > Y) unless a caller opts
// into mid-rank tie handling.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cwauc/data.hpp"
#include "cwauc/design.hpp"
#include "cwauc/errors.hpp"
#include "cwauc/weight_measure.hpp"

namespace cwauc {

enum class TieRule { Strict, MidRank };

namespace detail {

// ceil() that absorbs representation error, so (1 - 0.6) * 100 ranks as 40.
inline long long ceil_rank(double x) {
    return static_cast<long long>(std::ceil(x - 1e-9 * std::max(1.0, std::abs(x))));
}

}  // namespace detail

// Right-continuous empirical survival function S(x) = #{v > x} / n.
class EmpiricalSurvival {
public:
    EmpiricalSurvival() = default;
    explicit EmpiricalSurvival(std::span<const double> values) : sorted_(values.begin(), values.end()) {
        std::sort(sorted_.begin(), sorted_.end());
    }

    std::size_t size() const { return sorted_.size(); }
    bool empty() const { return sorted_.empty(); }
    const std::vector<double>& sorted_values() const { return sorted_; }

    double operator()(double x) const { return static_cast<double>(count_above(x)) / size(); }

    std::size_t count_above(double x) const {
        return sorted_.end() - std::upper_bound(sorted_.begin(), sorted_.end(), x);
    }
    std::size_t count_below(double x) const {
        return std::lower_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin();
    }
    std::size_t count_equal(double x) const {
        auto [lo, hi] = std::equal_range(sorted_.begin(), sorted_.end(), x);
        return hi - lo;
    }

    // 1-based order-statistic index ceil((1 - u) n), clamped to [1, n].
    std::size_t inverse_rank(double u) const {
        if (empty()) throw InputError("empty stratum");
        if (!(u > 0.0 && u <= 1.0)) throw InputError("inverse survival requires u in (0, 1]");
        const long long n = static_cast<long long>(size());
        return static_cast<std::size_t>(std::clamp(detail::ceil_rank((1.0 - u) * n), 1LL, n));
    }

    // Threshold whose exceedance rate is (approximately) u.
    double inverse(double u) const { return sorted_[inverse_rank(u) - 1]; }

private:
    std::vector<double> sorted_;
};

inline double survival(const EmpiricalSurvival& s, double x) {
    if (s.empty()) throw InputError("empty stratum");
    return s(x);
}

inline double inverse_survival(const EmpiricalSurvival& s, double u) { return s.inverse(u); }

// ---- sample-level estimators -------------------------------------------------

inline double auc(std::span<const double> x, const EmpiricalSurvival& y, TieRule ties = TieRule::Strict) {
    if (x.empty() || y.empty()) throw InputError("empty stratum");
    double wins = 0.0;
    for (double v : x) {
        wins += static_cast<double>(y.count_below(v));
        if (ties == TieRule::MidRank) wins += 0.5 * static_cast<double>(y.count_equal(v));
    }
    return wins / (static_cast<double>(x.size()) * static_cast<double>(y.size()));
}

// Unnormalized partial AUC over FPR (u1, u2): Y retained by rank window
// ((1-u2) n, (1-u1) n] under the ceiling convention, denominator m * n.
inline double pauc(std::span<const double> x, const EmpiricalSurvival& y, double u1, double u2,
                   TieRule ties = TieRule::Strict) {
    if (!(u1 >= 0.0 && u1 < u2 && u2 <= 1.0)) throw InputError("partial AUC requires 0 <= u1 < u2 <= 1");
    if (x.empty() || y.empty()) throw InputError("empty stratum");
    const long long n = static_cast<long long>(y.size());
    const auto lo = static_cast<std::size_t>(std::clamp(detail::ceil_rank((1.0 - u2) * n), 0LL, n));
    const auto hi = static_cast<std::size_t>(std::clamp(detail::ceil_rank((1.0 - u1) * n), 0LL, n));
    const auto& ys = y.sorted_values();
    const auto first = ys.begin() + lo;
    const auto last = ys.begin() + hi;
    double wins = 0.0;
    for (double v : x) {
        const auto below = std::lower_bound(first, last, v);
        wins += static_cast<double>(below - first);
        if (ties == TieRule::MidRank)
            wins += 0.5 * static_cast<double>(std::upper_bound(below, last, v) - below);
    }
    return wins / (static_cast<double>(x.size()) * static_cast<double>(n));
}

// Fraction of X strictly above the (1 - u0) order statistic of Y.
inline double sensitivity_at_fpr(std::span<const double> x, const EmpiricalSurvival& y, double u0) {
    if (!(u0 > 0.0 && u0 < 1.0)) throw InputError("sensitivity requires 0 < u0 < 1");
    if (x.empty() || y.empty()) throw InputError("empty stratum");
    const double threshold = y.inverse(u0);
    std::size_t above = 0;
    for (double v : x) above += v > threshold;
    return static_cast<double>(above) / x.size();
}

inline double empirical_roc(const EmpiricalSurvival& x, const EmpiricalSurvival& y, double u) {
    if (!(u > 0.0 && u < 1.0)) throw InputError("ROC evaluation requires u in (0, 1)");
    if (x.empty() || y.empty()) throw InputError("empty stratum");
    return x(y.inverse(u));
}

// Both groups of one stratum, ready for repeated estimation.
struct StratumSamples {
    Stratum stratum;
    ClusteredSample diseased;
    ClusteredSample nondiseased;
    EmpiricalSurvival x;  // pooled diseased values
    EmpiricalSurvival y;  // pooled non-diseased values

    static StratumSamples from(const MarkerDataset& data, Stratum s) {
        StratumSamples out{s, cluster_sample(data, Group::Diseased, s),
                           cluster_sample(data, Group::NonDiseased, s), {}, {}};
        if (out.diseased.size() == 0 || out.nondiseased.size() == 0)
            throw InputError("empty stratum " + s.label());
        out.x = EmpiricalSurvival(out.diseased.values);
        out.y = EmpiricalSurvival(out.nondiseased.values);
        return out;
    }
};

inline double wauc(const StratumSamples& s, const WeightMeasure& w, TieRule ties = TieRule::Strict) {
    const auto& xs = s.diseased.values;
    return std::visit(
        [&](const auto& k) -> double {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, FullAuc>) {
                return auc(xs, s.y, ties);
            } else if constexpr (std::is_same_v<T, PartialAuc>) {
                const double v = pauc(xs, s.y, k.u1, k.u2, ties);
                return k.normalized ? v / (k.u2 - k.u1) : v;
            } else if constexpr (std::is_same_v<T, PointMass>) {
                return sensitivity_at_fpr(xs, s.y, k.u0);
            } else {
                double total = 0.0;
                for (const auto& a : k.atoms) total += a.mass * empirical_roc(s.x, s.y, a.u);
                return total;
            }
        },
        w.kind());
}

// ---- dataset-level estimators -------------------------------------------------

inline double auc(const MarkerDataset& data, int marker, TieRule ties = TieRule::Strict) {
    auto s = StratumSamples::from(data, Stratum::pooled(marker));
    return auc(s.diseased.values, s.y, ties);
}

inline double pauc(const MarkerDataset& data, int marker, double u1, double u2,
                   TieRule ties = TieRule::Strict) {
    auto s = StratumSamples::from(data, Stratum::pooled(marker));
    return pauc(s.diseased.values, s.y, u1, u2, ties);
}

inline double sensitivity_at_fpr(const MarkerDataset& data, int marker, double u0) {
    auto s = StratumSamples::from(data, Stratum::pooled(marker));
    return sensitivity_at_fpr(s.diseased.values, s.y, u0);
}

inline double wauc(const MarkerDataset& data, int marker, const WeightMeasure& w,
                   TieRule ties = TieRule::Strict) {
    return wauc(StratumSamples::from(data, Stratum::pooled(marker)), w, ties);
}

inline double per_time_wauc(const MarkerDataset& data, int marker, int time, const WeightMeasure& w,
                            TieRule ties = TieRule::Strict) {
    if (time < 1 || time > data.n_times) throw InputError("invalid time index " + std::to_string(time));
    return wauc(StratumSamples::from(data, Stratum::at_time(marker, time)), w, ties);
}

inline double empirical_roc(const MarkerDataset& data, int marker, double u, int time = 0) {
    auto s = StratumSamples::from(data, Stratum{marker, time});
    return empirical_roc(s.x, s.y, u);
}

// Estimated wAUC vector laid out by a study design.
struct WaucVector {
    std::vector<double> values;
    WeightMeasure measure;
    StudyDesign design = StudyDesign::panel(1);
    std::vector<std::string> labels;
};

inline std::vector<StratumSamples> design_samples(const MarkerDataset& data, const StudyDesign& design) {
    design.check(data);
    std::vector<StratumSamples> out;
    for (const auto& s : design.strata()) out.push_back(StratumSamples::from(data, s));
    return out;
}

inline WaucVector estimate_wauc(const std::vector<StratumSamples>& strata, const StudyDesign& design,
                                const WeightMeasure& w, TieRule ties = TieRule::Strict) {
    WaucVector v{{}, w, design, design.labels()};
    for (const auto& s : strata) v.values.push_back(wauc(s, w, ties));
    return v;
}

inline WaucVector estimate_wauc(const MarkerDataset& data, const StudyDesign& design, const WeightMeasure& w,
                                TieRule ties = TieRule::Strict) {
    return estimate_wauc(design_samples(data, design), design, w, ties);
}

}  // namespace cwauc

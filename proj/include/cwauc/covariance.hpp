#pragma once

// Finite-sample covariance of the wAUC vector, split into a diseased and a
// non-diseased contribution. Every matrix returned here is on the Var(Omega-hat)
// scale; no further division by M or J is needed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>

#include "cwauc/data.hpp"
#include "cwauc/design.hpp"
#include "cwauc/errors.hpp"
#include "cwauc/estimators.hpp"
#include "cwauc/normal.hpp"
#include "cwauc/parallel.hpp"
#include "cwauc/weight_measure.hpp"

namespace cwauc {

struct CovarianceEstimate {
    Eigen::MatrixXd sigma;
    Eigen::MatrixXd sigma1;  // diseased-subject contribution
    Eigen::MatrixXd sigma2;  // non-diseased-subject contribution
    std::vector<std::string> labels;
    bool psd_repaired = false;
    std::string method;
};

// ---- joint survival -----------------------------------------------------------

// Proportion of within-subject cross pairs (value in s1 > x1, value in s2 > x2),
// pooled over subjects; denominator sum_i |cluster_i(s1)| * |cluster_i(s2)|.
inline double joint_survival(const ClusteredSample& a, const ClusteredSample& b, double x1, double x2) {
    if (a.subjects() != b.subjects()) throw InputError("joint survival needs the same subjects");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.subjects(); ++i) {
        const auto ca = a.cluster(i);
        const auto cb = b.cluster(i);
        const auto above_a = std::count_if(ca.begin(), ca.end(), [&](double v) { return v > x1; });
        const auto above_b = std::count_if(cb.begin(), cb.end(), [&](double v) { return v > x2; });
        num += static_cast<double>(above_a) * static_cast<double>(above_b);
        den += static_cast<double>(ca.size()) * static_cast<double>(cb.size());
    }
    if (den == 0.0) throw InputError("empty stratum");
    return num / den;
}

inline double joint_survival(const MarkerDataset& data, Group g, int marker1, int marker2, double x1,
                             double x2) {
    return joint_survival(cluster_sample(data, g, Stratum::pooled(marker1)),
                          cluster_sample(data, g, Stratum::pooled(marker2)), x1, x2);
}

// ---- density ratio --------------------------------------------------------------

struct BandwidthRule {
    // Fixed bandwidth when > 0; otherwise 0.9 * min(sd, IQR / 1.34) * n^(-1/5).
    double fixed = 0.0;

    static BandwidthRule silverman() { return {}; }
    static BandwidthRule constant(double h) {
        if (!(h > 0.0)) throw InputError("bandwidth must be positive");
        return {h};
    }
};

namespace detail {

inline double sorted_quantile(const std::vector<double>& s, double p) {
    const double pos = p * static_cast<double>(s.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, s.size() - 1);
    return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

inline double bandwidth(const EmpiricalSurvival& sample, const BandwidthRule& rule) {
    if (rule.fixed > 0.0) return rule.fixed;
    const auto& s = sample.sorted_values();
    const double n = static_cast<double>(s.size());
    if (s.size() < 2) throw NumericalError("density estimate needs at least two values");
    const double mean = std::accumulate(s.begin(), s.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : s) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    const double iqr = sorted_quantile(s, 0.75) - sorted_quantile(s, 0.25);
    double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
    if (!(spread > 0.0)) throw NumericalError("degenerate sample: zero spread for density estimate");
    return 0.9 * spread * std::pow(n, -0.2);
}

inline double gaussian_kde(const EmpiricalSurvival& sample, double h, double x) {
    double total = 0.0;
    for (double v : sample.sorted_values()) total += normal::pdf((x - v) / h);
    return total / (static_cast<double>(sample.size()) * h);
}

}  // namespace detail

// Kernel estimate of S'_D / S'_Dbar at the non-diseased (1 - u) quantile.
class DensityRatioEstimate {
public:
    DensityRatioEstimate(const EmpiricalSurvival& x, const EmpiricalSurvival& y,
                         BandwidthRule rule = BandwidthRule::silverman())
        : x_(&x), y_(&y), hx_(detail::bandwidth(x, rule)), hy_(detail::bandwidth(y, rule)) {}

    double operator()(double u) const {
        if (!(u > 0.0 && u < 1.0)) throw InputError("density ratio requires u in (0, 1)");
        const double c = y_->inverse(u);
        const double fy = detail::gaussian_kde(*y_, hy_, c);
        if (!(fy > 0.0) || !std::isfinite(fy))
            throw NumericalError("degenerate non-diseased density at u=" + std::to_string(u));
        return detail::gaussian_kde(*x_, hx_, c) / fy;
    }

    double bandwidth_diseased() const { return hx_; }
    double bandwidth_nondiseased() const { return hy_; }

private:
    const EmpiricalSurvival* x_;
    const EmpiricalSurvival* y_;
    double hx_, hy_;
};

inline double density_ratio(const MarkerDataset& data, int marker, double u,
                            BandwidthRule rule = BandwidthRule::silverman()) {
    auto s = StratumSamples::from(data, Stratum::pooled(marker));
    return DensityRatioEstimate(s.x, s.y, rule)(u);
}

// ---- sigma matrix ---------------------------------------------------------------

struct CovarianceOptions {
    TieRule ties = TieRule::Strict;
    BandwidthRule bandwidth = BandwidthRule::silverman();
    int quadrature_nodes = 64;  // only 64 is tabulated; kept for reporting
};

namespace detail {

struct Node {
    double u;
    double weight;
};

inline std::vector<Node> gauss_legendre(double a, double b) {
    using GL = boost::math::quadrature::gauss<double, 64>;
    const auto& x = GL::abscissa();
    const auto& w = GL::weights();
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    std::vector<Node> nodes;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0.0) {
            nodes.push_back({mid, half * w[i]});
        } else {
            nodes.push_back({mid - half * x[i], half * w[i]});
            nodes.push_back({mid + half * x[i], half * w[i]});
        }
    }
    std::sort(nodes.begin(), nodes.end(), [](const Node& p, const Node& q) { return p.u < q.u; });
    return nodes;
}

// Atoms of dW: exact for point masses and steps, 64-node Gauss-Legendre for windows.
inline std::vector<Node> measure_nodes(const WeightMeasure& w) {
    return std::visit(
        [](const auto& k) -> std::vector<Node> {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, FullAuc>) {
                return gauss_legendre(0.0, 1.0);
            } else if constexpr (std::is_same_v<T, PartialAuc>) {
                auto nodes = gauss_legendre(k.u1, k.u2);
                if (k.normalized)
                    for (auto& nd : nodes) nd.weight /= (k.u2 - k.u1);
                return nodes;
            } else if constexpr (std::is_same_v<T, PointMass>) {
                return {{k.u0, 1.0}};
            } else {
                std::vector<Node> nodes;
                for (const auto& a : k.atoms) nodes.push_back({a.u, a.mass});
                return nodes;
            }
        },
        w.kind());
}

// Per-subject placement totals for the AUC functional.
//   diseased:     sum over the subject's X of #{Y < X} / n   (mid-rank adds ties/2)
//   non-diseased: sum over the subject's Y of #{X > Y} / m
inline Eigen::VectorXd placements(const ClusteredSample& own, const EmpiricalSurvival& other, bool diseased,
                                  TieRule ties) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(own.subjects()));
    const double denom = static_cast<double>(other.size());
    for (std::size_t i = 0; i < own.subjects(); ++i) {
        double total = 0.0;
        for (double value : own.cluster(i)) {
            total += static_cast<double>(diseased ? other.count_below(value) : other.count_above(value));
            if (ties == TieRule::MidRank) total += 0.5 * static_cast<double>(other.count_equal(value));
        }
        v[static_cast<Eigen::Index>(i)] = total / denom;
    }
    return v;
}

inline Eigen::VectorXd cluster_sizes(const ClusteredSample& s) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(s.subjects()));
    for (std::size_t i = 0; i < s.subjects(); ++i) v[static_cast<Eigen::Index>(i)] = s.cluster_size(i);
    return v;
}

// Clips negative eigenvalues; returns true when a projection was needed.
inline bool repair_psd(Eigen::MatrixXd& m) {
    m = 0.5 * (m + m.transpose()).eval();
    if (m.rows() == 0) return false;
    const double scale = std::max(m.diagonal().maxCoeff(), 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
    if (eig.eigenvalues().minCoeff() >= -1e-8 * scale) return false;
    const Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(0.0);
    m = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
    m = 0.5 * (m + m.transpose()).eval();
    return true;
}

inline CovarianceEstimate indicator_covariance(const std::vector<StratumSamples>& strata, TieRule ties) {
    const auto L = static_cast<Eigen::Index>(strata.size());
    const auto M = static_cast<Eigen::Index>(strata.front().diseased.subjects());
    const auto J = static_cast<Eigen::Index>(strata.front().nondiseased.subjects());
    if (M < 2 || J < 2) throw NumericalError("covariance needs at least two subjects per group");

    Eigen::MatrixXd cx(M, L), cy(J, L);
    Eigen::VectorXd mtot(L), ntot(L);
    for (Eigen::Index l = 0; l < L; ++l) {
        const auto& s = strata[static_cast<std::size_t>(l)];
        const double omega = auc(s.diseased.values, s.y, ties);
        const Eigen::VectorXd msz = cluster_sizes(s.diseased);
        const Eigen::VectorXd nsz = cluster_sizes(s.nondiseased);
        cx.col(l) = placements(s.diseased, s.y, true, ties) - omega * msz;
        cy.col(l) = placements(s.nondiseased, s.x, false, ties) - omega * nsz;
        mtot[l] = msz.sum();
        ntot[l] = nsz.sum();
    }
    CovarianceEstimate out;
    const Eigen::MatrixXd gx = cx.transpose() * cx;
    const Eigen::MatrixXd gy = cy.transpose() * cy;
    const Eigen::MatrixXd mm = mtot * mtot.transpose();
    const Eigen::MatrixXd nn = ntot * ntot.transpose();
    out.sigma1 = (static_cast<double>(M) / (M - 1)) * gx.cwiseQuotient(mm);
    out.sigma2 = (static_cast<double>(J) / (J - 1)) * gy.cwiseQuotient(nn);
    out.method = "structural-components";
    return out;
}

// Plug-in of the double-integral expressions. The integrand factorizes per
// subject, so each part reduces to a weighted sum over subjects of node-summed
// exceedance counts.
inline CovarianceEstimate quadrature_covariance(const std::vector<StratumSamples>& strata,
                                                const WeightMeasure& w, const CovarianceOptions& opt) {
    const auto nodes = measure_nodes(w);
    const auto L = static_cast<Eigen::Index>(strata.size());
    const auto M = static_cast<Eigen::Index>(strata.front().diseased.subjects());
    const auto J = static_cast<Eigen::Index>(strata.front().nondiseased.subjects());

    Eigen::MatrixXd ax(M, L), by(J, L);
    Eigen::MatrixXd msz(M, L), nsz(J, L);
    Eigen::VectorXd sx(L), sy(L), mtot(L), ntot(L);

    for (Eigen::Index l = 0; l < L; ++l) {
        const auto& s = strata[static_cast<std::size_t>(l)];
        const DensityRatioEstimate ratio(s.x, s.y, opt.bandwidth);
        ax.col(l).setZero();
        by.col(l).setZero();
        double surv_x = 0.0, surv_y = 0.0;
        for (const auto& nd : nodes) {
            const double c = s.y.inverse(nd.u);
            const double wr = nd.weight * ratio(nd.u);
            for (Eigen::Index i = 0; i < M; ++i) {
                const auto cl = s.diseased.cluster(static_cast<std::size_t>(i));
                ax(i, l) += nd.weight * static_cast<double>(std::count_if(
                                            cl.begin(), cl.end(), [&](double v) { return v > c; }));
            }
            for (Eigen::Index j = 0; j < J; ++j) {
                const auto cl = s.nondiseased.cluster(static_cast<std::size_t>(j));
                by(j, l) += wr * static_cast<double>(std::count_if(
                                     cl.begin(), cl.end(), [&](double v) { return v > c; }));
            }
            surv_x += nd.weight * s.x(c);
            surv_y += wr * s.y(c);
        }
        sx[l] = surv_x;
        sy[l] = surv_y;
        msz.col(l) = cluster_sizes(s.diseased);
        nsz.col(l) = cluster_sizes(s.nondiseased);
        mtot[l] = msz.col(l).sum();
        ntot[l] = nsz.col(l).sum();
    }

    // part(l1,l2) = [sum_i A_i1 A_i2 - (sum_i c_i1 c_i2) S_1 S_2] / (c_1 c_2)
    CovarianceEstimate out;
    out.sigma1 = (ax.transpose() * ax - (msz.transpose() * msz).cwiseProduct(sx * sx.transpose()))
                     .cwiseQuotient(mtot * mtot.transpose());
    out.sigma2 = (by.transpose() * by - (nsz.transpose() * nsz).cwiseProduct(sy * sy.transpose()))
                     .cwiseQuotient(ntot * ntot.transpose());
    out.method = w.is<PartialAuc>() || w.is<FullAuc>() ? "quadrature" : "atoms";
    return out;
}

inline CovarianceEstimate finish(CovarianceEstimate est, std::vector<std::string> labels) {
    est.sigma1 = 0.5 * (est.sigma1 + est.sigma1.transpose()).eval();
    est.sigma2 = 0.5 * (est.sigma2 + est.sigma2.transpose()).eval();
    Eigen::MatrixXd total = est.sigma1 + est.sigma2;
    if (repair_psd(total)) {
        repair_psd(est.sigma1);
        repair_psd(est.sigma2);
        est.psd_repaired = true;
    }
    est.sigma = est.sigma1 + est.sigma2;
    est.labels = std::move(labels);
    return est;
}

}  // namespace detail

// Covariance from precomputed strata. FullAuc uses per-subject structural
// components; every other measure uses the kernel density-ratio plug-in.
inline CovarianceEstimate sigma_matrix(const std::vector<StratumSamples>& strata,
                                       const std::vector<std::string>& labels, const WeightMeasure& w,
                                       const CovarianceOptions& opt = {}) {
    if (strata.empty()) throw InputError("no strata");
    auto est = w.is<FullAuc>() ? detail::indicator_covariance(strata, opt.ties)
                               : detail::quadrature_covariance(strata, w, opt);
    return detail::finish(std::move(est), labels);
}

inline CovarianceEstimate sigma_matrix(const MarkerDataset& data, const StudyDesign& design,
                                       const WeightMeasure& w, const CovarianceOptions& opt = {}) {
    return sigma_matrix(design_samples(data, design), design.labels(), w, opt);
}

// Same general plug-in forced onto FullAuc (integration over (0,1)); used to
// cross-check the structural-component path.
inline CovarianceEstimate sigma_matrix_quadrature(const MarkerDataset& data, const StudyDesign& design,
                                                  const WeightMeasure& w, const CovarianceOptions& opt = {}) {
    auto strata = design_samples(data, design);
    return detail::finish(detail::quadrature_covariance(strata, w, opt), design.labels());
}

// ---- contrasts ------------------------------------------------------------------

// 2R x R matrix with +1 at (r, r) and -1 at (R + r, r).
inline Eigen::MatrixXd modality_contrast(int pairs) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * pairs, pairs);
    for (int r = 0; r < pairs; ++r) {
        a(r, r) = 1.0;
        a(pairs + r, r) = -1.0;
    }
    return a;
}

// Covariance of the contrast vector A' Omega-hat: A' Sigma A.
inline Eigen::MatrixXd contrast_covariance(const Eigen::MatrixXd& sigma, const Eigen::MatrixXd& a) {
    if (a.rows() != sigma.rows() || sigma.rows() != sigma.cols())
        throw InputError("contrast matrix must have one row per wAUC entry");
    Eigen::MatrixXd out = a.transpose() * sigma * a;
    return 0.5 * (out + out.transpose());
}

inline Eigen::MatrixXd contrast_covariance(const CovarianceEstimate& cov, const Eigen::MatrixXd& a) {
    return contrast_covariance(cov.sigma, a);
}

// ---- bootstrap ------------------------------------------------------------------

struct BootstrapCovariance {
    CovarianceEstimate estimate;
    std::size_t redraws = 0;  // replicates discarded because a stratum came out empty
};

namespace detail {

inline ClusteredSample resample(const ClusteredSample& s, const std::vector<std::size_t>& idx) {
    ClusteredSample out;
    out.values.reserve(s.size());
    out.offsets.reserve(idx.size() + 1);
    for (auto i : idx) out.add_cluster(s.cluster(i));
    return out;
}

inline Eigen::MatrixXd sample_covariance(const std::vector<Eigen::VectorXd>& reps) {
    const auto B = static_cast<double>(reps.size());
    const auto L = reps.front().size();
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(L);
    for (const auto& r : reps) mean += r;
    mean /= B;
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(L, L);
    for (const auto& r : reps) cov += (r - mean) * (r - mean).transpose();
    return cov / (B - 1.0);
}

}  // namespace detail

// Subject-level bootstrap. Diseased and non-diseased subjects are resampled in
// separate passes (the other group held fixed), giving sigma1 and sigma2; their
// sum estimates the total. Replicate b of group g draws from stream (seed, b, g).
inline BootstrapCovariance bootstrap_covariance(const MarkerDataset& data, const StudyDesign& design,
                                                const WeightMeasure& w, int replicates, std::uint64_t seed,
                                                TieRule ties = TieRule::Strict, unsigned threads = 1) {
    if (replicates < 100) throw InputError("bootstrap needs at least 100 replicates");
    const auto base = design_samples(data, design);
    const auto B = static_cast<std::size_t>(replicates);

    BootstrapCovariance out;
    std::vector<Eigen::MatrixXd> parts;
    for (int g = 0; g < 2; ++g) {
        const bool diseased = g == 0;
        const std::size_t subjects =
            diseased ? base.front().diseased.subjects() : base.front().nondiseased.subjects();
        std::vector<Eigen::VectorXd> reps(B);
        std::vector<std::size_t> redraws(B, 0);
        parallel_for(B, threads, [&](std::size_t b) {
            auto rng = stream_rng(seed, b, static_cast<std::uint64_t>(g));
            std::uniform_int_distribution<std::size_t> pick(0, subjects - 1);
            for (;;) {
                std::vector<std::size_t> idx(subjects);
                for (auto& i : idx) i = pick(rng);
                try {
                    Eigen::VectorXd v(static_cast<Eigen::Index>(base.size()));
                    for (std::size_t l = 0; l < base.size(); ++l) {
                        StratumSamples s = base[l];
                        auto& moved = diseased ? s.diseased : s.nondiseased;
                        moved = detail::resample(moved, idx);
                        if (moved.size() == 0) throw InputError("empty stratum");
                        (diseased ? s.x : s.y) = EmpiricalSurvival(moved.values);
                        v[static_cast<Eigen::Index>(l)] = wauc(s, w, ties);
                    }
                    reps[b] = std::move(v);
                    return;
                } catch (const InputError&) {
                    ++redraws[b];
                }
            }
        });
        out.redraws += std::accumulate(redraws.begin(), redraws.end(), std::size_t{0});
        parts.push_back(detail::sample_covariance(reps));
    }
    out.estimate.sigma1 = parts[0];
    out.estimate.sigma2 = parts[1];
    out.estimate.sigma = parts[0] + parts[1];
    out.estimate.labels = design.labels();
    out.estimate.method = "bootstrap";
    return out;
}

}  // namespace cwauc

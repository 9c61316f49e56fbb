#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

#include "cwauc/covariance.hpp"
#include "cwauc/normal.hpp"
#include "fixtures.hpp"
#include "oracle.hpp"

using namespace cwauc;

namespace {

Eigen::MatrixXd normal_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols, double shift,
                              double rho) {
    std::normal_distribution<double> z;
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const double common = z(rng);
        for (Eigen::Index l = 0; l < cols; ++l)
            m(i, l) = shift + std::sqrt(rho) * common + std::sqrt(1.0 - rho) * z(rng);
    }
    return m;
}

// Clustered normal data: L markers, subject-level random effect, clusters of 1..3.
MarkerDataset clustered_normal(std::mt19937_64& rng, int subjects, int markers, double shift) {
    std::normal_distribution<double> z;
    std::uniform_int_distribution<int> size(1, 3);
    MarkerDataset d;
    d.n_markers = markers;
    for (auto* g : {&d.diseased, &d.nondiseased}) {
        const double mu = g == &d.diseased ? shift : 0.0;
        for (int i = 0; i < subjects; ++i) {
            SubjectRecord s{std::to_string(i), {}};
            const double u = z(rng);
            for (int l = 1; l <= markers; ++l) {
                const int c = size(rng);
                for (int r = 0; r < c; ++r) s.measurements[{l, 1}].push_back(mu + 0.7 * u + 0.7 * z(rng));
            }
            g->push_back(std::move(s));
        }
    }
    return d;
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues().minCoeff();
}

}  // namespace

TEST(JointSurvival, DiagonalEqualsMarginal) {
    const std::vector<double> x{1, 2, 3, 4};
    const auto d = fixtures::single(x, {0});
    const EmpiricalSurvival s(x);
    for (double t : {0.5, 1.0, 2.5, 4.0})
        EXPECT_DOUBLE_EQ(joint_survival(d, Group::Diseased, 1, 1, t, t), survival(s, t));
}

TEST(JointSurvival, HandEnumeration) {
    MarkerDataset d;
    d.n_markers = 2;
    d.diseased.push_back({"a", {{{1, 1}, {1, 3}}, {{2, 1}, {2}}}});
    d.diseased.push_back({"b", {{{1, 1}, {5}}, {{2, 1}, {0, 6}}}});
    d.nondiseased.push_back({"c", {{{1, 1}, {0}}, {{2, 1}, {0}}}});
    // subject a: 1 of 2 pairs, subject b: 1 of 2 pairs
    EXPECT_DOUBLE_EQ(joint_survival(d, Group::Diseased, 1, 2, 2.0, 1.0), 0.5);
    // subject a: (3,2) only; subject b: (5,6) only -> 2 of 4
    EXPECT_DOUBLE_EQ(joint_survival(d, Group::Diseased, 1, 2, 2.0, 1.5), 0.5);
    EXPECT_DOUBLE_EQ(joint_survival(d, Group::Diseased, 1, 2, 0.0, -1.0), 1.0);
}

TEST(JointSurvival, IndependentMarkersFactorize) {
    std::mt19937_64 rng(41);
    const auto x = normal_matrix(rng, 20000, 2, 0.0, 0.0);
    const auto d = oracle::from_matrices(x, x.topRows(2));
    const double joint = joint_survival(d, Group::Diseased, 1, 2, 0.3, -0.2);
    const double product = (1.0 - normal::cdf(0.3)) * (1.0 - normal::cdf(-0.2));
    EXPECT_NEAR(joint, product, 0.015);
}

TEST(DensityRatio, BinormalClosedForm) {
    std::mt19937_64 rng(43);
    std::normal_distribution<double> z;
    std::vector<double> x(20000), y(20000);
    for (auto& v : x) v = 1.0 + z(rng);
    for (auto& v : y) v = z(rng);
    const auto d = fixtures::single(x, y);
    for (double u : {0.2, 0.4, 0.6, 0.8}) {
        const double c = normal::quantile(1.0 - u);
        const double expected = normal::pdf(c - 1.0) / normal::pdf(c);
        EXPECT_NEAR(density_ratio(d, 1, u), expected, 0.08 * expected) << "u=" << u;
    }
}

TEST(DensityRatio, NearOneForIdenticalDistributions) {
    std::mt19937_64 rng(47);
    std::normal_distribution<double> z;
    std::vector<double> x(10000), y(10000);
    for (auto& v : x) v = z(rng);
    for (auto& v : y) v = z(rng);
    const auto d = fixtures::single(x, y);
    for (double u : {0.25, 0.5, 0.75}) EXPECT_NEAR(density_ratio(d, 1, u), 1.0, 0.1);
}

TEST(DensityRatio, NearZeroWithoutOverlap) {
    std::vector<double> x, y;
    for (int i = 0; i < 50; ++i) {
        x.push_back(100.0 + i * 0.1);
        y.push_back(i * 0.1);
    }
    EXPECT_LT(density_ratio(fixtures::single(x, y), 1, 0.5), 1e-12);
}

TEST(DensityRatio, DegenerateInputs) {
    const auto d = fixtures::single({1, 2, 3}, {2, 2, 2});
    EXPECT_THROW(density_ratio(d, 1, 0.5), NumericalError);
    EXPECT_THROW(density_ratio(fixtures::single({1, 2}, {0, 1}), 1, 1.0), InputError);
    EXPECT_NO_THROW(density_ratio(d, 1, 0.5, BandwidthRule::constant(0.5)));
}

TEST(SigmaMatrix, MatchesDeLongForSingletonClusters) {
    std::mt19937_64 rng(53);
    for (int t = 0; t < 20; ++t) {
        const auto x = normal_matrix(rng, 15 + t, 4, 0.8, 0.4);
        const auto y = normal_matrix(rng, 25 - t / 2, 4, 0.0, 0.4);
        const auto ref = oracle::delong(x, y);
        const auto cov = sigma_matrix(oracle::from_matrices(x, y), StudyDesign::panel(4), WeightMeasure::full_auc());
        EXPECT_LT((cov.sigma - ref.sigma).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT((cov.sigma1 - ref.s10 / static_cast<double>(x.rows())).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT((cov.sigma2 - ref.s01 / static_cast<double>(y.rows())).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(SigmaMatrix, SymmetricPsdAndAdditive) {
    std::mt19937_64 rng(59);
    const std::vector<WeightMeasure> measures{WeightMeasure::full_auc(), WeightMeasure::partial_auc(0, 0.6),
                                              WeightMeasure::point_mass(0.3),
                                              WeightMeasure::steps({{0.2, 1.0}, {0.5, 0.5}})};
    for (int t = 0; t < 10; ++t) {
        const auto d = clustered_normal(rng, 40, 3, 1.0);
        for (const auto& w : measures) {
            const auto c = sigma_matrix(d, StudyDesign::panel(3), w);
            EXPECT_LT((c.sigma - c.sigma.transpose()).cwiseAbs().maxCoeff(), 1e-15);
            EXPECT_LT((c.sigma - c.sigma1 - c.sigma2).cwiseAbs().maxCoeff(), 1e-15);
            EXPECT_GE(min_eigenvalue(c.sigma1), -1e-12);
            EXPECT_GE(min_eigenvalue(c.sigma2), -1e-12);
            EXPECT_EQ(c.labels.size(), 3u);
        }
    }
}

TEST(SigmaMatrix, RankBasedPathIgnoresMonotoneTransforms) {
    std::mt19937_64 rng(61);
    const auto d = clustered_normal(rng, 30, 2, 0.7);
    const auto e = transform_values(d, [](double v) { return std::exp(v) * 3.0; });
    const auto a = sigma_matrix(d, StudyDesign::panel(2), WeightMeasure::full_auc());
    const auto b = sigma_matrix(e, StudyDesign::panel(2), WeightMeasure::full_auc());
    EXPECT_EQ(a.sigma, b.sigma);
}

TEST(SigmaMatrix, IndependentMarkersHaveSmallCrossCovariance) {
    std::mt19937_64 rng(67);
    const auto x = normal_matrix(rng, 400, 2, 1.0, 0.0);
    const auto y = normal_matrix(rng, 400, 2, 0.0, 0.0);
    const auto c = sigma_matrix(oracle::from_matrices(x, y), StudyDesign::panel(2), WeightMeasure::full_auc());
    const double corr = c.sigma(0, 1) / std::sqrt(c.sigma(0, 0) * c.sigma(1, 1));
    EXPECT_LT(std::abs(corr), 0.2);
}

TEST(SigmaMatrix, QuadraturePathAgreesWithStructuralComponents) {
    std::mt19937_64 rng(71);
    const auto x = normal_matrix(rng, 300, 2, 1.0, 0.5);
    const auto y = normal_matrix(rng, 300, 2, 0.0, 0.5);
    const auto d = oracle::from_matrices(x, y);
    const auto a = sigma_matrix(d, StudyDesign::panel(2), WeightMeasure::full_auc());
    const auto b = sigma_matrix_quadrature(d, StudyDesign::panel(2), WeightMeasure::full_auc());
    for (Eigen::Index i = 0; i < 2; ++i)
        for (Eigen::Index j = 0; j < 2; ++j) EXPECT_NEAR(b.sigma(i, j), a.sigma(i, j), 0.15 * a.sigma(i, i));
}

TEST(SigmaMatrix, TooFewSubjects) {
    EXPECT_THROW(sigma_matrix(fixtures::single({1}, {0, 1}), StudyDesign::panel(1), WeightMeasure::full_auc()),
                 NumericalError);
}

TEST(Psd, RepairClipsNegativeEigenvalues) {
    Eigen::MatrixXd m(2, 2);
    m << 1.0, 2.0, 2.0, 1.0;
    EXPECT_TRUE(detail::repair_psd(m));
    EXPECT_GE(min_eigenvalue(m), -1e-12);
    Eigen::MatrixXd ok = Eigen::MatrixXd::Identity(2, 2);
    EXPECT_FALSE(detail::repair_psd(ok));
}

TEST(Contrast, IdentityGivesTwo) {
    const auto out = contrast_covariance(Eigen::MatrixXd::Identity(2, 2), modality_contrast(1));
    EXPECT_DOUBLE_EQ(out(0, 0), 2.0);
}

TEST(Contrast, TextbookDifferenceVariance) {
    Eigen::MatrixXd s(2, 2);
    s << 0.04, 0.01, 0.01, 0.09;
    EXPECT_NEAR(contrast_covariance(s, modality_contrast(1))(0, 0), 0.04 + 0.09 - 0.02, 1e-15);
}

TEST(Contrast, FourByFourExpansion) {
    Eigen::MatrixXd s(4, 4);
    s << 4, 1, 2, 0,
         1, 3, 0, 1,
         2, 0, 5, 1,
         0, 1, 1, 2;
    Eigen::MatrixXd expected(2, 2);
    expected << 5, 2, 2, 3;
    EXPECT_EQ(contrast_covariance(s, modality_contrast(2)), expected);
    EXPECT_THROW(contrast_covariance(s, modality_contrast(3)), InputError);
}

TEST(Bootstrap, ConstantDataGivesZero) {
    const auto d = fixtures::single(std::vector<double>(10, 1.0), std::vector<double>(10, 0.0));
    const auto b = bootstrap_covariance(d, StudyDesign::panel(1), WeightMeasure::full_auc(), 200, 1);
    EXPECT_EQ(b.estimate.sigma(0, 0), 0.0);
}

TEST(Bootstrap, DeterministicAcrossRunsAndThreads) {
    std::mt19937_64 rng(73);
    const auto d = clustered_normal(rng, 20, 2, 1.0);
    const auto w = WeightMeasure::full_auc();
    const auto a = bootstrap_covariance(d, StudyDesign::panel(2), w, 150, 99, TieRule::Strict, 1);
    const auto b = bootstrap_covariance(d, StudyDesign::panel(2), w, 150, 99, TieRule::Strict, 1);
    const auto c = bootstrap_covariance(d, StudyDesign::panel(2), w, 150, 99, TieRule::Strict, 3);
    EXPECT_EQ(a.estimate.sigma, b.estimate.sigma);
    EXPECT_EQ(a.estimate.sigma, c.estimate.sigma);
    const auto other = bootstrap_covariance(d, StudyDesign::panel(2), w, 150, 100);
    EXPECT_NE(a.estimate.sigma, other.estimate.sigma);
    EXPECT_THROW(bootstrap_covariance(d, StudyDesign::panel(2), w, 99, 1), InputError);
}

TEST(Bootstrap, AgreesWithAnalyticDiagonal) {
    std::mt19937_64 rng(79);
    const auto d = clustered_normal(rng, 100, 2, 1.0);
    const auto analytic = sigma_matrix(d, StudyDesign::panel(2), WeightMeasure::full_auc());
    const auto boot = bootstrap_covariance(d, StudyDesign::panel(2), WeightMeasure::full_auc(), 1000, 5);
    for (Eigen::Index i = 0; i < 2; ++i)
        EXPECT_NEAR(boot.estimate.sigma(i, i) / analytic.sigma(i, i), 1.0, 0.15);
}

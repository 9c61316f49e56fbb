// Acceptance run: one PASS/FAIL line per criterion, details indented below it.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cwauc/cwauc.hpp"
#include "oracle.hpp"

using namespace cwauc;

namespace {

constexpr std::uint64_t kSeed = 7;

struct Outcome {
    bool pass = true;
    std::vector<std::string> details;

    void check(bool ok, std::string what) {
        pass = pass && ok;
        details.push_back((ok ? "ok   " : "MISS ") + std::move(what));
    }
};

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

sim::StudyReport run(sim::ScenarioSpec spec, int reps) {
    spec.n_reps = reps;
    spec.seed = kSeed;
    spec.threads = default_threads();
    return sim::run_scenario(spec);
}

const char* measure_name(const WeightMeasure& w) { return w.is<FullAuc>() ? "AUC" : "pAUC"; }

// ---- 1 ------------------------------------------------------------------------------

Outcome oracle_equivalence() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(kSeed);
    std::size_t comparisons = 0, mismatches = 0;
    auto cmp = [&](double a, double b) {
        ++comparisons;
        if (a != b) ++mismatches;
    };
    for (int t = 0; t < 200; ++t) {
        const auto d = oracle::random_dataset(rng);
        for (int l = 1; l <= d.n_markers; ++l) {
            const auto x = oracle::values(d, Group::Diseased, l);
            const auto y = oracle::values(d, Group::NonDiseased, l);
            cmp(auc(d, l), oracle::auc(x, y));
            cmp(auc(d, l, TieRule::MidRank), oracle::auc(x, y, true));
            for (long a = 0; a < 10; ++a)
                for (long b = a + 1; b <= 10; ++b) {
                    cmp(pauc(d, l, a / 10.0, b / 10.0), oracle::pauc(x, y, {a, 10}, {b, 10}));
                    cmp(pauc(d, l, a / 10.0, b / 10.0, TieRule::MidRank),
                        oracle::pauc(x, y, {a, 10}, {b, 10}, true));
                }
            for (long p = 1; p < 20; ++p) cmp(sensitivity_at_fpr(d, l, p / 20.0), oracle::sensitivity(x, y, {p, 20}));
            for (int k = 1; k <= d.n_times; ++k) {
                const auto xk = oracle::values(d, Group::Diseased, l, k);
                const auto yk = oracle::values(d, Group::NonDiseased, l, k);
                cmp(per_time_wauc(d, l, k, WeightMeasure::full_auc()), oracle::auc(xk, yk));
                cmp(per_time_wauc(d, l, k, WeightMeasure::partial_auc(0.0, 0.6)),
                    oracle::pauc(xk, yk, {0, 10}, {6, 10}));
                cmp(per_time_wauc(d, l, k, WeightMeasure::point_mass(0.35)), oracle::sensitivity(xk, yk, {7, 20}));
            }
        }
    }
    const double secs = seconds_since(t0);
    o.check(mismatches == 0, fmt("%zu of %zu estimates differ from the enumeration oracle", mismatches, comparisons));
    o.check(secs < 10.0, fmt("runtime %.2f s (limit 10 s)", secs));
    return o;
}

// ---- 2 ------------------------------------------------------------------------------

Outcome delong_equivalence() {
    Outcome o;
    std::mt19937_64 rng(kSeed);
    std::normal_distribution<double> z;
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
        const Eigen::Index m = 5 + t % 17, n = 4 + (t * 7) % 23, L = 1 + t % 4;
        Eigen::MatrixXd x(m, L), y(n, L);
        for (Eigen::Index i = 0; i < m; ++i) {
            const double u = z(rng);
            for (Eigen::Index l = 0; l < L; ++l) x(i, l) = 0.8 + 0.6 * u + 0.8 * z(rng);
        }
        for (Eigen::Index j = 0; j < n; ++j) {
            const double u = z(rng);
            for (Eigen::Index l = 0; l < L; ++l) y(j, l) = 0.6 * u + 0.8 * z(rng);
        }
        if (t % 5 == 0) x = x.array().round();  // ties
        const auto ref = oracle::delong(x, y);
        const auto cov = sigma_matrix(oracle::from_matrices(x, y), StudyDesign::panel(static_cast<int>(L)),
                                      WeightMeasure::full_auc());
        worst = std::max(worst, (cov.sigma - ref.sigma).cwiseAbs().maxCoeff());
    }
    o.check(worst <= 1e-12, fmt("max |sigma - DeLong| = %.3g over 50 datasets (limit 1e-12)", worst));
    return o;
}

// ---- 3 ------------------------------------------------------------------------------

struct Table1Cell {
    double rho;
    int n;
    bool partial;
    double coverage;  // percent
};

const Table1Cell kTable1[] = {
    {0.2, 50, false, 91.66},  {0.2, 50, true, 93.70},  {0.2, 100, false, 89.87}, {0.2, 100, true, 91.20},
    {0.5, 50, false, 94.12},  {0.5, 50, true, 95.70},  {0.5, 100, false, 92.10}, {0.5, 100, true, 93.00},
};

sim::CellResult table1_consistency_cell;

Outcome table1() {
    Outcome o;
    for (const auto& c : kTable1) {
        const auto measure = c.partial ? sim::scenarios::pauc_06() : WeightMeasure::full_auc();
        const auto t0 = std::chrono::steady_clock::now();
        const auto report = run(sim::scenarios::table1(sim::Family::Normal, c.rho, c.n, measure), 1000);
        const double secs = seconds_since(t0);
        const auto& cell = report.cells.at(0);
        if (c.rho == 0.5 && c.n == 100 && !c.partial) table1_consistency_cell = cell;
        const double cov = 100.0 * cell.coverage;
        const std::string tag = fmt("rho=%.1f n=%d %-4s", c.rho, c.n, measure_name(measure));
        o.check(std::abs(cov - c.coverage) <= 3.0,
                fmt("%s coverage %.2f%% vs %.2f%% (diff %+.2f, limit 3.0)", tag.c_str(), cov, c.coverage,
                    cov - c.coverage));
        o.check(std::abs(cell.bias) < 0.005, fmt("%s |bias| %.5f (limit 0.005)", tag.c_str(), std::abs(cell.bias)));
        o.check(secs < 600.0 && cell.n_failed == 0,
                fmt("%s runtime %.1f s, %zu failed replicates", tag.c_str(), secs, cell.n_failed));
    }
    return o;
}

// ---- 4 ------------------------------------------------------------------------------

Outcome table3() {
    Outcome o;
    for (double rho : {-0.1, 0.2, 0.5})
        for (int n : {50, 100})
            for (bool partial : {false, true}) {
                const auto measure = partial ? sim::scenarios::pauc_06() : WeightMeasure::full_auc();
                const auto report = run(sim::scenarios::table3(rho, n, measure), 1000);
                const double eq = report.cells.at(0).power, opt = report.cells.at(1).power;
                const std::string tag = fmt("rho=%+.1f n=%d %-4s", rho, n, measure_name(measure));
                o.check(opt >= eq, fmt("%s power equal %.3f, optimal %.3f (optimal >= equal)", tag.c_str(), eq, opt));
                if (rho == 0.5 && n == 50 && !partial) {
                    o.check(std::abs(eq - 0.327) <= 0.05, fmt("%s equal power %.3f vs 0.327 (limit 0.05)", tag.c_str(), eq));
                    o.check(std::abs(opt - 0.703) <= 0.05,
                            fmt("%s optimal power %.3f vs 0.703 (limit 0.05)", tag.c_str(), opt));
                }
            }
    return o;
}

// ---- 5 ------------------------------------------------------------------------------

Outcome table4() {
    Outcome o;
    const auto report = run(sim::scenarios::table4(sim::Family::Normal, 50, WeightMeasure::full_auc()), 1000);
    const double cov = 100.0 * report.cells.at(0).coverage;
    o.check(std::abs(cov - 97.40) <= 3.0, fmt("coverage %.2f%% vs 97.40%% (limit 3.0)", cov));
    return o;
}

// ---- 6 ------------------------------------------------------------------------------

Outcome pvalues() {
    Outcome o;
    struct Case {
        double estimate, variance, p;
    };
    for (const auto& c : {Case{-0.1115, 0.0006961, 2.36e-5}, Case{-0.1145, 0.0007475, 2.82e-5}}) {
        const double p = z_test(c.estimate, c.variance).p_two_sided;
        const double rel = std::abs(p / c.p - 1.0);
        o.check(rel <= 0.02, fmt("estimate %.4f variance %.7f: p = %.4g vs %.3g (rel %.4f, limit 0.02)", c.estimate,
                                 c.variance, p, c.p, rel));
    }
    return o;
}

// ---- 7 ------------------------------------------------------------------------------

Outcome table2() {
    Outcome o;
    const auto report = run(sim::scenarios::table2(sim::Family::LogNormal, -0.1, 50), 1000);
    auto cell = [&](const std::string& label) -> const sim::CellResult& {
        for (const auto& c : report.cells)
            if (c.label == label) return c;
        throw std::runtime_error("missing cell " + label);
    };
    const double par = cell("parametric").bias, emp = cell("empirical").bias;
    o.check(par >= 0.05 && par <= 0.09, fmt("parametric bias %.4f (required in [0.05, 0.09])", par));
    o.check(std::abs(emp) < 0.02, fmt("empirical |bias| %.4f (limit 0.02)", std::abs(emp)));
    o.check(report.slope_positive > 0 && report.slope_mismatches == 0,
            fmt("semiparametric != empirical in %zu of %zu positive-slope fits", report.slope_mismatches,
                report.slope_positive));
    return o;
}

// ---- 8 ------------------------------------------------------------------------------

MarkerDataset reader_study(std::uint64_t stream, int n) {
    auto spec = sim::scenarios::table3(0.5, n, WeightMeasure::full_auc());
    auto rng = stream_rng(kSeed, stream);
    return sim::ScenarioGenerator(spec)(rng);
}

bool same(const ComparisonResult& a, const ComparisonResult& b) {
    return a.estimate == b.estimate && a.variance == b.variance && a.z == b.z && a.p_two_sided == b.p_two_sided &&
           a.ci_lo == b.ci_lo && a.ci_hi == b.ci_hi && a.weights.canonical() == b.weights.canonical();
}

Outcome properties() {
    Outcome o;
    const auto design = StudyDesign::multi_reader(3);
    const std::vector<std::function<double(double)>> transforms{
        [](double v) { return std::exp(v) + 2.0; }, [](double v) { return 3.0 * v - 1.0; },
        [](double v) { return std::atan(v); }, [](double v) { return v * v * v; }};

    std::size_t cases = 0, broken = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto data = reader_study(s, 40);
        for (const auto& f : transforms) {
            const auto moved = transform_values(data, f);
            for (auto method : {WeightMethod::Equal, WeightMethod::Optimal}) {
                ++cases;
                const auto a = analyze_comparison(data, design, WeightMeasure::full_auc(), {method});
                const auto b = analyze_comparison(moved, design, WeightMeasure::full_auc(), {method});
                if (!same(a.result, b.result) || a.result.weights.values != b.result.weights.values ||
                    a.covariance.sigma != b.covariance.sigma ||
                    a.wauc.values != b.wauc.values)
                    ++broken;
            }
            for (const auto& w : {WeightMeasure::partial_auc(0.0, 0.6), WeightMeasure::point_mass(0.3)}) {
                ++cases;
                if (estimate_wauc(data, design, w).values != estimate_wauc(moved, design, w).values) ++broken;
            }
        }
    }
    o.check(broken == 0, fmt("monotone transforms: %zu of %zu pipelines changed", broken, cases));

    // exactly proportional weight vectors, including non-power-of-two factors
    std::size_t scale_cases = 0, scale_broken = 0;
    const std::vector<double> base{3, 17, 2, 29, 11, 5};
    for (std::uint64_t s = 0; s < 10; ++s) {
        const auto data = reader_study(100 + s, 40);
        const auto wauc_vec = estimate_wauc(data, design, WeightMeasure::full_auc());
        const auto cov = sigma_matrix(data, design, WeightMeasure::full_auc());
        const std::vector<double> w(base.begin() + static_cast<long>(s % 3), base.begin() + static_cast<long>(s % 3) + 3);
        CompareOptions ref_opt;
        ref_opt.method = WeightMethod::Custom;
        ref_opt.custom_weights = w;
        const auto ref = compare_paired(wauc_vec, cov, ref_opt);
        for (double c : {0.375, 2.0, 3.0, 7.0, 13.0, 1024.0, 0.0625}) {
            ++scale_cases;
            auto opt = ref_opt;
            for (auto& v : opt.custom_weights) v *= c;
            if (delta_m(wauc_vec, WeightVector::custom(opt.custom_weights)) !=
                    delta_m(wauc_vec, WeightVector::custom(w)) ||
                !same(compare_paired(wauc_vec, cov, opt), ref))
                ++scale_broken;
        }
    }
    o.check(scale_broken == 0, fmt("weight scaling: %zu of %zu results changed", scale_broken, scale_cases));

    std::mt19937_64 rng(kSeed);
    std::size_t pauc_cases = 0, pauc_broken = 0;
    for (int t = 0; t < 200; ++t) {
        const auto d = oracle::random_dataset(rng);
        for (int l = 1; l <= d.n_markers; ++l)
            for (auto ties : {TieRule::Strict, TieRule::MidRank}) {
                ++pauc_cases;
                if (pauc(d, l, 0.0, 1.0, ties) != auc(d, l, ties)) ++pauc_broken;
            }
    }
    o.check(pauc_broken == 0, fmt("pauc(0,1) != auc in %zu of %zu cases", pauc_broken, pauc_cases));

    const auto& c = table1_consistency_cell;
    const double ratio = c.mean_variance / c.mc_variance;
    o.check(c.n_ok > 0 && std::abs(ratio - 1.0) <= 0.10,
            fmt("mean analytic variance %.3g vs Monte Carlo %.3g (ratio %.3f, limit +-0.10; normal rho=0.5 n=100)",
                c.mean_variance, c.mc_variance, ratio));

    const auto data = reader_study(1000, 100);
    const auto analytic = sigma_matrix(data, design, WeightMeasure::full_auc());
    const auto boot = bootstrap_covariance(data, design, WeightMeasure::full_auc(), 1000, kSeed);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < analytic.sigma.rows(); ++i)
        worst = std::max(worst, std::abs(boot.estimate.sigma(i, i) / analytic.sigma(i, i) - 1.0));
    o.check(worst <= 0.15, fmt("bootstrap vs analytic diagonal: worst relative gap %.3f (limit 0.15)", worst));
    return o;
}

// ---- 9 ------------------------------------------------------------------------------

Outcome null_calibration() {
    Outcome o;
    const auto report = run(sim::scenarios::null_modalities(0.5, 100, WeightMeasure::full_auc()), 2000);
    for (const auto& cell : report.cells)
        o.check(std::abs(cell.power - 0.05) <= 0.02,
                fmt("%-7s rejection rate %.4f over 2000 reps (required 0.05 +- 0.02)", cell.label.c_str(),
                    cell.power));
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        Outcome (*run)();
    };
    const Criterion criteria[] = {
        {1, "oracle equivalence of auc, pauc and sensitivity", oracle_equivalence},
        {2, "DeLong structural components", delong_equivalence},
        {3, "multi-reader coverage and bias, 8 cells", table1},
        {4, "equal vs optimal weight power", table3},
        {5, "longitudinal clustered coverage", table4},
        {6, "z-test p-values", pvalues},
        {7, "lognormal baselines", table2},
        {8, "property suite", properties},
        {9, "null calibration", null_calibration},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.check(false, std::string("exception: ") + e.what());
        }
        std::printf("%s %d %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, seconds_since(t0));
        for (const auto& d : o.details) std::printf("       %s\n", d.c_str());
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
    return failed;
}

#pragma once

// JSON and CSV renderings of analysis and simulation results.

#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cwauc/covariance.hpp"
#include "cwauc/estimators.hpp"
#include "cwauc/inference.hpp"
#include "cwauc/io/scenario_file.hpp"
#include "cwauc/simulation.hpp"

namespace cwauc::io {

using nlohmann::json;

inline constexpr const char* kToolVersion = "0.3.0";

inline json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json to_json(const ComparisonResult& r) {
    return json{{"estimate", r.estimate},
                {"variance", r.variance},
                {"z", r.z},
                {"p", r.p_two_sided},
                {"ci", {r.ci_lo, r.ci_hi}},
                {"alpha", r.alpha},
                {"weights", r.weights.values},
                {"weights_fallback", r.weights.fallback},
                {"method", to_string(r.method)},
                {"decomposition", {{"diseased", r.decomposition.diseased},
                                   {"nondiseased", r.decomposition.nondiseased}}}};
}

inline WeightMethod parse_method_name(const std::string& s) {
    if (s == "equal") return WeightMethod::Equal;
    if (s == "optimal") return WeightMethod::Optimal;
    if (s == "custom") return WeightMethod::Custom;
    throw InputError("unknown weight method '" + s + "'");
}

inline ComparisonResult comparison_from_json(const json& j) {
    ComparisonResult r;
    r.estimate = j.at("estimate").get<double>();
    r.variance = j.at("variance").get<double>();
    r.z = j.at("z").get<double>();
    r.p_two_sided = j.at("p").get<double>();
    r.ci_lo = j.at("ci").at(0).get<double>();
    r.ci_hi = j.at("ci").at(1).get<double>();
    r.alpha = j.value("alpha", 0.05);
    r.weights.values = j.at("weights").get<std::vector<double>>();
    r.weights.fallback = j.value("weights_fallback", false);
    r.method = parse_method_name(j.at("method").get<std::string>());
    r.decomposition.total = r.variance;
    r.decomposition.diseased = j.at("decomposition").at("diseased").get<double>();
    r.decomposition.nondiseased = j.at("decomposition").at("nondiseased").get<double>();
    return r;
}

inline json to_json(const CovarianceEstimate& c) {
    return json{{"labels", c.labels},
                {"method", c.method},
                {"psd_repaired", c.psd_repaired},
                {"sigma", matrix_json(c.sigma)},
                {"sigma_diseased", matrix_json(c.sigma1)},
                {"sigma_nondiseased", matrix_json(c.sigma2)}};
}

inline json to_json(const WaucVector& w) {
    json entries = json::array();
    for (std::size_t i = 0; i < w.values.size(); ++i)
        entries.push_back({{"label", w.labels[i]}, {"wauc", w.values[i]}});
    return json{{"measure", w.measure.selector()},
                {"total_mass", w.measure.total_mass()},
                {"design", w.design.describe()},
                {"estimates", entries}};
}

inline json to_json(const sim::CellResult& c) {
    return json{{"label", c.label},           {"true_delta", c.true_delta},
                {"mean_estimate", c.mean_estimate}, {"bias", c.bias},
                {"bias_percent", c.bias_percent},   {"rmse", c.rmse},
                {"coverage", c.coverage},           {"power", c.power},
                {"mc_se_coverage", c.mc_se_coverage}, {"mc_se_power", c.mc_se_power},
                {"mean_variance", c.mean_variance}, {"mc_variance", c.mc_variance},
                {"n_ok", c.n_ok},                   {"n_failed", c.n_failed},
                {"n_fallback", c.n_fallback}};
}

inline json to_json(const sim::StudyReport& r) {
    json cells = json::array();
    for (const auto& c : r.cells) cells.push_back(to_json(c));
    json j{{"tool_version", kToolVersion},
           {"scenario", scenario_to_text(r.spec)},
           {"seed", r.spec.seed},
           {"n_reps", r.spec.n_reps},
           {"cells", cells},
           {"failures", r.failures}};
    if (r.spec.kind == sim::StudyKind::Baseline) {
        j["slope_positive"] = r.slope_positive;
        j["slope_mismatches"] = r.slope_mismatches;
    }
    return j;
}

inline std::string study_csv(const sim::StudyReport& r) {
    std::ostringstream os;
    os.precision(10);
    os << "study,family,rho_x,rho_y,m,j,measure,cell,seed,n_reps,true_delta,mean_estimate,bias,bias_percent,"
          "rmse,coverage,mc_se_coverage,power,mc_se_power,mean_variance,mc_variance,n_ok,n_failed,n_fallback\n";
    for (const auto& c : r.cells) {
        os << r.spec.name << ',' << sim::to_string(r.spec.family) << ',' << r.spec.rho_x << ',' << r.spec.rho_y
           << ',' << r.spec.n_diseased << ',' << r.spec.n_nondiseased << ',' << '"' << r.spec.measure.selector()
           << '"' << ',' << c.label << ',' << r.spec.seed << ',' << r.spec.n_reps << ',' << c.true_delta << ','
           << c.mean_estimate << ',' << c.bias << ',' << c.bias_percent << ',' << c.rmse << ',' << c.coverage
           << ',' << c.mc_se_coverage << ',' << c.power << ',' << c.mc_se_power << ',' << c.mean_variance << ','
           << c.mc_variance << ',' << c.n_ok << ',' << c.n_failed << ',' << c.n_fallback << '\n';
    }
    return os.str();
}

}  // namespace cwauc::io

#pragma once

// Plain-text scenario files: one `key = value` per line, '#' starts a comment.
// `study` picks a preset (table1, table2, table3, table4, null); every other key
// overrides a field of the preset.

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "cwauc/errors.hpp"
#include "cwauc/io/selectors.hpp"
#include "cwauc/simulation.hpp"

namespace cwauc::io {

using ScenarioKeys = std::map<std::string, std::string>;

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

inline std::pair<int, int> parse_halves(std::string_view s) {
    const auto v = parse_double_list(s, "cluster size");
    if (v.size() != 2) throw InputError("cluster sizes take two values: <first half>,<second half>");
    return {static_cast<int>(v[0]), static_cast<int>(v[1])};
}

inline std::string join(const std::vector<double>& v) {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    return os.str();
}

}  // namespace detail

inline ScenarioKeys parse_scenario_keys(std::istream& in) {
    ScenarioKeys keys;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto text = detail::trim(line);
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw InputError("scenario line " + std::to_string(line_no) + ": expected key = value");
        keys[detail::trim(std::string_view(text).substr(0, eq))] = detail::trim(std::string_view(text).substr(eq + 1));
    }
    return keys;
}

inline sim::Family parse_family(std::string_view s) {
    if (s == "normal" || s == "norm") return sim::Family::Normal;
    if (s == "lognormal" || s == "ln") return sim::Family::LogNormal;
    throw InputError("family must be normal or lognormal");
}

inline std::vector<WeightMethod> parse_methods(std::string_view s) {
    std::vector<WeightMethod> out;
    for (auto part : cwauc::io::detail::split(s, ',')) {
        if (part == "equal") out.push_back(WeightMethod::Equal);
        else if (part == "optimal") out.push_back(WeightMethod::Optimal);
        else if (part == "both") {
            out.push_back(WeightMethod::Equal);
            out.push_back(WeightMethod::Optimal);
        } else throw InputError("scenario weights must be equal, optimal or both");
    }
    return out;
}

inline sim::ScenarioSpec build_scenario(const ScenarioKeys& keys) {
    auto get = [&](const std::string& k) -> const std::string* {
        auto it = keys.find(k);
        return it == keys.end() ? nullptr : &it->second;
    };
    static const char* known[] = {"study", "name", "family", "rho", "rho_x", "rho_y", "n", "m", "j",
                                  "reps", "seed", "measure", "weights", "alpha", "mu_x", "mu_y",
                                  "variances", "clusters_x", "clusters_y", "threads"};
    for (const auto& [k, v] : keys) {
        bool ok = false;
        for (const char* name : known) ok = ok || k == name;
        if (!ok) throw InputError("unknown scenario key '" + k + "'");
    }

    const std::string study = get("study") ? *get("study") : "table1";
    const auto family = get("family") ? parse_family(*get("family")) : sim::Family::Normal;
    const double rho = get("rho") ? parse_double(*get("rho"), "rho") : 0.5;
    const int n = get("n") ? parse_int(*get("n"), "n") : 50;
    const auto measure = get("measure") ? parse_weight_measure(*get("measure")) : WeightMeasure::full_auc();

    sim::ScenarioSpec s;
    if (study == "table1") s = sim::scenarios::table1(family, rho, n, measure);
    else if (study == "table2") s = sim::scenarios::table2(family, rho, n);
    else if (study == "table3") s = sim::scenarios::table3(rho, n, measure);
    else if (study == "table4") {
        s = sim::scenarios::table4(family, n, measure);
        if (get("rho")) s.rho_x = s.rho_y = rho;
    } else if (study == "null") s = sim::scenarios::null_modalities(rho, n, measure);
    else throw InputError("unknown study '" + study + "'");
    if (study == "table3" && get("family")) s.family = family;

    if (auto v = get("name")) s.name = *v;
    if (auto v = get("rho_x")) s.rho_x = parse_double(*v, "rho_x");
    if (auto v = get("rho_y")) s.rho_y = parse_double(*v, "rho_y");
    if (auto v = get("m")) s.n_diseased = parse_int(*v, "m");
    if (auto v = get("j")) s.n_nondiseased = parse_int(*v, "j");
    if (auto v = get("reps")) s.n_reps = parse_int(*v, "reps");
    if (auto v = get("seed")) s.seed = std::stoull(*v);
    if (auto v = get("weights")) s.methods = parse_methods(*v);
    if (auto v = get("alpha")) s.alpha = parse_double(*v, "alpha");
    if (auto v = get("mu_x")) s.mu_x = parse_double_list(*v, "mu_x");
    if (auto v = get("mu_y")) s.mu_y = parse_double_list(*v, "mu_y");
    if (auto v = get("variances")) s.variances = parse_double_list(*v, "variances");
    if (auto v = get("clusters_x")) s.cluster_x = detail::parse_halves(*v);
    if (auto v = get("clusters_y")) s.cluster_y = detail::parse_halves(*v);
    if (auto v = get("threads")) s.threads = static_cast<unsigned>(parse_int(*v, "threads"));
    s.check();
    return s;
}

inline sim::ScenarioSpec read_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open scenario '" + path + "'");
    return build_scenario(parse_scenario_keys(in));
}

// Fully resolved scenario in the same key = value format. The preset is
// recorded as `study`; all overridable fields are written explicitly.
inline std::string scenario_to_text(const sim::ScenarioSpec& s) {
    std::ostringstream os;
    os.precision(17);
    os << "study = " << s.name << '\n'
       << "family = " << sim::to_string(s.family) << '\n'
       << "rho_x = " << s.rho_x << '\n'
       << "rho_y = " << s.rho_y << '\n'
       << "m = " << s.n_diseased << '\n'
       << "j = " << s.n_nondiseased << '\n'
       << "reps = " << s.n_reps << '\n'
       << "seed = " << s.seed << '\n'
       << "measure = " << s.measure.selector() << '\n'
       << "weights = ";
    for (std::size_t i = 0; i < s.methods.size(); ++i) os << (i ? "," : "") << to_string(s.methods[i]);
    os << '\n'
       << "alpha = " << s.alpha << '\n'
       << "mu_x = " << detail::join(s.mu_x) << '\n'
       << "mu_y = " << detail::join(s.mu_y) << '\n'
       << "variances = " << detail::join(s.variances) << '\n'
       << "clusters_x = " << s.cluster_x.first << ',' << s.cluster_x.second << '\n'
       << "clusters_y = " << s.cluster_y.first << ',' << s.cluster_y.second << '\n';
    return os.str();
}

}  // namespace cwauc::io

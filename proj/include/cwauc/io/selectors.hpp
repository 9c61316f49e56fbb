#pragma once

// Text selectors used on the command line and in scenario files.
//   measure:  auc | pauc:<u1>,<u2>[:normalized] | sens:<u0> | steps:<u1>=<m1>,...
//   weights:  equal | optimal | custom:<w1>,<w2>,...
//   design:   mrmt:<R> | longitudinal:<K> | panel:<L>

#include <string>
#include <string_view>
#include <vector>

#include "cwauc/design.hpp"
#include "cwauc/errors.hpp"
#include "cwauc/inference.hpp"
#include "cwauc/io/csv.hpp"
#include "cwauc/weight_measure.hpp"

namespace cwauc::io {

inline double parse_double(std::string_view s, std::string_view what) {
    double v = 0.0;
    if (!detail::parse_number(s, v)) throw InputError("invalid " + std::string(what) + " '" + std::string(s) + "'");
    return v;
}

inline int parse_int(std::string_view s, std::string_view what) {
    int v = 0;
    if (!detail::parse_number(s, v)) throw InputError("invalid " + std::string(what) + " '" + std::string(s) + "'");
    return v;
}

inline std::vector<double> parse_double_list(std::string_view s, std::string_view what) {
    std::vector<double> out;
    for (auto part : detail::split(s, ',')) out.push_back(parse_double(part, what));
    return out;
}

inline WeightMeasure parse_weight_measure(std::string_view text) {
    if (text == "auc") return WeightMeasure::full_auc();
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) throw InputError("unknown weight measure '" + std::string(text) + "'");
    const auto head = text.substr(0, colon);
    auto rest = text.substr(colon + 1);

    if (head == "pauc") {
        bool normalized = false;
        if (const auto c2 = rest.find(':'); c2 != std::string_view::npos) {
            if (rest.substr(c2 + 1) != "normalized")
                throw InputError("pauc suffix must be ':normalized'");
            normalized = true;
            rest = rest.substr(0, c2);
        }
        const auto bounds = parse_double_list(rest, "pauc bound");
        if (bounds.size() != 2) throw InputError("pauc needs two bounds: pauc:<u1>,<u2>");
        return WeightMeasure::partial_auc(bounds[0], bounds[1], normalized);
    }
    if (head == "sens") return WeightMeasure::point_mass(parse_double(rest, "sensitivity FPR"));
    if (head == "steps") {
        std::vector<Atom> atoms;
        for (auto part : detail::split(rest, ',')) {
            const auto eq = part.find('=');
            if (eq == std::string_view::npos) throw InputError("step atom must be <u>=<mass>");
            atoms.push_back({parse_double(part.substr(0, eq), "step u"), parse_double(part.substr(eq + 1), "step mass")});
        }
        return WeightMeasure::steps(std::move(atoms));
    }
    throw InputError("unknown weight measure '" + std::string(text) + "'");
}

struct WeightSelection {
    WeightMethod method = WeightMethod::Equal;
    std::vector<double> custom;
};

inline WeightSelection parse_weights(std::string_view text) {
    if (text == "equal") return {WeightMethod::Equal, {}};
    if (text == "optimal") return {WeightMethod::Optimal, {}};
    if (text.starts_with("custom:")) {
        auto w = parse_double_list(text.substr(7), "weight");
        WeightVector::custom(w);  // validates positivity
        return {WeightMethod::Custom, std::move(w)};
    }
    throw InputError("weights must be equal, optimal or custom:<w1,...>");
}

inline StudyDesign parse_design(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) throw InputError("design must be mrmt:<R>, longitudinal:<K> or panel:<L>");
    const auto head = text.substr(0, colon);
    const int n = parse_int(text.substr(colon + 1), "design size");
    if (head == "mrmt") return StudyDesign::multi_reader(n);
    if (head == "longitudinal") return StudyDesign::longitudinal(n);
    if (head == "panel") return StudyDesign::panel(n);
    throw InputError("unknown design '" + std::string(text) + "'");
}

}  // namespace cwauc::io

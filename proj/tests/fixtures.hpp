#pragma once

#include <string>
#include <vector>

#include "cwauc/data.hpp"

namespace fixtures {

// One marker, one time, one value per subject.
inline cwauc::MarkerDataset single(const std::vector<double>& x, const std::vector<double>& y) {
    cwauc::MarkerDataset d;
    int id = 0;
    for (double v : x) d.diseased.push_back({"d" + std::to_string(++id), {{{1, 1}, {v}}}});
    for (double v : y) d.nondiseased.push_back({"n" + std::to_string(++id), {{{1, 1}, {v}}}});
    return d;
}

// One marker, one time, each subject a cluster of values.
inline cwauc::MarkerDataset clustered(const std::vector<std::vector<double>>& x,
                                      const std::vector<std::vector<double>>& y) {
    cwauc::MarkerDataset d;
    int id = 0;
    for (const auto& c : x) d.diseased.push_back({"d" + std::to_string(++id), {{{1, 1}, c}}});
    for (const auto& c : y) d.nondiseased.push_back({"n" + std::to_string(++id), {{{1, 1}, c}}});
    return d;
}

}  // namespace fixtures

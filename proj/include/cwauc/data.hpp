#pragma once

// Clustered ROC data: subjects in two disease groups, each carrying one or more
// replicate measurements per (marker, time) cell.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cwauc/errors.hpp"

namespace cwauc {

enum class Group { Diseased, NonDiseased };

inline const char* group_token(Group g) { return g == Group::Diseased ? "D" : "ND"; }

// 1-based (marker, time) cell address.
struct CellKey {
    int marker = 1;
    int time = 1;
    auto operator<=>(const CellKey&) const = default;
};

struct SubjectRecord {
    std::string subject_id;
    std::map<CellKey, std::vector<double>> measurements;

    bool operator==(const SubjectRecord&) const = default;

    // Number of replicates in one cell; 0 when the cell is absent.
    std::size_t count(CellKey key) const {
        auto it = measurements.find(key);
        return it == measurements.end() ? 0 : it->second.size();
    }
};

struct MarkerDataset {
    std::vector<SubjectRecord> diseased;
    std::vector<SubjectRecord> nondiseased;
    int n_markers = 1;
    int n_times = 1;

    bool operator==(const MarkerDataset&) const = default;

    const std::vector<SubjectRecord>& group(Group g) const {
        return g == Group::Diseased ? diseased : nondiseased;
    }
    std::vector<SubjectRecord>& group(Group g) {
        return g == Group::Diseased ? diseased : nondiseased;
    }
};

// A unit of estimation: one marker, either pooled over all times (time == 0)
// or restricted to a single time.
struct Stratum {
    int marker = 1;
    int time = 0;

    static Stratum pooled(int marker) { return {marker, 0}; }
    static Stratum at_time(int marker, int time) { return {marker, time}; }
    bool is_pooled() const { return time == 0; }
    bool operator==(const Stratum&) const = default;

    std::string label() const {
        return is_pooled() ? "marker" + std::to_string(marker)
                           : "marker" + std::to_string(marker) + "@t" + std::to_string(time);
    }
};

// Measurements of one group in one stratum, stored subject-contiguously.
// values[offsets[i] .. offsets[i+1]) belong to subject i.
struct ClusteredSample {
    std::vector<double> values;
    std::vector<std::size_t> offsets{0};

    std::size_t subjects() const { return offsets.size() - 1; }
    std::size_t size() const { return values.size(); }
    std::size_t cluster_size(std::size_t i) const { return offsets[i + 1] - offsets[i]; }
    std::span<const double> cluster(std::size_t i) const {
        return {values.data() + offsets[i], cluster_size(i)};
    }
    void add_cluster(std::span<const double> v) {
        values.insert(values.end(), v.begin(), v.end());
        offsets.push_back(values.size());
    }
};

inline ClusteredSample cluster_sample(const MarkerDataset& data, Group g, Stratum s) {
    if (s.marker < 1 || s.marker > data.n_markers)
        throw InputError("unknown marker index " + std::to_string(s.marker));
    if (s.time < 0 || s.time > data.n_times)
        throw InputError("unknown time index " + std::to_string(s.time));
    ClusteredSample out;
    for (const auto& subject : data.group(g)) {
        std::vector<double> cluster;
        for (const auto& [key, vals] : subject.measurements) {
            if (key.marker != s.marker) continue;
            if (!s.is_pooled() && key.time != s.time) continue;
            cluster.insert(cluster.end(), vals.begin(), vals.end());
        }
        out.add_cluster(cluster);
    }
    return out;
}

struct Violation {
    std::string subject_id;
    Group group = Group::Diseased;
    CellKey cell;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool clean() const { return violations.empty(); }
};

inline ValidationReport validate(const MarkerDataset& data) {
    ValidationReport report;
    auto add = [&](const SubjectRecord* s, Group g, CellKey c, std::string msg) {
        report.violations.push_back({s ? s->subject_id : std::string{}, g, c, std::move(msg)});
    };
    if (data.n_markers < 1) add(nullptr, Group::Diseased, {}, "n_markers must be >= 1");
    if (data.n_times < 1) add(nullptr, Group::Diseased, {}, "n_times must be >= 1");
    if (data.diseased.empty()) add(nullptr, Group::Diseased, {}, "no diseased subjects");
    if (data.nondiseased.empty()) add(nullptr, Group::NonDiseased, {}, "no non-diseased subjects");

    for (Group g : {Group::Diseased, Group::NonDiseased}) {
        for (const auto& s : data.group(g)) {
            for (const auto& [key, vals] : s.measurements) {
                if (key.marker < 1 || key.marker > data.n_markers || key.time < 1 ||
                    key.time > data.n_times) {
                    add(&s, g, key, "index out of range");
                    continue;
                }
                for (double v : vals) {
                    if (!std::isfinite(v)) {
                        add(&s, g, key, "non-finite value at subject/marker/time");
                        break;
                    }
                }
            }
            for (int m = 1; m <= data.n_markers; ++m)
                for (int t = 1; t <= data.n_times; ++t)
                    if (s.count({m, t}) == 0) add(&s, g, {m, t}, "empty cell");
        }
    }
    return report;
}

struct PooledCounts {
    std::size_t diseased = 0;     // m_l
    std::size_t nondiseased = 0;  // n_l
};

// Total measurement counts for one marker over all subjects and times.
inline PooledCounts pooled_counts(const MarkerDataset& data, int marker) {
    if (marker < 1 || marker > data.n_markers)
        throw InputError("unknown marker index " + std::to_string(marker));
    PooledCounts c;
    for (Group g : {Group::Diseased, Group::NonDiseased}) {
        std::size_t total = 0;
        for (const auto& s : data.group(g))
            for (const auto& [key, vals] : s.measurements)
                if (key.marker == marker) total += vals.size();
        (g == Group::Diseased ? c.diseased : c.nondiseased) = total;
    }
    return c;
}

// Applies f to every stored measurement.
template <class F>
MarkerDataset transform_values(MarkerDataset data, F&& f) {
    for (Group g : {Group::Diseased, Group::NonDiseased})
        for (auto& s : data.group(g))
            for (auto& [key, vals] : s.measurements)
                for (double& v : vals) v = f(v);
    return data;
}

}  // namespace cwauc

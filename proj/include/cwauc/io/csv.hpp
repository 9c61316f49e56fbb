#pragma once

// Long-format CSV: subject_id,status,marker,time,replicate,value

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cwauc/data.hpp"
#include "cwauc/errors.hpp"

namespace cwauc::io {

inline constexpr std::string_view kCsvHeader = "subject_id,status,marker,time,replicate,value";

namespace detail {

inline std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

}  // namespace detail

// Parses the long format. Subjects keep their order of first appearance within
// each group; replicates are ordered by replicate index. n_markers and n_times
// are the largest indices present. Errors carry the 1-based line number.
inline MarkerDataset read_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& msg) {
        throw InputError("line " + std::to_string(line_no) + ": " + msg);
    };

    if (!std::getline(in, line)) throw InputError("line 1: missing header");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);
    if (line != kCsvHeader) fail("expected header '" + std::string(kCsvHeader) + "'");

    struct Pending {
        Group group;
        std::map<CellKey, std::map<int, double>> cells;
    };
    std::map<std::string, std::size_t> index;
    std::vector<std::pair<std::string, Pending>> subjects;
    int max_marker = 0, max_time = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = detail::split(line, ',');
        if (fields.size() != 6) fail("expected 6 fields, found " + std::to_string(fields.size()));
        const std::string id(fields[0]);
        if (id.empty()) fail("empty subject_id");

        Group group;
        if (fields[1] == "D") group = Group::Diseased;
        else if (fields[1] == "ND") group = Group::NonDiseased;
        else fail("status must be D or ND, got '" + std::string(fields[1]) + "'");

        int marker = 0, time = 0, replicate = 0;
        if (!detail::parse_number(fields[2], marker) || marker < 1) fail("marker must be a positive integer");
        if (!detail::parse_number(fields[3], time) || time < 1) fail("time must be a positive integer");
        if (!detail::parse_number(fields[4], replicate) || replicate < 1)
            fail("replicate must be a positive integer");
        double value = 0.0;
        if (!detail::parse_number(fields[5], value)) fail("value is not a decimal number");

        auto [it, inserted] = index.try_emplace(id, subjects.size());
        if (inserted) subjects.push_back({id, Pending{group, {}}});
        auto& subject = subjects[it->second].second;
        if (subject.group != group) fail("subject '" + id + "' appears with both statuses");
        auto& cell = subject.cells[{marker, time}];
        if (!cell.emplace(replicate, value).second)
            fail("duplicate replicate " + std::to_string(replicate) + " for subject '" + id + "'");
        max_marker = std::max(max_marker, marker);
        max_time = std::max(max_time, time);
    }

    MarkerDataset data;
    data.n_markers = std::max(1, max_marker);
    data.n_times = std::max(1, max_time);
    for (auto& [id, pending] : subjects) {
        SubjectRecord rec;
        rec.subject_id = id;
        for (auto& [key, reps] : pending.cells) {
            auto& vals = rec.measurements[key];
            for (auto& [rep, v] : reps) vals.push_back(v);
        }
        data.group(pending.group).push_back(std::move(rec));
    }
    return data;
}

inline MarkerDataset read_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    return read_csv(in);
}

inline MarkerDataset read_csv_string(const std::string& text) {
    std::istringstream in(text);
    return read_csv(in);
}

// Writes the long format; values use shortest round-trip representation.
inline void write_csv(std::ostream& out, const MarkerDataset& data) {
    out << kCsvHeader << '\n';
    char buf[64];
    for (Group g : {Group::Diseased, Group::NonDiseased}) {
        for (const auto& s : data.group(g)) {
            for (const auto& [key, vals] : s.measurements) {
                for (std::size_t p = 0; p < vals.size(); ++p) {
                    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, vals[p]);
                    out << s.subject_id << ',' << group_token(g) << ',' << key.marker << ',' << key.time << ','
                        << (p + 1) << ',' << std::string_view(buf, static_cast<std::size_t>(end - buf)) << '\n';
                }
            }
        }
    }
}

inline std::string write_csv_string(const MarkerDataset& data) {
    std::ostringstream os;
    write_csv(os, data);
    return os.str();
}

// FNV-1a 64-bit digest of a byte string, hex encoded.
inline std::string checksum(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

}  // namespace cwauc::io

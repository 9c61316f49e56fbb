#pragma once

#include <string>
#include <vector>

#include "cwauc/data.hpp"
#include "cwauc/errors.hpp"

namespace cwauc {

// How the wAUC vector is laid out and which entries are paired for comparison.
//
//  MultiReader:  L = 2R markers, K = 1. Index r is (reader r, modality 1),
//                index R + r is (reader r, modality 2). Pairs (r, R + r).
//  Longitudinal: two markers, K times, per-time grid. Index k is (marker 1,
//                time k), index K + k is (marker 2, time k). Pairs (k, K + k).
//  Panel:        L markers pooled over all times; no built-in pairing.
class StudyDesign {
public:
    enum class Kind { MultiReader, Longitudinal, Panel };

    static StudyDesign multi_reader(int readers) {
        if (readers < 1) throw InputError("multi-reader design needs at least one reader");
        return StudyDesign(Kind::MultiReader, readers);
    }
    static StudyDesign longitudinal(int times) {
        if (times < 1) throw InputError("longitudinal design needs at least one time");
        return StudyDesign(Kind::Longitudinal, times);
    }
    static StudyDesign panel(int markers) {
        if (markers < 1) throw InputError("panel design needs at least one marker");
        return StudyDesign(Kind::Panel, markers);
    }

    Kind kind() const { return kind_; }
    bool paired() const { return kind_ != Kind::Panel; }

    // R for multi-reader, K for longitudinal, 0 for panel.
    int pair_count() const { return paired() ? size_ : 0; }

    int dimension() const { return paired() ? 2 * size_ : size_; }

    std::vector<Stratum> strata() const {
        std::vector<Stratum> out;
        switch (kind_) {
            case Kind::MultiReader:
                for (int l = 1; l <= 2 * size_; ++l) out.push_back(Stratum::pooled(l));
                break;
            case Kind::Longitudinal:
                for (int m = 1; m <= 2; ++m)
                    for (int k = 1; k <= size_; ++k) out.push_back(Stratum::at_time(m, k));
                break;
            case Kind::Panel:
                for (int l = 1; l <= size_; ++l) out.push_back(Stratum::pooled(l));
                break;
        }
        return out;
    }

    std::vector<std::string> labels() const {
        std::vector<std::string> out;
        switch (kind_) {
            case Kind::MultiReader:
                for (int mod = 1; mod <= 2; ++mod)
                    for (int r = 1; r <= size_; ++r)
                        out.push_back("reader" + std::to_string(r) + "/modality" + std::to_string(mod));
                break;
            case Kind::Longitudinal:
            case Kind::Panel:
                for (const auto& s : strata()) out.push_back(s.label());
                break;
        }
        return out;
    }

    std::string describe() const {
        switch (kind_) {
            case Kind::MultiReader: return "mrmt:" + std::to_string(size_);
            case Kind::Longitudinal: return "longitudinal:" + std::to_string(size_);
            case Kind::Panel: return "panel:" + std::to_string(size_);
        }
        return {};
    }

    // Throws InputError when the dataset cannot carry this design.
    void check(const MarkerDataset& data) const {
        switch (kind_) {
            case Kind::MultiReader:
                if (data.n_markers != 2 * size_)
                    throw InputError("multi-reader design with R=" + std::to_string(size_) +
                                     " requires L=2R=" + std::to_string(2 * size_) + " markers, got " +
                                     std::to_string(data.n_markers));
                if (data.n_times != 1) throw InputError("multi-reader design requires a single time");
                break;
            case Kind::Longitudinal:
                if (data.n_markers != 2)
                    throw InputError("longitudinal paired design requires exactly 2 markers");
                if (data.n_times != size_)
                    throw InputError("longitudinal design with K=" + std::to_string(size_) +
                                     " does not match dataset with " + std::to_string(data.n_times) +
                                     " times");
                break;
            case Kind::Panel:
                if (data.n_markers != size_)
                    throw InputError("panel design marker count does not match dataset");
                break;
        }
    }

private:
    StudyDesign(Kind k, int n) : kind_(k), size_(n) {}
    Kind kind_;
    int size_;
};

}  // namespace cwauc

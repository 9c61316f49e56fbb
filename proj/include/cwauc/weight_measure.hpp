#pragma once

#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "cwauc/errors.hpp"

namespace cwauc {

struct FullAuc {};

// FPR window (u1, u2). Unnormalized (mass u2 - u1) unless `normalized`.
struct PartialAuc {
    double u1 = 0.0;
    double u2 = 1.0;
    bool normalized = false;
};

// Sensitivity at a fixed false positive rate.
struct PointMass {
    double u0 = 0.5;
};

struct Atom {
    double u = 0.5;
    double mass = 1.0;
};

struct StepMeasure {
    std::vector<Atom> atoms;
};

// Measure W(u) on FPR space selecting the summary functional of the ROC curve.
class WeightMeasure {
public:
    using Kind = std::variant<FullAuc, PartialAuc, PointMass, StepMeasure>;

    WeightMeasure() = default;

    static WeightMeasure full_auc() { return WeightMeasure(FullAuc{}); }

    static WeightMeasure partial_auc(double u1, double u2, bool normalized = false) {
        if (!(u1 >= 0.0 && u1 < u2 && u2 <= 1.0))
            throw InputError("partial AUC requires 0 <= u1 < u2 <= 1");
        return WeightMeasure(PartialAuc{u1, u2, normalized});
    }

    static WeightMeasure point_mass(double u0) {
        if (!(u0 > 0.0 && u0 < 1.0)) throw InputError("point mass requires 0 < u0 < 1");
        return WeightMeasure(PointMass{u0});
    }

    static WeightMeasure steps(std::vector<Atom> atoms) {
        if (atoms.empty()) throw InputError("step measure needs at least one atom");
        for (const auto& a : atoms) {
            if (!(a.u > 0.0 && a.u < 1.0)) throw InputError("step atom u must lie in (0,1)");
            if (!(a.mass > 0.0) || !std::isfinite(a.mass))
                throw InputError("step atom mass must be positive");
        }
        return WeightMeasure(StepMeasure{std::move(atoms)});
    }

    const Kind& kind() const { return kind_; }

    template <class T>
    bool is() const { return std::holds_alternative<T>(kind_); }

    double total_mass() const {
        return std::visit(
            [](const auto& k) -> double {
                using T = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<T, PartialAuc>)
                    return k.normalized ? 1.0 : k.u2 - k.u1;
                else if constexpr (std::is_same_v<T, StepMeasure>)
                    return std::accumulate(k.atoms.begin(), k.atoms.end(), 0.0,
                                           [](double s, const Atom& a) { return s + a.mass; });
                else
                    return 1.0;
            },
            kind_);
    }

    // Canonical selector string (same grammar the CLI parses).
    std::string selector() const {
        std::ostringstream os;
        auto num = [](double v) {
            char buf[32];
            return std::string(buf, std::to_chars(buf, buf + sizeof buf, v).ptr);
        };
        std::visit(
            [&](const auto& k) {
                using T = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<T, FullAuc>) {
                    os << "auc";
                } else if constexpr (std::is_same_v<T, PartialAuc>) {
                    os << "pauc:" << num(k.u1) << "," << num(k.u2) << (k.normalized ? ":normalized" : "");
                } else if constexpr (std::is_same_v<T, PointMass>) {
                    os << "sens:" << num(k.u0);
                } else {
                    os << "steps:";
                    for (std::size_t i = 0; i < k.atoms.size(); ++i)
                        os << (i ? "," : "") << num(k.atoms[i].u) << "=" << num(k.atoms[i].mass);
                }
            },
            kind_);
        return os.str();
    }

private:
    explicit WeightMeasure(Kind k) : kind_(std::move(k)) {}
    Kind kind_{FullAuc{}};
};

}  // namespace cwauc

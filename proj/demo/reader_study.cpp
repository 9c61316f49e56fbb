// Simulates one three-reader, two-modality study and compares the modalities
// with equal and optimal reader weights, for the AUC and the (0, 0.6) pAUC.
//
//   reader_study [out.csv]
//
// With a path, the simulated data is also written in the long CSV format the
// `cwauc` command line tool reads.

#include <cmath>
#include <cstdio>
#include <fstream>

#include "cwauc/cwauc.hpp"
#include "cwauc/io/csv.hpp"

using namespace cwauc;

int main(int argc, char** argv) {
    auto spec = sim::scenarios::table3(0.5, 60, WeightMeasure::full_auc());
    auto rng = stream_rng(2024, 0);
    const MarkerDataset data = sim::ScenarioGenerator(spec)(rng);
    if (argc > 1) {
        std::ofstream out(argv[1]);
        io::write_csv(out, data);
    }

    const auto design = StudyDesign::multi_reader(3);
    for (const auto& measure : {WeightMeasure::full_auc(), WeightMeasure::partial_auc(0.0, 0.6)}) {
        const auto est = estimate_wauc(data, design, measure);
        std::printf("%s\n  per reader and modality:", measure.selector().c_str());
        for (double v : est.values) std::printf(" %.3f", v);
        std::printf("\n");
        for (auto method : {WeightMethod::Equal, WeightMethod::Optimal}) {
            CompareOptions opt;
            opt.method = method;
            const auto r = analyze_comparison(data, design, measure, opt).result;
            std::printf("  %-7s delta %+.4f  se %.4f  z %+.2f  p %.3g  95%% CI [%+.4f, %+.4f]  weights",
                        to_string(method), r.estimate, std::sqrt(r.variance), r.z, r.p_two_sided, r.ci_lo,
                        r.ci_hi);
            for (double w : r.weights.normalized()) std::printf(" %.3f", w);
            std::printf("%s\n", r.weights.fallback ? " (fallback)" : "");
        }
    }
    return 0;
}

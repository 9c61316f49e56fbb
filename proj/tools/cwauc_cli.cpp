// cwauc: weighted-AUC analysis and simulation from the command line.
//
//   cwauc analyze  data.csv [--design mrmt:4] [--measure auc] [--weights optimal] ...
//   cwauc compare  data.csv --design mrmt:4 [--weights optimal]
//   cwauc simulate table1 --rho 0.5 --n 50 --reps 1000 --seed 7 [-o prefix]
//   cwauc roc      data.csv --marker 1 [--grid 512]
//
// Exit codes: 0 success, 2 input error, 3 numerical failure.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "cwauc/cwauc.hpp"
#include "cwauc/io/csv.hpp"
#include "cwauc/io/report.hpp"
#include "cwauc/io/scenario_file.hpp"
#include "cwauc/io/selectors.hpp"

namespace {

using namespace cwauc;
using nlohmann::json;

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct AnalyzeArgs {
    std::string input;
    std::string design;
    std::string measure = "auc";
    std::string weights = "equal";
    double alpha = 0.05;
    std::optional<double> ridge;
    int bootstrap = 0;
    std::uint64_t seed = 1;
    unsigned threads = default_threads();
    bool midrank = false;
    std::string output;
    std::string format = "json";
};

struct SimulateArgs {
    std::string scenario;
    std::optional<double> rho;
    std::optional<int> n;
    std::optional<int> reps;
    std::optional<std::uint64_t> seed;
    std::string measure;
    std::string family;
    std::string weights;
    unsigned threads = default_threads();
    std::string output;
};

struct RocArgs {
    std::string input;
    int marker = 1;
    int time = 0;
    int grid = 512;
    std::string output;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << text;
}

// Reads and validates; violations become an InputError listing each one.
MarkerDataset load_dataset(const std::string& path, std::string& checksum) {
    const std::string bytes = slurp(path);
    checksum = io::checksum(bytes);
    auto data = io::read_csv_string(bytes);
    const auto report = validate(data);
    if (!report.clean()) {
        std::ostringstream os;
        os << "dataset failed validation:";
        for (const auto& v : report.violations)
            os << "\n  subject '" << v.subject_id << "' (" << group_token(v.group) << ") marker " << v.cell.marker
               << " time " << v.cell.time << ": " << v.message;
        throw InputError(os.str());
    }
    return data;
}

int run_analyze(const AnalyzeArgs& a, bool require_comparison) {
    std::string checksum;
    const auto data = load_dataset(a.input, checksum);
    const auto design = a.design.empty() ? StudyDesign::panel(data.n_markers) : io::parse_design(a.design);
    design.check(data);
    if (require_comparison && !design.paired())
        throw InputError("compare needs a paired design (mrmt:<R> or longitudinal:<K>)");
    const auto measure = io::parse_weight_measure(a.measure);
    const auto weights = io::parse_weights(a.weights);
    if (!(a.alpha > 0.0 && a.alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");

    CompareOptions opt;
    opt.method = weights.method;
    opt.custom_weights = weights.custom;
    opt.alpha = a.alpha;
    opt.ridge = a.ridge;
    opt.covariance.ties = a.midrank ? TieRule::MidRank : TieRule::Strict;

    const auto strata = design_samples(data, design);
    const auto wauc = estimate_wauc(strata, design, measure, opt.covariance.ties);
    const auto cov = sigma_matrix(strata, design.labels(), measure, opt.covariance);

    json report{{"tool_version", io::kToolVersion},
                {"command", require_comparison ? "compare" : "analyze"},
                {"config",
                 {{"input", a.input},
                  {"design", design.describe()},
                  {"measure", measure.selector()},
                  {"weights", a.weights},
                  {"alpha", a.alpha},
                  {"ridge", a.ridge ? json(*a.ridge) : json(nullptr)},
                  {"bootstrap", a.bootstrap},
                  {"threads", a.threads},
                  {"ties", a.midrank ? "midrank" : "strict"}}},
                {"seed", a.seed},
                {"input_checksum", checksum},
                {"subjects", {{"diseased", data.diseased.size()}, {"nondiseased", data.nondiseased.size()}}},
                {"wauc", io::to_json(wauc)},
                {"covariance", io::to_json(cov)}};

    std::optional<ComparisonResult> comparison;
    if (design.paired()) {
        comparison = compare_paired(wauc, cov, opt);
        report["comparison"] = io::to_json(*comparison);
    }
    if (a.bootstrap > 0) {
        const auto boot = bootstrap_covariance(data, design, measure, a.bootstrap, a.seed, opt.covariance.ties,
                                               a.threads);
        report["bootstrap"] = io::to_json(boot.estimate);
        report["bootstrap"]["replicates"] = a.bootstrap;
        report["bootstrap"]["redraws"] = boot.redraws;
    }

    if (a.format == "csv") {
        std::ostringstream os;
        os.precision(17);
        os << "label,wauc,variance\n";
        for (std::size_t i = 0; i < wauc.values.size(); ++i)
            os << wauc.labels[i] << ',' << wauc.values[i] << ','
               << cov.sigma(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) << '\n';
        if (comparison)
            os << "comparison," << comparison->estimate << ',' << comparison->variance << '\n';
        emit(a.output, os.str());
    } else {
        emit(a.output, report.dump(2) + "\n");
    }
    return 0;
}

int run_simulate(const SimulateArgs& a) {
    io::ScenarioKeys keys;
    if (std::filesystem::is_regular_file(a.scenario)) {
        std::ifstream in(a.scenario);
        keys = io::parse_scenario_keys(in);
    } else {
        keys["study"] = a.scenario;
    }
    if (a.rho) keys["rho"] = std::to_string(*a.rho);
    if (a.n) keys["n"] = std::to_string(*a.n);
    if (a.reps) keys["reps"] = std::to_string(*a.reps);
    if (a.seed) keys["seed"] = std::to_string(*a.seed);
    if (!a.measure.empty()) keys["measure"] = a.measure;
    if (!a.family.empty()) keys["family"] = a.family;
    if (!a.weights.empty()) keys["weights"] = a.weights;
    auto spec = io::build_scenario(keys);
    spec.threads = a.threads;

    const auto report = sim::run_scenario(spec);
    const std::string text = io::to_json(report).dump(2) + "\n";
    if (a.output.empty()) {
        std::cout << text;
    } else {
        emit(a.output + ".json", text);
        emit(a.output + ".csv", io::study_csv(report));
    }
    return 0;
}

int run_roc(const RocArgs& a) {
    std::string checksum;
    const auto data = load_dataset(a.input, checksum);
    if (a.grid < 1) throw InputError("grid must have at least one point");
    const auto s = StratumSamples::from(data, Stratum{a.marker, a.time});
    std::ostringstream os;
    os.precision(17);
    os << "u,roc\n";
    for (int i = 1; i <= a.grid; ++i) {
        const double u = static_cast<double>(i) / (a.grid + 1);
        os << u << ',' << empirical_roc(s.x, s.y, u) << '\n';
    }
    emit(a.output, os.str());
    return 0;
}

void add_analysis_options(CLI::App* cmd, AnalyzeArgs& a) {
    cmd->add_option("input", a.input, "long-format CSV")->required();
    cmd->add_option("--design", a.design, "mrmt:<R> | longitudinal:<K> | panel:<L> (default panel)");
    cmd->add_option("--measure", a.measure, "auc | pauc:<u1>,<u2>[:normalized] | sens:<u0> | steps:<u>=<m>,...");
    cmd->add_option("--weights", a.weights, "equal | optimal | custom:<w1,...>");
    cmd->add_option("--alpha", a.alpha, "test level");
    cmd->add_option("--ridge", a.ridge, "ridge for optimal weights (0 disables)");
    cmd->add_option("--bootstrap", a.bootstrap, "bootstrap replicates (0 = off, else >= 100)");
    cmd->add_option("--seed", a.seed, "bootstrap seed");
    cmd->add_option("--threads", a.threads, "worker threads (default CWAUC_THREADS or 1)");
    cmd->add_flag("--midrank", a.midrank, "count ties as 1/2");
    cmd->add_option("-o,--output", a.output, "output file (default stdout)");
    cmd->add_option("--format", a.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Clustered weighted-AUC analysis"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(io::kToolVersion));

    AnalyzeArgs analyze_args, compare_args;
    SimulateArgs sim_args;
    RocArgs roc_args;

    auto* analyze = app.add_subcommand("analyze", "estimate wAUCs and their covariance");
    add_analysis_options(analyze, analyze_args);
    auto* compare = app.add_subcommand("compare", "weighted paired comparison");
    add_analysis_options(compare, compare_args);

    auto* simulate = app.add_subcommand("simulate", "run a Monte Carlo study");
    simulate->add_option("scenario", sim_args.scenario, "scenario file or preset (table1..table4, null)")
        ->required();
    simulate->add_option("--rho", sim_args.rho);
    simulate->add_option("--n", sim_args.n, "subjects per group");
    simulate->add_option("--reps", sim_args.reps);
    simulate->add_option("--seed", sim_args.seed);
    simulate->add_option("--measure", sim_args.measure);
    simulate->add_option("--family", sim_args.family, "normal | lognormal");
    simulate->add_option("--weights", sim_args.weights, "equal | optimal | both");
    simulate->add_option("--threads", sim_args.threads);
    simulate->add_option("-o,--output", sim_args.output, "output prefix; writes <prefix>.json and <prefix>.csv");

    auto* roc = app.add_subcommand("roc", "empirical ROC curve on a grid");
    roc->add_option("input", roc_args.input)->required();
    roc->add_option("--marker", roc_args.marker);
    roc->add_option("--time", roc_args.time, "restrict to one time (default pooled)");
    roc->add_option("--grid", roc_args.grid);
    roc->add_option("-o,--output", roc_args.output);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (*analyze) return run_analyze(analyze_args, false);
        if (*compare) return run_analyze(compare_args, true);
        if (*simulate) return run_simulate(sim_args);
        if (*roc) return run_roc(roc_args);
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return 0;
}

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coreset/dataset.hpp"
#include "coreset/moea.hpp"

namespace coreset {

// Coreset-selection methods the experiment harness can run.
enum class Method {
    EvoCore,
    Giga,
    FrankWolfe,
    MatchingPursuit,
    OrthogonalMatchingPursuit,
    ForwardStagewise,
    StratifiedRandom,
};

// Every known method, in the canonical report order.
const std::vector<Method>& all_methods();

// Methods run when the config does not name any: every method except the
// stratified-random control, which is opt-in.
const std::vector<Method>& default_methods();

// Canonical token for a method ("evocore", "giga", "frank-wolfe", "mp",
// "omp", "stagewise", "random").
const std::string& method_name(Method method);

// Inverse of method_name; throws std::invalid_argument on unknown tokens.
Method parse_method(const std::string& token);

struct ExperimentConfig {
    std::string data_path;
    std::string label_column;
    int folds = 10;
    std::uint64_t seed = 42;
    double alpha = 1.0;
    std::vector<Method> methods;  // empty selects default_methods()
    double val_fraction = 1.0 / 9.0;
    std::string out_dir;  // empty disables artifact files
    MissingPolicy missing_policy = MissingPolicy::MeanImpute;
    char delimiter = ',';
    int jobs = 0;  // fold-level parallelism; 0 means available hardware
    // When false, fit_time_s is reported as 0 so that repeated runs with the
    // same config and seed emit byte-identical artifacts.
    bool wall_clock = true;
};

struct RunReport {
    struct Row {
        Method method = Method::EvoCore;
        int fold = 0;
        bool ok = false;
        int size = 0;
        double train_f1 = 0.0;
        double test_f1 = 0.0;
        double fit_time_s = 0.0;
        std::string fail_reason;  // set when !ok
    };

    std::vector<Row> rows;  // every (method, fold) cell, canonical order
    int folds = 0;

    bool all_ok() const;
};

// Runs the full cross-validated comparison: per fold, the evolutionary search
// (when requested) followed by every requested greedy baseline at the same
// coreset size, each feeding the ridge classifier. Writes results.csv,
// summary.csv, per-fold Pareto fronts, and run_meta.txt into out_dir when one
// is configured, and prints the summary table. Per-cell failures are recorded
// in the report; only config/data errors throw.
RunReport run_experiment(const ExperimentConfig& config);

// Writes an archive as CSV (size, train_error, val_f1), sorted by size.
// Values round-trip exactly through the text form. Throws on empty archives
// and unwritable paths.
void emit_pareto(const ParetoArchive& archive, const std::string& path);

}  // namespace coreset

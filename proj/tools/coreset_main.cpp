#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "coreset/baselines.hpp"
#include "coreset/dataset.hpp"
#include "coreset/evocore.hpp"
#include "coreset/experiment.hpp"
#include "coreset/metrics.hpp"
#include "coreset/report.hpp"
#include "coreset/ridge.hpp"
#include "coreset/rng.hpp"

#ifndef CORESET_VERSION
#define CORESET_VERSION "0.0.0"
#endif

namespace {

using namespace coreset;

constexpr std::uint64_t kSplitSalt = 1000;
constexpr std::uint64_t kRandomSalt = 2000;

template <typename T>
T parse_number(const std::string& text, const char* what) {
    T out{};
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto res = std::from_chars(begin, end, out);
    if (res.ec != std::errc() || res.ptr != end)
        throw std::invalid_argument(std::string("invalid ") + what + ": '" + text + "'");
    return out;
}

std::string trim(const std::string& text) {
    const auto begin = text.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = text.find_last_not_of(" \t\r");
    return text.substr(begin, end - begin + 1);
}

// Flat key=value file; blank lines and #-comments ignored; later keys win.
std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        const std::string key = eq == std::string::npos ? "" : trim(line.substr(0, eq));
        if (key.empty())
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": expected key=value");
        kv[key] = trim(line.substr(eq + 1));
    }
    return kv;
}

std::vector<Method> parse_method_list(const std::string& csv) {
    std::vector<Method> out;
    std::stringstream stream(csv);
    std::string token;
    while (std::getline(stream, token, ',')) {
        const auto begin = token.find_first_not_of(" \t");
        if (begin == std::string::npos) continue;
        const auto end = token.find_last_not_of(" \t");
        out.push_back(parse_method(token.substr(begin, end - begin + 1)));
    }
    return out;
}

char parse_delimiter(const std::string& text) {
    if (text == "tab" || text == "\\t") return '\t';
    if (text.size() == 1) return text[0];
    throw std::invalid_argument("delimiter must be a single character or 'tab'");
}

MissingPolicy parse_missing(const std::string& text) {
    if (text == "mean") return MissingPolicy::MeanImpute;
    if (text == "drop") return MissingPolicy::DropRow;
    throw std::invalid_argument("missing policy must be 'mean' or 'drop'");
}

bool parse_timing(const std::string& text) {
    if (text == "wall") return true;
    if (text == "off") return false;
    throw std::invalid_argument("timing must be 'wall' or 'off'");
}

// Options shared by the single-split subcommands (evolve, baseline).
struct SplitOpts {
    std::string data;
    std::string label;
    int folds = 10;
    int fold = 0;
    std::uint64_t seed = 42;
    double alpha = 1.0;
    double val_fraction = 1.0 / 9.0;
    std::string missing = "mean";
    std::string delimiter = ",";
};

void add_split_options(CLI::App* cmd, SplitOpts& opts) {
    cmd->add_option("--data", opts.data, "CSV dataset path")->required();
    cmd->add_option("--label", opts.label, "label column (name or zero-based index)")
        ->required();
    cmd->add_option("--folds", opts.folds, "number of cross-validation folds")
        ->capture_default_str();
    cmd->add_option("--fold", opts.fold, "which fold to hold out as the test partition")
        ->capture_default_str();
    cmd->add_option("--seed", opts.seed, "root random seed")->capture_default_str();
    cmd->add_option("--alpha", opts.alpha, "ridge regularization strength")
        ->capture_default_str();
    cmd->add_option("--val-fraction", opts.val_fraction,
                    "fraction of the non-test rows held out for validation")
        ->capture_default_str();
    cmd->add_option("--missing", opts.missing, "missing-value policy: mean or drop")
        ->capture_default_str();
    cmd->add_option("--delimiter", opts.delimiter, "CSV delimiter (single char or 'tab')")
        ->capture_default_str();
}

SplitView make_split(const Dataset& dataset, const SplitOpts& opts, FoldPlan* plan_out) {
    FoldPlan plan = make_folds(dataset, opts.folds, opts.seed);
    if (opts.fold < 0 || opts.fold >= opts.folds)
        throw std::invalid_argument("--fold must be in [0, folds)");
    SplitView split =
        split_fold(plan, dataset.labels, opts.fold, opts.val_fraction,
                   derive_seed(opts.seed, kSplitSalt + static_cast<std::uint64_t>(opts.fold)));
    if (plan_out) *plan_out = std::move(plan);
    return split;
}

BaselineOutput run_named_baseline(Method method, const VectorizedDataset& data,
                                  const std::vector<int>& train_y, int budget,
                                  std::uint64_t random_seed) {
    switch (method) {
        case Method::Giga:
            return giga(data, budget);
        case Method::FrankWolfe:
            return frank_wolfe(data, budget);
        case Method::MatchingPursuit:
            return matching_pursuit(data, budget);
        case Method::OrthogonalMatchingPursuit:
            return orthogonal_matching_pursuit(data, budget);
        case Method::ForwardStagewise:
            return forward_stagewise(data, budget);
        case Method::StratifiedRandom:
            return stratified_random(train_y, budget, random_seed);
        case Method::EvoCore:
            break;
    }
    throw std::invalid_argument(
        "the evolutionary method has no fixed budget; use 'coreset run' or 'coreset evolve'");
}

int do_evolve(const SplitOpts& opts, const std::string& out_path) {
    const Dataset dataset =
        load_csv(opts.data, opts.label, parse_missing(opts.missing),
                 parse_delimiter(opts.delimiter));
    const SplitView split = make_split(dataset, opts, nullptr);
    const CoresetResult result =
        run_fold(dataset, split, opts.alpha,
                 opts.seed + static_cast<std::uint64_t>(opts.fold));
    emit_pareto(result.archive, out_path);
    std::cout << "chosen_size=" << result.chosen.size()
              << " train_f1=" << format_g6(result.train_f1)
              << " val_f1=" << format_g6(result.val_f1)
              << " test_f1=" << format_g6(result.test_f1)
              << " fit_time_s=" << format_g6(result.fit_time_seconds)
              << " archive_entries=" << result.archive.entries.size() << '\n';
    std::cout << "pareto front written to " << out_path << '\n';
    return 0;
}

int do_baseline(const SplitOpts& opts, const std::string& method_token, int budget,
                const std::string& out_path) {
    const Method method = parse_method(method_token);
    const Dataset dataset =
        load_csv(opts.data, opts.label, parse_missing(opts.missing),
                 parse_delimiter(opts.delimiter));
    const SplitView split = make_split(dataset, opts, nullptr);
    const FoldTensors tensors = build_fold_tensors(dataset, split);

    VectorizedDataset vec;
    if (method != Method::StratifiedRandom)
        vec = vectorize(tensors.train_X, tensors.train_y, tensors.class_count);

    const auto t0 = std::chrono::steady_clock::now();
    const BaselineOutput selection = run_named_baseline(
        method, vec, tensors.train_y, budget,
        derive_seed(opts.seed, kRandomSalt + static_cast<std::uint64_t>(opts.fold)));
    const RidgeModel model = fit_ridge(take_rows(tensors.train_X, selection.indices),
                                       take_labels(tensors.train_y, selection.indices),
                                       tensors.class_count, opts.alpha);
    const auto t1 = std::chrono::steady_clock::now();
    const double fit_time = std::chrono::duration<double>(t1 - t0).count();

    const double train_f1 =
        weighted_f1_error(tensors.train_y, model.predict(tensors.train_X),
                          tensors.class_count)
            .weighted_f1;
    const double test_f1 =
        weighted_f1_error(tensors.test_y, model.predict(tensors.test_X),
                          tensors.class_count)
            .weighted_f1;

    std::cout << "method=" << method_name(method) << " size=" << selection.indices.size()
              << " train_f1=" << format_g6(train_f1) << " test_f1=" << format_g6(test_f1)
              << " fit_time_s=" << format_g6(fit_time) << '\n';

    if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open " + out_path + " for writing");
        out << "train_pos,dataset_row,weight\n";
        for (std::size_t i = 0; i < selection.indices.size(); ++i)
            out << selection.indices[i] << ','
                << split.train_idx[static_cast<std::size_t>(selection.indices[i])] << ','
                << format_exact(selection.weights[i]) << '\n';
        out.flush();
        if (!out) throw std::runtime_error("write failed: " + out_path);
        std::cout << "selection written to " << out_path << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coreset discovery: evolutionary multi-objective search plus greedy baselines"};
    app.set_version_flag("--version", CORESET_VERSION);
    app.require_subcommand(1);

    // --- run ---
    auto* run_cmd =
        app.add_subcommand("run", "cross-validated comparison across methods");
    ExperimentConfig run_config;
    std::string run_methods;
    std::string run_missing = "mean";
    std::string run_delimiter = ",";
    std::string run_timing = "wall";
    run_cmd->add_option("--data", run_config.data_path,
                        "CSV dataset path (required here or in the config file)");
    run_cmd->add_option("--label", run_config.label_column,
                        "label column, name or zero-based index (required here or in "
                        "the config file)");
    run_cmd->add_option("--folds", run_config.folds, "number of cross-validation folds")
        ->capture_default_str();
    run_cmd->add_option("--seed", run_config.seed, "root random seed")
        ->capture_default_str();
    run_cmd->add_option("--alpha", run_config.alpha, "ridge regularization strength")
        ->capture_default_str();
    run_cmd->add_option(
        "--methods", run_methods,
        "comma-separated subset of evocore,giga,frank-wolfe,mp,omp,stagewise,random "
        "(default: every method except random)");
    run_cmd->add_option("--val-fraction", run_config.val_fraction,
                        "fraction of the non-test rows held out for validation")
        ->capture_default_str();
    run_cmd->add_option("--out", run_config.out_dir,
                        "directory for results.csv, summary.csv, Pareto fronts, run_meta.txt");
    run_cmd->add_option("--missing", run_missing, "missing-value policy: mean or drop")
        ->capture_default_str();
    run_cmd->add_option("--delimiter", run_delimiter,
                        "CSV delimiter (single char or 'tab')")
        ->capture_default_str();
    run_cmd->add_option("--jobs", run_config.jobs,
                        "fold-level parallelism (0 = available hardware)")
        ->capture_default_str();
    run_cmd->add_option("--timing", run_timing,
                        "fit_time_s source: 'wall' clock or 'off' for reproducible zeros")
        ->capture_default_str();
    std::string run_config_path;
    run_cmd->add_option("--config", run_config_path,
                        "flat key=value file of the options above; flags win");

    // --- evolve ---
    auto* evolve_cmd =
        app.add_subcommand("evolve", "single-split evolutionary search, emits the Pareto front");
    SplitOpts evolve_opts;
    std::string evolve_out = "pareto.csv";
    add_split_options(evolve_cmd, evolve_opts);
    evolve_cmd->add_option("--out", evolve_out, "output CSV path")->capture_default_str();

    // --- baseline ---
    auto* baseline_cmd =
        app.add_subcommand("baseline", "single-split greedy baseline at a fixed budget");
    SplitOpts baseline_opts;
    std::string baseline_method;
    int baseline_budget = 0;
    std::string baseline_out;
    add_split_options(baseline_cmd, baseline_opts);
    baseline_cmd
        ->add_option("--method", baseline_method,
                     "one of giga,frank-wolfe,mp,omp,stagewise,random")
        ->required();
    baseline_cmd->add_option("--budget", baseline_budget, "maximum coreset size")
        ->required();
    baseline_cmd->add_option("--out", baseline_out,
                             "optional CSV of selected rows and weights");

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
        return 2;
    }

    try {
        if (run_cmd->parsed()) {
            if (!run_config_path.empty()) {
                const auto kv = read_config_file(run_config_path);
                const auto flagged = [&](const char* name) {
                    return run_cmd->count(name) > 0;
                };
                for (const auto& [key, value] : kv) {
                    if (key == "data") {
                        if (!flagged("--data")) run_config.data_path = value;
                    } else if (key == "label") {
                        if (!flagged("--label")) run_config.label_column = value;
                    } else if (key == "folds") {
                        if (!flagged("--folds"))
                            run_config.folds = parse_number<int>(value, "folds");
                    } else if (key == "seed") {
                        if (!flagged("--seed"))
                            run_config.seed = parse_number<std::uint64_t>(value, "seed");
                    } else if (key == "alpha") {
                        if (!flagged("--alpha"))
                            run_config.alpha = parse_number<double>(value, "alpha");
                    } else if (key == "methods") {
                        if (!flagged("--methods")) run_methods = value;
                    } else if (key == "val_fraction") {
                        if (!flagged("--val-fraction"))
                            run_config.val_fraction =
                                parse_number<double>(value, "val_fraction");
                    } else if (key == "out") {
                        if (!flagged("--out")) run_config.out_dir = value;
                    } else if (key == "missing") {
                        if (!flagged("--missing")) run_missing = value;
                    } else if (key == "delimiter") {
                        if (!flagged("--delimiter")) run_delimiter = value;
                    } else if (key == "jobs") {
                        if (!flagged("--jobs"))
                            run_config.jobs = parse_number<int>(value, "jobs");
                    } else if (key == "timing") {
                        if (!flagged("--timing")) run_timing = value;
                    } else {
                        throw std::invalid_argument("unknown config key: " + key);
                    }
                }
            }
            if (run_config.data_path.empty())
                throw std::invalid_argument("--data is required (flag or config file)");
            if (run_config.label_column.empty())
                throw std::invalid_argument("--label is required (flag or config file)");
            run_config.methods = parse_method_list(run_methods);
            run_config.missing_policy = parse_missing(run_missing);
            run_config.delimiter = parse_delimiter(run_delimiter);
            run_config.wall_clock = parse_timing(run_timing);
            const RunReport report = run_experiment(run_config);
            if (!report.all_ok()) {
                int failed = 0;
                for (const auto& row : report.rows) failed += row.ok ? 0 : 1;
                std::cerr << failed << " of " << report.rows.size()
                          << " (method, fold) cells failed; see run_meta.txt\n";
                return 1;
            }
            return 0;
        }
        if (evolve_cmd->parsed()) return do_evolve(evolve_opts, evolve_out);
        return do_baseline(baseline_opts, baseline_method, baseline_budget, baseline_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

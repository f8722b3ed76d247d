#include "coreset/experiment.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "coreset/baselines.hpp"
#include "coreset/evocore.hpp"
#include "coreset/metrics.hpp"
#include "coreset/report.hpp"
#include "coreset/ridge.hpp"
#include "coreset/rng.hpp"

#ifndef CORESET_VERSION
#define CORESET_VERSION "0.0.0"
#endif

namespace coreset {
namespace {

// Salts for per-fold seed derivation, keeping the split, the evolutionary
// search, and the random control on independent streams.
constexpr std::uint64_t kSplitSalt = 1000;
constexpr std::uint64_t kRandomSalt = 2000;

struct FoldOutcome {
    std::vector<RunReport::Row> rows;
    std::optional<ParetoArchive> archive;  // present when the EA cell succeeded
    int budget = 0;                        // coreset size handed to the baselines
    std::vector<std::string> notes;
};

bool is_baseline(Method m) { return m != Method::EvoCore; }

bool wants(const std::vector<Method>& methods, Method m) {
    return std::find(methods.begin(), methods.end(), m) != methods.end();
}

// Keeps canonical order and drops duplicates.
std::vector<Method> normalize_methods(const std::vector<Method>& requested) {
    std::vector<Method> out;
    for (const Method m : all_methods())
        if (wants(requested, m)) out.push_back(m);
    return out;
}

// Value a reader of results.csv would parse back: the 6-significant-digit
// text form. Summary statistics are computed over these so the emitted means
// are exactly recomputable from the per-fold file.
double round_to_text(double v) {
    const std::string s = format_g6(v);
    double out = v;
    std::from_chars(s.data(), s.data() + s.size(), out);
    return out;
}

double seconds_between(std::chrono::steady_clock::time_point a,
                       std::chrono::steady_clock::time_point b) {
    return std::chrono::duration<double>(b - a).count();
}

double weighted_f1_on(const RidgeModel& model, const Eigen::MatrixXd& X,
                      const std::vector<int>& y, int class_count) {
    return weighted_f1_error(y, model.predict(X), class_count).weighted_f1;
}

BaselineOutput run_selector(Method m, const VectorizedDataset& data,
                            const std::vector<int>& train_y, int budget,
                            std::uint64_t random_seed) {
    switch (m) {
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
    throw std::logic_error("run_selector: not a baseline method");
}

FoldOutcome run_fold_cells(const Dataset& dataset, const FoldPlan& plan, int fold,
                           const ExperimentConfig& config,
                           const std::vector<Method>& methods) {
    FoldOutcome out;
    const auto fail_cell = [&](Method m, const std::string& reason) {
        RunReport::Row row;
        row.method = m;
        row.fold = fold;
        row.ok = false;
        row.fail_reason = reason;
        out.rows.push_back(std::move(row));
        out.notes.push_back("fold " + std::to_string(fold) + ", " + method_name(m) + ": " +
                            reason);
    };

    SplitView split;
    try {
        split = split_fold(plan, dataset.labels, fold, config.val_fraction,
                           derive_seed(config.seed, kSplitSalt + static_cast<std::uint64_t>(fold)));
    } catch (const std::exception& e) {
        for (const Method m : methods) fail_cell(m, e.what());
        return out;
    }

    if (wants(methods, Method::EvoCore)) {
        RunReport::Row row;
        row.method = Method::EvoCore;
        row.fold = fold;
        try {
            const CoresetResult result =
                run_fold(dataset, split, config.alpha,
                         config.seed + static_cast<std::uint64_t>(fold));
            row.ok = true;
            row.size = result.chosen.size();
            row.train_f1 = result.train_f1;
            row.test_f1 = result.test_f1;
            row.fit_time_s = config.wall_clock ? result.fit_time_seconds : 0.0;
            out.budget = row.size;
            out.archive = result.archive;
            out.rows.push_back(std::move(row));
        } catch (const std::exception& e) {
            fail_cell(Method::EvoCore, e.what());
        }
    }

    const bool any_baseline =
        std::any_of(methods.begin(), methods.end(), is_baseline);
    if (!any_baseline) return out;

    const int train_n = static_cast<int>(split.train_idx.size());
    if (out.budget <= 0)
        out.budget = std::max(dataset.class_count, (train_n + 19) / 20);

    const bool any_pursuit = std::any_of(methods.begin(), methods.end(), [](Method m) {
        return is_baseline(m) && m != Method::StratifiedRandom;
    });

    FoldTensors tensors;
    VectorizedDataset vec;
    try {
        tensors = build_fold_tensors(dataset, split);
        if (any_pursuit)
            vec = vectorize(tensors.train_X, tensors.train_y, tensors.class_count);
    } catch (const std::exception& e) {
        for (const Method m : methods)
            if (is_baseline(m)) fail_cell(m, e.what());
        return out;
    }

    for (const Method m : methods) {
        if (!is_baseline(m)) continue;
        RunReport::Row row;
        row.method = m;
        row.fold = fold;
        try {
            const auto t0 = std::chrono::steady_clock::now();
            const BaselineOutput selection = run_selector(
                m, vec, tensors.train_y, out.budget,
                derive_seed(config.seed, kRandomSalt + static_cast<std::uint64_t>(fold)));
            const RidgeModel model =
                fit_ridge(take_rows(tensors.train_X, selection.indices),
                          take_labels(tensors.train_y, selection.indices),
                          tensors.class_count, config.alpha);
            const auto t1 = std::chrono::steady_clock::now();
            row.ok = true;
            row.size = static_cast<int>(selection.indices.size());
            row.fit_time_s = config.wall_clock ? seconds_between(t0, t1) : 0.0;
            row.train_f1 = weighted_f1_on(model, tensors.train_X, tensors.train_y,
                                          tensors.class_count);
            row.test_f1 = weighted_f1_on(model, tensors.test_X, tensors.test_y,
                                         tensors.class_count);
            out.rows.push_back(std::move(row));
        } catch (const std::exception& e) {
            fail_cell(m, e.what());
        }
    }
    return out;
}

const std::array<const char*, 4> kMetricNames = {"size", "train_f1", "test_f1",
                                                 "fit_time_s"};

// Per-metric values of the successful rows of one method, as a results.csv
// reader would see them.
std::array<std::vector<double>, 4> metric_columns(const RunReport& report, Method m) {
    std::array<std::vector<double>, 4> cols;
    for (const auto& row : report.rows) {
        if (row.method != m || !row.ok) continue;
        cols[0].push_back(static_cast<double>(row.size));
        cols[1].push_back(round_to_text(row.train_f1));
        cols[2].push_back(round_to_text(row.test_f1));
        cols[3].push_back(round_to_text(row.fit_time_s));
    }
    return cols;
}

std::ofstream open_artifact(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return out;
}

void finish_artifact(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_results_csv(const std::filesystem::path& path, const RunReport& report) {
    auto out = open_artifact(path);
    out << "method,fold,size,train_f1,test_f1,fit_time_s\n";
    for (const auto& row : report.rows) {
        if (!row.ok) continue;
        out << method_name(row.method) << ',' << row.fold << ',' << row.size << ','
            << format_g6(row.train_f1) << ',' << format_g6(row.test_f1) << ','
            << format_g6(row.fit_time_s) << '\n';
    }
    finish_artifact(out, path);
}

void write_summary_csv(const std::filesystem::path& path, const RunReport& report,
                       const std::vector<Method>& methods) {
    auto out = open_artifact(path);
    out << "method,metric,mean,sem,n\n";
    for (const Method m : methods) {
        const auto cols = metric_columns(report, m);
        for (std::size_t i = 0; i < cols.size(); ++i) {
            const SummaryStat stat = summarize(cols[i]);
            out << method_name(m) << ',' << kMetricNames[i] << ',' << format_g6(stat.mean)
                << ',' << format_g6(stat.sem) << ',' << stat.n << '\n';
        }
    }
    finish_artifact(out, path);
}

void write_run_meta(const std::filesystem::path& path, const ExperimentConfig& config,
                    const Dataset& dataset, const std::vector<Method>& methods,
                    const std::vector<FoldOutcome>& outcomes) {
    auto out = open_artifact(path);
    out << "coreset run metadata\n";
    out << "version " << CORESET_VERSION << " (eigen " << EIGEN_WORLD_VERSION << '.'
        << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION << ")\n";

    out << "\nconfig\n";
    out << "  data = " << config.data_path << '\n';
    out << "  label = " << config.label_column << '\n';
    out << "  folds = " << config.folds << '\n';
    out << "  seed = " << config.seed << '\n';
    out << "  alpha = " << format_g6(config.alpha) << '\n';
    out << "  methods = ";
    for (std::size_t i = 0; i < methods.size(); ++i)
        out << (i ? "," : "") << method_name(methods[i]);
    out << '\n';
    out << "  val_fraction = " << format_g6(config.val_fraction) << '\n';
    out << "  out = " << config.out_dir << '\n';
    out << "  missing = "
        << (config.missing_policy == MissingPolicy::MeanImpute ? "mean" : "drop") << '\n';
    out << "  delimiter = " << config.delimiter << '\n';
    out << "  jobs = " << config.jobs << (config.jobs == 0 ? " (auto)" : "") << '\n';
    out << "  timing = " << (config.wall_clock ? "wall" : "off") << '\n';

    out << "\ndataset\n";
    out << "  name = " << dataset.name << '\n';
    out << "  samples = " << dataset.rows() << '\n';
    out << "  features = " << dataset.cols() << '\n';
    out << "  classes = " << dataset.class_count << '\n';

    out << "\nseeds and budgets\n";
    for (std::size_t f = 0; f < outcomes.size(); ++f) {
        const auto fold = static_cast<std::uint64_t>(f);
        out << "  fold " << f << ": evolve_seed = " << (config.seed + fold)
            << ", split_seed = " << derive_seed(config.seed, kSplitSalt + fold)
            << ", random_seed = " << derive_seed(config.seed, kRandomSalt + fold)
            << ", baseline_budget = " << outcomes[f].budget << '\n';
    }

    out << "\nnotes\n";
    out << "  least-angle regression is not implemented; no rows are emitted for it.\n";
    bool any_note = false;
    for (const auto& outcome : outcomes)
        for (const auto& note : outcome.notes) {
            out << "  failed: " << note << '\n';
            any_note = true;
        }
    if (!any_note) out << "  all cells succeeded.\n";
    finish_artifact(out, path);
}

void print_summary(const RunReport& report, const std::vector<Method>& methods) {
    std::ostringstream out;
    out << std::left << std::setw(13) << "method" << std::right << std::setw(3) << "n"
        << "  ";
    for (const char* name : kMetricNames) out << std::left << std::setw(24) << name;
    out << '\n';
    for (const Method m : methods) {
        const auto cols = metric_columns(report, m);
        out << std::left << std::setw(13) << method_name(m) << std::right << std::setw(3)
            << cols[0].size() << "  ";
        for (const auto& col : cols) {
            const SummaryStat stat = summarize(col);
            out << std::left << std::setw(24)
                << (format_g6(stat.mean) + " +/- " + format_g6(stat.sem));
        }
        out << '\n';
    }
    std::cout << out.str() << std::flush;
}

}  // namespace

const std::vector<Method>& all_methods() {
    static const std::vector<Method> methods = {
        Method::EvoCore,          Method::Giga,
        Method::FrankWolfe,       Method::MatchingPursuit,
        Method::OrthogonalMatchingPursuit, Method::ForwardStagewise,
        Method::StratifiedRandom};
    return methods;
}

const std::vector<Method>& default_methods() {
    static const std::vector<Method> methods = {
        Method::EvoCore,          Method::Giga,
        Method::FrankWolfe,       Method::MatchingPursuit,
        Method::OrthogonalMatchingPursuit, Method::ForwardStagewise};
    return methods;
}

const std::string& method_name(Method method) {
    static const std::array<std::string, 7> names = {
        "evocore", "giga", "frank-wolfe", "mp", "omp", "stagewise", "random"};
    return names.at(static_cast<std::size_t>(method));
}

Method parse_method(const std::string& token) {
    for (const Method m : all_methods())
        if (method_name(m) == token) return m;
    throw std::invalid_argument("unknown method: " + token);
}

bool RunReport::all_ok() const {
    return std::all_of(rows.begin(), rows.end(), [](const Row& r) { return r.ok; });
}

RunReport run_experiment(const ExperimentConfig& config) {
    if (config.data_path.empty())
        throw std::invalid_argument("run_experiment: a dataset path is required");
    if (config.folds < 2)
        throw std::invalid_argument("run_experiment: folds must be >= 2");
    if (!(config.alpha > 0.0))
        throw std::invalid_argument("run_experiment: alpha must be > 0");
    if (!(config.val_fraction >= 0.0 && config.val_fraction < 1.0))
        throw std::invalid_argument("run_experiment: val_fraction must be in [0, 1)");
    if (config.jobs < 0)
        throw std::invalid_argument("run_experiment: jobs must be >= 0");

    const std::vector<Method> methods =
        normalize_methods(config.methods.empty() ? default_methods() : config.methods);

    const Dataset dataset = load_csv(config.data_path, config.label_column,
                                     config.missing_policy, config.delimiter);
    const FoldPlan plan = make_folds(dataset, config.folds, config.seed);

    std::vector<FoldOutcome> outcomes(static_cast<std::size_t>(config.folds));
    int jobs = config.jobs > 0 ? config.jobs
                               : static_cast<int>(std::thread::hardware_concurrency());
    jobs = std::clamp(jobs, 1, config.folds);

    if (jobs == 1) {
        for (int f = 0; f < config.folds; ++f)
            outcomes[static_cast<std::size_t>(f)] =
                run_fold_cells(dataset, plan, f, config, methods);
    } else {
        std::atomic<int> next{0};
        const auto worker = [&]() {
            for (;;) {
                const int f = next.fetch_add(1);
                if (f >= config.folds) return;
                outcomes[static_cast<std::size_t>(f)] =
                    run_fold_cells(dataset, plan, f, config, methods);
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(jobs));
        for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    RunReport report;
    report.folds = config.folds;
    for (const Method m : methods)
        for (const auto& outcome : outcomes)
            for (const auto& row : outcome.rows)
                if (row.method == m) report.rows.push_back(row);

    if (!config.out_dir.empty()) {
        const std::filesystem::path dir(config.out_dir);
        std::filesystem::create_directories(dir);
        write_results_csv(dir / "results.csv", report);
        write_summary_csv(dir / "summary.csv", report, methods);
        for (std::size_t f = 0; f < outcomes.size(); ++f)
            if (outcomes[f].archive)
                emit_pareto(*outcomes[f].archive,
                            (dir / ("pareto_fold" + std::to_string(f) + ".csv")).string());
        write_run_meta(dir / "run_meta.txt", config, dataset, methods, outcomes);
    }

    print_summary(report, methods);
    return report;
}

void emit_pareto(const ParetoArchive& archive, const std::string& path) {
    if (archive.entries.empty())
        throw std::invalid_argument("emit_pareto: empty archive");
    const std::filesystem::path p(path);
    auto out = open_artifact(p);
    auto entries = archive.entries;
    std::stable_sort(entries.begin(), entries.end(),
                     [](const ParetoArchive::Entry& a, const ParetoArchive::Entry& b) {
                         return a.fitness.size < b.fitness.size;
                     });
    out << "size,train_error,val_f1\n";
    for (const auto& entry : entries)
        out << entry.fitness.size << ',' << format_exact(entry.fitness.error) << ','
            << format_exact(entry.val_f1) << '\n';
    finish_artifact(out, p);
}

}  // namespace coreset

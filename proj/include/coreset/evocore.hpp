#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "coreset/dataset.hpp"
#include "coreset/moea.hpp"

namespace coreset {

// Standardized per-fold matrices. The scaler is fitted on the train+val rows
// (everything except the test fold) and applied to all three partitions.
struct FoldTensors {
    Eigen::MatrixXd train_X, val_X, test_X;
    std::vector<int> train_y, val_y, test_y;
    int class_count = 0;
    Scaler scaler;
};

FoldTensors build_fold_tensors(const Dataset& dataset, const SplitView& split);

// Trains a ridge model (regularization strength alpha) on the genome's rows
// of the training partition and scores it on the full training partition:
// fitness = (genome size, weighted-F1 error).
FitnessPair fitness_of(const CoresetGenome& genome, const Eigen::MatrixXd& train_X,
                       const std::vector<int>& train_y, int class_count, double alpha);

// Memoizes fitness_of by canonical genome; the evaluation is pure, so cache
// hits are exact replays.
class CachedEvaluator {
public:
    CachedEvaluator(const Eigen::MatrixXd& train_X, const std::vector<int>& train_y,
                    int class_count, double alpha)
        : train_X_(train_X), train_y_(train_y), class_count_(class_count), alpha_(alpha) {}

    FitnessPair operator()(const CoresetGenome& genome);

    std::size_t evaluations() const { return evaluations_; }
    std::size_t hits() const { return hits_; }

private:
    const Eigen::MatrixXd& train_X_;
    const std::vector<int>& train_y_;
    int class_count_;
    double alpha_;
    std::unordered_map<CoresetGenome, FitnessPair, GenomeHash> cache_;
    std::size_t evaluations_ = 0;
    std::size_t hits_ = 0;
};

// Scores every archive entry on the validation partition (filling val_f1)
// and returns the index of the selected entry: highest validation F1, ties
// broken by smaller coreset, then lexicographically smaller index list.
// Throws on an empty archive or an empty validation partition.
std::size_t select_mle(ParetoArchive& archive, const Eigen::MatrixXd& train_X,
                       const std::vector<int>& train_y, const Eigen::MatrixXd& val_X,
                       const std::vector<int>& val_y, int class_count, double alpha);

// One fold's end-to-end discovery product.
struct CoresetResult {
    CoresetGenome chosen;
    double train_f1 = 0.0;
    double val_f1 = 0.0;
    double test_f1 = 0.0;
    double fit_time_seconds = 0.0;  // discovery wall time: evolve + selection + final fit
    ParetoArchive archive;
};

// Full single-fold pipeline: standardize, derive the search budget, evolve,
// select on validation, retrain the chosen coreset, then score the test
// partition once. Deterministic in (dataset, split, alpha, seed).
CoresetResult run_fold(const Dataset& dataset, const SplitView& split, double alpha,
                       std::uint64_t seed, const GenerationCallback& on_generation = {});

}  // namespace coreset

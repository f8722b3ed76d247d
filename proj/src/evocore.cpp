#include "coreset/evocore.hpp"

#include <chrono>
#include <stdexcept>

#include "coreset/metrics.hpp"
#include "coreset/ridge.hpp"

namespace coreset {

FoldTensors build_fold_tensors(const Dataset& dataset, const SplitView& split) {
    std::vector<int> fit_rows;
    fit_rows.reserve(split.train_idx.size() + split.val_idx.size());
    fit_rows.insert(fit_rows.end(), split.train_idx.begin(), split.train_idx.end());
    fit_rows.insert(fit_rows.end(), split.val_idx.begin(), split.val_idx.end());
    if (fit_rows.empty()) throw std::invalid_argument("build_fold_tensors: empty train+val partition");

    FoldTensors tensors;
    tensors.scaler = fit_scaler(take_rows(dataset.features, fit_rows));
    tensors.train_X = tensors.scaler.transform(take_rows(dataset.features, split.train_idx));
    tensors.val_X = split.val_idx.empty()
                        ? Eigen::MatrixXd(0, dataset.features.cols())
                        : tensors.scaler.transform(take_rows(dataset.features, split.val_idx));
    tensors.test_X = split.test_idx.empty()
                         ? Eigen::MatrixXd(0, dataset.features.cols())
                         : tensors.scaler.transform(take_rows(dataset.features, split.test_idx));
    tensors.train_y = take_labels(dataset.labels, split.train_idx);
    tensors.val_y = take_labels(dataset.labels, split.val_idx);
    tensors.test_y = take_labels(dataset.labels, split.test_idx);
    tensors.class_count = dataset.class_count;
    return tensors;
}

FitnessPair fitness_of(const CoresetGenome& genome, const Eigen::MatrixXd& train_X,
                       const std::vector<int>& train_y, int class_count, double alpha) {
    if (genome.indices.empty()) throw std::invalid_argument("fitness_of: empty genome");
    const Eigen::MatrixXd X = take_rows(train_X, genome.indices);
    const std::vector<int> y = take_labels(train_y, genome.indices);
    const RidgeModel model = fit_ridge(X, y, class_count, alpha);
    const std::vector<int> predicted = model.predict(train_X);
    const ErrorScore score = weighted_f1_error(train_y, predicted, class_count);
    return {genome.size(), score.error};
}

FitnessPair CachedEvaluator::operator()(const CoresetGenome& genome) {
    ++evaluations_;
    const auto it = cache_.find(genome);
    if (it != cache_.end()) {
        ++hits_;
        return it->second;
    }
    const FitnessPair fitness = fitness_of(genome, train_X_, train_y_, class_count_, alpha_);
    cache_.emplace(genome, fitness);
    return fitness;
}

std::size_t select_mle(ParetoArchive& archive, const Eigen::MatrixXd& train_X,
                       const std::vector<int>& train_y, const Eigen::MatrixXd& val_X,
                       const std::vector<int>& val_y, int class_count, double alpha) {
    if (archive.entries.empty()) throw std::invalid_argument("select_mle: empty archive");
    if (val_y.empty()) throw std::invalid_argument("select_mle: empty validation partition");

    std::size_t best = 0;
    for (std::size_t i = 0; i < archive.entries.size(); ++i) {
        auto& entry = archive.entries[i];
        const Eigen::MatrixXd X = take_rows(train_X, entry.genome.indices);
        const std::vector<int> y = take_labels(train_y, entry.genome.indices);
        const RidgeModel model = fit_ridge(X, y, class_count, alpha);
        const ErrorScore score = weighted_f1_error(val_y, model.predict(val_X), class_count);
        entry.val_f1 = score.weighted_f1;

        if (i == 0) continue;
        const auto& incumbent = archive.entries[best];
        if (entry.val_f1 > incumbent.val_f1 ||
            (entry.val_f1 == incumbent.val_f1 &&
             (entry.genome.size() < incumbent.genome.size() ||
              (entry.genome.size() == incumbent.genome.size() &&
               entry.genome.indices < incumbent.genome.indices)))) {
            best = i;
        }
    }
    return best;
}

CoresetResult run_fold(const Dataset& dataset, const SplitView& split, double alpha,
                       std::uint64_t seed, const GenerationCallback& on_generation) {
    const FoldTensors tensors = build_fold_tensors(dataset, split);

    const auto started = std::chrono::steady_clock::now();
    const EAParams params =
        derive_params(static_cast<int>(tensors.train_y.size()), tensors.class_count, seed);
    ClassIndex classes(tensors.train_y);
    CachedEvaluator evaluate(tensors.train_X, tensors.train_y, tensors.class_count, alpha);
    Rng rng(seed);

    CoresetResult result;
    result.archive = evolve(std::ref(evaluate), params, classes, rng, on_generation);
    const std::size_t chosen =
        select_mle(result.archive, tensors.train_X, tensors.train_y, tensors.val_X,
                   tensors.val_y, tensors.class_count, alpha);
    result.chosen = result.archive.entries[chosen].genome;
    result.val_f1 = result.archive.entries[chosen].val_f1;

    const Eigen::MatrixXd X = take_rows(tensors.train_X, result.chosen.indices);
    const std::vector<int> y = take_labels(tensors.train_y, result.chosen.indices);
    const RidgeModel model = fit_ridge(X, y, tensors.class_count, alpha);
    result.train_f1 =
        weighted_f1_error(tensors.train_y, model.predict(tensors.train_X), tensors.class_count)
            .weighted_f1;
    const auto finished = std::chrono::steady_clock::now();
    result.fit_time_seconds = std::chrono::duration<double>(finished - started).count();

    // Held-out evaluation happens exactly once, after discovery is complete.
    result.test_f1 =
        weighted_f1_error(tensors.test_y, model.predict(tensors.test_X), tensors.class_count)
            .weighted_f1;
    return result;
}

}  // namespace coreset

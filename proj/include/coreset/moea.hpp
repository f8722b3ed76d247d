#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "coreset/rng.hpp"

namespace coreset {

// Variable-length set-of-row-indices genome. Canonical form: sorted, no
// duplicates, every index inside [0, universe_size).
struct CoresetGenome {
    std::vector<int> indices;

    int size() const { return static_cast<int>(indices.size()); }
    bool contains(int v) const;
    bool operator==(const CoresetGenome&) const = default;
};

// Sorts and deduplicates in place.
void canonicalize(CoresetGenome& genome);

struct GenomeHash {
    std::size_t operator()(const CoresetGenome& g) const;
};

// Bi-objective fitness, both minimized.
struct FitnessPair {
    int size = 0;
    double error = 0.0;

    bool operator==(const FitnessPair&) const = default;
};

// Pareto dominance: no worse in both objectives, strictly better in one.
bool dominates(const FitnessPair& a, const FitnessPair& b);

// Search-budget and genome-bound parameters.
struct EAParams {
    int k = 0;            // tenth of the training size; drives the budget scale
    int mu = 0;           // parent population size
    int lambda = 0;       // offspring per generation (2 * mu)
    int generations = 0;
    int min_size = 0;     // == class count
    int max_size = 0;
    std::uint64_t seed = 0;
};

// Budget rule: k = floor(train_size/10), mu = floor(max(100, k*log10(2))),
// lambda = 2*mu, generations = floor(max(100, 0.5*k*log10(2))),
// min_size = class_count, max_size = max(class_count, ceil(train_size/10)).
// Warns on stderr when train_size < 10 * class_count.
EAParams derive_params(int train_size, int class_count, std::uint64_t seed);

// Fronts of mutually non-dominated points; front 0 is the Pareto set of the
// input. Returns original indices, ascending within each front.
std::vector<std::vector<int>> non_dominated_sort(const std::vector<FitnessPair>& points);

// NSGA-II crowding distances for one front. Boundary points (per objective
// with positive range) get +infinity; interior points get normalized
// neighbor-gap sums; points whose fitness pair duplicates another member get
// 0 unless they are boundary; fronts of size <= 2 are all boundary.
std::vector<double> crowding_distance(const std::vector<FitnessPair>& front);

// Per-class row positions within the training partition.
class ClassIndex {
public:
    explicit ClassIndex(std::vector<int> labels);

    int class_count() const { return static_cast<int>(by_class_.size()); }
    int universe_size() const { return static_cast<int>(labels_.size()); }
    const std::vector<int>& members_of(int c) const { return by_class_[static_cast<std::size_t>(c)]; }
    const std::vector<int>& labels() const { return labels_; }

private:
    std::vector<int> labels_;
    std::vector<std::vector<int>> by_class_;
};

// Set-based recombination: shared indices go to both children; each
// symmetric-difference index goes to exactly one child, chosen by coin flip.
std::pair<CoresetGenome, CoresetGenome> crossover(const CoresetGenome& a,
                                                  const CoresetGenome& b, Rng& rng);

// Adds one uniformly chosen non-member (no-op when the genome already covers
// the universe) or removes one uniformly chosen member (no-op at min_size),
// with equal probability.
CoresetGenome mutate(const CoresetGenome& g, int universe_size, int min_size, Rng& rng);

// Feasibility repair, in order: cover every class present in the training
// partition, clamp to max_size without emptying a class, then fill up to
// min_size. Output is canonical.
CoresetGenome repair(CoresetGenome g, const ClassIndex& classes, const EAParams& params,
                     Rng& rng);

// mu genomes with sizes uniform in [min_size, max_size], indices sampled
// without replacement, then repaired.
std::vector<CoresetGenome> init_population(const EAParams& params, const ClassIndex& classes,
                                           Rng& rng);

struct RankedIndividual {
    CoresetGenome genome;
    FitnessPair fitness;
    int rank = 0;
    double crowding = 0.0;
};

// Final front-0, deduplicated by genome and sorted by (size, error, indices).
struct ParetoArchive {
    struct Entry {
        CoresetGenome genome;
        FitnessPair fitness;
        double val_f1 = -1.0;  // filled by model selection; -1 means unscored
    };
    std::vector<Entry> entries;
    EAParams params;
    std::uint64_t seed = 0;
    int generations_executed = 0;
};

// Emitted once for the initial population (generation 0) and once per
// completed generation.
struct GenerationStats {
    int generation = 0;
    std::vector<FitnessPair> front0;
    double best_error = 0.0;
    int smallest_size = 0;
};
using GenerationCallback = std::function<void(const GenerationStats&)>;

using FitnessFn = std::function<FitnessPair(const CoresetGenome&)>;

// Elitist (mu + lambda) NSGA-II loop: binary tournaments on
// (rank, crowding, random tie), crossover, mutation, repair, then survivor
// selection over parents plus offspring by (front, crowding). All random
// draws happen on this thread before offspring evaluation. Evaluator
// exceptions propagate.
ParetoArchive evolve(const FitnessFn& evaluate, const EAParams& params,
                     const ClassIndex& classes, Rng& rng,
                     const GenerationCallback& on_generation = {});

// Area dominated by `front` inside the box bounded by (ref_size, ref_error);
// points outside the box are ignored, duplicates contribute once.
double hypervolume_2d(const std::vector<FitnessPair>& front, double ref_size, double ref_error);

}  // namespace coreset

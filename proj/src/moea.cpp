#include "coreset/moea.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace coreset {

bool CoresetGenome::contains(int v) const {
    return std::binary_search(indices.begin(), indices.end(), v);
}

void canonicalize(CoresetGenome& genome) {
    std::sort(genome.indices.begin(), genome.indices.end());
    genome.indices.erase(std::unique(genome.indices.begin(), genome.indices.end()),
                         genome.indices.end());
}

std::size_t GenomeHash::operator()(const CoresetGenome& g) const {
    // FNV-1a over the index words.
    std::uint64_t h = 1469598103934665603ULL;
    for (const int v : g.indices) {
        h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(v));
        h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
}

bool dominates(const FitnessPair& a, const FitnessPair& b) {
    if (a.size > b.size || a.error > b.error) return false;
    return a.size < b.size || a.error < b.error;
}

EAParams derive_params(int train_size, int class_count, std::uint64_t seed) {
    if (train_size < 1) throw std::invalid_argument("derive_params: train_size must be >= 1");
    if (class_count < 1) throw std::invalid_argument("derive_params: class_count must be >= 1");
    if (train_size < 10 * class_count) {
        std::cerr << "warning: training partition has " << train_size << " samples for "
                  << class_count << " classes; coreset size bound clamped to the class count\n";
    }
    EAParams p;
    p.k = train_size / 10;
    const double budget = static_cast<double>(p.k) * std::log10(2.0);
    p.mu = static_cast<int>(std::floor(std::max(100.0, budget)));
    p.lambda = 2 * p.mu;
    p.generations = static_cast<int>(std::floor(std::max(100.0, 0.5 * budget)));
    p.min_size = class_count;
    p.max_size = std::max(class_count, (train_size + 9) / 10);
    p.seed = seed;
    return p;
}

std::vector<std::vector<int>> non_dominated_sort(const std::vector<FitnessPair>& points) {
    const int n = static_cast<int>(points.size());
    std::vector<std::vector<int>> fronts;
    if (n == 0) return fronts;

    // Process points in lexicographic order; then a point can only be
    // dominated by already-placed ones, and per front it suffices to compare
    // against the member with the smallest error (smallest size among those
    // on a tie). Fronts dominate monotonically, so the first front that does
    // not dominate the point is its home.
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const auto& pa = points[static_cast<std::size_t>(a)];
        const auto& pb = points[static_cast<std::size_t>(b)];
        if (pa.size != pb.size) return pa.size < pb.size;
        if (pa.error != pb.error) return pa.error < pb.error;
        return a < b;
    });

    struct FrontEdge {
        double best_error;
        int size_at_best;
    };
    std::vector<FrontEdge> edges;

    for (const int idx : order) {
        const auto& p = points[static_cast<std::size_t>(idx)];
        std::size_t f = 0;
        for (; f < edges.size(); ++f) {
            const bool dominated = edges[f].best_error < p.error ||
                                   (edges[f].best_error == p.error && edges[f].size_at_best < p.size);
            if (!dominated) break;
        }
        if (f == edges.size()) {
            edges.push_back({p.error, p.size});
            fronts.emplace_back();
        } else if (p.error < edges[f].best_error ||
                   (p.error == edges[f].best_error && p.size < edges[f].size_at_best)) {
            edges[f] = {p.error, p.size};
        }
        fronts[f].push_back(idx);
    }
    for (auto& front : fronts) std::sort(front.begin(), front.end());
    return fronts;
}

std::vector<double> crowding_distance(const std::vector<FitnessPair>& front) {
    const int n = static_cast<int>(front.size());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(static_cast<std::size_t>(n), 0.0);
    if (n == 0) return dist;
    if (n <= 2) {
        std::fill(dist.begin(), dist.end(), inf);
        return dist;
    }

    auto accumulate_objective = [&](auto value_of) {
        std::vector<int> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            const double va = value_of(front[static_cast<std::size_t>(a)]);
            const double vb = value_of(front[static_cast<std::size_t>(b)]);
            if (va != vb) return va < vb;
            return a < b;
        });
        const double lo = value_of(front[static_cast<std::size_t>(order.front())]);
        const double hi = value_of(front[static_cast<std::size_t>(order.back())]);
        const double range = hi - lo;
        if (range <= 0.0) return;  // degenerate objective contributes nothing
        dist[static_cast<std::size_t>(order.front())] = inf;
        dist[static_cast<std::size_t>(order.back())] = inf;
        for (int i = 1; i + 1 < n; ++i) {
            const std::size_t at = static_cast<std::size_t>(order[static_cast<std::size_t>(i)]);
            if (dist[at] == inf) continue;
            const double next = value_of(front[static_cast<std::size_t>(order[static_cast<std::size_t>(i + 1)])]);
            const double prev = value_of(front[static_cast<std::size_t>(order[static_cast<std::size_t>(i - 1)])]);
            dist[at] += (next - prev) / range;
        }
    };
    accumulate_objective([](const FitnessPair& f) { return static_cast<double>(f.size); });
    accumulate_objective([](const FitnessPair& f) { return f.error; });

    // Exact-duplicate interior points are maximally crowded by definition.
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const auto& fa = front[static_cast<std::size_t>(a)];
        const auto& fb = front[static_cast<std::size_t>(b)];
        if (fa.size != fb.size) return fa.size < fb.size;
        return fa.error < fb.error;
    });
    for (int i = 0; i < n;) {
        int j = i + 1;
        while (j < n && front[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])] ==
                            front[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])])
            ++j;
        if (j - i > 1) {
            for (int t = i; t < j; ++t) {
                const auto at = static_cast<std::size_t>(order[static_cast<std::size_t>(t)]);
                if (dist[at] != inf) dist[at] = 0.0;
            }
        }
        i = j;
    }
    return dist;
}

ClassIndex::ClassIndex(std::vector<int> labels) : labels_(std::move(labels)) {
    int class_count = 0;
    for (const int c : labels_) {
        if (c < 0) throw std::invalid_argument("ClassIndex: negative class id");
        class_count = std::max(class_count, c + 1);
    }
    by_class_.resize(static_cast<std::size_t>(class_count));
    for (std::size_t i = 0; i < labels_.size(); ++i)
        by_class_[static_cast<std::size_t>(labels_[i])].push_back(static_cast<int>(i));
}

std::pair<CoresetGenome, CoresetGenome> crossover(const CoresetGenome& a,
                                                  const CoresetGenome& b, Rng& rng) {
    std::vector<int> shared;
    std::vector<int> exclusive;
    std::set_intersection(a.indices.begin(), a.indices.end(), b.indices.begin(), b.indices.end(),
                          std::back_inserter(shared));
    std::set_symmetric_difference(a.indices.begin(), a.indices.end(), b.indices.begin(),
                                  b.indices.end(), std::back_inserter(exclusive));

    CoresetGenome child1{shared};
    CoresetGenome child2{std::move(shared)};
    for (const int v : exclusive) {
        (rng.coin() ? child1 : child2).indices.push_back(v);
    }
    canonicalize(child1);
    canonicalize(child2);
    return {std::move(child1), std::move(child2)};
}

CoresetGenome mutate(const CoresetGenome& g, int universe_size, int min_size, Rng& rng) {
    CoresetGenome out = g;
    if (rng.coin()) {
        if (out.size() >= universe_size) return out;  // nothing left to add
        for (;;) {
            const int candidate = rng.index(universe_size);
            if (!out.contains(candidate)) {
                out.indices.insert(
                    std::lower_bound(out.indices.begin(), out.indices.end(), candidate), candidate);
                return out;
            }
        }
    }
    if (out.size() <= min_size) return out;  // removal would break the size floor
    const int at = rng.index(out.size());
    out.indices.erase(out.indices.begin() + at);
    return out;
}

CoresetGenome repair(CoresetGenome g, const ClassIndex& classes, const EAParams& params,
                     Rng& rng) {
    canonicalize(g);
    const int universe = classes.universe_size();
    g.indices.erase(std::remove_if(g.indices.begin(), g.indices.end(),
                                   [universe](int v) { return v < 0 || v >= universe; }),
                    g.indices.end());

    const auto& labels = classes.labels();
    const int class_count = classes.class_count();
    std::vector<int> per_class(static_cast<std::size_t>(class_count), 0);
    for (const int v : g.indices) ++per_class[static_cast<std::size_t>(labels[static_cast<std::size_t>(v)])];

    // 1) every training-partition class keeps at least one representative
    for (int c = 0; c < class_count; ++c) {
        const auto& members = classes.members_of(c);
        if (members.empty() || per_class[static_cast<std::size_t>(c)] > 0) continue;
        const int pick = members[static_cast<std::size_t>(rng.index(static_cast<int>(members.size())))];
        g.indices.insert(std::lower_bound(g.indices.begin(), g.indices.end(), pick), pick);
        ++per_class[static_cast<std::size_t>(c)];
    }

    // 2) clamp to max_size, never emptying a class
    while (g.size() > params.max_size) {
        std::vector<int> removable;
        removable.reserve(g.indices.size());
        for (std::size_t i = 0; i < g.indices.size(); ++i) {
            const int c = labels[static_cast<std::size_t>(g.indices[i])];
            if (per_class[static_cast<std::size_t>(c)] >= 2) removable.push_back(static_cast<int>(i));
        }
        if (removable.empty()) break;  // only single representatives left
        const int at = removable[static_cast<std::size_t>(rng.index(static_cast<int>(removable.size())))];
        const int c = labels[static_cast<std::size_t>(g.indices[static_cast<std::size_t>(at)])];
        --per_class[static_cast<std::size_t>(c)];
        g.indices.erase(g.indices.begin() + at);
    }

    // 3) fill up to min_size with fresh indices
    while (g.size() < params.min_size && g.size() < universe) {
        const int candidate = rng.index(universe);
        if (g.contains(candidate)) continue;
        g.indices.insert(std::lower_bound(g.indices.begin(), g.indices.end(), candidate), candidate);
    }
    return g;
}

std::vector<CoresetGenome> init_population(const EAParams& params, const ClassIndex& classes,
                                           Rng& rng) {
    if (params.mu < 1) throw std::invalid_argument("init_population: mu must be >= 1");
    if (params.min_size > params.max_size)
        throw std::invalid_argument("init_population: min_size exceeds max_size");
    const int universe = classes.universe_size();
    std::vector<CoresetGenome> population;
    population.reserve(static_cast<std::size_t>(params.mu));
    for (int i = 0; i < params.mu; ++i) {
        const int span = params.max_size - params.min_size + 1;
        int target = params.min_size + rng.index(span);
        target = std::min(target, universe);
        CoresetGenome genome{rng.sample_without_replacement(universe, target)};
        canonicalize(genome);
        population.push_back(repair(std::move(genome), classes, params, rng));
    }
    return population;
}

namespace {

struct Cohort {
    std::vector<CoresetGenome> genomes;
    std::vector<FitnessPair> fitness;
    std::vector<int> rank;
    std::vector<double> crowding;
};

void rank_cohort(Cohort& cohort) {
    const auto fronts = non_dominated_sort(cohort.fitness);
    cohort.rank.assign(cohort.genomes.size(), 0);
    cohort.crowding.assign(cohort.genomes.size(), 0.0);
    for (std::size_t f = 0; f < fronts.size(); ++f) {
        std::vector<FitnessPair> members;
        members.reserve(fronts[f].size());
        for (const int idx : fronts[f]) members.push_back(cohort.fitness[static_cast<std::size_t>(idx)]);
        const std::vector<double> dist = crowding_distance(members);
        for (std::size_t j = 0; j < fronts[f].size(); ++j) {
            const auto at = static_cast<std::size_t>(fronts[f][j]);
            cohort.rank[at] = static_cast<int>(f);
            cohort.crowding[at] = dist[j];
        }
    }
}

int tournament(const Cohort& cohort, Rng& rng) {
    const int n = static_cast<int>(cohort.genomes.size());
    const int a = rng.index(n);
    const int b = rng.index(n);
    const auto ia = static_cast<std::size_t>(a);
    const auto ib = static_cast<std::size_t>(b);
    if (cohort.rank[ia] != cohort.rank[ib]) return cohort.rank[ia] < cohort.rank[ib] ? a : b;
    if (cohort.crowding[ia] != cohort.crowding[ib])
        return cohort.crowding[ia] > cohort.crowding[ib] ? a : b;
    return rng.coin() ? a : b;
}

GenerationStats stats_of(int generation, const Cohort& cohort) {
    GenerationStats stats;
    stats.generation = generation;
    double best_error = std::numeric_limits<double>::infinity();
    int smallest = std::numeric_limits<int>::max();
    for (std::size_t i = 0; i < cohort.genomes.size(); ++i) {
        if (cohort.rank[i] != 0) continue;
        stats.front0.push_back(cohort.fitness[i]);
        best_error = std::min(best_error, cohort.fitness[i].error);
        smallest = std::min(smallest, cohort.fitness[i].size);
    }
    stats.best_error = best_error;
    stats.smallest_size = smallest;
    return stats;
}

}  // namespace

ParetoArchive evolve(const FitnessFn& evaluate, const EAParams& params,
                     const ClassIndex& classes, Rng& rng,
                     const GenerationCallback& on_generation) {
    if (!evaluate) throw std::invalid_argument("evolve: missing fitness function");
    if (params.lambda != 2 * params.mu)
        throw std::invalid_argument("evolve: lambda must equal 2 * mu");

    Cohort pop;
    pop.genomes = init_population(params, classes, rng);
    pop.fitness.reserve(pop.genomes.size());
    for (const auto& g : pop.genomes) pop.fitness.push_back(evaluate(g));
    rank_cohort(pop);
    if (on_generation) on_generation(stats_of(0, pop));

    for (int gen = 1; gen <= params.generations; ++gen) {
        // All stochastic choices happen here, before any offspring evaluation.
        std::vector<CoresetGenome> offspring;
        offspring.reserve(static_cast<std::size_t>(params.lambda));
        for (int pair = 0; pair < params.lambda / 2; ++pair) {
            const auto& parent_a = pop.genomes[static_cast<std::size_t>(tournament(pop, rng))];
            const auto& parent_b = pop.genomes[static_cast<std::size_t>(tournament(pop, rng))];
            auto [child1, child2] = crossover(parent_a, parent_b, rng);
            child1 = mutate(child1, classes.universe_size(), params.min_size, rng);
            child2 = mutate(child2, classes.universe_size(), params.min_size, rng);
            offspring.push_back(repair(std::move(child1), classes, params, rng));
            offspring.push_back(repair(std::move(child2), classes, params, rng));
        }

        Cohort combined;
        combined.genomes = pop.genomes;
        combined.fitness = pop.fitness;
        combined.genomes.reserve(pop.genomes.size() + offspring.size());
        for (auto& child : offspring) {
            combined.fitness.push_back(evaluate(child));
            combined.genomes.push_back(std::move(child));
        }

        // Elitist survivor selection over parents plus offspring.
        const auto fronts = non_dominated_sort(combined.fitness);
        Cohort next;
        next.genomes.reserve(static_cast<std::size_t>(params.mu));
        next.fitness.reserve(static_cast<std::size_t>(params.mu));
        for (const auto& front : fronts) {
            const int room = params.mu - static_cast<int>(next.genomes.size());
            if (room <= 0) break;
            std::vector<int> chosen(front.begin(), front.end());
            if (static_cast<int>(front.size()) > room) {
                std::vector<FitnessPair> members;
                members.reserve(front.size());
                for (const int idx : front) members.push_back(combined.fitness[static_cast<std::size_t>(idx)]);
                const std::vector<double> dist = crowding_distance(members);
                std::vector<int> by_crowding(static_cast<int>(front.size()));
                std::iota(by_crowding.begin(), by_crowding.end(), 0);
                std::sort(by_crowding.begin(), by_crowding.end(), [&](int x, int y) {
                    const double dx = dist[static_cast<std::size_t>(x)];
                    const double dy = dist[static_cast<std::size_t>(y)];
                    if (dx != dy) return dx > dy;
                    return front[static_cast<std::size_t>(x)] < front[static_cast<std::size_t>(y)];
                });
                chosen.clear();
                for (int j = 0; j < room; ++j)
                    chosen.push_back(front[static_cast<std::size_t>(by_crowding[static_cast<std::size_t>(j)])]);
            }
            for (const int idx : chosen) {
                next.genomes.push_back(std::move(combined.genomes[static_cast<std::size_t>(idx)]));
                next.fitness.push_back(combined.fitness[static_cast<std::size_t>(idx)]);
            }
        }
        pop = std::move(next);
        rank_cohort(pop);
        if (on_generation) on_generation(stats_of(gen, pop));
    }

    ParetoArchive archive;
    archive.params = params;
    archive.seed = params.seed;
    archive.generations_executed = params.generations;
    std::unordered_set<CoresetGenome, GenomeHash> seen;
    for (std::size_t i = 0; i < pop.genomes.size(); ++i) {
        if (pop.rank[i] != 0) continue;
        if (!seen.insert(pop.genomes[i]).second) continue;
        archive.entries.push_back({pop.genomes[i], pop.fitness[i], -1.0});
    }
    std::sort(archive.entries.begin(), archive.entries.end(),
              [](const ParetoArchive::Entry& a, const ParetoArchive::Entry& b) {
                  if (a.fitness.size != b.fitness.size) return a.fitness.size < b.fitness.size;
                  if (a.fitness.error != b.fitness.error) return a.fitness.error < b.fitness.error;
                  return a.genome.indices < b.genome.indices;
              });
    return archive;
}

double hypervolume_2d(const std::vector<FitnessPair>& front, double ref_size, double ref_error) {
    std::vector<FitnessPair> pts;
    pts.reserve(front.size());
    for (const auto& p : front)
        if (static_cast<double>(p.size) < ref_size && p.error < ref_error) pts.push_back(p);
    std::sort(pts.begin(), pts.end(), [](const FitnessPair& a, const FitnessPair& b) {
        if (a.size != b.size) return a.size < b.size;
        return a.error < b.error;
    });
    double volume = 0.0;
    double ceiling = ref_error;
    for (const auto& p : pts) {
        if (p.error >= ceiling) continue;  // dominated or duplicate slice
        volume += (ref_size - static_cast<double>(p.size)) * (ceiling - p.error);
        ceiling = p.error;
    }
    return volume;
}

}  // namespace coreset

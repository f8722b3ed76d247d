#include "coreset/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "coreset/rng.hpp"

namespace coreset {

namespace {

constexpr int kIterationFactor = 100;   // iteration cap = 100 * budget
constexpr double kVanishing = 1e-12;    // relative residual considered solved
constexpr double kDegenerate = 1e-12;   // orthogonal components below this are skipped

void check_budget(int budget, Eigen::Index n) {
    if (budget < 1) throw std::invalid_argument("baseline: budget must be >= 1");
    if (budget > n) throw std::invalid_argument("baseline: budget exceeds sample count");
}

// Largest normalized inner product with r; ties go to the lowest index.
// `eligible` may be null (all rows eligible).
int best_aligned_row(const VectorizedDataset& data, const Eigen::VectorXd& r,
                     const std::vector<char>* excluded) {
    const Eigen::VectorXd scores = (data.vectors * r).cwiseQuotient(data.norms);
    int best = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    for (Eigen::Index n = 0; n < scores.size(); ++n) {
        if (excluded && (*excluded)[static_cast<std::size_t>(n)]) continue;
        if (scores(n) > best_score) {
            best_score = scores(n);
            best = static_cast<int>(n);
        }
    }
    return best;
}

BaselineOutput gather_support(const std::vector<double>& w) {
    BaselineOutput out;
    for (std::size_t n = 0; n < w.size(); ++n) {
        if (w[n] > 0.0) {
            out.indices.push_back(static_cast<int>(n));
            out.weights.push_back(w[n]);
        }
    }
    return out;
}

// Shared matching-pursuit core; step_scale in (0, 1] damps each update.
BaselineOutput pursuit(const VectorizedDataset& data, int budget, double step_scale) {
    const Eigen::Index n_rows = data.vectors.rows();
    check_budget(budget, n_rows);
    if (!(step_scale > 0.0 && step_scale <= 1.0))
        throw std::invalid_argument("baseline: step scale must be in (0, 1]");

    std::vector<double> w(static_cast<std::size_t>(n_rows), 0.0);
    Eigen::VectorXd approx = Eigen::VectorXd::Zero(data.vectors.cols());
    const double target_scale = 1.0 + data.target.norm();
    std::vector<double> trace;
    int active = 0;

    const long cap = static_cast<long>(kIterationFactor) * budget;
    for (long it = 0; it < cap; ++it) {
        const Eigen::VectorXd r = data.target - approx;
        if (r.norm() <= kVanishing * target_scale) break;

        const int pick = best_aligned_row(data, r, nullptr);
        const auto pi = static_cast<std::size_t>(pick);
        const double inner = data.vectors.row(pick).dot(r);
        const double step = step_scale * inner / (data.norms(pick) * data.norms(pick));
        const double applied = std::max(w[pi] + step, 0.0) - w[pi];
        if (applied == 0.0) break;  // clipped to a standstill; state can no longer change

        const bool was_positive = w[pi] > 0.0;
        w[pi] += applied;
        approx += applied * data.vectors.row(pick).transpose();
        trace.push_back((data.target - approx).norm());

        if (!was_positive && w[pi] > 0.0) ++active;
        if (was_positive && w[pi] == 0.0) --active;
        if (active == budget) break;
    }

    BaselineOutput out = gather_support(w);
    out.residual_trace = std::move(trace);
    return out;
}

}  // namespace

VectorizedDataset vectorize(const Eigen::MatrixXd& standardized_X,
                            const std::vector<int>& labels, int class_count) {
    const Eigen::Index n = standardized_X.rows();
    if (n == 0) throw std::invalid_argument("vectorize: empty training partition");
    if (static_cast<std::size_t>(n) != labels.size())
        throw std::invalid_argument("vectorize: feature/label size mismatch");
    if (class_count < 1) throw std::invalid_argument("vectorize: class_count must be >= 1");

    VectorizedDataset data;
    data.vectors.setZero(n, standardized_X.cols() + class_count);
    data.vectors.leftCols(standardized_X.cols()) = standardized_X;
    for (Eigen::Index i = 0; i < n; ++i) {
        const int c = labels[static_cast<std::size_t>(i)];
        if (c < 0 || c >= class_count)
            throw std::invalid_argument("vectorize: label id out of range");
        data.vectors(i, standardized_X.cols() + c) = 1.0;
    }
    data.target = data.vectors.colwise().sum().transpose();
    data.norms = data.vectors.rowwise().norm();

    // The one-hot block makes a zero row impossible; treat one as corruption.
    if (data.norms.minCoeff() <= 0.0)
        throw std::logic_error("vectorize: zero-norm sample vector");
    // Cross-check the target against a sequential accumulation.
    Eigen::VectorXd check = Eigen::VectorXd::Zero(data.vectors.cols());
    for (Eigen::Index i = 0; i < n; ++i) check += data.vectors.row(i).transpose();
    if ((check - data.target).norm() > 1e-10 * (1.0 + data.target.norm()))
        throw std::logic_error("vectorize: target does not match the sample sum");
    return data;
}

BaselineOutput matching_pursuit(const VectorizedDataset& data, int budget) {
    return pursuit(data, budget, 1.0);
}

BaselineOutput forward_stagewise(const VectorizedDataset& data, int budget, double epsilon) {
    return pursuit(data, budget, epsilon);
}

BaselineOutput orthogonal_matching_pursuit(const VectorizedDataset& data, int budget) {
    const Eigen::Index n_rows = data.vectors.rows();
    check_budget(budget, n_rows);

    std::vector<char> selected(static_cast<std::size_t>(n_rows), 0);
    std::vector<int> active;
    Eigen::MatrixXd basis(data.vectors.cols(), 0);
    Eigen::VectorXd coeffs;
    Eigen::VectorXd r = data.target;
    const double target_scale = 1.0 + data.target.norm();
    BaselineOutput out;

    while (static_cast<int>(active.size()) < budget) {
        if (r.norm() <= kVanishing * target_scale) break;
        const int pick = best_aligned_row(data, r, &selected);
        if (pick < 0) break;
        selected[static_cast<std::size_t>(pick)] = 1;
        active.push_back(pick);

        basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
        basis.col(basis.cols() - 1) = data.vectors.row(pick).transpose();
        coeffs = nnls(basis, data.target);
        r = data.target - basis * coeffs;
        out.residual_trace.push_back(r.norm());
    }

    std::vector<int> order(active.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return active[static_cast<std::size_t>(a)] < active[static_cast<std::size_t>(b)]; });
    for (const int k : order) {
        out.indices.push_back(active[static_cast<std::size_t>(k)]);
        out.weights.push_back(coeffs(k));
    }
    return out;
}

BaselineOutput frank_wolfe(const VectorizedDataset& data, int budget) {
    const Eigen::Index n_rows = data.vectors.rows();
    check_budget(budget, n_rows);

    const double sigma = data.norms.sum();
    std::vector<double> w(static_cast<std::size_t>(n_rows), 0.0);
    BaselineOutput out;

    // Start at the best-aligned vertex of the constraint polytope.
    const int first = best_aligned_row(data, data.target, nullptr);
    w[static_cast<std::size_t>(first)] = sigma / data.norms(first);
    Eigen::VectorXd approx = sigma * data.vectors.row(first).transpose() / data.norms(first);
    out.residual_trace.push_back((data.target - approx).norm());
    int active = 1;
    const double target_scale = 1.0 + data.target.norm();

    const long cap = static_cast<long>(kIterationFactor) * budget;
    for (long it = 0; it < cap && active < budget; ++it) {
        const Eigen::VectorXd r = data.target - approx;
        if (r.norm() <= kVanishing * target_scale) break;

        const int pick = best_aligned_row(data, r, nullptr);
        const Eigen::VectorXd vertex = sigma * data.vectors.row(pick).transpose() / data.norms(pick);
        const Eigen::VectorXd direction = vertex - approx;
        const double denom = direction.squaredNorm();
        if (denom <= 0.0) break;
        const double gamma = std::clamp(direction.dot(r) / denom, 0.0, 1.0);
        if (gamma == 0.0) break;  // stationary: no vertex improves the objective

        for (auto& weight : w) weight *= (1.0 - gamma);  // gamma == 1 zeroes the rest exactly
        w[static_cast<std::size_t>(pick)] += gamma * sigma / data.norms(pick);
        approx = (1.0 - gamma) * approx + gamma * vertex;
        out.residual_trace.push_back((data.target - approx).norm());
        active = static_cast<int>(std::count_if(w.begin(), w.end(), [](double x) { return x > 0.0; }));
    }

    BaselineOutput support = gather_support(w);
    support.residual_trace = std::move(out.residual_trace);
    return support;
}

BaselineOutput giga(const VectorizedDataset& data, int budget) {
    const Eigen::Index n_rows = data.vectors.rows();
    check_budget(budget, n_rows);

    const double target_norm = data.target.norm();
    if (target_norm <= 0.0) throw std::invalid_argument("giga: zero target");
    const Eigen::VectorXd target_dir = data.target / target_norm;
    const Eigen::MatrixXd unit = data.vectors.array().colwise() / data.norms.array();

    std::vector<char> selected(static_cast<std::size_t>(n_rows), 0);
    std::vector<int> picks;
    auto record = [&](const Eigen::VectorXd& y, BaselineOutput& out) {
        const double align = target_dir.dot(y);
        out.alignment_trace.push_back(align);
        const double scale = std::max(data.target.dot(y), 0.0);
        out.residual_trace.push_back((data.target - scale * y).norm());
    };

    BaselineOutput out;
    const int first = best_aligned_row(data, target_dir, nullptr);
    Eigen::VectorXd y = unit.row(first).transpose();
    selected[static_cast<std::size_t>(first)] = 1;
    picks.push_back(first);
    record(y, out);

    const long cap = static_cast<long>(kIterationFactor) * budget;
    for (long it = 0; it < cap && static_cast<int>(picks.size()) < budget; ++it) {
        Eigen::VectorXd residual_dir = target_dir - target_dir.dot(y) * y;
        const double residual_norm = residual_dir.norm();
        if (residual_norm <= kDegenerate) break;  // already aligned
        residual_dir /= residual_norm;

        // Pick the sample whose component orthogonal to y points most toward
        // the target's orthogonal component.
        int pick = -1;
        double best_score = -std::numeric_limits<double>::infinity();
        for (Eigen::Index n = 0; n < n_rows; ++n) {
            Eigen::VectorXd ortho = unit.row(n).transpose() - unit.row(n).dot(y) * y;
            const double norm = ortho.norm();
            if (norm < kDegenerate) continue;
            const double score = residual_dir.dot(ortho) / norm;
            if (score > best_score) {
                best_score = score;
                pick = static_cast<int>(n);
            }
        }
        if (pick < 0) break;

        Eigen::VectorXd ortho = unit.row(pick).transpose() - unit.row(pick).dot(y) * y;
        const double norm = ortho.norm();
        ortho /= norm;
        // Re-project the target direction onto span{y, chosen direction}.
        Eigen::VectorXd projected =
            target_dir.dot(y) * y + target_dir.dot(ortho) * ortho;
        const double projected_norm = projected.norm();
        if (projected_norm <= kDegenerate) break;
        y = projected / projected_norm;

        if (!selected[static_cast<std::size_t>(pick)]) {
            selected[static_cast<std::size_t>(pick)] = 1;
            picks.push_back(pick);
        }
        record(y, out);
    }

    std::sort(picks.begin(), picks.end());
    Eigen::MatrixXd basis(data.vectors.cols(), static_cast<Eigen::Index>(picks.size()));
    for (std::size_t k = 0; k < picks.size(); ++k)
        basis.col(static_cast<Eigen::Index>(k)) = data.vectors.row(picks[k]).transpose();
    const Eigen::VectorXd weights = nnls(basis, data.target);
    out.indices = std::move(picks);
    out.weights.assign(weights.data(), weights.data() + weights.size());
    return out;
}

BaselineOutput stratified_random(const std::vector<int>& labels, int budget,
                                 std::uint64_t seed) {
    const int n = static_cast<int>(labels.size());
    check_budget(budget, n);

    int class_count = 0;
    for (const int c : labels) {
        if (c < 0) throw std::invalid_argument("stratified_random: negative class id");
        class_count = std::max(class_count, c + 1);
    }
    std::vector<std::vector<int>> by_class(static_cast<std::size_t>(class_count));
    for (int i = 0; i < n; ++i) by_class[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])].push_back(i);
    std::vector<int> present;
    for (int c = 0; c < class_count; ++c)
        if (!by_class[static_cast<std::size_t>(c)].empty()) present.push_back(c);
    if (budget < static_cast<int>(present.size()))
        throw std::invalid_argument("stratified_random: budget smaller than the class count");

    // Proportional quotas with largest-remainder rounding, floored at 1 and
    // capped by class size.
    std::vector<int> quota(static_cast<std::size_t>(class_count), 0);
    std::vector<double> remainder(static_cast<std::size_t>(class_count), 0.0);
    int assigned = 0;
    for (const int c : present) {
        const auto size = static_cast<double>(by_class[static_cast<std::size_t>(c)].size());
        const double share = static_cast<double>(budget) * size / static_cast<double>(n);
        int q = std::max(1, static_cast<int>(share));
        q = std::min(q, static_cast<int>(by_class[static_cast<std::size_t>(c)].size()));
        quota[static_cast<std::size_t>(c)] = q;
        remainder[static_cast<std::size_t>(c)] = share - std::floor(share);
        assigned += q;
    }
    while (assigned < budget) {
        int pick = -1;
        for (const int c : present) {
            const auto ci = static_cast<std::size_t>(c);
            if (quota[ci] >= static_cast<int>(by_class[ci].size())) continue;
            if (pick < 0 || remainder[ci] > remainder[static_cast<std::size_t>(pick)]) pick = c;
        }
        if (pick < 0) break;
        ++quota[static_cast<std::size_t>(pick)];
        remainder[static_cast<std::size_t>(pick)] -= 1.0;
        ++assigned;
    }
    while (assigned > budget) {
        int pick = -1;
        for (const int c : present) {
            const auto ci = static_cast<std::size_t>(c);
            if (quota[ci] <= 1) continue;
            if (pick < 0 || remainder[ci] < remainder[static_cast<std::size_t>(pick)]) pick = c;
        }
        if (pick < 0) break;
        --quota[static_cast<std::size_t>(pick)];
        remainder[static_cast<std::size_t>(pick)] += 1.0;
        --assigned;
    }

    Rng rng(seed);
    BaselineOutput out;
    for (const int c : present) {
        auto members = by_class[static_cast<std::size_t>(c)];
        const int q = quota[static_cast<std::size_t>(c)];
        const std::vector<int> chosen = rng.sample_without_replacement(static_cast<int>(members.size()), q);
        for (const int j : chosen) out.indices.push_back(members[static_cast<std::size_t>(j)]);
    }
    std::sort(out.indices.begin(), out.indices.end());
    out.weights.assign(out.indices.size(), 1.0);
    return out;
}

Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double jitter) {
    const Eigen::Index k = A.cols();
    Eigen::VectorXd w = Eigen::VectorXd::Zero(k);
    if (k == 0) return w;

    const Eigen::MatrixXd gram = A.transpose() * A;
    const Eigen::VectorXd rhs = A.transpose() * b;
    const double tol = 1e-12 * (1.0 + rhs.cwiseAbs().maxCoeff());

    std::vector<char> passive(static_cast<std::size_t>(k), 0);
    auto solve_passive = [&](const std::vector<int>& set) {
        Eigen::MatrixXd G(set.size(), set.size());
        Eigen::VectorXd v(set.size());
        for (std::size_t i = 0; i < set.size(); ++i) {
            v(static_cast<Eigen::Index>(i)) = rhs(set[i]);
            for (std::size_t j = 0; j < set.size(); ++j)
                G(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = gram(set[i], set[j]);
        }
        G.diagonal().array() += jitter;
        return Eigen::VectorXd(G.ldlt().solve(v));
    };
    auto passive_set = [&] {
        std::vector<int> set;
        for (Eigen::Index j = 0; j < k; ++j)
            if (passive[static_cast<std::size_t>(j)]) set.push_back(static_cast<int>(j));
        return set;
    };

    const int max_outer = std::max(3 * static_cast<int>(k), 30);
    for (int outer = 0; outer < max_outer; ++outer) {
        const Eigen::VectorXd grad = rhs - gram * w;
        int entering = -1;
        double best = tol;
        for (Eigen::Index j = 0; j < k; ++j) {
            if (passive[static_cast<std::size_t>(j)]) continue;
            if (grad(j) > best) {
                best = grad(j);
                entering = static_cast<int>(j);
            }
        }
        if (entering < 0) break;  // KKT satisfied
        passive[static_cast<std::size_t>(entering)] = 1;

        for (int inner = 0; inner <= static_cast<int>(k); ++inner) {
            const std::vector<int> set = passive_set();
            const Eigen::VectorXd z = solve_passive(set);
            double min_z = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < z.size(); ++i) min_z = std::min(min_z, z(i));
            if (min_z > 0.0) {
                w.setZero();
                for (std::size_t i = 0; i < set.size(); ++i) w(set[i]) = z(static_cast<Eigen::Index>(i));
                break;
            }
            // Step toward z until the first coordinate hits zero, then drop
            // every coordinate that reached the boundary.
            double step = 1.0;
            for (std::size_t i = 0; i < set.size(); ++i) {
                const double zi = z(static_cast<Eigen::Index>(i));
                if (zi <= 0.0) {
                    const double wi = w(set[i]);
                    if (wi - zi > 0.0) step = std::min(step, wi / (wi - zi));
                }
            }
            for (std::size_t i = 0; i < set.size(); ++i) {
                const double zi = z(static_cast<Eigen::Index>(i));
                w(set[i]) += step * (zi - w(set[i]));
            }
            for (std::size_t i = 0; i < set.size(); ++i) {
                if (w(set[i]) <= 1e-14) {
                    w(set[i]) = 0.0;
                    passive[static_cast<std::size_t>(set[i])] = 0;
                }
            }
        }
    }
    for (Eigen::Index j = 0; j < k; ++j) w(j) = std::max(w(j), 0.0);
    return w;
}

}  // namespace coreset

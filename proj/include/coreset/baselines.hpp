#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace coreset {

// Sample-as-vector view of a training partition: row n is the standardized
// feature vector of sample n concatenated with the one-hot encoding of its
// label, and the shared approximation target is the column sum of all rows.
// The one-hot block guarantees every row has norm >= 1.
struct VectorizedDataset {
    Eigen::MatrixXd vectors;  // N x (d + class_count)
    Eigen::VectorXd target;   // length d + class_count
    Eigen::VectorXd norms;    // per-row Euclidean norm
};

VectorizedDataset vectorize(const Eigen::MatrixXd& standardized_X,
                            const std::vector<int>& labels, int class_count);

// Result of one greedy selector run.
struct BaselineOutput {
    std::vector<int> indices;            // sorted, duplicate-free, <= budget entries
    std::vector<double> weights;         // nonnegative, aligned with indices
    std::vector<double> residual_trace;  // ||target - sum_n w_n v_n|| per iteration
    std::vector<double> alignment_trace; // geodesic selectors only: <target_dir, y> per iteration
};

// Greedy L2 pursuit of the target over sample vectors. Each iteration picks
// argmax_n <v_n, r>/||v_n||, moves that weight by the exact line-search step
// (clipped so weights stay nonnegative), and records the residual. Stops at
// `budget` distinct positive weights, at a vanishing residual, or after
// 100 * budget iterations.
BaselineOutput matching_pursuit(const VectorizedDataset& data, int budget);

// Matching pursuit with the step damped by epsilon in (0, 1]; epsilon = 1 is
// exactly matching_pursuit.
BaselineOutput forward_stagewise(const VectorizedDataset& data, int budget,
                                 double epsilon = 0.1);

// Pursuit with a full nonnegative least-squares refit of all selected
// weights after each new index. Selection scans unselected indices only, so
// duplicates are never picked twice.
BaselineOutput orthogonal_matching_pursuit(const VectorizedDataset& data, int budget);

// Conditional-gradient descent on ||target - sum w_n v_n||^2 over the scaled
// simplex {w >= 0, sum_n w_n ||v_n|| = sum_n ||v_n||}, with exact line search
// clamped to [0, 1]. Stops at `budget` active weights, stationarity, or the
// iteration cap.
BaselineOutput frank_wolfe(const VectorizedDataset& data, int budget);

// Greedy geodesic ascent on the unit sphere: tracks a unit direction y,
// repeatedly selects the sample whose component orthogonal to y best aligns
// with the target's orthogonal component, and re-projects. Final weights are
// the nonnegative least squares of the target on the selected vectors.
BaselineOutput giga(const VectorizedDataset& data, int budget);

// Label-stratified uniform control: per-class proportional allocation
// (largest-remainder rounding, at least one per class), sampled without
// replacement. Weights are 1. Requires class_count <= budget <= N.
BaselineOutput stratified_random(const std::vector<int>& labels, int budget,
                                 std::uint64_t seed);

// Nonnegative least squares min ||A w - b|| s.t. w >= 0 (active-set method;
// every inner solve uses `jitter` on the Gram diagonal).
Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                     double jitter = 1e-10);

}  // namespace coreset

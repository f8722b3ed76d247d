#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace coreset {

// In-memory classification dataset with dense class ids in [0, class_count).
struct Dataset {
    Eigen::MatrixXd features;  // N x d
    std::vector<int> labels;   // length N
    int class_count = 0;
    std::vector<std::string> feature_names;
    std::string name;

    int rows() const { return static_cast<int>(features.rows()); }
    int cols() const { return static_cast<int>(features.cols()); }
};

enum class MissingPolicy {
    MeanImpute,  // replace missing numeric cells with the full-column mean
    DropRow,     // drop every row containing a missing numeric cell
};

// Loads a delimited text file (first row is the header) into a Dataset.
//  - label_column is a header name, or a zero-based column index if no header
//    matches and the string is all digits
//  - quoting follows the usual CSV rules ("" escapes a quote inside quotes)
//  - label values are re-encoded to dense ids in first-appearance order
//  - non-numeric feature columns are integer-encoded in first-appearance order
//  - missing numeric cells (empty, "?", "na", "nan", "n/a", "null",
//    case-insensitive) are handled per `policy`; rows with a missing label are
//    always dropped
// Throws on: unreadable file, malformed rows, unknown label column, empty
// data, a single-class target, or any class left with fewer than 2 samples.
Dataset load_csv(const std::string& path, const std::string& label_column,
                 MissingPolicy policy = MissingPolicy::MeanImpute, char delimiter = ',');

// Column-wise affine transform fitted on some reference rows.
struct Scaler {
    Eigen::RowVectorXd mean;
    Eigen::RowVectorXd scale;  // per-column std; columns with std < 1e-12 use 1

    Eigen::MatrixXd transform(const Eigen::MatrixXd& X) const;
};

// Fits mean/std (population variance) per column.
Scaler fit_scaler(const Eigen::MatrixXd& X);

// Convenience: fit on X and return the transformed copy.
std::pair<Scaler, Eigen::MatrixXd> standardize(const Eigen::MatrixXd& X);

// Stratified fold assignment for cross-validation.
struct FoldPlan {
    int fold_count = 0;
    std::uint64_t seed = 0;
    std::vector<int> assignments;  // fold id in [0, fold_count) per sample
};

// Assigns each sample to a fold so that per-class fold occupancies differ by
// at most one. Deterministic in (labels, fold_count, seed).
// Throws if fold_count < 2 or any class has fewer than fold_count samples.
FoldPlan make_folds(const Dataset& dataset, int fold_count, std::uint64_t seed);

// Row-index view of one train/validation/test split.
struct SplitView {
    std::vector<int> train_idx;
    std::vector<int> val_idx;
    std::vector<int> test_idx;
};

// Takes fold `fold` as the test partition and holds out a stratified
// `val_fraction` of the remainder as validation (per class:
// floor(val_fraction * count), reduced so train keeps at least one sample of
// every class). Index lists are sorted and disjoint and cover all samples.
SplitView split_fold(const FoldPlan& plan, const std::vector<int>& labels, int fold,
                     double val_fraction, std::uint64_t seed);

// Materializes the given rows of X, in the order of `idx`.
Eigen::MatrixXd take_rows(const Eigen::MatrixXd& X, const std::vector<int>& idx);

// Subsets a label vector by row indices.
std::vector<int> take_labels(const std::vector<int>& labels, const std::vector<int>& idx);

}  // namespace coreset

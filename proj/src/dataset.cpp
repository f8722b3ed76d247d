#include "coreset/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <unordered_map>

#include "coreset/rng.hpp"

namespace coreset {

namespace {

constexpr double kStdFloor = 1e-12;

std::string trimmed(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return s.substr(b, e - b);
}

std::string lowered(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

bool is_missing_token(const std::string& cell) {
    if (cell.empty() || cell == "?") return true;
    const std::string low = lowered(cell);
    return low == "na" || low == "nan" || low == "n/a" || low == "null";
}

// Parses a finite double; returns false for anything else (including inf).
bool parse_finite(const std::string& cell, double& out) {
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    if (begin != end && *begin == '+') ++begin;  // from_chars rejects a leading '+'
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) return false;
    out = value;
    return true;
}

struct RawTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// CSV state machine: quoted fields may contain the delimiter and newlines,
// "" inside quotes is a literal quote, unquoted fields are trimmed.
RawTable parse_delimited(const std::string& path, char delimiter) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_csv: cannot open file: " + path);
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    RawTable table;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool quoted_field = false;
    bool any_field_in_record = false;

    auto end_field = [&] {
        record.push_back(quoted_field ? field : trimmed(field));
        field.clear();
        quoted_field = false;
        any_field_in_record = true;
    };
    auto end_record = [&] {
        if (record.size() == 1 && record[0].empty()) {
            record.clear();  // blank line
        } else if (!record.empty()) {
            if (table.header.empty()) {
                table.header = std::move(record);
            } else {
                table.rows.push_back(std::move(record));
            }
            record = {};
        }
        any_field_in_record = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"' && field.empty()) {
            in_quotes = true;
            quoted_field = true;
        } else if (c == delimiter) {
            end_field();
        } else if (c == '\n') {
            end_field();
            end_record();
        } else if (c == '\r') {
            // swallowed; \r\n and stray \r both terminate via the \n branch or trim
        } else {
            field.push_back(c);
        }
    }
    if (in_quotes) throw std::runtime_error("load_csv: unterminated quoted field in " + path);
    if (!field.empty() || any_field_in_record) {
        end_field();
        end_record();
    }

    if (table.header.empty()) throw std::runtime_error("load_csv: empty dataset: " + path);
    const std::size_t width = table.header.size();
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        if (table.rows[r].size() != width)
            throw std::runtime_error("load_csv: malformed row " + std::to_string(r + 2) + ": expected " +
                                     std::to_string(width) + " fields, got " +
                                     std::to_string(table.rows[r].size()));
    }
    return table;
}

std::size_t resolve_label_column(const std::vector<std::string>& header,
                                 const std::string& label_column) {
    for (std::size_t j = 0; j < header.size(); ++j)
        if (header[j] == label_column) return j;
    const bool numeric = !label_column.empty() &&
                         std::all_of(label_column.begin(), label_column.end(),
                                     [](unsigned char c) { return std::isdigit(c); });
    if (numeric) {
        const std::size_t j = std::stoul(label_column);
        if (j < header.size()) return j;
    }
    throw std::runtime_error("load_csv: label column not found: " + label_column);
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& label_column,
                 MissingPolicy policy, char delimiter) {
    const RawTable table = parse_delimited(path, delimiter);
    if (table.rows.empty()) throw std::runtime_error("load_csv: empty dataset: " + path);

    const std::size_t label_idx = resolve_label_column(table.header, label_column);
    const std::size_t width = table.header.size();
    if (width < 2) throw std::runtime_error("load_csv: no feature columns in " + path);

    std::vector<std::size_t> feature_cols;
    feature_cols.reserve(width - 1);
    for (std::size_t j = 0; j < width; ++j)
        if (j != label_idx) feature_cols.push_back(j);

    // Rows with a missing label carry no usable target; drop them up front.
    std::vector<const std::vector<std::string>*> rows;
    rows.reserve(table.rows.size());
    for (const auto& row : table.rows)
        if (!is_missing_token(row[label_idx])) rows.push_back(&row);
    if (rows.empty()) throw std::runtime_error("load_csv: empty dataset: " + path);

    // A feature column is numeric iff every non-missing cell parses finite.
    const std::size_t d = feature_cols.size();
    std::vector<bool> numeric_col(d, true);
    for (std::size_t k = 0; k < d; ++k) {
        const std::size_t j = feature_cols[k];
        for (const auto* row : rows) {
            const std::string& cell = (*row)[j];
            double value = 0.0;
            if (!is_missing_token(cell) && !parse_finite(cell, value)) {
                numeric_col[k] = false;
                break;
            }
        }
    }

    std::vector<char> keep(rows.size(), 1);
    if (policy == MissingPolicy::DropRow) {
        for (std::size_t r = 0; r < rows.size(); ++r)
            for (std::size_t k = 0; k < d && keep[r]; ++k)
                if (numeric_col[k] && is_missing_token((*rows[r])[feature_cols[k]])) keep[r] = 0;
    }

    std::vector<const std::vector<std::string>*> kept;
    kept.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        if (keep[r]) kept.push_back(rows[r]);
    if (kept.empty()) throw std::runtime_error("load_csv: drop-row policy removed every row of " + path);

    const auto n = static_cast<Eigen::Index>(kept.size());
    Dataset ds;
    ds.features.resize(n, static_cast<Eigen::Index>(d));
    ds.feature_names.reserve(d);
    for (std::size_t k = 0; k < d; ++k) ds.feature_names.push_back(table.header[feature_cols[k]]);
    ds.name = std::filesystem::path(path).stem().string();

    for (std::size_t k = 0; k < d; ++k) {
        const std::size_t j = feature_cols[k];
        const auto col = static_cast<Eigen::Index>(k);
        if (numeric_col[k]) {
            double sum = 0.0;
            Eigen::Index present = 0;
            std::vector<char> missing(kept.size(), 0);
            for (std::size_t r = 0; r < kept.size(); ++r) {
                const std::string& cell = (*kept[r])[j];
                double value = 0.0;
                if (is_missing_token(cell)) {
                    missing[r] = 1;
                } else {
                    parse_finite(cell, value);
                    sum += value;
                    ++present;
                }
                ds.features(static_cast<Eigen::Index>(r), col) = value;
            }
            const double mean = present > 0 ? sum / static_cast<double>(present) : 0.0;
            for (std::size_t r = 0; r < kept.size(); ++r)
                if (missing[r]) ds.features(static_cast<Eigen::Index>(r), col) = mean;
        } else {
            // Categorical: integer codes in first-appearance order; missing
            // tokens are categories of their own.
            std::unordered_map<std::string, int> codes;
            for (std::size_t r = 0; r < kept.size(); ++r) {
                const std::string& cell = (*kept[r])[j];
                const auto [it, inserted] = codes.emplace(cell, static_cast<int>(codes.size()));
                ds.features(static_cast<Eigen::Index>(r), col) = static_cast<double>(it->second);
            }
        }
    }

    std::unordered_map<std::string, int> label_codes;
    ds.labels.reserve(kept.size());
    for (const auto* row : kept) {
        const std::string& cell = (*row)[label_idx];
        const auto [it, inserted] = label_codes.emplace(cell, static_cast<int>(label_codes.size()));
        ds.labels.push_back(it->second);
    }
    ds.class_count = static_cast<int>(label_codes.size());
    if (ds.class_count < 2) throw std::runtime_error("load_csv: single-class dataset: " + path);

    std::vector<int> per_class(static_cast<std::size_t>(ds.class_count), 0);
    for (const int c : ds.labels) ++per_class[static_cast<std::size_t>(c)];
    for (int c = 0; c < ds.class_count; ++c) {
        if (per_class[static_cast<std::size_t>(c)] < 2)
            throw std::runtime_error("load_csv: class with fewer than 2 samples in " + path +
                                     " (need at least 2 per class; fewer than 2*classes rows remain)");
    }

    if (!ds.features.allFinite())
        throw std::runtime_error("load_csv: internal error: non-finite feature after imputation");
    return ds;
}

Eigen::MatrixXd Scaler::transform(const Eigen::MatrixXd& X) const {
    if (X.cols() != mean.cols())
        throw std::invalid_argument("Scaler::transform: column count mismatch");
    return (X.rowwise() - mean).array().rowwise() / scale.array();
}

Scaler fit_scaler(const Eigen::MatrixXd& X) {
    if (X.rows() == 0 || X.cols() == 0)
        throw std::invalid_argument("fit_scaler: empty matrix");
    Scaler s;
    s.mean = X.colwise().mean();
    const Eigen::RowVectorXd var =
        (X.rowwise() - s.mean).array().square().colwise().mean();
    s.scale = var.array().sqrt();
    for (Eigen::Index j = 0; j < s.scale.cols(); ++j)
        if (s.scale(j) < kStdFloor) s.scale(j) = 1.0;
    return s;
}

std::pair<Scaler, Eigen::MatrixXd> standardize(const Eigen::MatrixXd& X) {
    Scaler s = fit_scaler(X);
    Eigen::MatrixXd transformed = s.transform(X);
    return {std::move(s), std::move(transformed)};
}

FoldPlan make_folds(const Dataset& dataset, int fold_count, std::uint64_t seed) {
    if (fold_count < 2) throw std::invalid_argument("make_folds: fold_count must be >= 2");
    const int n = dataset.rows();
    if (static_cast<std::size_t>(n) != dataset.labels.size())
        throw std::invalid_argument("make_folds: feature/label size mismatch");

    std::vector<std::vector<int>> by_class(static_cast<std::size_t>(dataset.class_count));
    for (int i = 0; i < n; ++i) {
        const int c = dataset.labels[static_cast<std::size_t>(i)];
        by_class[static_cast<std::size_t>(c)].push_back(i);
    }
    for (int c = 0; c < dataset.class_count; ++c) {
        if (static_cast<int>(by_class[static_cast<std::size_t>(c)].size()) < fold_count)
            throw std::invalid_argument("make_folds: class " + std::to_string(c) + " has " +
                                        std::to_string(by_class[static_cast<std::size_t>(c)].size()) +
                                        " samples, fewer than fold_count");
    }

    FoldPlan plan;
    plan.fold_count = fold_count;
    plan.seed = seed;
    plan.assignments.assign(static_cast<std::size_t>(n), -1);

    Rng rng(seed);
    int offset = 0;  // rotates the round-robin start so remainders spread across folds
    for (auto& members : by_class) {
        rng.shuffle(members);
        for (std::size_t j = 0; j < members.size(); ++j) {
            plan.assignments[static_cast<std::size_t>(members[j])] =
                (static_cast<int>(j) + offset) % fold_count;
        }
        offset = (offset + static_cast<int>(members.size())) % fold_count;
    }
    return plan;
}

SplitView split_fold(const FoldPlan& plan, const std::vector<int>& labels, int fold,
                     double val_fraction, std::uint64_t seed) {
    if (fold < 0 || fold >= plan.fold_count)
        throw std::invalid_argument("split_fold: fold index out of range");
    if (plan.assignments.size() != labels.size())
        throw std::invalid_argument("split_fold: plan/label size mismatch");
    val_fraction = std::clamp(val_fraction, 0.0, 1.0);

    int class_count = 0;
    for (const int c : labels) class_count = std::max(class_count, c + 1);

    SplitView split;
    std::vector<std::vector<int>> rest_by_class(static_cast<std::size_t>(class_count));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (plan.assignments[i] == fold) {
            split.test_idx.push_back(static_cast<int>(i));
        } else {
            rest_by_class[static_cast<std::size_t>(labels[i])].push_back(static_cast<int>(i));
        }
    }

    Rng rng(seed);
    for (auto& members : rest_by_class) {
        if (members.empty()) continue;
        rng.shuffle(members);
        // Hold out floor(fraction * count) but always leave one for train. The
        // small epsilon keeps exact-intent products like (1/9)*45 from
        // flooring one below their mathematical value.
        auto holdout = static_cast<std::size_t>(
            val_fraction * static_cast<double>(members.size()) + 1e-9);
        holdout = std::min(holdout, members.size() - 1);
        for (std::size_t j = 0; j < members.size(); ++j) {
            (j < holdout ? split.val_idx : split.train_idx).push_back(members[j]);
        }
    }

    std::sort(split.train_idx.begin(), split.train_idx.end());
    std::sort(split.val_idx.begin(), split.val_idx.end());
    std::sort(split.test_idx.begin(), split.test_idx.end());
    return split;
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& X, const std::vector<int>& idx) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), X.cols());
    for (std::size_t i = 0; i < idx.size(); ++i)
        out.row(static_cast<Eigen::Index>(i)) = X.row(idx[i]);
    return out;
}

std::vector<int> take_labels(const std::vector<int>& labels, const std::vector<int>& idx) {
    std::vector<int> out;
    out.reserve(idx.size());
    for (const int i : idx) out.push_back(labels[static_cast<std::size_t>(i)]);
    return out;
}

}  // namespace coreset

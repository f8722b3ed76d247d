#include "coreset/metrics.hpp"

#include <stdexcept>
#include <string>

namespace coreset {

ErrorScore weighted_f1_error(const std::vector<int>& y_true,
                             const std::vector<int>& y_pred,
                             int class_count) {
    if (y_true.empty()) throw std::invalid_argument("weighted_f1_error: empty label vectors");
    if (y_true.size() != y_pred.size())
        throw std::invalid_argument("weighted_f1_error: y_true and y_pred differ in length");
    if (class_count < 1) throw std::invalid_argument("weighted_f1_error: class_count must be >= 1");

    const auto n = y_true.size();
    std::vector<long long> tp(static_cast<std::size_t>(class_count), 0);
    std::vector<long long> fp(static_cast<std::size_t>(class_count), 0);
    std::vector<long long> fn(static_cast<std::size_t>(class_count), 0);
    std::vector<long long> support(static_cast<std::size_t>(class_count), 0);

    for (std::size_t i = 0; i < n; ++i) {
        const int t = y_true[i];
        const int p = y_pred[i];
        if (t < 0 || t >= class_count || p < 0 || p >= class_count)
            throw std::invalid_argument("weighted_f1_error: label id out of range at position " +
                                        std::to_string(i));
        ++support[static_cast<std::size_t>(t)];
        if (t == p) {
            ++tp[static_cast<std::size_t>(t)];
        } else {
            ++fn[static_cast<std::size_t>(t)];
            ++fp[static_cast<std::size_t>(p)];
        }
    }

    ErrorScore score;
    score.per_class_f1.assign(static_cast<std::size_t>(class_count), 0.0);
    double weighted_sum = 0.0;
    for (int c = 0; c < class_count; ++c) {
        const auto ci = static_cast<std::size_t>(c);
        const double denom_p = static_cast<double>(tp[ci] + fp[ci]);
        const double denom_r = static_cast<double>(tp[ci] + fn[ci]);
        const double precision = denom_p > 0.0 ? static_cast<double>(tp[ci]) / denom_p : 0.0;
        const double recall = denom_r > 0.0 ? static_cast<double>(tp[ci]) / denom_r : 0.0;
        const double pr = precision + recall;
        const double f1 = pr > 0.0 ? 2.0 * precision * recall / pr : 0.0;
        score.per_class_f1[ci] = f1;
        weighted_sum += static_cast<double>(support[ci]) * f1;
    }
    score.weighted_f1 = weighted_sum / static_cast<double>(n);
    score.error = 1.0 - score.weighted_f1;
    return score;
}

}  // namespace coreset

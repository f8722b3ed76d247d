#pragma once

#include <vector>

namespace coreset {

// Classification quality summary for a batch of predictions.
struct ErrorScore {
    double error = 0.0;             // 1 - weighted_f1, exactly
    double weighted_f1 = 0.0;       // support-weighted mean of per-class F1
    std::vector<double> per_class_f1;
};

// Support-weighted F1 over dense class ids in [0, class_count).
// Per class: precision = TP/(TP+FP), recall = TP/(TP+FN), F1 = 2PR/(P+R),
// with every 0/0 defined as 0. Weights are the true-label supports; classes
// absent from y_true contribute weight 0.
ErrorScore weighted_f1_error(const std::vector<int>& y_true,
                             const std::vector<int>& y_pred,
                             int class_count);

}  // namespace coreset

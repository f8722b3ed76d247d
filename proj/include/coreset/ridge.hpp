#pragma once

#include <Eigen/Dense>
#include <vector>

namespace coreset {

// One-vs-all ridge classifier with closed-form fit. Targets are +/-1 per
// class column; the intercept is left unpenalized by centering features and
// targets before the solve.
class RidgeModel {
public:
    RidgeModel() = default;

    // Scores for each row: X*weights + intercept, one column per class.
    Eigen::MatrixXd decision(const Eigen::MatrixXd& X) const;

    // Argmax class per row; exact score ties go to the lowest class id.
    std::vector<int> predict(const Eigen::MatrixXd& X) const;

    bool fitted() const { return fitted_; }
    int feature_count() const { return static_cast<int>(weights_.rows()); }
    int class_count() const { return static_cast<int>(weights_.cols()); }
    const Eigen::MatrixXd& weights() const { return weights_; }
    const Eigen::VectorXd& intercept() const { return intercept_; }
    double alpha() const { return alpha_; }

    friend RidgeModel fit_ridge(const Eigen::MatrixXd& X, const std::vector<int>& y,
                                int class_count, double alpha);

private:
    Eigen::MatrixXd weights_;    // d x L
    Eigen::VectorXd intercept_;  // L
    double alpha_ = 0.0;
    bool fitted_ = false;
};

// Solves (Xc' Xc + alpha I) W = Xc' Yc on centered data. Uses the n x n dual
// system when n < d; the two forms agree through the push-through identity.
// Throws if inputs are empty or non-finite, alpha <= 0, class_count < 1, a
// label id falls outside [0, class_count), or the normal-equation residual
// exceeds 1e-8 * (1 + ||Xc' Yc||_F) even after one refinement step.
RidgeModel fit_ridge(const Eigen::MatrixXd& X, const std::vector<int>& y,
                     int class_count, double alpha = 1.0);

}  // namespace coreset

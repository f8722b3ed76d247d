#include "coreset/ridge.hpp"

#include <Eigen/Cholesky>
#include <stdexcept>
#include <string>

namespace coreset {

namespace {

constexpr double kResidualTolerance = 1e-8;

// Residual of the primal normal equations for a candidate W.
double normal_equation_residual(const Eigen::MatrixXd& Xc, const Eigen::MatrixXd& Yc,
                                const Eigen::MatrixXd& W, double alpha) {
    const Eigen::MatrixXd R = Xc.transpose() * (Xc * W) + alpha * W - Xc.transpose() * Yc;
    return R.norm();
}

}  // namespace

RidgeModel fit_ridge(const Eigen::MatrixXd& X, const std::vector<int>& y,
                     int class_count, double alpha) {
    const auto n = X.rows();
    const auto d = X.cols();
    if (n == 0 || d == 0) throw std::invalid_argument("fit_ridge: empty design matrix");
    if (static_cast<std::size_t>(n) != y.size())
        throw std::invalid_argument("fit_ridge: row count does not match label count");
    if (class_count < 1) throw std::invalid_argument("fit_ridge: class_count must be >= 1");
    if (!(alpha > 0.0)) throw std::invalid_argument("fit_ridge: alpha must be positive");
    if (!X.allFinite()) throw std::invalid_argument("fit_ridge: non-finite feature values");

    // +/-1 one-vs-all targets; classes absent from y become constant -1.
    Eigen::MatrixXd Y = Eigen::MatrixXd::Constant(n, class_count, -1.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        const int c = y[static_cast<std::size_t>(i)];
        if (c < 0 || c >= class_count)
            throw std::invalid_argument("fit_ridge: label id out of range: " + std::to_string(c));
        Y(i, c) = 1.0;
    }

    const Eigen::RowVectorXd x_mean = X.colwise().mean();
    const Eigen::RowVectorXd y_mean = Y.colwise().mean();
    const Eigen::MatrixXd Xc = X.rowwise() - x_mean;
    const Eigen::MatrixXd Yc = Y.rowwise() - y_mean;
    const Eigen::MatrixXd B = Xc.transpose() * Yc;  // d x L right-hand side

    Eigen::MatrixXd W;
    if (d <= n) {
        Eigen::MatrixXd G = Xc.transpose() * Xc;
        G.diagonal().array() += alpha;
        const Eigen::LLT<Eigen::MatrixXd> llt(G);
        W = llt.solve(B);
        if (normal_equation_residual(Xc, Yc, W, alpha) >
            kResidualTolerance * (1.0 + B.norm())) {
            // One step of iterative refinement.
            const Eigen::MatrixXd R = G * W - B;
            W -= llt.solve(R);
        }
    } else {
        // Dual form: W = Xc' A with (Xc Xc' + alpha I) A = Yc.
        Eigen::MatrixXd K = Xc * Xc.transpose();
        K.diagonal().array() += alpha;
        const Eigen::LLT<Eigen::MatrixXd> llt(K);
        Eigen::MatrixXd A = llt.solve(Yc);
        W = Xc.transpose() * A;
        if (normal_equation_residual(Xc, Yc, W, alpha) >
            kResidualTolerance * (1.0 + B.norm())) {
            const Eigen::MatrixXd R = K * A - Yc;  // K already carries the +alpha shift
            A -= llt.solve(R);
            W = Xc.transpose() * A;
        }
    }

    const double residual = normal_equation_residual(Xc, Yc, W, alpha);
    if (!(residual <= kResidualTolerance * (1.0 + B.norm())))
        throw std::runtime_error("fit_ridge: normal-equation residual bound violated");

    RidgeModel model;
    model.weights_ = W;
    model.intercept_ = (y_mean - x_mean * W).transpose();
    model.alpha_ = alpha;
    model.fitted_ = true;
    return model;
}

Eigen::MatrixXd RidgeModel::decision(const Eigen::MatrixXd& X) const {
    if (!fitted_) throw std::logic_error("RidgeModel::decision: model is not fitted");
    if (X.cols() != weights_.rows())
        throw std::invalid_argument("RidgeModel::decision: feature dimension mismatch");
    Eigen::MatrixXd scores = X * weights_;
    scores.rowwise() += intercept_.transpose();
    return scores;
}

std::vector<int> RidgeModel::predict(const Eigen::MatrixXd& X) const {
    const Eigen::MatrixXd scores = decision(X);
    std::vector<int> labels(static_cast<std::size_t>(scores.rows()));
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        int best = 0;
        double best_score = scores(i, 0);
        for (Eigen::Index j = 1; j < scores.cols(); ++j) {
            if (scores(i, j) > best_score) {  // strict: ties keep the lowest id
                best_score = scores(i, j);
                best = static_cast<int>(j);
            }
        }
        labels[static_cast<std::size_t>(i)] = best;
    }
    return labels;
}

}  // namespace coreset

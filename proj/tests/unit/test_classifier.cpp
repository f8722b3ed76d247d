#include <doctest.h>

#include <Eigen/Dense>

#include <limits>
#include <stdexcept>
#include <vector>

#include "coreset/ridge.hpp"
#include "coreset/rng.hpp"
#include "support/oracles.hpp"

using coreset::fit_ridge;
using coreset::RidgeModel;

namespace {

Eigen::MatrixXd random_matrix(int n, int d, coreset::Rng& rng) {
    Eigen::MatrixXd X(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) X(i, j) = rng.gauss();
    return X;
}

std::vector<int> random_labels(int n, int class_count, coreset::Rng& rng) {
    std::vector<int> y(static_cast<std::size_t>(n));
    // force every class to appear at least once
    for (int i = 0; i < n; ++i)
        y[static_cast<std::size_t>(i)] =
            i < class_count ? i : rng.index(class_count);
    return y;
}

// Normal-equation residual recomputed from scratch: center X and the +/-1
// target matrix, then || Xc'(Xc W) + alpha W - Xc' Yc ||_F.
double residual_norm(const Eigen::MatrixXd& X, const std::vector<int>& y,
                     int class_count, double alpha, const RidgeModel& model) {
    const Eigen::RowVectorXd x_mean = X.colwise().mean();
    const Eigen::MatrixXd Xc = X.rowwise() - x_mean;
    Eigen::MatrixXd Y =
        Eigen::MatrixXd::Constant(X.rows(), class_count, -1.0);
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        Y(i, y[static_cast<std::size_t>(i)]) = 1.0;
    const Eigen::RowVectorXd y_mean = Y.colwise().mean();
    const Eigen::MatrixXd Yc = Y.rowwise() - y_mean;
    const Eigen::MatrixXd R = Xc.transpose() * (Xc * model.weights()) +
                              alpha * model.weights() - Xc.transpose() * Yc;
    return R.norm();
}

double residual_bound(const Eigen::MatrixXd& X, const std::vector<int>& y,
                      int class_count) {
    const Eigen::RowVectorXd x_mean = X.colwise().mean();
    const Eigen::MatrixXd Xc = X.rowwise() - x_mean;
    Eigen::MatrixXd Y =
        Eigen::MatrixXd::Constant(X.rows(), class_count, -1.0);
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        Y(i, y[static_cast<std::size_t>(i)]) = 1.0;
    const Eigen::RowVectorXd y_mean = Y.colwise().mean();
    const Eigen::MatrixXd Yc = Y.rowwise() - y_mean;
    return 1e-8 * (1.0 + (Xc.transpose() * Yc).norm());
}

}  // namespace

TEST_SUITE("classifier") {

TEST_CASE("separable pair is classified perfectly") {
    Eigen::MatrixXd X(6, 1);
    X << -5, -4.5, -5.2, 5, 4.8, 5.1;
    const std::vector<int> y = {0, 0, 0, 1, 1, 1};
    const RidgeModel model = fit_ridge(X, y, 2, 1.0);
    CHECK(model.fitted());
    CHECK(model.feature_count() == 1);
    CHECK(model.class_count() == 2);
    CHECK(model.predict(X) == y);
    CHECK(model.decision(X).rows() == 6);
    CHECK(model.decision(X).cols() == 2);
}

TEST_CASE("single training sample predicts its own label") {
    Eigen::MatrixXd X(1, 3);
    X << 0.5, -1.0, 2.0;
    const RidgeModel model = fit_ridge(X, {1}, 2, 1.0);
    CHECK(model.predict(X) == std::vector<int>{1});
}

TEST_CASE("intercept equals y_mean - x_mean * W") {
    coreset::Rng rng(5);
    const Eigen::MatrixXd X = random_matrix(40, 6, rng);
    const std::vector<int> y = random_labels(40, 3, rng);
    const RidgeModel model = fit_ridge(X, y, 3, 1.0);

    const Eigen::RowVectorXd x_mean = X.colwise().mean();
    Eigen::MatrixXd Y = Eigen::MatrixXd::Constant(40, 3, -1.0);
    for (int i = 0; i < 40; ++i) Y(i, y[static_cast<std::size_t>(i)]) = 1.0;
    const Eigen::RowVectorXd y_mean = Y.colwise().mean();
    const Eigen::RowVectorXd expected = y_mean - x_mean * model.weights();
    CHECK((model.intercept().transpose() - expected).norm() <= 1e-12);
}

TEST_CASE("normal-equation residual bound holds on random fits") {
    coreset::Rng rng(77);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + rng.index(200);
        const int d = 1 + rng.index(50);  // n < d exercises the dual path
        const int class_count = 2 + rng.index(4);
        const double alpha = std::vector<double>{0.1, 1.0, 10.0}[
            static_cast<std::size_t>(rng.index(3))];
        const Eigen::MatrixXd X = random_matrix(n, d, rng);
        std::vector<int> y(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] = rng.index(class_count);
        const RidgeModel model = fit_ridge(X, y, class_count, alpha);
        REQUIRE(residual_norm(X, y, class_count, alpha, model) <=
                residual_bound(X, y, class_count));
    }
}

TEST_CASE("predictions match the argmax oracle") {
    coreset::Rng rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + rng.index(80);
        const int d = 1 + rng.index(10);
        const int class_count = 2 + rng.index(4);
        const Eigen::MatrixXd X = random_matrix(n, d, rng);
        const std::vector<int> y = random_labels(n, class_count, rng);
        const RidgeModel model = fit_ridge(X, y, class_count, 1.0);
        const Eigen::MatrixXd fresh = random_matrix(17, d, rng);
        REQUIRE(model.predict(fresh) == testoracle::argmax_oracle(model.decision(fresh)));
    }
}

TEST_CASE("exact score ties resolve to the lowest class id") {
    // duplicate +/-1 patterns for classes 0 and 1 make their columns equal
    Eigen::MatrixXd X(4, 2);
    X << 1, 0, -1, 0, 1, 0.1, -1, -0.1;
    const std::vector<int> y = {0, 1, 0, 1};
    RidgeModel model = fit_ridge(X, y, 2, 1.0);
    // decision columns for a 2-class one-vs-all fit are exact mirrors, so a
    // zero score ties; the midpoint of the training data scores exactly zero
    Eigen::MatrixXd probe(1, 2);
    probe << 0.0, 0.0;
    const Eigen::MatrixXd scores = model.decision(probe);
    if (scores(0, 0) == scores(0, 1))  // guard: only meaningful on an exact tie
        CHECK(model.predict(probe) == std::vector<int>{0});
    CHECK(model.predict(probe) == testoracle::argmax_oracle(scores));
}

TEST_CASE("stronger regularization shrinks the weights") {
    coreset::Rng rng(99);
    const Eigen::MatrixXd X = random_matrix(60, 8, rng);
    const std::vector<int> y = random_labels(60, 3, rng);
    const double small = fit_ridge(X, y, 3, 0.1).weights().norm();
    const double large = fit_ridge(X, y, 3, 10.0).weights().norm();
    CHECK(large <= small);
}

TEST_CASE("input validation") {
    Eigen::MatrixXd X(2, 2);
    X << 1, 2, 3, 4;
    const std::vector<int> y = {0, 1};

    CHECK_THROWS_AS(fit_ridge(Eigen::MatrixXd(0, 2), {}, 2, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(fit_ridge(X, {0}, 2, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(fit_ridge(X, {0, 2}, 2, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(fit_ridge(X, {0, -1}, 2, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(fit_ridge(X, y, 0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(fit_ridge(X, y, 2, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(fit_ridge(X, y, 2, -1.0), std::invalid_argument);

    Eigen::MatrixXd bad(1, 1);
    bad << std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(fit_ridge(bad, {0}, 2, 1.0), std::invalid_argument);

    const RidgeModel unfitted;
    CHECK_FALSE(unfitted.fitted());
    CHECK_THROWS_AS(unfitted.predict(X), std::logic_error);
    CHECK_THROWS_AS(unfitted.decision(X), std::logic_error);

    const RidgeModel model = fit_ridge(X, y, 2, 1.0);
    Eigen::MatrixXd wrong(1, 3);
    wrong << 1, 2, 3;
    CHECK_THROWS_AS(model.predict(wrong), std::invalid_argument);
}

}  // TEST_SUITE

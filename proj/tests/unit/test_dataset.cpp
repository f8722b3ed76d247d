#include <doctest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "coreset/dataset.hpp"
#include "coreset/rng.hpp"
#include "support/synthetic.hpp"

using coreset::Dataset;
using coreset::fit_scaler;
using coreset::FoldPlan;
using coreset::load_csv;
using coreset::make_folds;
using coreset::MissingPolicy;
using coreset::Scaler;
using coreset::split_fold;
using coreset::SplitView;
using coreset::standardize;
using coreset::take_labels;
using coreset::take_rows;

namespace {

std::string temp_csv(const std::string& name, const std::string& content) {
    const auto path =
        (std::filesystem::temp_directory_path() / ("coreset_test_" + name)).string();
    std::ofstream out(path, std::ios::binary);
    out << content;
    out.close();
    return path;
}

// per-class count of an index list
std::vector<int> class_histogram(const std::vector<int>& labels,
                                 const std::vector<int>& idx, int class_count) {
    std::vector<int> h(static_cast<std::size_t>(class_count), 0);
    for (const int i : idx) ++h[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
    return h;
}

bool sorted_unique(const std::vector<int>& v) {
    return std::adjacent_find(v.begin(), v.end(),
                              [](int a, int b) { return a >= b; }) == v.end();
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("loads a plain numeric CSV") {
    const auto path = temp_csv("plain.csv",
                               "a,b,label\n"
                               "1,10,yes\n"
                               "2,20,no\n"
                               "3,30,yes\n"
                               "4,40,no\n");
    const Dataset d = load_csv(path, "label");
    CHECK(d.rows() == 4);
    CHECK(d.cols() == 2);
    CHECK(d.class_count == 2);
    CHECK(d.feature_names == std::vector<std::string>{"a", "b"});
    CHECK(d.labels == std::vector<int>{0, 1, 0, 1});  // first appearance order
    CHECK(d.features(2, 1) == 30.0);
    CHECK(d.name == "coreset_test_plain");
}

TEST_CASE("label column can be named or a zero-based index") {
    const auto path = temp_csv("labelcol.csv",
                               "x,y,z\n"
                               "1,0,2\n"
                               "2,1,3\n"
                               "3,0,4\n"
                               "4,1,5\n");
    const Dataset by_name = load_csv(path, "y");
    const Dataset by_index = load_csv(path, "1");
    CHECK(by_name.labels == by_index.labels);
    CHECK(by_name.features == by_index.features);
    CHECK(by_name.feature_names == std::vector<std::string>{"x", "z"});
}

TEST_CASE("quoted fields, escaped quotes, and CRLF endings") {
    const auto path = temp_csv("quoted.csv",
                               "name,v,label\r\n"
                               "\"a,b\",1,0\r\n"
                               "\"say \"\"hi\"\"\",2,1\r\n"
                               "\n"
                               "plain,3,0\r\n"
                               "other,4,1\r\n");
    const Dataset d = load_csv(path, "label");
    CHECK(d.rows() == 4);
    // the name column is categorical; each distinct string gets a fresh code
    CHECK(d.features(0, 0) == 0.0);
    CHECK(d.features(1, 0) == 1.0);
    CHECK(d.features(2, 0) == 2.0);
    CHECK(d.features(1, 1) == 2.0);
    CHECK(d.labels == std::vector<int>{0, 1, 0, 1});
}

TEST_CASE("unquoted cells are trimmed") {
    const auto path = temp_csv("trim.csv",
                               "a , label \n"
                               " 1.5 , x\n"
                               " 2.5 , y\n"
                               "3.5,x\n"
                               "4.5,y\n");
    const Dataset d = load_csv(path, "label");
    CHECK(d.features(0, 0) == 1.5);
    CHECK(d.class_count == 2);
}

TEST_CASE("missing cells are imputed with the column mean") {
    const auto path = temp_csv("missing.csv",
                               "a,b,label\n"
                               "1,?,0\n"
                               "2,10,1\n"
                               ",30,0\n"
                               "5,NA,1\n");
    const Dataset d = load_csv(path, "label", MissingPolicy::MeanImpute);
    CHECK(d.rows() == 4);
    // column a: non-missing {1,2,5} -> mean 8/3; column b: {10,30} -> 20
    CHECK(d.features(2, 0) == doctest::Approx(8.0 / 3.0).epsilon(1e-15));
    CHECK(d.features(0, 1) == 20.0);
    CHECK(d.features(3, 1) == 20.0);
}

TEST_CASE("an all-missing column is imputed with zero") {
    const auto path = temp_csv("allmissing.csv",
                               "a,b,label\n"
                               "?,1,0\n"
                               "null,2,1\n"
                               "n/a,3,0\n"
                               "NaN,4,1\n");
    const Dataset d = load_csv(path, "label");
    for (int i = 0; i < 4; ++i) CHECK(d.features(i, 0) == 0.0);
}

TEST_CASE("drop-row policy removes rows with missing features") {
    const auto path = temp_csv("droprow.csv",
                               "a,label\n"
                               "1,0\n"
                               "?,0\n"
                               "2,1\n"
                               "3,1\n"
                               "4,0\n");
    const Dataset d = load_csv(path, "label", MissingPolicy::DropRow);
    CHECK(d.rows() == 4);
    CHECK(d.features(0, 0) == 1.0);
    CHECK(d.features(1, 0) == 2.0);
}

TEST_CASE("rows with a missing label are dropped under both policies") {
    const std::string content =
        "a,label\n"
        "1,0\n"
        "2,\n"
        "3,1\n"
        "4,0\n"
        "5,1\n";
    const auto path = temp_csv("missinglabel.csv", content);
    CHECK(load_csv(path, "label", MissingPolicy::MeanImpute).rows() == 4);
    CHECK(load_csv(path, "label", MissingPolicy::DropRow).rows() == 4);
}

TEST_CASE("categorical features are coded by first appearance") {
    const auto path = temp_csv("categorical.csv",
                               "color,label\n"
                               "red,0\n"
                               "green,1\n"
                               "red,0\n"
                               "blue,1\n");
    const Dataset d = load_csv(path, "label");
    CHECK(d.features(0, 0) == 0.0);
    CHECK(d.features(1, 0) == 1.0);
    CHECK(d.features(2, 0) == 0.0);
    CHECK(d.features(3, 0) == 2.0);
}

TEST_CASE("alternate delimiter") {
    const auto path = temp_csv("semicolon.csv",
                               "a;b;label\n"
                               "1;2;0\n"
                               "3;4;1\n"
                               "5;6;0\n"
                               "7;8;1\n");
    const Dataset d = load_csv(path, "label", MissingPolicy::MeanImpute, ';');
    CHECK(d.cols() == 2);
    CHECK(d.features(1, 1) == 4.0);
}

TEST_CASE("load errors") {
    CHECK_THROWS_AS(load_csv("/nonexistent/nope.csv", "label"), std::runtime_error);

    const auto unknown = temp_csv("unknown.csv", "a,b\n1,0\n2,1\n");
    CHECK_THROWS_WITH_AS(load_csv(unknown, "label"),
                         doctest::Contains("label column not found"),
                         std::runtime_error);

    const auto ragged = temp_csv("ragged.csv", "a,label\n1,0\n2\n3,1\n");
    CHECK_THROWS_WITH_AS(load_csv(ragged, "label"),
                         doctest::Contains("malformed row 3"), std::runtime_error);

    const auto single = temp_csv("single.csv", "a,label\n1,0\n2,0\n3,0\n");
    CHECK_THROWS_WITH_AS(load_csv(single, "label"),
                         doctest::Contains("single-class"), std::runtime_error);

    const auto rare = temp_csv("rare.csv", "a,label\n1,0\n2,0\n3,1\n");
    CHECK_THROWS_WITH_AS(load_csv(rare, "label"),
                         doctest::Contains("fewer than 2"), std::runtime_error);

    const auto unterminated = temp_csv("unterminated.csv", "a,label\n\"oops,0\n");
    CHECK_THROWS_WITH_AS(load_csv(unterminated, "label"),
                         doctest::Contains("unterminated"), std::runtime_error);

    const auto empty = temp_csv("empty.csv", "");
    CHECK_THROWS_AS(load_csv(empty, "label"), std::runtime_error);
}

TEST_CASE("wide table with scattered missing cells imputes every hole") {
    // 683 rows x 35 feature columns with exactly 2337 missing cells, the
    // shape of a classic disease dataset
    const int n = 683, d = 35, missing_count = 2337;
    coreset::Rng rng(123);
    Eigen::MatrixXd raw(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) raw(i, j) = rng.index(7);

    std::vector<int> cells(static_cast<std::size_t>(n * d));
    for (std::size_t i = 0; i < cells.size(); ++i) cells[i] = static_cast<int>(i);
    rng.shuffle(cells);
    std::set<int> holes(cells.begin(), cells.begin() + missing_count);

    std::string content = "label";
    for (int j = 0; j < d; ++j) content += ",f" + std::to_string(j);
    content += '\n';
    for (int i = 0; i < n; ++i) {
        content += std::to_string(i % 19);  // 19 classes, each with >= 35 rows
        for (int j = 0; j < d; ++j) {
            const bool hole = holes.count(i * d + j) > 0;
            content += ',';
            content += hole ? "?" : std::to_string(static_cast<int>(raw(i, j)));
        }
        content += '\n';
    }
    const auto path = temp_csv("soy.csv", content);
    const Dataset ds = load_csv(path, "label", MissingPolicy::MeanImpute);
    REQUIRE(ds.rows() == n);
    REQUIRE(ds.cols() == d);
    CHECK(ds.class_count == 19);

    // spot-check imputation in every column against a recomputed mean
    for (int j = 0; j < d; ++j) {
        double sum = 0.0;
        int kept = 0;
        for (int i = 0; i < n; ++i) {
            if (holes.count(i * d + j)) continue;
            sum += raw(i, j);
            ++kept;
        }
        const double mean = kept > 0 ? sum / kept : 0.0;
        for (int i = 0; i < n; ++i) {
            const double expected = holes.count(i * d + j) ? mean : raw(i, j);
            REQUIRE(ds.features(i, j) == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("standardize maps {2,4} to {-1,+1} and keeps constants finite") {
    Eigen::MatrixXd X(2, 2);
    X << 2, 7, 4, 7;
    const auto [scaler, Z] = standardize(X);
    CHECK(Z(0, 0) == -1.0);  // population std of {2,4} is exactly 1
    CHECK(Z(1, 0) == 1.0);
    CHECK(Z(0, 1) == 0.0);  // constant column: scale floor keeps it at zero
    CHECK(Z(1, 1) == 0.0);
    CHECK(scaler.scale(1) == 1.0);

    Eigen::MatrixXd probe(1, 2);
    probe << 3, 7;
    const Eigen::MatrixXd T = scaler.transform(probe);
    CHECK(T(0, 0) == 0.0);
    CHECK(T(0, 1) == 0.0);
}

TEST_CASE("fit_scaler normalizes first and second moments") {
    coreset::Rng rng(4);
    Eigen::MatrixXd X(200, 3);
    for (int i = 0; i < 200; ++i)
        for (int j = 0; j < 3; ++j) X(i, j) = 5.0 * rng.gauss() + j;
    const Scaler scaler = fit_scaler(X);
    const Eigen::MatrixXd Z = scaler.transform(X);
    for (int j = 0; j < 3; ++j) {
        CHECK(Z.col(j).mean() == doctest::Approx(0.0).epsilon(1e-12));
        const double var = Z.col(j).squaredNorm() / 200.0 -
                           Z.col(j).mean() * Z.col(j).mean();
        CHECK(var == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(scaler.transform(Eigen::MatrixXd(1, 2)), std::invalid_argument);
    CHECK_THROWS_AS(fit_scaler(Eigen::MatrixXd(0, 3)), std::invalid_argument);
}

TEST_CASE("make_folds balances every class across folds") {
    // 10 samples, 2 classes, 5 folds: every fold gets one of each class
    Dataset small = testsupport::make_blobs(10, 1);
    const FoldPlan plan = make_folds(small, 5, 9);
    REQUIRE(plan.assignments.size() == 10);
    for (int f = 0; f < 5; ++f) {
        std::vector<int> members;
        for (int i = 0; i < 10; ++i)
            if (plan.assignments[static_cast<std::size_t>(i)] == f) members.push_back(i);
        const auto h = class_histogram(small.labels, members, 2);
        CHECK(h == std::vector<int>{1, 1});
    }
}

TEST_CASE("make_folds keeps 700/300 class proportions in every fold") {
    Dataset d;
    d.name = "prop";
    d.class_count = 2;
    d.features = Eigen::MatrixXd::Zero(1000, 1);
    d.labels.assign(1000, 0);
    for (int i = 700; i < 1000; ++i) d.labels[static_cast<std::size_t>(i)] = 1;
    const FoldPlan plan = make_folds(d, 10, 3);
    for (int f = 0; f < 10; ++f) {
        std::vector<int> members;
        for (int i = 0; i < 1000; ++i)
            if (plan.assignments[static_cast<std::size_t>(i)] == f) members.push_back(i);
        const auto h = class_histogram(d.labels, members, 2);
        CHECK(h == std::vector<int>{70, 30});
    }

    CHECK(make_folds(d, 10, 3).assignments == plan.assignments);           // deterministic
    CHECK(make_folds(d, 10, 4).assignments != plan.assignments);           // seed-sensitive
    CHECK_THROWS_AS(make_folds(d, 1, 3), std::invalid_argument);
    CHECK_THROWS_AS(make_folds(d, 301, 3), std::invalid_argument);  // class 1 too small
}

TEST_CASE("split_fold carves 10/10/80 out of 100 balanced samples") {
    Dataset d = testsupport::make_blobs(100, 2);
    const FoldPlan plan = make_folds(d, 10, 7);
    const SplitView split = split_fold(plan, d.labels, 0, 1.0 / 9.0, 21);
    CHECK(split.test_idx.size() == 10);
    CHECK(split.val_idx.size() == 10);   // floor((1/9)*45) = 5 per class
    CHECK(split.train_idx.size() == 80);
    CHECK(class_histogram(d.labels, split.val_idx, 2) == std::vector<int>{5, 5});
}

TEST_CASE("split_fold partitions are sorted, disjoint, and exhaustive") {
    coreset::Rng rng(31);
    Dataset d = testsupport::make_mixture(97, 3, 5);
    const FoldPlan plan = make_folds(d, 4, 11);
    for (int fold = 0; fold < 4; ++fold) {
        const SplitView s = split_fold(plan, d.labels, fold, 0.2, 77);
        CHECK(sorted_unique(s.train_idx));
        CHECK(sorted_unique(s.val_idx));
        CHECK(sorted_unique(s.test_idx));
        std::vector<int> all;
        all.insert(all.end(), s.train_idx.begin(), s.train_idx.end());
        all.insert(all.end(), s.val_idx.begin(), s.val_idx.end());
        all.insert(all.end(), s.test_idx.begin(), s.test_idx.end());
        std::sort(all.begin(), all.end());
        REQUIRE(all.size() == 97);
        for (int i = 0; i < 97; ++i) CHECK(all[static_cast<std::size_t>(i)] == i);
        // every class stays represented in train
        const auto h = class_histogram(d.labels, s.train_idx, 3);
        for (const int count : h) CHECK(count >= 1);
        // test partition is exactly the fold
        for (const int i : s.test_idx)
            CHECK(plan.assignments[static_cast<std::size_t>(i)] == fold);
    }
}

TEST_CASE("split_fold extremes of val_fraction") {
    Dataset d = testsupport::make_blobs(40, 3);
    const FoldPlan plan = make_folds(d, 4, 1);
    const SplitView none = split_fold(plan, d.labels, 1, 0.0, 5);
    CHECK(none.val_idx.empty());
    CHECK(none.train_idx.size() == 30);

    // val_fraction 1 still leaves one training sample per class
    const SplitView most = split_fold(plan, d.labels, 1, 1.0, 5);
    CHECK(most.train_idx.size() == 2);
    CHECK(class_histogram(d.labels, most.train_idx, 2) == std::vector<int>{1, 1});

    CHECK_THROWS_AS(split_fold(plan, d.labels, 4, 0.1, 5), std::invalid_argument);
    CHECK_THROWS_AS(split_fold(plan, d.labels, -1, 0.1, 5), std::invalid_argument);
}

TEST_CASE("split_fold is deterministic in its seed") {
    Dataset d = testsupport::make_blobs(60, 9);
    const FoldPlan plan = make_folds(d, 3, 2);
    const SplitView a = split_fold(plan, d.labels, 0, 0.25, 123);
    const SplitView b = split_fold(plan, d.labels, 0, 0.25, 123);
    CHECK(a.train_idx == b.train_idx);
    CHECK(a.val_idx == b.val_idx);
    CHECK(a.test_idx == b.test_idx);
}

TEST_CASE("take_rows and take_labels preserve order") {
    Eigen::MatrixXd X(4, 2);
    X << 0, 1, 10, 11, 20, 21, 30, 31;
    const std::vector<int> labels = {5, 6, 7, 8};
    const std::vector<int> idx = {3, 0, 2};
    const Eigen::MatrixXd sub = take_rows(X, idx);
    REQUIRE(sub.rows() == 3);
    CHECK(sub(0, 0) == 30.0);
    CHECK(sub(1, 0) == 0.0);
    CHECK(sub(2, 1) == 21.0);
    CHECK(take_labels(labels, idx) == std::vector<int>{8, 5, 7});
}

}  // TEST_SUITE

#include <doctest.h>

#include <charconv>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "coreset/report.hpp"

using coreset::format_exact;
using coreset::format_g6;
using coreset::summarize;
using coreset::SummaryStat;

namespace {

double parse(const std::string& s) {
    double out = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), out);
    return out;
}

}  // namespace

TEST_SUITE("report") {

TEST_CASE("summarize 1,2,3 gives mean 2 and sem 1/sqrt(3)") {
    // sample std of {1,2,3} is 1, so sem = 1/sqrt(3) = 0.5773502691896258
    const SummaryStat s = summarize({1.0, 2.0, 3.0});
    CHECK(s.n == 3);
    CHECK(s.mean == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(s.sem == doctest::Approx(0.5773502691896258).epsilon(1e-15));
}

TEST_CASE("degenerate samples") {
    const SummaryStat single = summarize({42.5});
    CHECK(single.n == 1);
    CHECK(single.mean == 42.5);
    CHECK(single.sem == 0.0);

    const SummaryStat constant = summarize({5.0, 5.0, 5.0, 5.0});
    CHECK(constant.n == 4);
    CHECK(constant.mean == 5.0);
    CHECK(constant.sem == 0.0);

    const SummaryStat empty = summarize({});
    CHECK(empty.n == 0);
    CHECK(std::isnan(empty.mean));
    CHECK(std::isnan(empty.sem));
}

TEST_CASE("format_exact round-trips doubles bit for bit") {
    const std::vector<double> values = {0.0,
                                        -0.0,
                                        1.0,
                                        0.1,
                                        1.0 / 3.0,
                                        7.0 / 30.0,
                                        -2.5e-300,
                                        6.02214076e23,
                                        std::nextafter(1.0, 2.0)};
    for (const double v : values) {
        const double back = parse(format_exact(v));
        CHECK(back == v);
    }
}

TEST_CASE("format_g6 keeps six significant digits") {
    CHECK(format_g6(0.123456789) == "0.123457");
    CHECK(format_g6(1234567.0) == "1.23457e+06");
    CHECK(format_g6(1.0) == "1");
    CHECK(format_g6(0.2333333333) == "0.233333");
    CHECK(format_g6(-0.5) == "-0.5");
    CHECK(format_g6(0.0) == "0");
}

}  // TEST_SUITE

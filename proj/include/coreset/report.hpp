#pragma once

#include <string>
#include <vector>

namespace coreset {

// Mean and standard error of a sample; n is the number of observations.
struct SummaryStat {
    double mean = 0.0;
    double sem = 0.0;
    int n = 0;
};

// Sample mean and standard error of the mean (sample std with n-1 divisor,
// divided by sqrt(n)). A single observation has sem 0. Empty input yields
// NaN mean, NaN sem, n = 0.
SummaryStat summarize(const std::vector<double>& values);

// Shortest decimal string that round-trips to the exact double.
std::string format_exact(double value);

// General format with 6 significant digits (printf %g style).
std::string format_g6(double value);

}  // namespace coreset

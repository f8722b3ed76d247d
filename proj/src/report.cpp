#include "coreset/report.hpp"

#include <charconv>
#include <cmath>
#include <limits>

namespace coreset {

SummaryStat summarize(const std::vector<double>& values) {
    SummaryStat s;
    s.n = static_cast<int>(values.size());
    if (values.empty()) {
        s.mean = std::numeric_limits<double>::quiet_NaN();
        s.sem = std::numeric_limits<double>::quiet_NaN();
        return s;
    }
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    if (values.size() == 1) {
        s.sem = 0.0;
        return s;
    }
    double ss = 0.0;
    for (double v : values) {
        const double d = v - s.mean;
        ss += d * d;
    }
    const double var = ss / static_cast<double>(values.size() - 1);
    s.sem = std::sqrt(var / static_cast<double>(values.size()));
    return s;
}

std::string format_exact(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::string format_g6(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value,
                                   std::chars_format::general, 6);
    return std::string(buf, res.ptr);
}

}  // namespace coreset

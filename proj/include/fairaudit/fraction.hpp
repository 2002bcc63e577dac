#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace fairaudit {

// A rate backed by integer counts. Keeping numerator/denominator around lets
// disparity-zero checks stay exact (cross-multiplication) where doubles would
// only be approximately equal.
struct Rate {
    std::int64_t num = 0;
    std::int64_t den = 0;  // den == 0 marks an undefined rate (empty cell)

    bool defined() const { return den > 0; }

    double value() const {
        return defined() ? static_cast<double>(num) / static_cast<double>(den)
                         : std::numeric_limits<double>::quiet_NaN();
    }
};

// |a - b| for two defined rates, exact as a fraction.
struct RateDiff {
    std::int64_t num = 0;
    std::int64_t den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool is_zero() const { return num == 0; }

    // diff <= eps, exact when the difference is zero.
    bool within(double eps) const {
        if (num == 0) return true;
        return value() <= eps;
    }
};

inline RateDiff rate_abs_diff(const Rate& a, const Rate& b) {
    const std::int64_t cross = a.num * b.den - b.num * a.den;
    return {cross < 0 ? -cross : cross, a.den * b.den};
}

// min/max ratio of two defined rates, reported for information alongside the
// absolute difference. Both zero counts as perfectly equal.
inline double rate_ratio(const Rate& a, const Rate& b) {
    const double x = a.value();
    const double y = b.value();
    const double hi = x > y ? x : y;
    const double lo = x > y ? y : x;
    if (hi == 0.0) return 1.0;
    return lo / hi;
}

}  // namespace fairaudit

#pragma once

// Disjoint u-intervals inside (0,1) where one quantile function exceeds
// another, together with their total Lebesgue measure.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace stochord {

struct Interval {
    double lo;
    double hi;
    double length() const { return hi - lo; }
};

enum class InverseMode { LeftLeft, LeftRight, RightRight, RightLeft };

struct ViolationSet {
    std::vector<Interval> intervals;
    InverseMode mode = InverseMode::LeftLeft;

    double measure() const {
        double m = 0.0;
        for (const auto& iv : intervals) m += iv.length();
        return m;
    }

    bool empty() const { return intervals.empty(); }

    bool contains(double u) const {
        for (const auto& iv : intervals)
            if (u > iv.lo && u < iv.hi) return true;
        return false;
    }
};

// dist(x, S) = inf |x - y| over y in S, for S a union of intervals.
inline double dist_to(double x, const ViolationSet& s) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& iv : s.intervals) {
        if (x >= iv.lo && x <= iv.hi) return 0.0;
        best = std::min(best, std::min(std::fabs(x - iv.lo), std::fabs(x - iv.hi)));
    }
    return best;
}

inline double separation(const std::vector<double>& lambdas, const ViolationSet& a0) {
    double best = std::numeric_limits<double>::infinity();
    for (double l : lambdas) best = std::min(best, dist_to(l, a0));
    return best;
}

} // namespace stochord

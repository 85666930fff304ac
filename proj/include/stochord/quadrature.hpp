#pragma once

// Adaptive Simpson quadrature plus the epsilon-ladder used for improper
// integrals over open intervals, where divergence is a first-class outcome.

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace stochord {

struct QuadConfig {
    double abs_tol = 1e-8;
    double rel_tol = 1e-6;
    int max_depth = 40;
    int initial_panels = 8;
};

namespace detail {

template <class F>
double simpson_step(F&& f, double a, double fa, double b, double fb, double m, double fm,
                    double whole, double tol, double rel_tol, int depth, int max_depth) {
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth >= max_depth || std::fabs(delta) <= 15.0 * tol ||
        std::fabs(delta) <= rel_tol * std::fabs(left + right))
        return left + right + delta / 15.0;
    return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, rel_tol, depth + 1,
                        max_depth) +
           simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, rel_tol, depth + 1,
                        max_depth);
}

} // namespace detail

template <class F>
double integrate(F&& f, double a, double b, const QuadConfig& cfg = {}) {
    if (!(b > a)) return 0.0;
    double total = 0.0;
    int n = cfg.initial_panels;
    double h = (b - a) / n;
    double tol = std::max(cfg.abs_tol, 0.0) / n;
    for (int i = 0; i < n; ++i) {
        double lo = a + i * h, hi = (i == n - 1) ? b : a + (i + 1) * h;
        double m = 0.5 * (lo + hi);
        double flo = f(lo), fhi = f(hi), fm = f(m);
        double whole = (hi - lo) / 6.0 * (flo + 4.0 * fm + fhi);
        total += detail::simpson_step(f, lo, flo, hi, fhi, m, fm, whole, tol, cfg.rel_tol, 0,
                                      cfg.max_depth);
    }
    return total;
}

struct ImproperResult {
    double value = 0.0;
    bool divergent = false;
};

// Integrate f over the open interval (a,b) by truncating to
// (a+eps, b-eps) for a decade ladder of eps values. If the increments per
// decade fail to shrink geometrically the integral is reported divergent;
// otherwise the geometric tail is extrapolated onto the last value.
template <class F>
ImproperResult integrate_open(F&& f, double a, double b, bool open_left, bool open_right,
                              const QuadConfig& cfg = {}) {
    ImproperResult res;
    if (!(b > a)) return res;
    if (!open_left && !open_right) {
        res.value = integrate(f, a, b, cfg);
        return res;
    }
    const double eps0 = 1e-4;
    const int rungs = 6; // 1e-4 .. 1e-9
    std::vector<double> vals;
    double width = b - a;
    // each rung adds only the strips newly exposed by shrinking eps, so the
    // interior is integrated once rather than once per rung; the strips hug a
    // singular endpoint, so integrate them in log-distance to tame power-law
    // growth
    auto strip_left = [&](double lo, double hi) {
        return integrate([&](double s) {
                             double e = std::exp(s);
                             return f(a + e) * e;
                         },
                         std::log(lo - a), std::log(hi - a), cfg);
    };
    auto strip_right = [&](double lo, double hi) {
        return integrate([&](double s) {
                             double e = std::exp(s);
                             return f(b - e) * e;
                         },
                         std::log(b - hi), std::log(b - lo), cfg);
    };
    double acc = 0.0, prev_lo = 0.0, prev_hi = 0.0;
    bool started = false;
    for (int k = 0; k < rungs; ++k) {
        double eps = eps0 * std::pow(10.0, -k);
        double lo = open_left ? a + std::min(eps, 0.25 * width) : a;
        double hi = open_right ? b - std::min(eps, 0.25 * width) : b;
        if (!(hi > lo)) { vals.push_back(acc); continue; }
        if (!started) {
            acc = integrate(f, lo, hi, cfg);
            started = true;
        } else {
            if (open_left && lo < prev_lo) acc += strip_left(lo, prev_lo);
            if (open_right && hi > prev_hi) acc += strip_right(prev_hi, hi);
        }
        prev_lo = lo;
        prev_hi = hi;
        vals.push_back(acc);
    }
    double d_last = vals[rungs - 1] - vals[rungs - 2];
    double d_prev = vals[rungs - 2] - vals[rungs - 3];
    double scale = std::max(1.0, std::fabs(vals[rungs - 1]));
    if (std::fabs(d_last) <= 1e-7 * scale) {
        res.value = vals[rungs - 1];
    } else if (std::fabs(d_prev) > 0.0 && std::fabs(d_last) < 0.5 * std::fabs(d_prev)) {
        double r = d_last / d_prev;
        res.value = vals[rungs - 1] + d_last * r / (1.0 - r);
    } else {
        res.divergent = true;
        res.value = vals[rungs - 1];
    }
    return res;
}

} // namespace stochord

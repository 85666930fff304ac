#pragma once

// The four order diagnostics at fixed t: violation sets and their measure,
// partial L1 / W_p distances over the violation region, and precedence
// probability under independence (plus a seeded Monte Carlo estimator for
// coupled pairs).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cdf.hpp"
#include "quadrature.hpp"
#include "violation.hpp"

namespace stochord {

struct ScanConfig {
    int grid = 4096;          // uniform u-points; crossings narrower than the
                              // spacing can be missed (documented limitation)
    double eq_tol = 1e-9;     // |difference| below this counts as a tie
    double refine_tol = 1e-10; // bisection resolution for crossing points
};

namespace detail {

inline double inverse_of(const Cdf& f, double u, double t, bool left) {
    return left ? f.quantile_left(u, t) : f.quantile_right(u, t);
}

inline std::pair<bool, bool> mode_inverses(InverseMode mode) {
    switch (mode) {
        case InverseMode::LeftLeft: return {true, true};
        case InverseMode::LeftRight: return {true, false};
        case InverseMode::RightRight: return {false, false};
        case InverseMode::RightLeft: return {false, true};
    }
    return {true, true};
}

// Scan grid: uniform points plus geometric ladders toward 0 and 1, so that
// violation intervals pinned to the endpoints are resolved far below the
// uniform spacing.
inline std::vector<double> scan_grid(int n) {
    std::vector<double> us;
    us.reserve(n + 180);
    for (int i = 1; i < n; ++i) us.push_back(static_cast<double>(i) / n);
    for (double e = 0.5; e > 1e-13; e *= 0.5) {
        us.push_back(e);
        us.push_back(1.0 - e);
    }
    std::sort(us.begin(), us.end());
    us.erase(std::unique(us.begin(), us.end()), us.end());
    return us;
}

} // namespace detail

// A_{0,t} = {u in (0,1) : F_X^{<-}(u) > F_Y^{<-}(u)} (or the chosen inverse
// pair), found by sign scan and bisection refinement of each crossing.
inline ViolationSet violation_set(const Cdf& fx, const Cdf& fy, double t = 0.0,
                                  InverseMode mode = InverseMode::LeftLeft,
                                  const ScanConfig& cfg = {}) {
    auto [lx, ly] = detail::mode_inverses(mode);
    auto diff = [&](double u) {
        return detail::inverse_of(fx, u, t, lx) - detail::inverse_of(fy, u, t, ly);
    };
    auto violates = [&](double u) { return diff(u) > cfg.eq_tol; };

    std::vector<double> us = detail::scan_grid(cfg.grid);
    std::vector<char> viol(us.size());
    for (std::size_t i = 0; i < us.size(); ++i) viol[i] = violates(us[i]) ? 1 : 0;

    auto refine = [&](double a, double b) {
        // boundary between a violating and a non-violating point
        for (int i = 0; i < 200 && b - a > cfg.refine_tol; ++i) {
            double m = 0.5 * (a + b);
            if (violates(m) == violates(a)) a = m;
            else b = m;
        }
        return 0.5 * (a + b);
    };

    ViolationSet out;
    out.mode = mode;
    std::size_t i = 0;
    while (i < us.size()) {
        if (!viol[i]) { ++i; continue; }
        std::size_t j = i;
        while (j + 1 < us.size() && viol[j + 1]) ++j;
        double lo = (i == 0) ? 0.0 : refine(us[i - 1], us[i]);
        double hi = (j + 1 == us.size()) ? 1.0 : refine(us[j], us[j + 1]);
        if (hi > lo) out.intervals.push_back({lo, hi});
        i = j + 1;
    }
    return out;
}

// x-space violation region S = {x : F_X(x) < F_Y(x)} and its probability
// mass under both laws; the continuity precondition is essential.
struct ViolationMass {
    double mass_x = 0.0;
    double mass_y = 0.0;
    std::vector<Interval> x_intervals;
};

inline ViolationMass violation_mass(const Cdf& fx, const Cdf& fy, double t = 0.0,
                                    const ScanConfig& cfg = {}) {
    if (fx.has_jumps(t) || fy.has_jumps(t))
        throw std::invalid_argument("violation_mass requires continuous cdfs");
    auto [alo, ahi] = fx.bracket(t);
    auto [blo, bhi] = fy.bracket(t);
    double lo = std::min(alo, blo), hi = std::max(ahi, bhi);
    auto violates = [&](double x) { return fy.eval(x, t) - fx.eval(x, t) > cfg.eq_tol; };

    std::vector<double> xs;
    xs.reserve(cfg.grid + 32);
    for (int i = 0; i <= cfg.grid; ++i) xs.push_back(lo + (hi - lo) * i / cfg.grid);
    for (double k : fx.knots(t)) if (std::isfinite(k)) xs.push_back(k);
    for (double k : fy.knots(t)) if (std::isfinite(k)) xs.push_back(k);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    auto refine = [&](double a, double b) {
        for (int i = 0; i < 200 && b - a > cfg.refine_tol * (1.0 + std::fabs(a)); ++i) {
            double m = 0.5 * (a + b);
            if (violates(m) == violates(a)) a = m;
            else b = m;
        }
        return 0.5 * (a + b);
    };

    ViolationMass out;
    std::size_t i = 0;
    while (i < xs.size()) {
        if (!violates(xs[i])) { ++i; continue; }
        std::size_t j = i;
        while (j + 1 < xs.size() && violates(xs[j + 1])) ++j;
        double a = (i == 0) ? xs.front() : refine(xs[i - 1], xs[i]);
        double b = (j + 1 == xs.size()) ? xs.back() : refine(xs[j], xs[j + 1]);
        out.x_intervals.push_back({a, b});
        out.mass_x += fx.eval(b, t) - fx.eval(a, t);
        out.mass_y += fy.eval(b, t) - fy.eval(a, t);
        i = j + 1;
    }
    return out;
}

struct PartialDistances {
    double l1_partial = 0.0;
    bool l1_divergent = false;
    double wp_partial = 0.0;
    bool wp_divergent = false;
    double p = 2.0;
    double measure = 0.0;
};

// Integrals of |dq| and |dq|^p over the violation set, in u-space. Interval
// ends touching 0 or 1 are treated as improper with the epsilon-ladder
// divergence test.
inline PartialDistances partial_distances(const Cdf& fx, const Cdf& fy, double t = 0.0,
                                          double p = 2.0, const ScanConfig& cfg = {}) {
    if (!(p >= 1.0)) throw std::domain_error("partial_distances: p must be >= 1");
    ViolationSet a0 = violation_set(fx, fy, t, InverseMode::LeftLeft, cfg);
    PartialDistances out;
    out.p = p;
    out.measure = a0.measure();
    auto gap = [&](double u) {
        return std::fabs(fx.quantile_left(u, t) - fy.quantile_left(u, t));
    };
    QuadConfig qc;
    for (const auto& iv : a0.intervals) {
        bool open_lo = iv.lo < 1e-9;
        bool open_hi = iv.hi > 1.0 - 1e-9;
        ImproperResult r1 = integrate_open(gap, iv.lo, iv.hi, open_lo, open_hi, qc);
        ImproperResult rp = integrate_open([&](double u) { return std::pow(gap(u), p); }, iv.lo,
                                           iv.hi, open_lo, open_hi, qc);
        out.l1_partial += r1.value;
        out.l1_divergent = out.l1_divergent || r1.divergent;
        out.wp_partial += rp.value;
        out.wp_divergent = out.wp_divergent || rp.divergent;
    }
    return out;
}

// x-space form of the partial L1 distance, int_{P0} |F_X - F_Y| dx on the
// truncated domain; cross-check counterpart of the u-space value.
inline ImproperResult partial_l1_xspace(const Cdf& fx, const Cdf& fy, double t = 0.0) {
    auto [alo, ahi] = fx.bracket(t);
    auto [blo, bhi] = fy.bracket(t);
    double lo = std::min(alo, blo), hi = std::max(ahi, bhi);
    auto f = [&](double x) {
        double d = fy.eval(x, t) - fx.eval(x, t);
        return d > 0.0 ? d : 0.0;
    };
    // ladder over domain truncations [q(eps), q(1-eps)] of the wider law
    std::vector<double> vals;
    for (double eps = 1e-4; eps > 1e-10; eps *= 0.1) {
        double a = std::max(lo, std::min(fx.quantile_left(eps, t), fy.quantile_left(eps, t)));
        double b = std::min(hi, std::max(fx.quantile_left(1.0 - eps, t),
                                         fy.quantile_left(1.0 - eps, t)));
        vals.push_back(b > a ? integrate(f, a, b) : 0.0);
    }
    ImproperResult res;
    std::size_t m = vals.size();
    double d_last = vals[m - 1] - vals[m - 2];
    double d_prev = vals[m - 2] - vals[m - 3];
    double scale = std::max(1.0, std::fabs(vals[m - 1]));
    if (std::fabs(d_last) <= 1e-7 * scale) {
        res.value = vals[m - 1];
    } else if (std::fabs(d_prev) > 0.0 && std::fabs(d_last) < 0.5 * std::fabs(d_prev)) {
        double r = d_last / d_prev;
        res.value = vals[m - 1] + d_last * r / (1.0 - r);
    } else {
        res.divergent = true;
        res.value = vals[m - 1];
    }
    return res;
}

// P{X <= Y} for independent X, Y, as the u-space Stieltjes integral
// int_0^1 F_X(F_Y^{<-}(v)) dv; jumps of F_Y contribute automatically
// through the flat stretches of its quantile.
inline double precedence_prob(const Cdf& fx, const Cdf& fy, double t = 0.0) {
    QuadConfig qc;
    qc.initial_panels = 64; // quantile kinks make the integrand piecewise smooth
    auto f = [&](double u) {
        u = std::min(std::max(u, 1e-12), 1.0 - 1e-12); // quadrature endpoints
        return fx.eval(fy.quantile_left(u, t), t);
    };
    double v = integrate(f, 0.0, 1.0, qc);
    return std::min(std::max(v, 0.0), 1.0);
}

struct CoupledEstimate {
    double estimate = 0.0;
    double ci95 = 0.0;
};

using JointSampler = std::function<std::pair<double, double>(std::mt19937_64&)>;

// Monte Carlo P{X <= Y} for arbitrarily coupled pairs; deterministic per
// seed.
inline CoupledEstimate precedence_prob_coupled(const JointSampler& sampler, std::size_t n,
                                               std::uint64_t seed) {
    if (n < 1000) throw std::domain_error("precedence_prob_coupled: need n >= 1000");
    std::mt19937_64 rng(seed);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) {
        auto [x, y] = sampler(rng);
        if (x <= y) ++hits;
    }
    CoupledEstimate out;
    out.estimate = static_cast<double>(hits) / n;
    out.ci95 = 1.96 * std::sqrt(out.estimate * (1.0 - out.estimate) / n);
    return out;
}

// Independent-pair Monte Carlo through Cdf::sample, which lets
// implementations use their fast bulk-sampling paths (e.g. the tabulated
// distortion inverse).
inline CoupledEstimate precedence_prob_mc(const Cdf& fx, const Cdf& fy, std::size_t n,
                                          std::uint64_t seed, double t = 0.0) {
    std::vector<double> xs = fx.sample(seed, n, t);
    std::vector<double> ys = fy.sample(seed ^ 0x9e3779b97f4a7c15ull, n, t);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (xs[i] <= ys[i]) ++hits;
    CoupledEstimate out;
    out.estimate = static_cast<double>(hits) / n;
    out.ci95 = 1.96 * std::sqrt(out.estimate * (1.0 - out.estimate) / n);
    return out;
}

// Convenience: independent coupling of two cdfs as a JointSampler.
inline JointSampler independent_sampler(const Cdf& fx, const Cdf& fy, double t = 0.0) {
    return [fx, fy, t](std::mt19937_64& rng) {
        double ux = detail::uniform01(rng);
        double uy = detail::uniform01(rng);
        return std::make_pair(fx.quantile_left(ux, t), fy.quantile_left(uy, t));
    };
}

} // namespace stochord

#pragma once

// Shared machinery for the randomized property suites: seeded generators of
// distribution pairs from several families, and one runner per identity or
// inequality. Each runner reports how many instances it checked, how many
// failed, and a description of the first failure.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "stochord/asym.hpp"
#include "stochord/cdf.hpp"
#include "stochord/order.hpp"

namespace support {

using namespace stochord;

inline double urand(std::mt19937_64& rng, double a, double b) {
    return a + (b - a) * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline ScanConfig scan(int grid) {
    ScanConfig c;
    c.grid = grid;
    return c;
}

// Closed-form quantiles and finite second moments; cheap enough for the
// integral-heavy properties.
inline Cdf random_builtin_continuous(std::mt19937_64& rng) {
    switch (rng() % 3) {
        case 0: return Cdf::normal(urand(rng, -2.0, 2.0), urand(rng, 0.4, 2.0));
        case 1: {
            double a = urand(rng, -3.0, 1.0);
            return Cdf::uniform(a, a + urand(rng, 0.5, 4.0));
        }
        default: return Cdf::exponential(urand(rng, 0.3, 2.0));
    }
}

inline Cdf random_logistic(std::mt19937_64& rng) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "1/(1+exp(-(x-(%.17g))/%.17g))", urand(rng, -2.0, 2.0),
                  urand(rng, 0.3, 1.5));
    return Cdf::piecewise({{Expr(), Expr(), parse_expr(buf)}});
}

// Adds families whose quantiles go through the generic bisection inverse.
inline Cdf random_continuous(std::mt19937_64& rng) {
    switch (rng() % 5) {
        case 0: return random_logistic(rng);
        case 1:
            return Cdf::mixture({0.5, 0.5}, {Cdf::normal(urand(rng, -2.0, 0.0), urand(rng, 0.4, 1.5)),
                                             Cdf::normal(urand(rng, 0.0, 2.0), urand(rng, 0.4, 1.5))});
        default: return random_builtin_continuous(rng);
    }
}

// Adds step distributions: empirical samples (rounded to create ties) and
// point masses.
inline Cdf random_any(std::mt19937_64& rng) {
    switch (rng() % 7) {
        case 0: {
            std::size_t n = 3 + rng() % 8;
            std::vector<double> s(n);
            for (auto& v : s) v = std::round(urand(rng, -20.0, 20.0)) / 10.0;
            return Cdf::empirical(std::move(s));
        }
        case 1: return Cdf::degenerate(urand(rng, -2.0, 2.0));
        default: return random_continuous(rng);
    }
}

struct PropResult {
    int checked = 0;
    int failed = 0;
    std::string detail;

    bool ok() const { return checked > 0 && failed == 0; }
    void tally(bool pass, const std::string& msg) {
        ++checked;
        if (!pass) {
            ++failed;
            if (detail.empty()) detail = msg;
        }
    }
};

inline std::string msg(const char* what, int i, double lhs, double rhs) {
    std::ostringstream ss;
    ss << what << " instance " << i << ": " << lhs << " vs " << rhs;
    return ss.str();
}

// All four inverse-mode combinations give the same violation measure.
inline PropResult prop_fourway(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    ScanConfig cfg = scan(512);
    PropResult res;
    const InverseMode modes[4] = {InverseMode::LeftLeft, InverseMode::LeftRight,
                                  InverseMode::RightRight, InverseMode::RightLeft};
    for (int i = 0; i < n; ++i) {
        Cdf fx = random_any(rng), fy = random_any(rng);
        double m[4];
        for (int k = 0; k < 4; ++k) m[k] = violation_set(fx, fy, 0.0, modes[k], cfg).measure();
        double lo = m[0], hi = m[0];
        for (int k = 1; k < 4; ++k) {
            lo = std::min(lo, m[k]);
            hi = std::max(hi, m[k]);
        }
        res.tally(hi - lo <= 1e-7, msg("four-way measure", i, lo, hi));
    }
    return res;
}

// For continuous pairs, the x-region where F_X < F_Y has the same mass
// under both laws, and that mass equals the u-space violation measure.
inline PropResult prop_mass_equality(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    ScanConfig cfg = scan(1024);
    PropResult res;
    for (int i = 0; i < n; ++i) {
        Cdf fx = random_continuous(rng), fy = random_continuous(rng);
        ViolationMass vm = violation_mass(fx, fy, 0.0, cfg);
        double mu = violation_set(fx, fy, 0.0, InverseMode::LeftLeft, cfg).measure();
        bool pass = std::fabs(vm.mass_x - mu) <= 1e-6 && std::fabs(vm.mass_y - mu) <= 1e-6 &&
                    std::fabs(vm.mass_x - vm.mass_y) <= 1e-6;
        res.tally(pass, msg("mass equality", i, vm.mass_x, mu));
    }
    return res;
}

// Precedence probability under independence is at least 1/2 minus the
// violation measure.
inline PropResult prop_asp_bound(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    ScanConfig cfg = scan(2048);
    PropResult res;
    for (int i = 0; i < n; ++i) {
        Cdf fx = random_any(rng), fy = random_any(rng);
        double p = precedence_prob(fx, fy);
        double mu = violation_set(fx, fy, 0.0, InverseMode::LeftLeft, cfg).measure();
        res.tally(p >= 0.5 - mu - 1e-6, msg("precedence lower bound", i, p, 0.5 - mu));
    }
    return res;
}

// l1 over the violation set is bounded by sqrt(w2 * measure).
inline PropResult prop_holder(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    ScanConfig cfg = scan(1024);
    PropResult res;
    for (int i = 0; i < n; ++i) {
        Cdf fx = random_continuous(rng), fy = random_continuous(rng);
        PartialDistances d = partial_distances(fx, fy, 0.0, 2.0, cfg);
        if (d.l1_divergent || d.wp_divergent) {
            res.tally(false, msg("unexpected divergence", i, d.l1_partial, d.wp_partial));
            continue;
        }
        double bound = std::sqrt(std::max(d.wp_partial, 0.0) * d.measure);
        res.tally(d.l1_partial <= bound + 1e-7, msg("Cauchy-Schwarz bound", i, d.l1_partial, bound));
    }
    return res;
}

// u-space integral of the quantile gap over the violation set equals the
// x-space integral of (F_Y - F_X)^+.
inline PropResult prop_w1_l1(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    ScanConfig cfg = scan(1024);
    PropResult res;
    for (int i = 0; i < n; ++i) {
        Cdf fx = random_continuous(rng), fy = random_continuous(rng);
        PartialDistances d = partial_distances(fx, fy, 0.0, 2.0, cfg);
        ImproperResult x = partial_l1_xspace(fx, fy);
        if (d.l1_divergent || x.divergent) {
            res.tally(false, msg("unexpected divergence", i, d.l1_partial, x.value));
            continue;
        }
        res.tally(std::fabs(d.l1_partial - x.value) <= 1e-5,
                  msg("u-space vs x-space L1", i, d.l1_partial, x.value));
    }
    return res;
}

// Triangle-type inequalities with constants 1, 2 and 3 for the measure,
// partial L1 and partial W2 diagnostics.
inline PropResult prop_transitivity(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    PropResult res;
    for (int i = 0; i < n; ++i) {
        Cdf fx = random_builtin_continuous(rng);
        Cdf fy = random_builtin_continuous(rng);
        Cdf fz = random_builtin_continuous(rng);
        TransitivityReport r = check_transitivity(fx, fy, fz);
        bool pass = r.measure_ok && r.l1_ok && r.w2_ok;
        res.tally(pass, msg("transitivity", i, r.measure_xz, r.measure_xy + r.measure_yz));
    }
    return res;
}

// Negating both laws swaps the roles: the diagnostics of (-Y, -X) equal
// those of (X, Y).
inline PropResult prop_negation(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    ScanConfig cfg = scan(1024);
    PropResult res;
    for (int i = 0; i < n; ++i) {
        Cdf fx = random_continuous(rng), fy = random_continuous(rng);
        PartialDistances d1 = partial_distances(fx, fy, 0.0, 2.0, cfg);
        PartialDistances d2 = partial_distances(Cdf::negate(fy), Cdf::negate(fx), 0.0, 2.0, cfg);
        bool pass = std::fabs(d1.measure - d2.measure) <= 1e-7 &&
                    std::fabs(d1.l1_partial - d2.l1_partial) <= 1e-6 &&
                    std::fabs(d1.wp_partial - d2.wp_partial) <= 1e-6;
        res.tally(pass, msg("negation reversal", i, d1.measure, d2.measure));
    }
    return res;
}

struct MonotoneMap {
    std::function<double(double)> psi, psi_inv;
    double lipschitz;
};

inline std::vector<MonotoneMap> monotone_maps() {
    auto clamp = [](double x) { return std::min(std::max(x, -1.0 + 1e-12), 1.0 - 1e-12); };
    return {
        {[](double x) { return 2.0 * x + 1.0; }, [](double x) { return (x - 1.0) / 2.0; }, 2.0},
        {[](double x) { return 0.5 * x - 3.0; }, [](double x) { return (x + 3.0) * 2.0; }, 0.5},
        {[](double x) { return std::tanh(x); }, [clamp](double x) { return std::atanh(clamp(x)); },
         1.0},
    };
}

// Applying the same nondecreasing K-Lipschitz map to both laws preserves
// the violation measure and scales W2 by at most K^2.
inline PropResult prop_transform_closure(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    ScanConfig cfg = scan(1024);
    PropResult res;
    auto maps = monotone_maps();
    for (int i = 0; i < n; ++i) {
        Cdf fx = random_builtin_continuous(rng), fy = random_builtin_continuous(rng);
        const MonotoneMap& m = maps[i % maps.size()];
        Cdf gx = Cdf::transformed(fx, m.psi, m.psi_inv);
        Cdf gy = Cdf::transformed(fy, m.psi, m.psi_inv);
        PartialDistances d = partial_distances(fx, fy, 0.0, 2.0, cfg);
        PartialDistances dm = partial_distances(gx, gy, 0.0, 2.0, cfg);
        bool pass = dm.measure <= d.measure + 1e-7 &&
                    dm.wp_partial <= m.lipschitz * m.lipschitz * d.wp_partial + 1e-6;
        res.tally(pass, msg("transform closure", i, dm.wp_partial,
                            m.lipschitz * m.lipschitz * d.wp_partial));
    }
    return res;
}

// Expectation through the quantile integral against closed-form means.
inline PropResult prop_expectation(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    PropResult res;
    for (int i = 0; i < n; ++i) {
        Cdf f;
        double mean = 0.0;
        switch (i % 3) {
            case 0: {
                double a = urand(rng, -4.0, 2.0), b = a + urand(rng, 0.5, 5.0);
                f = Cdf::uniform(a, b);
                mean = 0.5 * (a + b);
                break;
            }
            case 1: {
                double rate = urand(rng, 0.3, 2.0);
                f = Cdf::exponential(rate);
                mean = 1.0 / rate;
                break;
            }
            default: {
                double c = urand(rng, -5.0, 5.0);
                f = Cdf::degenerate(c);
                mean = c;
                break;
            }
        }
        ImproperResult r = expectation(f);
        bool pass = !r.divergent && std::fabs(r.value - mean) <= 1e-6;
        res.tally(pass, msg("expectation", i, r.value, mean));
    }
    return res;
}

} // namespace support

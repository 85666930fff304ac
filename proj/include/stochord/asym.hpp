#pragma once

// t-indexed families of cdf pairs, diagnostic sweeps over t-grids, and the
// finite-resolution verdict rules for the four asymptotic orders. Also the
// transitivity checker and the shrinking-Gaussian convergence family.

#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cdf.hpp"
#include "order.hpp"

namespace stochord {

struct ProcessFamily {
    std::function<std::pair<Cdf, Cdf>(double)> at;
    std::vector<double> default_grid;
    bool integer_index = false; // grid values are sample sizes / record indices
    bool validate = true;      // counterexample families may opt out
};

inline std::vector<double> geometric_grid(double t0, double factor, int count) {
    if (count < 1 || !(factor > 1.0))
        throw std::domain_error("geometric_grid: need count >= 1 and factor > 1");
    std::vector<double> g;
    g.reserve(count);
    double t = t0;
    for (int i = 0; i < count; ++i) { g.push_back(t); t *= factor; }
    return g;
}

// Geometric grid shifted to start at 0: 0, 1, 3, 7, ... (factor 2). Used by
// families indexed from t = 0.
inline std::vector<double> shifted_geometric_grid(int count, double factor = 2.0) {
    std::vector<double> g;
    g.reserve(count);
    double t = 1.0;
    for (int i = 0; i < count; ++i) { g.push_back(t - 1.0); t *= factor; }
    return g;
}

struct OrderReport {
    double t = 0.0;
    double measure = 0.0;
    double l1_partial = 0.0;
    bool l1_divergent = false;
    double wp_partial = 0.0;
    bool wp_divergent = false;
    double p = 2.0;
    double precedence = 0.0;
};

inline std::vector<OrderReport> sweep(const ProcessFamily& fam, const std::vector<double>& grid,
                                      double p = 2.0) {
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw std::domain_error("sweep: grid must be strictly increasing");
    if (grid.empty()) throw std::domain_error("sweep: empty grid");
    std::vector<OrderReport> out;
    out.reserve(grid.size());
    for (double t : grid) {
        auto [fx, fy] = fam.at(t);
        if (fam.validate) { fx.validate(t); fy.validate(t); }
        PartialDistances d = partial_distances(fx, fy, t, p);
        OrderReport r;
        r.t = t;
        r.measure = d.measure;
        r.l1_partial = d.l1_partial;
        r.l1_divergent = d.l1_divergent;
        r.wp_partial = d.wp_partial;
        r.wp_divergent = d.wp_divergent;
        r.p = p;
        r.precedence = precedence_prob(fx, fy, t);
        out.push_back(r);
    }
    return out;
}

enum class OrderKind { Ast, Asp, L1, Wp };
enum class Verdict { Holds, Fails, Inconclusive };

inline const char* to_string(OrderKind o) {
    switch (o) {
        case OrderKind::Ast: return "ast";
        case OrderKind::Asp: return "asp";
        case OrderKind::L1: return "l1";
        case OrderKind::Wp: return "wp";
    }
    return "?";
}

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Holds: return "holds";
        case Verdict::Fails: return "fails";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

struct Rule {
    double theta_hold = 1e-3;
    double theta_fail = 1e-2;
    int window = 5;
};

struct OrderVerdict {
    OrderKind order = OrderKind::Ast;
    Verdict verdict = Verdict::Inconclusive;
    Rule rule;
    std::vector<double> series;
    bool divergent = false;
};

// Finite-resolution stand-in for the limit conditions: a series that has
// settled below theta_hold (for asp: precedence within theta_hold of 1/2
// or better) holds; a clearly non-vanishing series fails; anything in
// between is honestly inconclusive.
inline OrderVerdict judge(OrderKind order, std::vector<double> series, const Rule& rule = {},
                          bool divergent = false) {
    if (series.empty()) throw std::domain_error("judge: empty series");
    OrderVerdict v;
    v.order = order;
    v.rule = rule;
    v.series = std::move(series);
    v.divergent = divergent;
    double final_val = v.series.back();

    if (order == OrderKind::Asp) {
        if (final_val >= 0.5 - rule.theta_hold) v.verdict = Verdict::Holds;
        else if (final_val < 0.5 - rule.theta_fail) v.verdict = Verdict::Fails;
        else v.verdict = Verdict::Inconclusive;
        return v;
    }

    if (divergent && (order == OrderKind::L1 || order == OrderKind::Wp)) {
        v.verdict = Verdict::Fails;
        return v;
    }

    std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(rule.window), v.series.size());
    bool nonincreasing = true;
    for (std::size_t i = v.series.size() - w; i + 1 < v.series.size(); ++i)
        if (v.series[i + 1] > v.series[i] + 1e-9 * (1.0 + std::fabs(v.series[i])))
            nonincreasing = false;
    bool trending_down = final_val < 0.9 * v.series[v.series.size() - w];

    if (nonincreasing && final_val < rule.theta_hold) v.verdict = Verdict::Holds;
    else if (final_val > rule.theta_fail && !trending_down) v.verdict = Verdict::Fails;
    else v.verdict = Verdict::Inconclusive;
    return v;
}

inline std::vector<double> series_for(const std::vector<OrderReport>& reports, OrderKind order) {
    std::vector<double> s;
    s.reserve(reports.size());
    for (const auto& r : reports) {
        switch (order) {
            case OrderKind::Ast: s.push_back(r.measure); break;
            case OrderKind::Asp: s.push_back(r.precedence); break;
            case OrderKind::L1: s.push_back(r.l1_partial); break;
            case OrderKind::Wp: s.push_back(r.wp_partial); break;
        }
    }
    return s;
}

inline bool any_divergent(const std::vector<OrderReport>& reports, OrderKind order) {
    for (const auto& r : reports) {
        if (order == OrderKind::L1 && r.l1_divergent) return true;
        if (order == OrderKind::Wp && r.wp_divergent) return true;
    }
    return false;
}

inline OrderVerdict judge_reports(const std::vector<OrderReport>& reports, OrderKind order,
                                  const Rule& rule = {}) {
    return judge(order, series_for(reports, order), rule, any_divergent(reports, order));
}

// --------------------------------------------------------------------------
// transitivity checks, with the constants from the respective proofs

struct TransitivityReport {
    double measure_xy = 0.0, measure_yz = 0.0, measure_xz = 0.0;
    double l1_xy = 0.0, l1_yz = 0.0, l1_xz = 0.0;
    double w2_xy = 0.0, w2_yz = 0.0, w2_xz = 0.0;
    bool measure_ok = false, l1_ok = false, w2_ok = false;
};

inline TransitivityReport check_transitivity(const Cdf& fx, const Cdf& fy, const Cdf& fz,
                                             double t = 0.0) {
    TransitivityReport r;
    PartialDistances xy = partial_distances(fx, fy, t, 2.0);
    PartialDistances yz = partial_distances(fy, fz, t, 2.0);
    PartialDistances xz = partial_distances(fx, fz, t, 2.0);
    r.measure_xy = xy.measure; r.measure_yz = yz.measure; r.measure_xz = xz.measure;
    r.l1_xy = xy.l1_partial; r.l1_yz = yz.l1_partial; r.l1_xz = xz.l1_partial;
    r.w2_xy = xy.wp_partial; r.w2_yz = yz.wp_partial; r.w2_xz = xz.wp_partial;
    r.measure_ok = r.measure_xz <= r.measure_xy + r.measure_yz + 1e-7;
    r.l1_ok = r.l1_xz <= 2.0 * (r.l1_xy + r.l1_yz) + 1e-6;
    r.w2_ok = r.w2_xz <= 3.0 * (r.w2_xy + r.w2_yz) + 1e-6;
    return r;
}

// Gaussian pair shrinking onto a_target < b_target: the textbook case where
// both the measure verdict and the precedence limit are forced.
inline ProcessFamily convergence_pair(double a_target, double b_target, double shrink_rate) {
    if (!(a_target < b_target))
        throw std::domain_error("convergence_pair: need a_target < b_target");
    ProcessFamily fam;
    fam.at = [a_target, b_target, shrink_rate](double t) {
        double sigma = 1.0 / (1.0 + t * shrink_rate);
        return std::make_pair(Cdf::normal(a_target, sigma), Cdf::normal(b_target, sigma));
    };
    fam.default_grid = geometric_grid(1.0, 2.0, 11); // 1..1024
    return fam;
}

// --------------------------------------------------------------------------
// serialization

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

inline std::string reports_to_csv(const std::vector<OrderReport>& reports) {
    std::string out = "t,measure,l1_partial,wp_partial,p,precedence,flags\n";
    for (const auto& r : reports) {
        std::string flags;
        if (r.l1_divergent) flags += "l1_divergent";
        if (r.wp_divergent) flags += flags.empty() ? "wp_divergent" : ";wp_divergent";
        out += format_double(r.t) + "," + format_double(r.measure) + "," +
               format_double(r.l1_partial) + "," + format_double(r.wp_partial) + "," +
               format_double(r.p) + "," + format_double(r.precedence) + "," + flags + "\n";
    }
    return out;
}

inline nlohmann::json report_to_json(const OrderReport& r) {
    nlohmann::json flags = nlohmann::json::array();
    if (r.l1_divergent) flags.push_back("l1_divergent");
    if (r.wp_divergent) flags.push_back("wp_divergent");
    return {{"t", r.t},           {"measure", r.measure},       {"l1_partial", r.l1_partial},
            {"wp_partial", r.wp_partial}, {"p", r.p},           {"precedence", r.precedence},
            {"flags", flags}};
}

inline nlohmann::json verdict_to_json(const OrderVerdict& v) {
    return {{"order", to_string(v.order)},
            {"verdict", to_string(v.verdict)},
            {"rule",
             {{"theta_hold", v.rule.theta_hold},
              {"theta_fail", v.rule.theta_fail},
              {"window", v.rule.window}}},
            {"series", v.series},
            {"divergent", v.divergent}};
}

} // namespace stochord

#pragma once

// Distortion functions: fractional order statistics, mixtures of order
// statistics, k-th record values, and custom expressions on [0,1]. A
// distortion composes with a baseline cdf to give the cdf of the derived
// statistic; the sufficient-condition checks below bound how the violation
// set of a baseline pair behaves under a whole family of distortions.

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "expr.hpp"
#include "specfun.hpp"
#include "violation.hpp"

namespace stochord {

// Plateau description of the pointwise limit of a distortion family.
// Values at the thresholds themselves are deliberately left undefined.
struct LimitProfile {
    std::vector<double> thresholds;
    std::vector<double> plateaus; // size thresholds.size() + 1

    // Limit value at u, or nullopt-style NaN if u hits a threshold.
    double at(double u) const {
        for (std::size_t i = 0; i < thresholds.size(); ++i) {
            if (u == thresholds[i]) return std::numeric_limits<double>::quiet_NaN();
            if (u < thresholds[i]) return plateaus[i];
        }
        return plateaus.back();
    }
};

class Distortion {
  public:
    struct OrderStat { double r; double alpha; };
    struct Mixture { std::vector<double> w; std::vector<double> r; double alpha; };
    struct Record { int n; int k; };
    struct Custom { Expr expr; };

    static Distortion order_stat(double r, double alpha) {
        if (!(alpha > 0.0) || !(r > 0.0) || !(r < alpha + 1.0))
            throw std::domain_error("order_stat distortion: need 0 < r < alpha+1");
        return Distortion(OrderStat{r, alpha});
    }

    static Distortion mixture(std::vector<double> w, std::vector<double> r, double alpha) {
        if (w.empty() || w.size() != r.size())
            throw std::domain_error("mixture distortion: weight/rank size mismatch");
        double sum = 0.0;
        for (double wi : w) {
            if (!(wi > 0.0)) throw std::domain_error("mixture distortion: nonpositive weight");
            sum += wi;
        }
        if (std::fabs(sum - 1.0) > 1e-12)
            throw std::domain_error("mixture distortion: weights must sum to 1");
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (!(r[i] > 0.0) || !(r[i] < alpha + 1.0))
                throw std::domain_error("mixture distortion: rank outside (0, alpha+1)");
            if (i > 0 && !(r[i] > r[i - 1]))
                throw std::domain_error("mixture distortion: ranks must be strictly increasing");
        }
        return Distortion(Mixture{std::move(w), std::move(r), alpha});
    }

    static Distortion record(int n, int k) {
        if (n < 1 || k < 1) throw std::domain_error("record distortion: need n, k >= 1");
        return Distortion(Record{n, k});
    }

    static Distortion custom(Expr e) {
        Distortion d{Custom{std::move(e)}};
        d.check_shape();
        return d;
    }

    static Distortion identity() { return order_stat(1.0, 1.0); }

    double eval(double u) const {
        if (u <= 0.0) return 0.0;
        if (u >= 1.0) return 1.0;
        return std::visit(
            [&](const auto& k) -> double {
                using T = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<T, OrderStat>) {
                    return reg_inc_beta(u, k.r, k.alpha - k.r + 1.0);
                } else if constexpr (std::is_same_v<T, Mixture>) {
                    double s = 0.0;
                    for (std::size_t i = 0; i < k.w.size(); ++i)
                        s += k.w[i] * reg_inc_beta(u, k.r[i], k.alpha - k.r[i] + 1.0);
                    return s;
                } else if constexpr (std::is_same_v<T, Record>) {
                    return reg_inc_gamma_lower(k.n, -k.k * std::log1p(-u));
                } else {
                    double v = k.expr.eval(u, 0.0);
                    return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
                }
            },
            kind_);
    }

    double derivative(double u) const {
        u = std::min(std::max(u, 1e-12), 1.0 - 1e-12);
        return std::visit(
            [&](const auto& k) -> double {
                using T = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<T, OrderStat>) {
                    return beta_density(u, k.r, k.alpha);
                } else if constexpr (std::is_same_v<T, Mixture>) {
                    double s = 0.0;
                    for (std::size_t i = 0; i < k.w.size(); ++i)
                        s += k.w[i] * beta_density(u, k.r[i], k.alpha);
                    return s;
                } else if constexpr (std::is_same_v<T, Record>) {
                    // k (1-u)^{k-1} (-k ln(1-u))^{n-1} / (n-1)!
                    double y = -k.k * std::log1p(-u);
                    double lg = std::log(static_cast<double>(k.k)) +
                                (k.k - 1) * std::log1p(-u) +
                                (k.n - 1) * (y > 0.0 ? std::log(y)
                                                     : -std::numeric_limits<double>::infinity()) -
                                std::lgamma(static_cast<double>(k.n));
                    if (k.n == 1)
                        lg = std::log(static_cast<double>(k.k)) + (k.k - 1) * std::log1p(-u);
                    return std::exp(lg);
                } else {
                    double h = 1e-6;
                    double lo = std::max(0.0, u - h), hi = std::min(1.0, u + h);
                    return (eval(hi) - eval(lo)) / (hi - lo);
                }
            },
            kind_);
    }

    // Left-continuous inverse: inf{u : phi(u) >= v}.
    double inverse_left(double v) const {
        if (v <= 0.0) return 0.0;
        if (v >= 1.0) return invert([&](double u) { return eval(u) >= 1.0; });
        if (const auto* os = std::get_if<OrderStat>(&kind_)) {
            double b = os->alpha - os->r + 1.0;
            if (b == 1.0) return std::pow(v, 1.0 / os->r);
            if (os->r == 1.0) return -std::expm1(std::log1p(-v) / b);
        }
        if (const auto* rec = std::get_if<Record>(&kind_)) {
            if (rec->n == 1) return -std::expm1(std::log1p(-v) / rec->k);
        }
        return invert([&](double u) { return eval(u) >= v; });
    }

    // Right-continuous inverse: sup{u : phi(u) <= v}.
    double inverse_right(double v) const {
        if (v >= 1.0) return 1.0;
        if (v < 0.0) return 0.0;
        return invert([&](double u) { return eval(u) > v; });
    }

    // Measure of the image of a union of intervals; monotone phi maps
    // intervals to intervals, so this is a sum of endpoint differences.
    double image_measure(const ViolationSet& s) const {
        double m = 0.0;
        for (const auto& iv : s.intervals) m += eval(iv.hi) - eval(iv.lo);
        return m;
    }

    // sup of the derivative over the violation set, using the unimodality
    // of the order-stat and record densities; grid search otherwise.
    double sup_derivative(const ViolationSet& s) const {
        double best = 0.0;
        for (const auto& iv : s.intervals)
            best = std::max(best, sup_derivative_on(iv.lo, iv.hi));
        return best;
    }

    LimitProfile limit_profile() const {
        return std::visit(
            [&](const auto& k) -> LimitProfile {
                using T = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<T, OrderStat>) {
                    return LimitProfile{{k.r / (k.alpha + 1.0)}, {0.0, 1.0}};
                } else if constexpr (std::is_same_v<T, Mixture>) {
                    LimitProfile p;
                    double cum = 0.0;
                    p.plateaus.push_back(0.0);
                    for (std::size_t i = 0; i < k.w.size(); ++i) {
                        p.thresholds.push_back(k.r[i] / (k.alpha + 1.0));
                        cum += k.w[i];
                        p.plateaus.push_back(cum);
                    }
                    return p;
                } else if constexpr (std::is_same_v<T, Record>) {
                    return LimitProfile{{1.0}, {0.0, 1.0}};
                } else {
                    return LimitProfile{{}, {1.0}};
                }
            },
            kind_);
    }

    bool is_custom() const { return std::holds_alternative<Custom>(kind_); }
    const std::variant<OrderStat, Mixture, Record, Custom>& kind() const { return kind_; }

  private:
    std::variant<OrderStat, Mixture, Record, Custom> kind_;

    explicit Distortion(std::variant<OrderStat, Mixture, Record, Custom> k)
        : kind_(std::move(k)) {}
    explicit Distortion(OrderStat k) : kind_(std::move(k)) {}
    explicit Distortion(Mixture k) : kind_(std::move(k)) {}
    explicit Distortion(Record k) : kind_(std::move(k)) {}
    explicit Distortion(Custom k) : kind_(std::move(k)) {}

    static double beta_density(double u, double r, double alpha) {
        double a = r, b = alpha - r + 1.0;
        if (a == 1.0 && b == 1.0) return 1.0;
        return std::exp(log_beta_pdf(u, a, b));
    }

    template <class Pred>
    static double invert(Pred&& holds) {
        double lo = 0.0, hi = 1.0;
        for (int i = 0; i < 100; ++i) {
            double mid = 0.5 * (lo + hi);
            if (holds(mid)) hi = mid;
            else lo = mid;
        }
        return hi;
    }

    double sup_derivative_on(double lo, double hi) const {
        lo = std::max(lo, 0.0);
        hi = std::min(hi, 1.0);
        if (!(hi > lo)) return 0.0;
        std::vector<double> candidates{lo, hi};
        bool unimodal = false;
        if (const auto* os = std::get_if<OrderStat>(&kind_)) {
            double a = os->r, b = os->alpha - os->r + 1.0;
            if (a < 1.0 && lo <= 1e-12) return std::numeric_limits<double>::infinity();
            if (b < 1.0 && hi >= 1.0 - 1e-12) return std::numeric_limits<double>::infinity();
            if (a > 1.0 && b > 1.0) candidates.push_back((a - 1.0) / (a + b - 2.0));
            unimodal = true;
        } else if (const auto* rec = std::get_if<Record>(&kind_)) {
            if (rec->k == 1) candidates.push_back(hi); // increasing throughout
            else {
                double ystar = static_cast<double>(rec->k) * (rec->n - 1) / (rec->k - 1);
                candidates.push_back(-std::expm1(-ystar / rec->k));
            }
            unimodal = true;
        }
        double best = 0.0;
        for (double c : candidates)
            if (c >= lo && c <= hi) best = std::max(best, derivative(c));
        if (!unimodal) {
            const int n = 2048;
            for (int i = 1; i < n; ++i)
                best = std::max(best, derivative(lo + (hi - lo) * i / n));
        }
        return best;
    }

    // Raw expression values, bypassing the [0,1] clamps of eval(): the
    // boundary conditions have to hold in the formula itself.
    void check_shape() const {
        const Expr& e = std::get<Custom>(kind_).expr;
        const int n = 1024;
        double prev = e.eval(0.0, 0.0);
        if (std::fabs(prev) > 1e-9)
            throw std::domain_error("distortion: phi(0) != 0");
        for (int i = 1; i <= n; ++i) {
            double v = e.eval(static_cast<double>(i) / n, 0.0);
            if (v < -1e-9 || v > 1.0 + 1e-9)
                throw std::domain_error("distortion: value outside [0,1]");
            if (v < prev - 1e-9)
                throw std::domain_error("distortion: not nondecreasing");
            prev = std::max(prev, v);
        }
        if (std::fabs(prev - 1.0) > 1e-9)
            throw std::domain_error("distortion: phi(1) != 1");
    }
};

// t-indexed family of distortions with its limit thresholds. Default rank
// paths are r_i(alpha) = lambda_i (alpha + 1), so the thresholds are exact
// along the whole path.
struct DistortionFamily {
    std::function<Distortion(double)> at;
    std::vector<double> lambdas;
};

inline DistortionFamily order_stat_family(double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw std::domain_error("order_stat_family: lambda outside [0,1]");
    return DistortionFamily{
        [lambda](double alpha) {
            double r = lambda * (alpha + 1.0);
            r = std::min(std::max(r, 1e-9), alpha + 1.0 - 1e-9);
            return Distortion::order_stat(r, alpha);
        },
        {lambda}};
}

// Largest order statistic X_{n:n}: r = alpha, lambda -> 1.
inline DistortionFamily max_order_stat_family() {
    return DistortionFamily{
        [](double alpha) { return Distortion::order_stat(alpha, alpha); }, {1.0}};
}

inline DistortionFamily mixture_family(std::vector<double> w, std::vector<double> lambdas) {
    for (std::size_t i = 1; i < lambdas.size(); ++i)
        if (!(lambdas[i] > lambdas[i - 1]))
            throw std::domain_error("mixture_family: thresholds must be strictly increasing");
    return DistortionFamily{
        [w, lambdas](double alpha) {
            std::vector<double> r(lambdas.size());
            for (std::size_t i = 0; i < lambdas.size(); ++i) {
                r[i] = lambdas[i] * (alpha + 1.0);
                r[i] = std::min(std::max(r[i], 1e-9), alpha + 1.0 - 1e-9);
            }
            return Distortion::mixture(w, r, alpha);
        },
        lambdas};
}

inline DistortionFamily record_family(int k) {
    return DistortionFamily{
        [k](double t) {
            int n = static_cast<int>(std::lround(t));
            return Distortion::record(std::max(n, 1), k);
        },
        {1.0}};
}

// Per-t upper bound mu(phi_t(A0)) on the violation measure of the
// distorted pair.
inline std::vector<double> sufficient_ast(const DistortionFamily& fam, const ViolationSet& a0,
                                          const std::vector<double>& t_grid) {
    std::vector<double> out;
    out.reserve(t_grid.size());
    for (double t : t_grid) out.push_back(fam.at(t).image_measure(a0));
    return out;
}

// Per-t values sup_{v in A0} phi_t'(v); their vanishing gives the L1/W2
// orders when the baselines have the matching finite moments.
inline std::vector<double> sufficient_l1w2(const DistortionFamily& fam, const ViolationSet& a0,
                                           const std::vector<double>& t_grid) {
    std::vector<double> out;
    out.reserve(t_grid.size());
    for (double t : t_grid) out.push_back(fam.at(t).sup_derivative(a0));
    return out;
}

// Three nested lower bounds on the limiting precedence probability of a
// mixture of central order statistics: max_i(w_i sum_{j<=i} w_j) >=
// max_i w_i^2 >= 1/s^2.
inline std::array<double, 3> mixture_precedence_bounds(const std::vector<double>& w) {
    if (w.empty()) throw std::domain_error("mixture_precedence_bounds: empty weights");
    double sum = 0.0;
    for (double wi : w) {
        if (!(wi > 0.0)) throw std::domain_error("mixture_precedence_bounds: nonpositive weight");
        sum += wi;
    }
    if (std::fabs(sum - 1.0) > 1e-12)
        throw std::domain_error("mixture_precedence_bounds: weights must sum to 1");
    double b1 = 0.0, b2 = 0.0, cum = 0.0;
    for (double wi : w) {
        cum += wi;
        b1 = std::max(b1, wi * cum);
        b2 = std::max(b2, wi * wi);
    }
    double s = static_cast<double>(w.size());
    return {b1, b2, 1.0 / (s * s)};
}

} // namespace stochord

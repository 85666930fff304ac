#pragma once

// The Cdf abstraction: piecewise expression cdfs, builtin families,
// empirical step functions, distorted and mixed compositions. Generalized
// inverses, inverse-transform sampling, expectation via the quantile
// integral, and JSON load/save of distribution specs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "distortion.hpp"
#include "expr.hpp"
#include "quadrature.hpp"
#include "specfun.hpp"

namespace stochord {

using json = nlohmann::json;

// Errors in the *description* of a distribution (bad JSON, invalid
// parameters, failed cdf validation) as opposed to numeric evaluation
// failures, which stay EvalError.
class SpecError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct QuantilePair {
    double left;  // inf{x : F(x) >= u}
    double right; // sup{x : F(x) <= u}
};

namespace detail {

// Uniform draw in (0,1) with 53 random bits; explicit so streams are
// reproducible across standard libraries.
inline double uniform01(std::mt19937_64& rng) {
    double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return u > 0.0 ? u : 0x1.0p-53;
}

} // namespace detail

class CdfImpl {
  public:
    virtual ~CdfImpl() = default;

    virtual double eval(double x, double t) const = 0;

    virtual double quantile_left(double u, double t) const { return invert(u, t, true); }
    virtual double quantile_right(double u, double t) const { return invert(u, t, false); }

    virtual bool has_jumps(double t) const { (void)t; return false; }

    // Finite [lo, hi] with F(lo) ~ 0 and F(hi) ~ 1.
    virtual std::pair<double, double> bracket(double t) const { return generic_bracket(t); }

    // Grid-based monotonicity / range validation; throws SpecError.
    virtual void validate(double t) const {
        try {
            grid_validate(t);
        } catch (const EvalError& e) {
            throw SpecError(std::string("cdf validation: ") + e.what());
        }
    }

    // Extra x-values worth probing during validation (breakpoints, jumps).
    virtual std::vector<double> knots(double t) const { (void)t; return {}; }

    virtual json to_json() const = 0;

    virtual void sample_into(std::vector<double>& out, std::uint64_t seed, std::size_t n,
                             double t) const {
        std::mt19937_64 rng(seed);
        out.reserve(out.size() + n);
        for (std::size_t i = 0; i < n; ++i) out.push_back(quantile_left(detail::uniform01(rng), t));
    }

  protected:
    // Bracketed bisection on the monotone predicate F(x) >= u (left
    // inverse) or F(x) > u (right inverse), to relative x-resolution 1e-10.
    double invert(double u, double t, bool left_inverse) const {
        auto holds = [&](double x) {
            double v = eval(x, t);
            return left_inverse ? v >= u : v > u;
        };
        auto [lo, hi] = bracket(t);
        double step = std::max(1.0, 0.5 * (hi - lo));
        for (int i = 0; i < 200 && !holds(hi); ++i) { hi += step; step *= 2.0; }
        step = std::max(1.0, 0.5 * (hi - lo));
        for (int i = 0; i < 200 && holds(lo); ++i) { lo -= step; step *= 2.0; }
        for (int i = 0; i < 200; ++i) {
            double mid = 0.5 * (lo + hi);
            if (hi - lo < 1e-10 * (1.0 + std::fabs(mid))) break;
            if (holds(mid)) hi = mid;
            else lo = mid;
        }
        return 0.5 * (lo + hi);
    }

    std::pair<double, double> generic_bracket(double t) const {
        double lo = -1.0, hi = 1.0;
        for (double k : knots(t)) {
            if (std::isfinite(k)) { lo = std::min(lo, k - 1.0); hi = std::max(hi, k + 1.0); }
        }
        double step = std::max(1.0, hi - lo);
        for (int i = 0; i < 600 && eval(lo, t) > 1e-12; ++i) {
            double next = lo - step;
            step *= 2.0;
            if (!std::isfinite(next)) break;
            lo = next;
        }
        step = std::max(1.0, hi - lo);
        for (int i = 0; i < 600 && eval(hi, t) < 1.0 - 1e-12; ++i) {
            double next = hi + step;
            step *= 2.0;
            if (!std::isfinite(next)) break;
            hi = next;
        }
        if (eval(lo, t) > 1e-6 || eval(hi, t) < 1.0 - 1e-6)
            throw SpecError("cdf bracket: tails do not reach 0/1 on any searchable range");
        return {lo, hi};
    }

    void grid_validate(double t) const {
        auto [lo, hi] = bracket(t);
        std::vector<double> xs;
        const int n = 4096;
        xs.reserve(n + 16);
        for (int i = 0; i <= n; ++i) xs.push_back(lo + (hi - lo) * i / n);
        for (double k : knots(t))
            if (std::isfinite(k)) { xs.push_back(k); xs.push_back(k + 1e-9); }
        std::sort(xs.begin(), xs.end());
        double prev = -1e-9;
        for (double x : xs) {
            double v = eval(x, t);
            if (v < -1e-9 || v > 1.0 + 1e-9)
                throw SpecError("cdf validation: value outside [0,1] at x=" + std::to_string(x));
            if (v < prev - 1e-9)
                throw SpecError("cdf validation: not nondecreasing at x=" + std::to_string(x));
            prev = std::max(prev, v);
        }
        if (eval(lo, t) > 1e-6 || eval(hi, t) < 1.0 - 1e-6)
            throw SpecError("cdf validation: tails do not reach 0/1");
    }
};

// ---------------------------------------------------------------------------
// implementations

namespace impl {

struct Segment {
    Expr from; // empty => -inf
    Expr to;   // empty => +inf
    Expr body;
};

struct PointJump {
    Expr at;
    Expr mass;
};

class Piecewise final : public CdfImpl {
  public:
    Piecewise(std::vector<Segment> segs, std::vector<PointJump> jumps)
        : segs_(std::move(segs)), jumps_(std::move(jumps)) {
        if (segs_.empty()) throw SpecError("piecewise cdf: no segments");
    }

    double eval(double x, double t) const override {
        refresh(t);
        double base;
        if (!std::isnan(cache_.from_first) && x < cache_.from_first) {
            base = 0.0;
        } else if (!std::isnan(cache_.to_last) && x >= cache_.to_last) {
            base = 1.0;
        } else {
            base = segs_[segment_index(x)].body.eval(x, t);
        }
        for (std::size_t i = 0; i < jumps_.size(); ++i)
            if (x >= cache_.jump_at[i]) base += cache_.jump_mass[i];
        return base;
    }

    bool has_jumps(double t) const override {
        if (!jumps_.empty()) return true;
        // discontinuity at an interior breakpoint: compare the previous
        // body's limit with the value from the next segment
        for (std::size_t i = 0; i + 1 < segs_.size(); ++i) {
            if (segs_[i].to.empty()) continue;
            double b = segs_[i].to.eval(0.0, t);
            double left_limit = segs_[i].body.eval(b, t);
            if (std::fabs(eval(b, t) - left_limit) > 1e-9) return true;
        }
        return false;
    }

    std::vector<double> knots(double t) const override {
        std::vector<double> k;
        for (const auto& s : segs_) {
            if (!s.from.empty()) k.push_back(s.from.eval(0.0, t));
            if (!s.to.empty()) k.push_back(s.to.eval(0.0, t));
        }
        for (const auto& j : jumps_) k.push_back(j.at.eval(0.0, t));
        return k;
    }

    json to_json() const override {
        json segs = json::array();
        for (const auto& s : segs_) {
            segs.push_back({{"from", s.from.empty() ? "-inf" : s.from.print()},
                            {"to", s.to.empty() ? "inf" : s.to.print()},
                            {"cdf", s.body.print()}});
        }
        json out{{"kind", "piecewise"}, {"segments", segs}};
        if (!jumps_.empty()) {
            json js = json::array();
            for (const auto& j : jumps_)
                js.push_back({{"at", j.at.print()}, {"mass", j.mass.print()}});
            out["jumps"] = js;
        }
        return out;
    }

  private:
    std::vector<Segment> segs_;
    std::vector<PointJump> jumps_;

    // Breakpoint expressions only depend on t, and inversion bisects eval()
    // thousands of times at the same t, so their values are cached.
    struct Cache {
        double t = std::numeric_limits<double>::quiet_NaN();
        bool valid = false;
        double from_first = 0.0, to_last = 0.0; // NaN = unbounded
        std::vector<double> seg_to;             // NaN = unbounded
        std::vector<double> jump_at, jump_mass;
    };
    mutable Cache cache_;

    void refresh(double t) const {
        if (cache_.valid && cache_.t == t) return;
        cache_.valid = false;
        cache_.t = t;
        const double nan = std::numeric_limits<double>::quiet_NaN();
        cache_.from_first = segs_.front().from.empty() ? nan : segs_.front().from.eval(0.0, t);
        cache_.to_last = segs_.back().to.empty() ? nan : segs_.back().to.eval(0.0, t);
        cache_.seg_to.clear();
        for (const auto& s : segs_)
            cache_.seg_to.push_back(s.to.empty() ? nan : s.to.eval(0.0, t));
        cache_.jump_at.clear();
        cache_.jump_mass.clear();
        for (const auto& j : jumps_) {
            cache_.jump_at.push_back(j.at.eval(0.0, t));
            cache_.jump_mass.push_back(j.mass.eval(0.0, t));
        }
        cache_.valid = true;
    }

    std::size_t segment_index(double x) const {
        for (std::size_t i = 0; i + 1 < segs_.size(); ++i) {
            if (std::isnan(cache_.seg_to[i]) || x < cache_.seg_to[i]) return i;
        }
        return segs_.size() - 1;
    }
};

class Builtin final : public CdfImpl {
  public:
    enum class Family { Normal, Cauchy, Uniform, Exponential, Degenerate };

    Builtin(Family f, double p1, double p2) : family_(f), p1_(p1), p2_(p2) {
        switch (family_) {
            case Family::Normal:
                if (!(p2_ > 0.0)) throw SpecError("normal: sigma must be positive");
                break;
            case Family::Cauchy:
                if (!(p2_ > 0.0)) throw SpecError("cauchy: gamma must be positive");
                break;
            case Family::Uniform:
                if (!(p2_ > p1_)) throw SpecError("uniform: need a < b");
                break;
            case Family::Exponential:
                if (!(p1_ > 0.0)) throw SpecError("exponential: rate must be positive");
                break;
            case Family::Degenerate: break;
        }
    }

    double eval(double x, double) const override {
        switch (family_) {
            case Family::Normal: return std_normal_cdf((x - p1_) / p2_);
            case Family::Cauchy: return 0.5 + std::atan((x - p1_) / p2_) / M_PI;
            case Family::Uniform:
                return x <= p1_ ? 0.0 : (x >= p2_ ? 1.0 : (x - p1_) / (p2_ - p1_));
            case Family::Exponential: return x <= 0.0 ? 0.0 : -std::expm1(-p1_ * x);
            case Family::Degenerate: return x >= p1_ ? 1.0 : 0.0;
        }
        return 0.0;
    }

    double quantile_left(double u, double) const override { return quantile(u); }
    double quantile_right(double u, double) const override { return quantile(u); }

    bool has_jumps(double) const override { return family_ == Family::Degenerate; }

    std::pair<double, double> bracket(double) const override {
        if (family_ == Family::Degenerate) return {p1_ - 1.0, p1_ + 1.0};
        if (family_ == Family::Uniform) return {p1_ - 1e-6, p2_ + 1e-6};
        return {quantile(1e-13), quantile(1.0 - 1e-13)};
    }

    void validate(double) const override {} // closed forms, nothing to check

    json to_json() const override {
        switch (family_) {
            case Family::Normal:
                return {{"kind", "builtin"}, {"family", "normal"}, {"mu", p1_}, {"sigma", p2_}};
            case Family::Cauchy:
                return {{"kind", "builtin"}, {"family", "cauchy"}, {"x0", p1_}, {"gamma", p2_}};
            case Family::Uniform:
                return {{"kind", "builtin"}, {"family", "uniform"}, {"a", p1_}, {"b", p2_}};
            case Family::Exponential:
                return {{"kind", "builtin"}, {"family", "exponential"}, {"rate", p1_}};
            case Family::Degenerate:
                return {{"kind", "builtin"}, {"family", "degenerate"}, {"c", p1_}};
        }
        return {};
    }

  private:
    Family family_;
    double p1_, p2_;

    double quantile(double u) const {
        switch (family_) {
            case Family::Normal: return p1_ + p2_ * std_normal_quantile(u);
            case Family::Cauchy: return p1_ + p2_ * std::tan(M_PI * (u - 0.5));
            case Family::Uniform: return p1_ + (p2_ - p1_) * u;
            case Family::Exponential: return -std::log1p(-u) / p1_;
            case Family::Degenerate: return p1_;
        }
        return 0.0;
    }
};

class Empirical final : public CdfImpl {
  public:
    explicit Empirical(std::vector<double> sample) : sample_(std::move(sample)) {
        if (sample_.empty()) throw SpecError("empirical cdf: empty sample");
        std::sort(sample_.begin(), sample_.end());
    }

    double eval(double x, double) const override {
        auto it = std::upper_bound(sample_.begin(), sample_.end(), x);
        return static_cast<double>(it - sample_.begin()) / sample_.size();
    }

    double quantile_left(double u, double) const override {
        // inf{x : F(x) >= u} = ceil(u n)-th order statistic
        std::size_t n = sample_.size();
        std::size_t k = static_cast<std::size_t>(std::ceil(u * n - 1e-12));
        if (k < 1) k = 1;
        if (k > n) k = n;
        return sample_[k - 1];
    }

    double quantile_right(double u, double) const override {
        // sup{x : F(x) <= u} = (floor(u n)+1)-th order statistic
        std::size_t n = sample_.size();
        std::size_t k = static_cast<std::size_t>(std::floor(u * n + 1e-12));
        if (k >= n) k = n - 1;
        return sample_[k];
    }

    bool has_jumps(double) const override { return true; }

    std::pair<double, double> bracket(double) const override {
        return {sample_.front() - 1.0, sample_.back() + 1.0};
    }

    void validate(double) const override {}

    std::vector<double> knots(double) const override { return sample_; }

    json to_json() const override { return {{"kind", "empirical"}, {"sample", sample_}}; }

  private:
    std::vector<double> sample_;
};

class Mixture final : public CdfImpl {
  public:
    Mixture(std::vector<double> w, std::vector<std::shared_ptr<const CdfImpl>> comps)
        : w_(std::move(w)), comps_(std::move(comps)) {
        if (w_.empty() || w_.size() != comps_.size())
            throw SpecError("mixture cdf: weight/component size mismatch");
        double sum = 0.0;
        for (double wi : w_) {
            if (!(wi > 0.0)) throw SpecError("mixture cdf: nonpositive weight");
            sum += wi;
        }
        if (std::fabs(sum - 1.0) > 1e-12)
            throw SpecError("mixture cdf: weights must sum to 1");
    }

    double eval(double x, double t) const override {
        double v = 0.0;
        for (std::size_t i = 0; i < w_.size(); ++i) v += w_[i] * comps_[i]->eval(x, t);
        return v;
    }

    bool has_jumps(double t) const override {
        for (const auto& c : comps_)
            if (c->has_jumps(t)) return true;
        return false;
    }

    std::pair<double, double> bracket(double t) const override {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& c : comps_) {
            auto [a, b] = c->bracket(t);
            lo = std::min(lo, a);
            hi = std::max(hi, b);
        }
        return {lo, hi};
    }

    void validate(double t) const override {
        for (const auto& c : comps_) c->validate(t);
    }

    std::vector<double> knots(double t) const override {
        std::vector<double> k;
        for (const auto& c : comps_) {
            auto ck = c->knots(t);
            k.insert(k.end(), ck.begin(), ck.end());
        }
        return k;
    }

    json to_json() const override {
        json comps = json::array();
        for (const auto& c : comps_) comps.push_back(c->to_json());
        return {{"kind", "mixture"}, {"weights", w_}, {"components", comps}};
    }

  private:
    std::vector<double> w_;
    std::vector<std::shared_ptr<const CdfImpl>> comps_;
};

class Distorted final : public CdfImpl {
  public:
    Distorted(std::shared_ptr<const CdfImpl> base, Distortion phi)
        : base_(std::move(base)), phi_(std::move(phi)) {}

    double eval(double x, double t) const override { return phi_.eval(base_->eval(x, t)); }

    // Lemma: (phi o F)^{<-}(u) = F^{<-}(phi^{<-}(u)) for continuous phi.
    double quantile_left(double u, double t) const override {
        return base_->quantile_left(clamp01(phi_.inverse_left(u)), t);
    }
    double quantile_right(double u, double t) const override {
        return base_->quantile_right(clamp01(phi_.inverse_right(u)), t);
    }

    bool has_jumps(double t) const override { return base_->has_jumps(t); }
    std::pair<double, double> bracket(double t) const override { return base_->bracket(t); }
    void validate(double t) const override { base_->validate(t); }
    std::vector<double> knots(double t) const override { return base_->knots(t); }

    json to_json() const override {
        return {{"kind", "distorted"},
                {"base", base_->to_json()},
                {"distortion", distortion_to_json(phi_)}};
    }

    // Inverse-transform sampling through a tabulated phi inverse; the exact
    // bisection inverse is far too slow for 1e6-draw Monte Carlo runs.
    void sample_into(std::vector<double>& out, std::uint64_t seed, std::size_t n,
                     double t) const override {
        const int m = 1 << 16;
        std::vector<double> table(m + 1);
        for (int i = 0; i <= m; ++i) table[i] = phi_.eval(static_cast<double>(i) / m);
        std::mt19937_64 rng(seed);
        out.reserve(out.size() + n);
        for (std::size_t i = 0; i < n; ++i) {
            double u = detail::uniform01(rng);
            auto it = std::upper_bound(table.begin(), table.end(), u);
            std::size_t j = it == table.begin() ? 1 : static_cast<std::size_t>(it - table.begin());
            if (j > static_cast<std::size_t>(m)) j = m;
            double lo = table[j - 1], hi = table[j];
            double frac = hi > lo ? (u - lo) / (hi - lo) : 0.5;
            double v = clamp01((static_cast<double>(j - 1) + frac) / m);
            out.push_back(base_->quantile_left(v, t));
        }
    }

    static json distortion_to_json(const Distortion& d);

  private:
    std::shared_ptr<const CdfImpl> base_;
    Distortion phi_;

    static double clamp01(double v) {
        return std::min(std::max(v, 1e-15), 1.0 - 1e-15);
    }
};

// -X for a continuous base: F(x) = 1 - F_base(-x); quantiles swap and
// reflect. Not serializable.
class Negated final : public CdfImpl {
  public:
    explicit Negated(std::shared_ptr<const CdfImpl> base) : base_(std::move(base)) {}

    double eval(double x, double t) const override { return 1.0 - base_->eval(-x, t); }

    double quantile_left(double u, double t) const override {
        return -base_->quantile_right(1.0 - u, t);
    }
    double quantile_right(double u, double t) const override {
        return -base_->quantile_left(1.0 - u, t);
    }

    bool has_jumps(double t) const override { return base_->has_jumps(t); }

    std::pair<double, double> bracket(double t) const override {
        auto [a, b] = base_->bracket(t);
        return {-b, -a};
    }

    void validate(double t) const override { base_->validate(t); }

    json to_json() const override { throw SpecError("negated cdf has no JSON form"); }

  private:
    std::shared_ptr<const CdfImpl> base_;
};

// Y = psi(X) for nondecreasing continuous psi with supplied inverse; used
// by the monotone-transform closure checks. Not serializable.
class Transformed final : public CdfImpl {
  public:
    Transformed(std::shared_ptr<const CdfImpl> base, std::function<double(double)> psi,
                std::function<double(double)> psi_inv)
        : base_(std::move(base)), psi_(std::move(psi)), psi_inv_(std::move(psi_inv)) {}

    double eval(double x, double t) const override { return base_->eval(psi_inv_(x), t); }

    double quantile_left(double u, double t) const override {
        return psi_(base_->quantile_left(u, t));
    }
    double quantile_right(double u, double t) const override {
        return psi_(base_->quantile_right(u, t));
    }

    bool has_jumps(double t) const override { return base_->has_jumps(t); }

    std::pair<double, double> bracket(double t) const override {
        auto [a, b] = base_->bracket(t);
        return {psi_(a), psi_(b)};
    }

    void validate(double t) const override { base_->validate(t); }

    json to_json() const override { throw SpecError("transformed cdf has no JSON form"); }

  private:
    std::shared_ptr<const CdfImpl> base_;
    std::function<double(double)> psi_, psi_inv_;
};

} // namespace impl

// ---------------------------------------------------------------------------
// value wrapper + factories + JSON I/O

class Cdf {
  public:
    Cdf() = default;
    explicit Cdf(std::shared_ptr<const CdfImpl> impl) : impl_(std::move(impl)) {}

    bool valid() const { return static_cast<bool>(impl_); }

    double eval(double x, double t = 0.0) const { return impl().eval(x, t); }

    QuantilePair quantile(double u, double t = 0.0) const {
        if (!(u > 0.0 && u < 1.0)) throw std::domain_error("quantile: u outside (0,1)");
        return {impl().quantile_left(u, t), impl().quantile_right(u, t)};
    }
    double quantile_left(double u, double t = 0.0) const {
        if (!(u > 0.0 && u < 1.0)) throw std::domain_error("quantile: u outside (0,1)");
        return impl().quantile_left(u, t);
    }
    double quantile_right(double u, double t = 0.0) const {
        if (!(u > 0.0 && u < 1.0)) throw std::domain_error("quantile: u outside (0,1)");
        return impl().quantile_right(u, t);
    }

    bool has_jumps(double t = 0.0) const { return impl().has_jumps(t); }
    std::pair<double, double> bracket(double t = 0.0) const { return impl().bracket(t); }
    void validate(double t = 0.0) const { impl().validate(t); }
    std::vector<double> knots(double t = 0.0) const { return impl().knots(t); }

    std::vector<double> sample(std::uint64_t seed, std::size_t n, double t = 0.0) const {
        std::vector<double> out;
        impl().sample_into(out, seed, n, t);
        return out;
    }

    json to_json() const { return impl().to_json(); }
    std::string save() const { return to_json().dump(2); }

    static Cdf from_json(const json& j);
    static Cdf load(const std::string& text) {
        json j;
        try {
            j = json::parse(text);
        } catch (const json::exception& e) {
            throw SpecError(std::string("distribution spec: ") + e.what());
        }
        return from_json(j);
    }

    // builtins
    static Cdf normal(double mu, double sigma) {
        return wrap<impl::Builtin>(impl::Builtin::Family::Normal, mu, sigma);
    }
    static Cdf cauchy(double x0, double gamma) {
        return wrap<impl::Builtin>(impl::Builtin::Family::Cauchy, x0, gamma);
    }
    static Cdf uniform(double a, double b) {
        return wrap<impl::Builtin>(impl::Builtin::Family::Uniform, a, b);
    }
    static Cdf exponential(double rate) {
        return wrap<impl::Builtin>(impl::Builtin::Family::Exponential, rate, 0.0);
    }
    static Cdf degenerate(double c) {
        return wrap<impl::Builtin>(impl::Builtin::Family::Degenerate, c, 0.0);
    }

    static Cdf piecewise(std::vector<impl::Segment> segs, std::vector<impl::PointJump> jumps = {}) {
        return wrap<impl::Piecewise>(std::move(segs), std::move(jumps));
    }
    static Cdf empirical(std::vector<double> sample) {
        return wrap<impl::Empirical>(std::move(sample));
    }
    static Cdf distorted(const Cdf& base, Distortion phi) {
        return wrap<impl::Distorted>(base.impl_, std::move(phi));
    }
    static Cdf mixture(std::vector<double> w, const std::vector<Cdf>& comps) {
        std::vector<std::shared_ptr<const CdfImpl>> impls;
        impls.reserve(comps.size());
        for (const auto& c : comps) impls.push_back(c.impl_);
        return wrap<impl::Mixture>(std::move(w), std::move(impls));
    }
    static Cdf negate(const Cdf& base) { return wrap<impl::Negated>(base.impl_); }
    static Cdf transformed(const Cdf& base, std::function<double(double)> psi,
                           std::function<double(double)> psi_inv) {
        return wrap<impl::Transformed>(base.impl_, std::move(psi), std::move(psi_inv));
    }

  private:
    std::shared_ptr<const CdfImpl> impl_;

    const CdfImpl& impl() const {
        if (!impl_) throw SpecError("empty Cdf");
        return *impl_;
    }

    template <class T, class... Args>
    static Cdf wrap(Args&&... args) {
        return Cdf(std::make_shared<const T>(std::forward<Args>(args)...));
    }
};

// ---------------------------------------------------------------------------
// distortion <-> JSON

inline json distortion_to_json(const Distortion& d) {
    return std::visit(
        [&](const auto& k) -> json {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, Distortion::OrderStat>) {
                return {{"kind", "order_stat"}, {"r", k.r}, {"alpha", k.alpha}};
            } else if constexpr (std::is_same_v<T, Distortion::Mixture>) {
                return {{"kind", "mixture"}, {"w", k.w}, {"r", k.r}, {"alpha", k.alpha}};
            } else if constexpr (std::is_same_v<T, Distortion::Record>) {
                return {{"kind", "record"}, {"n", k.n}, {"k", k.k}};
            } else {
                return {{"kind", "custom"}, {"expr", k.expr.print()}};
            }
        },
        d.kind());
}

inline json impl::Distorted::distortion_to_json(const Distortion& d) {
    return stochord::distortion_to_json(d);
}

inline Distortion distortion_from_json(const json& j) {
    try {
        std::string kind = j.at("kind").get<std::string>();
        if (kind == "order_stat")
            return Distortion::order_stat(j.at("r").get<double>(), j.at("alpha").get<double>());
        if (kind == "mixture")
            return Distortion::mixture(j.at("w").get<std::vector<double>>(),
                                       j.at("r").get<std::vector<double>>(),
                                       j.at("alpha").get<double>());
        if (kind == "record")
            return Distortion::record(j.at("n").get<int>(), j.at("k").get<int>());
        if (kind == "custom") return Distortion::custom(parse_expr(j.at("expr").get<std::string>()));
        throw SpecError("distortion spec: unknown kind '" + kind + "'");
    } catch (const json::exception& e) {
        throw SpecError(std::string("distortion spec: ") + e.what());
    } catch (const std::domain_error& e) {
        throw SpecError(std::string("distortion spec: ") + e.what());
    }
}

inline Cdf Cdf::from_json(const json& j) {
    try {
        std::string kind = j.at("kind").get<std::string>();
        if (kind == "piecewise") {
            std::vector<impl::Segment> segs;
            for (const auto& s : j.at("segments")) {
                impl::Segment seg;
                std::string from = s.at("from").get<std::string>();
                std::string to = s.at("to").get<std::string>();
                if (from != "-inf") seg.from = parse_expr(from);
                if (to != "inf" && to != "+inf") seg.to = parse_expr(to);
                seg.body = parse_expr(s.at("cdf").get<std::string>());
                segs.push_back(std::move(seg));
            }
            std::vector<impl::PointJump> jumps;
            if (j.contains("jumps"))
                for (const auto& pj : j.at("jumps"))
                    jumps.push_back({parse_expr(pj.at("at").get<std::string>()),
                                     parse_expr(pj.at("mass").get<std::string>())});
            return piecewise(std::move(segs), std::move(jumps));
        }
        if (kind == "builtin") {
            std::string fam = j.at("family").get<std::string>();
            if (fam == "normal") return normal(j.at("mu").get<double>(), j.at("sigma").get<double>());
            if (fam == "cauchy") return cauchy(j.at("x0").get<double>(), j.at("gamma").get<double>());
            if (fam == "uniform") return uniform(j.at("a").get<double>(), j.at("b").get<double>());
            if (fam == "exponential") return exponential(j.at("rate").get<double>());
            if (fam == "degenerate") return degenerate(j.at("c").get<double>());
            throw SpecError("distribution spec: unknown builtin family '" + fam + "'");
        }
        if (kind == "empirical") return empirical(j.at("sample").get<std::vector<double>>());
        if (kind == "distorted")
            return distorted(from_json(j.at("base")), distortion_from_json(j.at("distortion")));
        if (kind == "mixture") {
            std::vector<Cdf> comps;
            for (const auto& c : j.at("components")) comps.push_back(from_json(c));
            return mixture(j.at("weights").get<std::vector<double>>(), comps);
        }
        throw SpecError("distribution spec: unknown kind '" + kind + "'");
    } catch (const json::exception& e) {
        throw SpecError(std::string("distribution spec: ") + e.what());
    } catch (const ParseError& e) {
        throw SpecError(std::string("distribution spec: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// expectation via the quantile integral E(X) = int_0^1 F^{<-}(u) du

// The two tails are tested separately so that a symmetric heavy-tailed law
// (Cauchy) cannot cancel its way to a spurious principal value.
inline ImproperResult expectation(const Cdf& f, double t = 0.0) {
    auto q = [&](double u) { return f.quantile_left(u, t); };
    ImproperResult lo = integrate_open(q, 0.0, 0.5, true, false);
    ImproperResult hi = integrate_open(q, 0.5, 1.0, false, true);
    return {lo.value + hi.value, lo.divergent || hi.divergent};
}

} // namespace stochord

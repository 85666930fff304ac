#pragma once

// Scalar special functions used by every cdf and distortion in the library:
// standard normal cdf and quantile, regularized incomplete beta and lower
// incomplete gamma. All normalizers go through log-gamma so that parameters
// in the hundreds (sample sizes, record indices) stay finite.

#include <cmath>
#include <limits>
#include <stdexcept>

namespace stochord {

struct Accuracy {
    double abs_tol = 1e-12;
    int max_iter = 500;
};

inline double std_normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

inline double std_normal_pdf(double x) {
    static const double inv_sqrt_2pi = 0.3989422804014326779;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

// Acklam's rational approximation, polished with one Halley step.
inline double std_normal_quantile(double u) {
    if (!(u > 0.0 && u < 1.0))
        throw std::domain_error("std_normal_quantile: u outside (0,1)");
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double q, x;
    if (u < plow) {
        q = std::sqrt(-2.0 * std::log(u));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (u <= 1.0 - plow) {
        q = u - 0.5;
        double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        q = std::sqrt(-2.0 * std::log(1.0 - u));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double e = std_normal_cdf(x) - u;
    double f = std_normal_pdf(x);
    if (f > 0.0) {
        double g = e / f;
        x -= g / (1.0 + 0.5 * x * g);
    }
    return x;
}

inline double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

namespace detail {

// Continued fraction for the incomplete beta (modified Lentz).
inline double beta_cf(double a, double b, double x, const Accuracy& acc) {
    const double tiny = 1e-300;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= acc.max_iter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-15) break;
    }
    return h;
}

inline double gamma_p_series(double s, double x, const Accuracy& acc) {
    double sum = 1.0 / s, term = sum, ap = s;
    for (int n = 0; n < acc.max_iter; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

inline double gamma_q_cf(double s, double x, const Accuracy& acc) {
    const double tiny = 1e-300;
    double b = x + 1.0 - s, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i <= acc.max_iter; ++i) {
        double an = -i * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-15) break;
    }
    return h * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

// Downstream measure code treats 0/1 as exact limits, so snap to the
// boundary once the value is within abs_tol of it.
inline double saturate01(double v, double abs_tol) {
    if (v < abs_tol) return 0.0;
    if (v > 1.0 - abs_tol) return 1.0;
    return v;
}

} // namespace detail

// Regularized incomplete beta I_u(a,b).
inline double reg_inc_beta(double u, double a, double b, const Accuracy& acc = {}) {
    if (!(u >= 0.0 && u <= 1.0))
        throw std::domain_error("reg_inc_beta: u outside [0,1]");
    if (!(a > 0.0) || !(b > 0.0))
        throw std::domain_error("reg_inc_beta: nonpositive shape parameter");
    if (u == 0.0) return 0.0;
    if (u == 1.0) return 1.0;
    if (b == 1.0) return detail::saturate01(std::exp(a * std::log(u)), acc.abs_tol);
    if (a == 1.0) return detail::saturate01(-std::expm1(b * std::log1p(-u)), acc.abs_tol);
    double lbt = a * std::log(u) + b * std::log1p(-u) - log_beta(a, b);
    double bt = std::exp(lbt);
    double v;
    if (u < (a + 1.0) / (a + b + 2.0))
        v = bt * detail::beta_cf(a, b, u, acc) / a;
    else
        v = 1.0 - bt * detail::beta_cf(b, a, 1.0 - u, acc) / b;
    return detail::saturate01(v, acc.abs_tol);
}

// Log of the beta density u^(a-1)(1-u)^(b-1)/B(a,b); -inf at the edges.
inline double log_beta_pdf(double u, double a, double b) {
    if (u <= 0.0 || u >= 1.0) return -std::numeric_limits<double>::infinity();
    return (a - 1.0) * std::log(u) + (b - 1.0) * std::log1p(-u) - log_beta(a, b);
}

// Regularized lower incomplete gamma P(s,x).
inline double reg_inc_gamma_lower(double s, double x, const Accuracy& acc = {}) {
    if (!(s > 0.0))
        throw std::domain_error("reg_inc_gamma_lower: nonpositive shape");
    if (x < 0.0)
        throw std::domain_error("reg_inc_gamma_lower: negative x");
    if (x == 0.0) return 0.0;
    double v = (x < s + 1.0) ? detail::gamma_p_series(s, x, acc)
                             : 1.0 - detail::gamma_q_cf(s, x, acc);
    return detail::saturate01(v, acc.abs_tol);
}

} // namespace stochord

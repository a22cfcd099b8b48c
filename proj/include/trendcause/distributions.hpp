#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <string_view>

#include "trendcause/error.hpp"

namespace tc {

enum class PValueMethod { TTwoSided, FUpperTail, MacKinnonSurface };

constexpr std::string_view to_string(PValueMethod method) {
    switch (method) {
        case PValueMethod::TTwoSided: return "t_two_sided";
        case PValueMethod::FUpperTail: return "f_upper_tail";
        case PValueMethod::MacKinnonSurface: return "mackinnon_surface";
    }
    return "unknown";
}

/// Probability in [0, 1] tagged with the method that produced it.
struct PValue {
    double value = 1.0;
    PValueMethod method = PValueMethod::TTwoSided;

    PValue() = default;
    PValue(double v, PValueMethod m) : value(v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v)), method(m) {
        if (std::isnan(v)) throw Error(ErrorKind::DomainError, "p-value is NaN");
    }

    bool operator<(double alpha) const { return value < alpha; }
};

/// ln Γ(x) for x > 0 (Lanczos, g = 7, 9 terms; reflection-free since x > 0).
inline double ln_gamma(double x) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw Error(ErrorKind::DomainError, "ln_gamma requires x > 0, got " + std::to_string(x));
    static constexpr std::array<double, 9> coeffs = {
        0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
        771.32342877765313,   -176.61502916214059,   12.507343278686905,
        -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    if (x < 0.5) {
        // Γ(x) = Γ(x + 1) / x keeps the series in its accurate range.
        return ln_gamma(x + 1.0) - std::log(x);
    }
    const double z = x - 1.0;
    double sum = coeffs[0];
    for (std::size_t i = 1; i < coeffs.size(); ++i) sum += coeffs[i] / (z + static_cast<double>(i));
    const double t = z + 7.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(sum);
}

namespace detail {

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
inline double beta_continued_fraction(double a, double b, double x) {
    constexpr int max_iter = 10000;
    constexpr double eps = 1e-16;
    constexpr double tiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const double m2 = 2.0 * m;
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
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) return h;
    }
    throw Error(ErrorKind::DomainError, "incomplete beta continued fraction did not converge");
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b).
inline double reg_inc_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0) || !(x >= 0.0 && x <= 1.0))
        throw Error(ErrorKind::DomainError, "reg_inc_beta requires a, b > 0 and x in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double log_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * std::log(x) +
                             b * std::log1p(-x);
    const double front = std::exp(log_front);
    // The fraction converges fastest below the mean; use the symmetry otherwise.
    if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// P(|T| >= |t|) for Student-t with df degrees of freedom.
inline double t_two_sided_p(double t, double df) {
    if (!(df > 0.0)) throw Error(ErrorKind::DomainError, "t distribution requires df > 0");
    if (std::isnan(t)) throw Error(ErrorKind::DomainError, "t statistic is NaN");
    if (std::isinf(t)) return 0.0;
    return reg_inc_beta(0.5 * df, 0.5, df / (df + t * t));
}

/// P(T <= t) for Student-t with df degrees of freedom.
inline double t_cdf(double t, double df) {
    if (!(df > 0.0)) throw Error(ErrorKind::DomainError, "t distribution requires df > 0");
    if (std::isnan(t)) throw Error(ErrorKind::DomainError, "t statistic is NaN");
    if (t == std::numeric_limits<double>::infinity()) return 1.0;
    if (t == -std::numeric_limits<double>::infinity()) return 0.0;
    const double tail = 0.5 * t_two_sided_p(t, df);
    return t > 0.0 ? 1.0 - tail : tail;
}

/// P(F <= f) for the F(d1, d2) distribution.
inline double f_cdf(double f, double d1, double d2) {
    if (!(d1 > 0.0) || !(d2 > 0.0) || !(f >= 0.0))
        throw Error(ErrorKind::DomainError, "f_cdf requires f >= 0 and d1, d2 > 0");
    if (std::isinf(f)) return 1.0;
    return reg_inc_beta(0.5 * d1, 0.5 * d2, d1 * f / (d1 * f + d2));
}

/// P(F > f), evaluated directly so small tails keep their relative accuracy.
inline double f_upper_tail(double f, double d1, double d2) {
    if (!(d1 > 0.0) || !(d2 > 0.0) || !(f >= 0.0))
        throw Error(ErrorKind::DomainError, "f_upper_tail requires f >= 0 and d1, d2 > 0");
    if (std::isinf(f)) return 0.0;
    return reg_inc_beta(0.5 * d2, 0.5 * d1, d2 / (d2 + d1 * f));
}

/**
 * Approximate p-value of an ADF t-statistic for the constant-only regression.
 *
 * MacKinnon (1994) response-surface polynomials for one integrated variable,
 * the "c" case, with the coefficients used by statsmodels' `mackinnonp`:
 *   tau <= tau_star: p = Φ(2.1659 + 1.4412 τ + 0.038296 τ²)
 *   tau  > tau_star: p = Φ(1.7339 + 0.93202 τ − 0.12745 τ² − 0.010368 τ³)
 * clamped to 0 below tau_min and to 1 above tau_max. The surface is
 * asymptotic; `n` only guards against samples too small for it to apply.
 */
inline PValue adf_pvalue(double stat, int n) {
    if (n < 20)
        throw Error(ErrorKind::DomainError,
                    "ADF p-value needs >= 20 observations, got " + std::to_string(n));
    if (std::isnan(stat)) throw Error(ErrorKind::DomainError, "ADF statistic is NaN");
    constexpr double tau_max = 2.74;
    constexpr double tau_min = -18.83;
    constexpr double tau_star = -1.61;
    constexpr std::array<double, 3> small_p = {2.1659, 1.4412, 3.8296e-2};
    constexpr std::array<double, 4> large_p = {1.7339, 9.3202e-1, -1.2745e-1, -1.0368e-2};
    if (stat > tau_max) return {1.0, PValueMethod::MacKinnonSurface};
    if (stat < tau_min) return {0.0, PValueMethod::MacKinnonSurface};
    double poly = 0.0;
    if (stat <= tau_star) {
        for (auto it = small_p.rbegin(); it != small_p.rend(); ++it) poly = poly * stat + *it;
    } else {
        for (auto it = large_p.rbegin(); it != large_p.rend(); ++it) poly = poly * stat + *it;
    }
    return {normal_cdf(poly), PValueMethod::MacKinnonSurface};
}

}  // namespace tc

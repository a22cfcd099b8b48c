#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "trendcause/distributions.hpp"
#include "trendcause/ols.hpp"
#include "trendcause/series.hpp"

namespace tc {

/**
 * Fitted VAR(p) with intercept:
 *   y_t = intercept + Σ_{i=1..p} coeffs[i-1] · y_{t-i} + residual_t
 * coeffs[i](k, j) is the weight of variable j at lag i+1 in equation k, so the
 * own-lag weights of variable k are the diagonal entries.
 */
struct VarModel {
    int dims = 0;
    int lag = 0;
    Eigen::VectorXd intercept;
    std::vector<Eigen::MatrixXd> coeffs;
    Eigen::MatrixXd residuals;  ///< n_eff × dims
    Eigen::MatrixXd resid_cov;  ///< ML estimate, divisor n_eff
    int n_eff = 0;
    double aic = 0.0;
};

namespace detail {

inline void check_same_dates(std::span<const TimeSeries> series) {
    for (std::size_t k = 1; k < series.size(); ++k) {
        if (series[k].size() != series[0].size() ||
            !std::equal(series[k].dates().begin(), series[k].dates().end(),
                        series[0].dates().begin()))
            throw Error(ErrorKind::LengthMismatch,
                        series[k].name() + " and " + series[0].name() + " have different dates");
    }
}

// Regressor matrix [1, y_{t-1}, ..., y_{t-p}] over rows t = first_t .. n-1,
// where each y_{t-i} block spans all K variables.
inline Eigen::MatrixXd var_design(std::span<const TimeSeries> series, int p, int first_t) {
    const auto n = static_cast<int>(series[0].size());
    const auto dims = static_cast<int>(series.size());
    Eigen::MatrixXd design(n - first_t, 1 + dims * p);
    for (int r = 0; r < n - first_t; ++r) {
        const int t = first_t + r;
        design(r, 0) = 1.0;
        for (int i = 1; i <= p; ++i)
            for (int j = 0; j < dims; ++j) design(r, 1 + (i - 1) * dims + j) = series[j][t - i];
    }
    return design;
}

inline double log_det_psd(const Eigen::MatrixXd& cov) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov, Eigen::EigenvaluesOnly);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
        const double v = eig.eigenvalues()(i);
        if (!(v > 0.0)) return -std::numeric_limits<double>::infinity();
        sum += std::log(v);
    }
    return sum;
}

// Fits on rows t = first_t .. n-1; first_t >= p.
inline VarModel fit_var_from(std::span<const TimeSeries> series, int p, int first_t) {
    const auto n = static_cast<int>(series[0].size());
    const auto dims = static_cast<int>(series.size());
    const int n_eff = n - first_t;
    const int params = dims * p + 1;
    if (n_eff <= params)
        throw Error(ErrorKind::SeriesTooShort,
                    "VAR(" + std::to_string(p) + ") on " + std::to_string(dims) +
                        " series needs more than " + std::to_string(params) +
                        " usable observations, have " + std::to_string(n_eff));
    const OlsSolver solver(var_design(series, p, first_t));
    Eigen::MatrixXd targets(n_eff, dims);
    for (int r = 0; r < n_eff; ++r)
        for (int j = 0; j < dims; ++j) targets(r, j) = series[j][first_t + r];
    const Eigen::MatrixXd beta = solver.coefficients(targets);  // params × dims

    VarModel model;
    model.dims = dims;
    model.lag = p;
    model.n_eff = n_eff;
    model.intercept = beta.row(0).transpose();
    model.coeffs.resize(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i)
        model.coeffs[static_cast<std::size_t>(i)] = beta.block(1 + i * dims, 0, dims, dims).transpose();
    model.residuals = targets - var_design(series, p, first_t) * beta;
    model.resid_cov = (model.residuals.transpose() * model.residuals) / static_cast<double>(n_eff);
    model.resid_cov = 0.5 * (model.resid_cov + model.resid_cov.transpose()).eval();
    model.aic = log_det_psd(model.resid_cov) +
                2.0 / static_cast<double>(n_eff) * static_cast<double>(dims) * params;
    return model;
}

}  // namespace detail

/**
 * Equation-by-equation OLS fit of a VAR(p) with intercept on date-identical
 * series. AIC = ln det(Σ_ML) + 2 K (K p + 1) / n_eff.
 */
inline VarModel fit_var(std::span<const TimeSeries> series, int p) {
    if (series.empty()) throw Error(ErrorKind::DomainError, "fit_var needs at least one series");
    if (p < 1) throw Error(ErrorKind::DomainError, "VAR lag must be >= 1");
    detail::check_same_dates(series);
    if (series[0].size() <= static_cast<std::size_t>(p))
        throw Error(ErrorKind::SeriesTooShort, "series shorter than the VAR lag");
    return detail::fit_var_from(series, p, p);
}

struct LagSelection {
    int lag = 1;
    int max_lag_used = 0;              ///< cap actually searched (may be lowered)
    std::vector<double> aic;           ///< aic[p-1] for p = 1..max_lag_used
    std::vector<std::string> warnings;
};

/// Default cap on the VAR lag order.
inline constexpr int default_max_var_lag = 14;

/**
 * AIC lag selection for a VAR over p = 1..max_lag (smallest p wins ties).
 *
 * Every candidate is fitted on the same sample, the observations left after
 * the largest lag searched is consumed, so the criteria are comparable. When
 * the series cannot support max_lag the cap is lowered to the largest feasible
 * value and a warning is recorded.
 */
inline LagSelection select_lag(std::span<const TimeSeries> series,
                               int max_lag = default_max_var_lag) {
    if (series.empty()) throw Error(ErrorKind::DomainError, "select_lag needs at least one series");
    if (max_lag < 1) throw Error(ErrorKind::DomainError, "max_lag must be >= 1");
    detail::check_same_dates(series);
    const auto n = static_cast<int>(series[0].size());
    const auto dims = static_cast<int>(series.size());
    // Feasible: n - cap > dims * cap + 1.
    auto feasible = [&](int cap) { return n - cap > dims * cap + 1; };
    LagSelection out;
    int cap = max_lag;
    while (cap >= 1 && !feasible(cap)) --cap;
    if (cap < 1)
        throw Error(ErrorKind::SeriesTooShort,
                    std::to_string(n) + " observations cannot support a VAR(1) on " +
                        std::to_string(dims) + " series");
    if (cap < max_lag)
        out.warnings.push_back("max_lag lowered from " + std::to_string(max_lag) + " to " +
                               std::to_string(cap) + " (" + std::to_string(n) + " observations)");
    out.max_lag_used = cap;
    double best = std::numeric_limits<double>::infinity();
    for (int p = 1; p <= cap; ++p) {
        const double aic = detail::fit_var_from(series, p, cap).aic;
        out.aic.push_back(aic);
        if (aic < best) {
            best = aic;
            out.lag = p;
        }
    }
    return out;
}

struct GrangerResult {
    std::string cause;
    std::string effect;
    int lag = 0;
    double f_stat = 0.0;
    int df_num = 0;
    int df_den = 0;
    PValue p_value;
    bool significant_at_05 = false;
    double ssr_restricted = 0.0;
    double ssr_unrestricted = 0.0;
    Eigen::VectorXd unrestricted_coeffs;  ///< [1, effect lags 1..p, cause lags 1..p]
};

/**
 * SSR-based F test of "past `cause` does not help predict `effect`".
 *
 * Restricted: effect on intercept and its own lags 1..lag.
 * Unrestricted: additionally the cause's lags 1..lag.
 * F = ((SSR_r − SSR_u) / lag) / (SSR_u / (n_eff − 2 lag − 1)).
 */
inline GrangerResult granger_test(const TimeSeries& cause, const TimeSeries& effect, int lag) {
    if (lag < 1) throw Error(ErrorKind::DomainError, "Granger lag must be >= 1");
    const TimeSeries pair[] = {cause, effect};
    detail::check_same_dates(pair);
    const auto n = static_cast<int>(effect.size());
    const int n_eff = n - lag;
    const int df_den = n_eff - 2 * lag - 1;
    if (n_eff < 1 || df_den < 1)
        throw Error(ErrorKind::SeriesTooShort,
                    "Granger test at lag " + std::to_string(lag) + " needs more than " +
                        std::to_string(3 * lag + 1) + " points, have " + std::to_string(n));
    Eigen::MatrixXd unrestricted(n_eff, 1 + 2 * lag);
    Eigen::VectorXd target(n_eff);
    for (int r = 0; r < n_eff; ++r) {
        const int t = lag + r;
        target(r) = effect[t];
        unrestricted(r, 0) = 1.0;
        for (int i = 1; i <= lag; ++i) {
            unrestricted(r, i) = effect[t - i];
            unrestricted(r, lag + i) = cause[t - i];
        }
    }
    const OlsResult full = ols(unrestricted, target);
    const OlsResult reduced = ols(unrestricted.leftCols(1 + lag), target);

    GrangerResult out;
    out.cause = cause.name();
    out.effect = effect.name();
    out.lag = lag;
    out.df_num = lag;
    out.df_den = df_den;
    out.ssr_restricted = reduced.ssr;
    out.ssr_unrestricted = full.ssr;
    out.unrestricted_coeffs = full.coeffs;
    if (!(full.ssr > 0.0))
        throw Error(ErrorKind::SingularDesign, "unrestricted Granger regression fits exactly");
    // Nested models: SSR_u <= SSR_r up to rounding.
    const double gain = std::max(0.0, reduced.ssr - full.ssr);
    out.f_stat = (gain / lag) / (full.ssr / df_den);
    out.p_value = PValue(f_upper_tail(out.f_stat, lag, df_den), PValueMethod::FUpperTail);
    out.significant_at_05 = out.p_value.value < 0.05;
    return out;
}

struct PearsonResult {
    double r = 0.0;
    PValue p_value;
    int n = 0;
};

/// Sample correlation with a two-sided t-test p-value on n − 2 df.
inline PearsonResult pearson(const TimeSeries& a, const TimeSeries& b) {
    if (a.size() != b.size() || !std::equal(a.dates().begin(), a.dates().end(), b.dates().begin()))
        throw Error(ErrorKind::LengthMismatch, a.name() + " and " + b.name() + " are not aligned");
    const auto n = static_cast<int>(a.size());
    if (n < 3) throw Error(ErrorKind::SeriesTooShort, "Pearson correlation needs n >= 3");
    double mean_a = 0.0, mean_b = 0.0;
    for (int i = 0; i < n; ++i) {
        mean_a += a[i];
        mean_b += b[i];
    }
    mean_a /= n;
    mean_b /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (int i = 0; i < n; ++i) {
        const double da = a[i] - mean_a;
        const double db = b[i] - mean_b;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (!(saa > 0.0) || !(sbb > 0.0))
        throw Error(ErrorKind::ZeroVariance, (saa > 0.0 ? b.name() : a.name()) + " is constant");
    PearsonResult out;
    out.n = n;
    out.r = std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
    // t² / (df + t²) = r², so the two-sided tail is I_{1-r²}(df/2, 1/2).
    const double df = n - 2;
    const double one_minus_r2 = std::max(0.0, 1.0 - out.r * out.r);
    out.p_value = PValue(reg_inc_beta(0.5 * df, 0.5, one_minus_r2), PValueMethod::TTwoSided);
    return out;
}

}  // namespace tc

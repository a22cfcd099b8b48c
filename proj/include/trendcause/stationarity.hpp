#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "trendcause/distributions.hpp"
#include "trendcause/ols.hpp"
#include "trendcause/series.hpp"

namespace tc {

struct AdfReport {
    double statistic = 0.0;  ///< t-ratio on the lagged level
    PValue p_value;
    int lags_used = 0;
    int n_obs = 0;  ///< observations in the final regression
    bool reject_unit_root_at_05 = false;
};

/// Schwert's default upper bound on augmentation lags: floor(12 (n/100)^(1/4)).
inline int schwert_max_lag(std::size_t n) {
    return static_cast<int>(std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
}

/// Minimum observations left in the ADF regression after lag consumption.
inline constexpr int adf_min_obs = 25;

namespace detail {

struct AdfFit {
    double statistic;
    double aic;
    int nobs;
};

// Δy_t = c + γ y_{t-1} + Σ_{i=1..lags} φ_i Δy_{t-i}, for t = first_t .. n-1
// (t indexes the level series y).
inline AdfFit adf_regression(std::span<const double> y, int lags, int first_t) {
    const auto n = static_cast<int>(y.size());
    const int rows = n - first_t;
    const int cols = 2 + lags;
    Eigen::MatrixXd design(rows, cols);
    Eigen::VectorXd target(rows);
    for (int r = 0; r < rows; ++r) {
        const int t = first_t + r;
        target(r) = y[t] - y[t - 1];
        design(r, 0) = 1.0;
        design(r, 1) = y[t - 1];
        for (int i = 1; i <= lags; ++i) design(r, 1 + i) = y[t - i] - y[t - i - 1];
    }
    const OlsResult fit = ols(design, target);
    const double nobs = rows;
    // Gaussian log-likelihood AIC; constants cancel when nobs is shared.
    const double aic = nobs * std::log(fit.ssr / nobs) + 2.0 * cols;
    return {fit.coeffs(1) / fit.std_errors(1), aic, rows};
}

}  // namespace detail

/**
 * Augmented Dickey-Fuller test, constant-only regression.
 *
 * The augmentation lag is chosen by AIC over 0..max_lag with every candidate
 * fitted on the same sample (the one left after max_lag + 1 values are
 * consumed); the chosen lag is then re-fitted on all available observations.
 * max_lag defaults to the Schwert bound.
 */
inline AdfReport adf_test(const TimeSeries& ts, std::optional<int> max_lag = std::nullopt) {
    const auto n = static_cast<int>(ts.size());
    const int bound = max_lag.value_or(schwert_max_lag(ts.size()));
    if (bound < 0) throw Error(ErrorKind::DomainError, "max_lag must be >= 0");
    if (n - bound - 1 < adf_min_obs)
        throw Error(ErrorKind::SeriesTooShort,
                    ts.name() + ": " + std::to_string(n) + " points leave fewer than " +
                        std::to_string(adf_min_obs) + " observations at max_lag " +
                        std::to_string(bound));
    const auto y = ts.values();

    int best_lag = 0;
    double best_aic = std::numeric_limits<double>::infinity();
    for (int lag = 0; lag <= bound; ++lag) {
        const auto fit = detail::adf_regression(y, lag, bound + 1);
        if (fit.aic < best_aic) {
            best_aic = fit.aic;
            best_lag = lag;
        }
    }
    const auto fit = detail::adf_regression(y, best_lag, best_lag + 1);
    AdfReport report;
    report.statistic = fit.statistic;
    report.p_value = adf_pvalue(fit.statistic, fit.nobs);
    report.lags_used = best_lag;
    report.n_obs = fit.nobs;
    report.reject_unit_root_at_05 = report.p_value.value < 0.05;
    return report;
}

struct StationarityResult {
    TimeSeries series;               ///< differenced series
    int order = 0;                   ///< differences applied
    bool still_nonstationary = false;
    std::vector<AdfReport> tests;    ///< one per order tested, in order
};

/**
 * Differences until the ADF test rejects a unit root at 5% or max_order is
 * reached. With forced_order set, exactly that order is applied and no test
 * is run. Failing to reach stationarity is flagged, not thrown.
 */
inline StationarityResult ensure_stationary(const TimeSeries& ts, int max_order = 2,
                                            std::optional<int> forced_order = std::nullopt) {
    StationarityResult out;
    if (forced_order) {
        out.series = difference(ts, *forced_order);
        out.order = *forced_order;
        return out;
    }
    if (max_order < 0) throw Error(ErrorKind::DomainError, "max_order must be >= 0");
    TimeSeries current = ts;
    for (int order = 0;; ++order) {
        const AdfReport report = adf_test(current);
        out.tests.push_back(report);
        if (report.reject_unit_root_at_05 || order == max_order) {
            out.series = std::move(current);
            out.order = order;
            out.still_nonstationary = !report.reject_unit_root_at_05;
            return out;
        }
        current = difference(current, 1);
    }
}

}  // namespace tc

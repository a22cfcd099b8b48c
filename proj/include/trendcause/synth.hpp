#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "trendcause/random.hpp"
#include "trendcause/series.hpp"
#include "trendcause/stationarity.hpp"

namespace tc::synth {

enum class Kind { RandomWalk, Ar1, CoupledPair, VarGeneral };

/// Discarded warm-up steps for the stationary kinds.
inline constexpr int burn_in = 100;

/**
 * Recipe for one synthetic draw.
 *
 * RandomWalk:  y_t = y_{t-1} + e_t, y_0 = e_0 (no burn-in).
 * Ar1:         y_t = phi y_{t-1} + e_t.
 * CoupledPair: x_t = phi x_{t-1} + e^x_t,
 *              y_t = phi y_{t-1} + beta x_{t-lag} + e^y_t   (returns {x, y}).
 * VarGeneral:  y_t = intercept + Σ var_coeffs[i] y_{t-1-i} + e_t.
 * Innovations are N(0, noise_sigma²) from tc::Rng; per step the draws are
 * taken in series order (x before y for the pair).
 */
struct SyntheticSpec {
    Kind kind = Kind::RandomWalk;
    int length = 200;
    double noise_sigma = 1.0;
    double phi = 0.0;
    double beta = 0.0;
    int lag = 1;
    std::vector<Eigen::MatrixXd> var_coeffs;
    Eigen::VectorXd var_intercept;  ///< optional; zero when empty
    bool require_stationary = true;
    std::uint64_t seed = 0;
    Date start = Date{std::chrono::year{2020} / 1 / 1};
    std::string region = "SYN";
};

namespace detail {

inline std::vector<Date> daily_dates(Date start, int length) {
    std::vector<Date> dates(static_cast<std::size_t>(length));
    for (int i = 0; i < length; ++i) dates[static_cast<std::size_t>(i)] = start + std::chrono::days{i};
    return dates;
}

inline TimeSeries make_series(const SyntheticSpec& spec, std::string name,
                              std::vector<double> values) {
    return TimeSeries(std::move(name), spec.region, daily_dates(spec.start, spec.length),
                      std::move(values));
}

}  // namespace detail

/// Largest eigenvalue modulus of the VAR companion matrix.
inline double companion_spectral_radius(const std::vector<Eigen::MatrixXd>& coeffs) {
    if (coeffs.empty()) return 0.0;
    const auto dims = coeffs[0].rows();
    const auto p = static_cast<Eigen::Index>(coeffs.size());
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(dims * p, dims * p);
    for (Eigen::Index i = 0; i < p; ++i)
        companion.block(0, i * dims, dims, dims) = coeffs[static_cast<std::size_t>(i)];
    if (p > 1) companion.block(dims, 0, dims * (p - 1), dims * (p - 1)).setIdentity();
    const Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

inline void validate(const SyntheticSpec& spec) {
    auto fail = [](const std::string& what) { throw Error(ErrorKind::InvalidSpec, what); };
    if (spec.length < 1) fail("length must be positive");
    if (!(spec.noise_sigma > 0.0) || !std::isfinite(spec.noise_sigma))
        fail("noise_sigma must be positive");
    switch (spec.kind) {
        case Kind::RandomWalk: break;
        case Kind::Ar1:
            if (spec.require_stationary && !(std::fabs(spec.phi) < 1.0))
                fail("AR(1) needs |phi| < 1 for a stationary draw");
            break;
        case Kind::CoupledPair:
            if (spec.lag < 1) fail("coupled pair lag must be >= 1");
            if (spec.require_stationary && !(std::fabs(spec.phi) < 1.0))
                fail("coupled pair needs |phi| < 1 for a stationary draw");
            break;
        case Kind::VarGeneral: {
            if (spec.var_coeffs.empty()) fail("VAR spec needs at least one coefficient matrix");
            const auto dims = spec.var_coeffs[0].rows();
            for (const auto& m : spec.var_coeffs)
                if (m.rows() != dims || m.cols() != dims) fail("VAR coefficient matrices must be K×K");
            if (spec.var_intercept.size() != 0 && spec.var_intercept.size() != dims)
                fail("VAR intercept length must equal K");
            if (spec.require_stationary && !(companion_spectral_radius(spec.var_coeffs) < 1.0))
                fail("VAR companion spectral radius must be < 1 for a stationary draw");
            break;
        }
    }
}

/// Deterministic draw for a fixed spec (bitwise within one build).
inline std::vector<TimeSeries> generate(const SyntheticSpec& spec) {
    validate(spec);
    Rng rng(spec.seed);
    const double sigma = spec.noise_sigma;
    const auto n = static_cast<std::size_t>(spec.length);
    switch (spec.kind) {
        case Kind::RandomWalk: {
            std::vector<double> y(n);
            double level = 0.0;
            for (std::size_t t = 0; t < n; ++t) {
                level += sigma * rng.normal();
                y[t] = level;
            }
            return {detail::make_series(spec, "random_walk", std::move(y))};
        }
        case Kind::Ar1: {
            std::vector<double> y(n);
            double prev = 0.0;
            for (int t = -burn_in; t < spec.length; ++t) {
                prev = spec.phi * prev + sigma * rng.normal();
                if (t >= 0) y[static_cast<std::size_t>(t)] = prev;
            }
            return {detail::make_series(spec, "ar1", std::move(y))};
        }
        case Kind::CoupledPair: {
            const int total = spec.length + burn_in;
            std::vector<double> x(static_cast<std::size_t>(total), 0.0);
            std::vector<double> y(static_cast<std::size_t>(total), 0.0);
            for (int t = 0; t < total; ++t) {
                const auto u = static_cast<std::size_t>(t);
                const double ex = sigma * rng.normal();
                const double ey = sigma * rng.normal();
                x[u] = (t > 0 ? spec.phi * x[u - 1] : 0.0) + ex;
                const double driven = t >= spec.lag ? spec.beta * x[u - static_cast<std::size_t>(spec.lag)] : 0.0;
                y[u] = (t > 0 ? spec.phi * y[u - 1] : 0.0) + driven + ey;
            }
            x.erase(x.begin(), x.begin() + burn_in);
            y.erase(y.begin(), y.begin() + burn_in);
            return {detail::make_series(spec, "x", std::move(x)),
                    detail::make_series(spec, "y", std::move(y))};
        }
        case Kind::VarGeneral: {
            const auto dims = spec.var_coeffs[0].rows();
            const auto p = static_cast<int>(spec.var_coeffs.size());
            const Eigen::VectorXd intercept =
                spec.var_intercept.size() == 0 ? Eigen::VectorXd::Zero(dims) : spec.var_intercept;
            const int skip = spec.require_stationary ? burn_in : 0;
            const int total = spec.length + skip;
            std::vector<Eigen::VectorXd> state(static_cast<std::size_t>(total), Eigen::VectorXd::Zero(dims));
            for (int t = 0; t < total; ++t) {
                Eigen::VectorXd next = intercept;
                for (int i = 1; i <= p && t - i >= 0; ++i)
                    next += spec.var_coeffs[static_cast<std::size_t>(i - 1)] * state[static_cast<std::size_t>(t - i)];
                for (Eigen::Index k = 0; k < dims; ++k) next(k) += sigma * rng.normal();
                state[static_cast<std::size_t>(t)] = std::move(next);
            }
            std::vector<TimeSeries> out;
            for (Eigen::Index k = 0; k < dims; ++k) {
                std::vector<double> values(n);
                for (std::size_t t = 0; t < n; ++t) values[t] = state[t + static_cast<std::size_t>(skip)](k);
                out.push_back(detail::make_series(spec, "y" + std::to_string(k + 1), std::move(values)));
            }
            return out;
        }
    }
    throw Error(ErrorKind::InvalidSpec, "unknown kind");
}

struct AdfQuantiles {
    double q01 = 0.0;
    double q05 = 0.0;
    double q10 = 0.0;
};

/**
 * Empirical 1/5/10% quantiles of the ADF statistic under the random-walk null.
 * Each replicate is a seeded RandomWalk of length n tested with a fixed
 * augmentation lag (`adf_lag`, default 0: the plain Dickey-Fuller regression).
 */
inline AdfQuantiles null_quantiles_adf(int n, int reps, std::uint64_t seed, int adf_lag = 0) {
    if (reps < 1000) throw Error(ErrorKind::InvalidSpec, "null_quantiles_adf needs reps >= 1000");
    if (n - adf_lag - 1 < adf_min_obs)
        throw Error(ErrorKind::InvalidSpec, "series too short for the ADF regression");
    std::vector<double> stats;
    stats.reserve(static_cast<std::size_t>(reps));
    for (int r = 0; r < reps; ++r) {
        SyntheticSpec spec;
        spec.kind = Kind::RandomWalk;
        spec.length = n;
        spec.seed = derive_seed(seed, static_cast<std::uint64_t>(r));
        const auto walk = generate(spec);
        stats.push_back(::tc::detail::adf_regression(walk[0].values(), adf_lag, adf_lag + 1).statistic);
    }
    std::sort(stats.begin(), stats.end());
    // Type-7 (linear interpolation) sample quantile.
    auto quantile = [&](double prob) {
        const double h = (static_cast<double>(stats.size()) - 1.0) * prob;
        const auto lo = static_cast<std::size_t>(std::floor(h));
        const auto hi = std::min(lo + 1, stats.size() - 1);
        return stats[lo] + (h - static_cast<double>(lo)) * (stats[hi] - stats[lo]);
    };
    return {quantile(0.01), quantile(0.05), quantile(0.10)};
}

}  // namespace tc::synth

namespace tc::synth {

/// A multi-region drill dataset in the shape the loaders produce.
struct RegionBundle {
    std::map<std::string, TimeSeries> cases;       ///< integer daily counts
    std::map<std::string, TimeSeries> restaurant;  ///< integer 0..100
    std::map<std::string, TimeSeries> bar;         ///< integer 0..100
};

namespace detail {

inline std::vector<double> scale_to_int_range(std::span<const double> v, double lo, double hi) {
    const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out[i] = std::round(lo + (hi - lo) * (v[i] - *mn) / (*mx - *mn));
    return out;
}

}  // namespace detail

/**
 * Synthetic multi-region bundle for end-to-end runs.
 *
 * Region k (codes taken in order from `codes`) draws a CoupledPair (phi 0.5,
 * sigma 1, lag `lag`) where the restaurant driver x feeds cases y with weight
 * `beta` on even k and 0 on odd k; the bar series is an independent AR(1)
 * (phi 0.5). Search series are rescaled to integers in [0, 100]; cases are
 * rescaled to integers in [base, base + span] with a region-specific
 * magnitude, so regions rank distinctly by volume.
 */
inline RegionBundle region_bundle(const std::vector<std::string>& codes, int regions, int length,
                                  std::uint64_t seed, Date start, double beta = 0.8, int lag = 2) {
    if (regions < 1 || regions > static_cast<int>(codes.size()))
        throw Error(ErrorKind::InvalidSpec, "region count must be in [1, " + std::to_string(codes.size()) + "]");
    RegionBundle out;
    for (int k = 0; k < regions; ++k) {
        const std::string& code = codes[static_cast<std::size_t>(k)];
        SyntheticSpec pair;
        pair.kind = Kind::CoupledPair;
        pair.length = length;
        pair.phi = 0.5;
        pair.beta = k % 2 == 0 ? beta : 0.0;
        pair.lag = lag;
        pair.seed = derive_seed(seed, static_cast<std::uint64_t>(2 * k));
        pair.start = start;
        pair.region = code;
        const auto xy = generate(pair);

        SyntheticSpec other;
        other.kind = Kind::Ar1;
        other.length = length;
        other.phi = 0.5;
        other.seed = derive_seed(seed, static_cast<std::uint64_t>(2 * k + 1));
        other.start = start;
        other.region = code;
        const auto bar = generate(other);

        const double base = 5.0 * (k + 1);
        const double span = 40.0 + 25.0 * k;
        out.restaurant.emplace(code, TimeSeries("restaurant_search", code, {xy[0].dates().begin(), xy[0].dates().end()},
                                                detail::scale_to_int_range(xy[0].values(), 0.0, 100.0)));
        out.bar.emplace(code, TimeSeries("bar_search", code, {bar[0].dates().begin(), bar[0].dates().end()},
                                         detail::scale_to_int_range(bar[0].values(), 0.0, 100.0)));
        out.cases.emplace(code, TimeSeries("new_cases", code, {xy[1].dates().begin(), xy[1].dates().end()},
                                           detail::scale_to_int_range(xy[1].values(), base, base + span)));
    }
    return out;
}

}  // namespace tc::synth

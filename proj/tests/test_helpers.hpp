#pragma once

#include <chrono>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "trendcause/lstm.hpp"
#include "trendcause/random.hpp"
#include "trendcause/series.hpp"

namespace tc::fixtures {

inline Date day(int offset) { return Date{std::chrono::year{2020} / 4 / 9} + std::chrono::days{offset}; }

inline TimeSeries series(std::vector<double> values, int first_day = 0, std::string name = "s",
                         std::string region = "CA") {
    std::vector<Date> dates;
    for (std::size_t i = 0; i < values.size(); ++i) dates.push_back(day(first_day + static_cast<int>(i)));
    return TimeSeries(std::move(name), std::move(region), std::move(dates), std::move(values));
}

inline std::vector<double> as_vector(const TimeSeries& ts) { return {ts.values().begin(), ts.values().end()}; }

/// Sine with a 30-day period, rescaled to 0..100, as a cases-only dataset.
inline RegionDataset sine_dataset(int n = 300) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(std::sin(2.0 * std::numbers::pi * i / 30.0));
    return RegionDataset{"SINE", normalize_0_100(series(v, 0, "cases", "SINE")), std::nullopt, std::nullopt,
                         std::nullopt};
}

/// Small fixed network and input for gradient checks.
struct GradientFixture {
    lstm::LstmNetwork net;
    Eigen::MatrixXd sample;
    double target = 60.0;
};

inline GradientFixture gradient_fixture() {
    lstm::NetworkConfig cfg;
    cfg.hidden = {4, 4, 4};
    cfg.window = 5;
    cfg.features = 2;
    cfg.seed = 7;
    cfg.dropout = 0.0;
    GradientFixture f{lstm::init_network(cfg), Eigen::MatrixXd(5, 2)};
    Rng rng(1);
    for (Eigen::Index i = 0; i < f.sample.size(); ++i) f.sample.data()[i] = rng.uniform(0.0, 100.0);
    return f;
}

}  // namespace tc::fixtures

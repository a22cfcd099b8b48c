#pragma once

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "json.hpp"
#include "trendcause/causal.hpp"
#include "trendcause/config.hpp"
#include "trendcause/ingest.hpp"
#include "trendcause/io.hpp"
#include "trendcause/lstm.hpp"
#include "trendcause/series.hpp"
#include "trendcause/stationarity.hpp"

namespace tc::report {

// ---------------------------------------------------------------------------
// Rendering

/// Six significant digits, "%.6g".
inline std::string sig6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

/// The value a sig6 cell parses back to; report.json stores exactly this.
inline double round6(double v) { return std::strtod(sig6(v).c_str(), nullptr); }

/// P-values below 0.001 render as "<0.001".
inline std::string render_p(double p) { return p < 0.001 ? "<0.001" : sig6(p); }

inline const std::map<std::string, std::string>& region_names() {
    static const std::map<std::string, std::string> names = {
        {"AK", "Alaska"}, {"AL", "Alabama"}, {"AR", "Arkansas"}, {"AS", "American Samoa"},
        {"AZ", "Arizona"}, {"CA", "California"}, {"CO", "Colorado"}, {"CT", "Connecticut"},
        {"DC", "District of Columbia"}, {"DE", "Delaware"}, {"FL", "Florida"}, {"GA", "Georgia"},
        {"GU", "Guam"}, {"HI", "Hawaii"}, {"IA", "Iowa"}, {"ID", "Idaho"}, {"IL", "Illinois"},
        {"IN", "Indiana"}, {"KS", "Kansas"}, {"KY", "Kentucky"}, {"LA", "Louisiana"},
        {"MA", "Massachusetts"}, {"MD", "Maryland"}, {"ME", "Maine"}, {"MI", "Michigan"},
        {"MN", "Minnesota"}, {"MO", "Missouri"}, {"MP", "Northern Mariana Islands"},
        {"MS", "Mississippi"}, {"MT", "Montana"}, {"NC", "North Carolina"}, {"ND", "North Dakota"},
        {"NE", "Nebraska"}, {"NH", "New Hampshire"}, {"NJ", "New Jersey"}, {"NM", "New Mexico"},
        {"NV", "Nevada"}, {"NY", "New York"}, {"OH", "Ohio"}, {"OK", "Oklahoma"}, {"OR", "Oregon"},
        {"PA", "Pennsylvania"}, {"PR", "Puerto Rico"}, {"RI", "Rhode Island"},
        {"SC", "South Carolina"}, {"SD", "South Dakota"}, {"TN", "Tennessee"}, {"TX", "Texas"},
        {"UT", "Utah"}, {"VA", "Virginia"}, {"VI", "Virgin Islands"}, {"VT", "Vermont"},
        {"WA", "Washington"}, {"WI", "Wisconsin"}, {"WV", "West Virginia"}, {"WY", "Wyoming"}};
    return names;
}

inline std::string region_name(const std::string& code) {
    const auto it = region_names().find(code);
    return it == region_names().end() ? code : it->second;
}

// ---------------------------------------------------------------------------
// Parallel map

/// Applies fn to every index in [0, count) across hardware threads. Results
/// keep index order; the first exception (by index) is rethrown.
template <class Result>
std::vector<Result> parallel_map(std::size_t count, const std::function<Result(std::size_t)>& fn) {
    std::vector<std::optional<Result>> slots(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                slots[i].emplace(fn(i));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t threads =
        std::min<std::size_t>(count, std::max(1u, std::thread::hardware_concurrency()));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    std::vector<Result> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        if (errors[i]) std::rethrow_exception(errors[i]);
        out.push_back(std::move(*slots[i]));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Inputs

struct Inputs {
    std::string cases_path;
    std::optional<std::string> restaurant_path;
    std::optional<std::string> bar_path;
};

struct LoadedInputs {
    std::vector<RegionDataset> datasets;
    std::vector<std::string> warnings;
};

inline LoadedInputs load_inputs(const Inputs& inputs, const Config& config) {
    ingest::LoadOptions options;
    options.window_start = config.window_start;
    options.window_end = config.window_end;
    LoadedInputs out;
    auto keep = [&](const std::vector<ingest::Warning>& ws) {
        for (const auto& w : ws) out.warnings.push_back(w.to_string());
    };
    const auto cases = ingest::load_cases_csv(inputs.cases_path, options);
    keep(cases.warnings);
    std::optional<ingest::LoadResult> restaurant;
    std::optional<ingest::LoadResult> bar;
    if (inputs.restaurant_path) {
        restaurant = ingest::load_trends_csv(*inputs.restaurant_path, ingest::Query::Restaurant, options);
        keep(restaurant->warnings);
    }
    if (inputs.bar_path) {
        bar = ingest::load_trends_csv(*inputs.bar_path, ingest::Query::Bar, options);
        keep(bar->warnings);
    }
    auto built = ingest::build_datasets(cases.series, restaurant ? &restaurant->series : nullptr,
                                        bar ? &bar->series : nullptr);
    keep(built.warnings);
    out.datasets = std::move(built.datasets);
    return out;
}

// ---------------------------------------------------------------------------
// Grouping

/// Ranking key: trailing 7-day mean of raw daily counts on the final date.
inline double final_date_volume(const RegionDataset& ds) {
    const TimeSeries& raw = ds.cases_raw ? *ds.cases_raw : ds.cases;
    const int window = static_cast<int>(std::min<std::size_t>(7, raw.size()));
    const auto ma = moving_average(raw, window);
    return ma[ma.size() - 1];
}

struct Groups {
    std::vector<std::string> highest;  ///< descending volume
    std::vector<std::string> lowest;   ///< the `size` smallest, listed in descending volume
};

inline Groups paper_groups(const std::vector<std::pair<std::string, double>>& volumes, std::size_t size = 10) {
    auto sorted = volumes;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    Groups g;
    const std::size_t take = std::min(size, sorted.size());
    for (std::size_t i = 0; i < take; ++i) g.highest.push_back(sorted[i].first);
    for (std::size_t i = sorted.size() - take; i < sorted.size(); ++i) g.lowest.push_back(sorted[i].first);
    return g;
}

// ---------------------------------------------------------------------------
// Analysis

struct PairAnalysis {
    LagSelection selection;
    GrangerResult search_to_cases;
    GrangerResult cases_to_search;
    PearsonResult pearson;
};

struct RegionAnalysis {
    std::string region;
    double volume = 0.0;
    PairAnalysis restaurant;
    PairAnalysis bar;
    std::map<std::string, AdfReport> adf;  ///< on the differenced series
    std::vector<std::string> warnings;
};

namespace detail {

inline void note_adf(RegionAnalysis& out, const std::string& label, const TimeSeries& ts, int order) {
    try {
        const AdfReport r = adf_test(ts);
        out.adf.emplace(label, r);
        if (!r.reject_unit_root_at_05)
            out.warnings.push_back(label + " still non-stationary after differencing order " +
                                   std::to_string(order) + " (ADF p=" + sig6(r.p_value.value) + ")");
    } catch (const Error& e) {
        out.warnings.push_back(label + ": ADF not run: " + e.what());
    }
}

inline PairAnalysis analyze_pair(const TimeSeries& search_diff, const TimeSeries& cases_diff,
                                 const TimeSeries& search_level, const TimeSeries& cases_level,
                                 const Config& config, std::vector<std::string>& warnings) {
    const auto [s, c] = align_pair(search_diff, cases_diff);
    const TimeSeries pair[] = {s, c};
    PairAnalysis out;
    out.selection = select_lag(pair, config.max_lag);
    for (const auto& w : out.selection.warnings) warnings.push_back(s.name() + "/" + c.name() + ": " + w);
    out.search_to_cases = granger_test(s, c, out.selection.lag);
    out.cases_to_search = granger_test(c, s, out.selection.lag);
    out.pearson = pearson(search_level, cases_level);
    return out;
}

}  // namespace detail

/**
 * Per-region analysis: fixed differencing (search and cases orders from the
 * config), AIC lag selection on each differenced (search, cases) pair,
 * Granger tests in both directions at that lag, and Pearson correlation of
 * the undifferenced, normalized series.
 */
inline RegionAnalysis analyze_region(const RegionDataset& ds, const Config& config) {
    if (!ds.restaurant || !ds.bar)
        throw Error(ErrorKind::ShapeMismatch, ds.region + ": analysis needs both search series");
    RegionAnalysis out;
    out.region = ds.region;
    out.volume = final_date_volume(ds);
    const TimeSeries cases = ds.cases.renamed("new_cases");
    const TimeSeries restaurant = ds.restaurant->renamed("restaurant_search");
    const TimeSeries bar = ds.bar->renamed("bar_search");
    const auto cases_d = ensure_stationary(cases, config.diff_order_cases, config.diff_order_cases).series;
    const auto rest_d = ensure_stationary(restaurant, config.diff_order_search, config.diff_order_search).series;
    const auto bar_d = ensure_stationary(bar, config.diff_order_search, config.diff_order_search).series;
    detail::note_adf(out, "new_cases", cases_d, config.diff_order_cases);
    detail::note_adf(out, "restaurant_search", rest_d, config.diff_order_search);
    detail::note_adf(out, "bar_search", bar_d, config.diff_order_search);
    out.restaurant = detail::analyze_pair(rest_d, cases_d, restaurant, cases, config, out.warnings);
    out.bar = detail::analyze_pair(bar_d, cases_d, bar, cases, config, out.warnings);
    return out;
}

struct AnalyzeOutcome {
    std::vector<RegionAnalysis> regions;
    std::vector<std::string> warnings;
    std::vector<std::string> written;
};

namespace detail {

inline nlohmann::json granger_json(const GrangerResult& g) {
    return {{"cause", g.cause},
            {"effect", g.effect},
            {"lag", g.lag},
            {"f_stat", round6(g.f_stat)},
            {"df_num", g.df_num},
            {"df_den", g.df_den},
            {"p_value", round6(g.p_value.value)},
            {"p_display", render_p(g.p_value.value)},
            {"method", std::string(to_string(g.p_value.method))},
            {"significant_at_05", g.significant_at_05}};
}

inline nlohmann::json pearson_json(const PearsonResult& p) {
    return {{"r", round6(p.r)},
            {"p_value", round6(p.p_value.value)},
            {"p_display", render_p(p.p_value.value)},
            {"n", p.n}};
}

inline std::string csv_join(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) line += ',';
        line += cells[i];
    }
    return line + "\n";
}

inline const RegionAnalysis* find_region(const std::vector<RegionAnalysis>& all, const std::string& code) {
    for (const auto& r : all)
        if (r.region == code) return &r;
    return nullptr;
}

inline nlohmann::json metadata(const Config& config) {
    return {{"adf_regression", "constant"},
            {"adf_pvalue", "MacKinnon (1994) response surface"},
            {"granger_statistic", "SSR F-test"},
            {"lag_selection", "AIC, common sample, smallest lag on ties"},
            {"differencing_note",
             "search and cases series are differenced to different orders before the joint Granger test"},
            {"ranking", "7-day trailing mean of raw daily new cases on the final date"},
            {"trends_fetch_date", config.trends_fetch_date}};
}

}  // namespace detail

/// Grouped Granger table: one column per region, one row per directed test.
inline std::string granger_group_csv(const std::vector<RegionAnalysis>& all, const std::vector<std::string>& codes) {
    std::vector<std::string> header{"causing -> caused"}, rest{"Restaurant search -> new cases"},
        bar{"Bar search -> new cases"};
    for (const auto& code : codes) {
        const auto* r = detail::find_region(all, code);
        header.push_back(region_name(code));
        rest.push_back(render_p(r->restaurant.search_to_cases.p_value.value));
        bar.push_back(render_p(r->bar.search_to_cases.p_value.value));
    }
    return detail::csv_join(header) + detail::csv_join(rest) + detail::csv_join(bar);
}

/// Grouped Pearson table; cells are "r [p]".
inline std::string pearson_group_csv(const std::vector<RegionAnalysis>& all, const std::vector<std::string>& codes) {
    std::vector<std::string> header{"Correlation (r [P-value])"}, rest{"Restaurant vs. New cases"},
        bar{"Bar vs. New cases"};
    auto cell = [](const PearsonResult& p) { return sig6(p.r) + " [" + render_p(p.p_value.value) + "]"; };
    for (const auto& code : codes) {
        const auto* r = detail::find_region(all, code);
        header.push_back(region_name(code));
        rest.push_back(cell(r->restaurant.pearson));
        bar.push_back(cell(r->bar.pearson));
    }
    return detail::csv_join(header) + detail::csv_join(rest) + detail::csv_join(bar);
}

/**
 * Full causality run. Writes granger.csv, pearson.csv, report.json and, for
 * group "paper", granger_{high,low}.csv and pearson_{high,low}.csv.
 * Regions whose statistics fail numerically are skipped with a warning; if
 * every region fails, the first failure is rethrown.
 */
inline AnalyzeOutcome run_analyze(const Inputs& inputs, const Config& config, const std::filesystem::path& out_dir) {
    if (!inputs.restaurant_path || !inputs.bar_path)
        throw Error(ErrorKind::ParseError, "analyze needs both --trends-restaurant and --trends-bar");
    auto loaded = load_inputs(inputs, config);
    AnalyzeOutcome out;
    out.warnings = std::move(loaded.warnings);

    struct Attempt {
        std::optional<RegionAnalysis> result;
        std::optional<Error> error;
    };
    const auto attempts = parallel_map<Attempt>(loaded.datasets.size(), [&](std::size_t i) {
        try {
            return Attempt{analyze_region(loaded.datasets[i], config), std::nullopt};
        } catch (const Error& e) {
            return Attempt{std::nullopt, e};
        }
    });
    std::optional<Error> first_error;
    for (std::size_t i = 0; i < attempts.size(); ++i) {
        if (attempts[i].result) {
            out.regions.push_back(*attempts[i].result);
        } else {
            out.warnings.push_back("region " + loaded.datasets[i].region + " skipped: " + attempts[i].error->what());
            if (!first_error) first_error = attempts[i].error;
        }
    }
    if (out.regions.empty()) throw *first_error;

    std::string granger = "region,lag_restaurant,lag_bar,restaurant->cases,bar->cases,cases->restaurant,cases->bar\n";
    std::string pearson_csv = "region,n,r_restaurant,p_restaurant,r_bar,p_bar\n";
    nlohmann::json regions = nlohmann::json::array();
    std::vector<std::pair<std::string, double>> volumes;
    for (const auto& r : out.regions) {
        granger += detail::csv_join({r.region, std::to_string(r.restaurant.selection.lag),
                                     std::to_string(r.bar.selection.lag),
                                     render_p(r.restaurant.search_to_cases.p_value.value),
                                     render_p(r.bar.search_to_cases.p_value.value),
                                     render_p(r.restaurant.cases_to_search.p_value.value),
                                     render_p(r.bar.cases_to_search.p_value.value)});
        pearson_csv += detail::csv_join({r.region, std::to_string(r.restaurant.pearson.n), sig6(r.restaurant.pearson.r),
                                         render_p(r.restaurant.pearson.p_value.value), sig6(r.bar.pearson.r),
                                         render_p(r.bar.pearson.p_value.value)});
        nlohmann::json adf = nlohmann::json::object();
        for (const auto& [label, rep] : r.adf)
            adf[label] = {{"statistic", round6(rep.statistic)},
                          {"p_value", round6(rep.p_value.value)},
                          {"lags_used", rep.lags_used},
                          {"n_obs", rep.n_obs},
                          {"reject_unit_root_at_05", rep.reject_unit_root_at_05}};
        auto pair_json = [](const PairAnalysis& p) {
            return nlohmann::json{{"lag", p.selection.lag},
                                  {"max_lag_used", p.selection.max_lag_used},
                                  {"search_to_cases", detail::granger_json(p.search_to_cases)},
                                  {"cases_to_search", detail::granger_json(p.cases_to_search)},
                                  {"pearson", detail::pearson_json(p.pearson)}};
        };
        regions.push_back({{"region", r.region},
                           {"name", region_name(r.region)},
                           {"final_date_volume", round6(r.volume)},
                           {"restaurant", pair_json(r.restaurant)},
                           {"bar", pair_json(r.bar)},
                           {"adf", adf},
                           {"warnings", r.warnings}});
        volumes.emplace_back(r.region, r.volume);
    }

    nlohmann::json report;
    report["config"] = config.to_json();
    report["metadata"] = detail::metadata(config);
    report["regions"] = regions;
    report["warnings"] = out.warnings;

    std::vector<std::pair<std::string, std::string>> files{{"granger.csv", granger}, {"pearson.csv", pearson_csv}};
    if (config.group == "paper") {
        const Groups g = paper_groups(volumes);
        report["groups"] = {{"highest", g.highest}, {"lowest", g.lowest}};
        files.emplace_back("granger_high.csv", granger_group_csv(out.regions, g.highest));
        files.emplace_back("granger_low.csv", granger_group_csv(out.regions, g.lowest));
        files.emplace_back("pearson_high.csv", pearson_group_csv(out.regions, g.highest));
        files.emplace_back("pearson_low.csv", pearson_group_csv(out.regions, g.lowest));
    }
    files.emplace_back("report.json", report.dump(2) + "\n");
    for (const auto& [name, content] : files) {
        io::write_file_atomic(out_dir / name, content);
        out.written.push_back(name);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Forecasting

struct RegionForecast {
    std::string region;
    double volume = 0.0;
    std::map<lstm::FeatureSet, lstm::ForecastEvaluation> evaluations;
    std::map<lstm::FeatureSet, std::vector<double>> losses;
    std::optional<std::string> skipped;  ///< reason, when the region was not forecast
};

inline lstm::NetworkConfig network_config(const Config& config, int features) {
    lstm::NetworkConfig nc;
    nc.hidden = config.lstm_hidden;
    nc.window = config.lstm_window;
    nc.features = features;
    nc.dropout = config.lstm_dropout;
    nc.seed = config.seed;
    return nc;
}

/// Trains and evaluates one model for one feature set of one region.
inline std::pair<lstm::ForecastEvaluation, std::vector<double>> forecast_one(const RegionDataset& ds,
                                                                             lstm::FeatureSet fs,
                                                                             const Config& config) {
    const auto set = lstm::make_windows(ds, config.lstm_window, fs);
    const auto [train_set, test_set] = lstm::split_70_30(set);
    lstm::TrainOptions options;
    options.epochs = config.lstm_epochs;
    options.learning_rate = config.lstm_learning_rate;
    auto trained = lstm::train(lstm::init_network(network_config(config, lstm::feature_count(fs))), train_set, options);
    auto eval = lstm::evaluate(trained.network, test_set, static_cast<int>(train_set.size()));
    return {std::move(eval), std::move(trained.losses)};
}

struct ForecastOutcome {
    std::vector<RegionForecast> regions;
    std::vector<std::string> warnings;
    std::vector<std::string> written;
};

inline std::string rmse_group_csv(const std::vector<RegionForecast>& all, const std::vector<std::string>& codes) {
    std::vector<std::string> header{"Model"}, base{"Baseline"}, rest{"Baseline + Restaurants"}, bar{"Baseline + Bars"};
    auto cell = [](const RegionForecast& r, lstm::FeatureSet fs) {
        const auto it = r.evaluations.find(fs);
        return it == r.evaluations.end() ? std::string() : sig6(it->second.rmse);
    };
    for (const auto& code : codes) {
        const auto it = std::find_if(all.begin(), all.end(), [&](const auto& r) { return r.region == code; });
        header.push_back(region_name(code));
        base.push_back(cell(*it, lstm::FeatureSet::CasesOnly));
        rest.push_back(cell(*it, lstm::FeatureSet::CasesPlusRestaurant));
        bar.push_back(cell(*it, lstm::FeatureSet::CasesPlusBar));
    }
    return detail::csv_join(header) + detail::csv_join(base) + detail::csv_join(rest) + detail::csv_join(bar);
}

/**
 * Trains baseline, +restaurant and +bar models per region (a search model only
 * when its file was supplied). Writes rmse.csv, forecast.json, one
 * predictions_<region>_<featureset>.csv per model and, for group "paper",
 * rmse_{high,low}.csv. Regions with fewer than min_samples windows are listed
 * with a note instead of RMSE values.
 */
inline ForecastOutcome run_forecast(const Inputs& inputs, const Config& config, const std::filesystem::path& out_dir) {
    auto loaded = load_inputs(inputs, config);
    ForecastOutcome out;
    out.warnings = std::move(loaded.warnings);
    std::vector<lstm::FeatureSet> sets{lstm::FeatureSet::CasesOnly};
    if (inputs.restaurant_path) sets.push_back(lstm::FeatureSet::CasesPlusRestaurant);
    if (inputs.bar_path) sets.push_back(lstm::FeatureSet::CasesPlusBar);

    struct Job {
        std::size_t region;
        lstm::FeatureSet fs;
    };
    out.regions.resize(loaded.datasets.size());
    std::vector<Job> jobs;
    for (std::size_t i = 0; i < loaded.datasets.size(); ++i) {
        const auto& ds = loaded.datasets[i];
        auto& rf = out.regions[i];
        rf.region = ds.region;
        rf.volume = final_date_volume(ds);
        const auto samples = ds.size() > static_cast<std::size_t>(config.lstm_window)
                                 ? ds.size() - static_cast<std::size_t>(config.lstm_window)
                                 : 0;
        if (samples < static_cast<std::size_t>(config.min_samples)) {
            rf.skipped = std::to_string(samples) + " samples < min_samples " + std::to_string(config.min_samples);
            out.warnings.push_back("region " + ds.region + " skipped: " + *rf.skipped);
            continue;
        }
        for (auto fs : sets) jobs.push_back({i, fs});
    }
    const auto results = parallel_map<std::pair<lstm::ForecastEvaluation, std::vector<double>>>(
        jobs.size(), [&](std::size_t j) { return forecast_one(loaded.datasets[jobs[j].region], jobs[j].fs, config); });
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        auto& rf = out.regions[jobs[j].region];
        rf.evaluations.emplace(jobs[j].fs, results[j].first);
        rf.losses.emplace(jobs[j].fs, results[j].second);
    }

    std::vector<std::pair<std::string, std::string>> files;
    std::string rmse_csv = "region,baseline,baseline_restaurants,baseline_bars,note\n";
    nlohmann::json regions = nlohmann::json::array();
    std::vector<std::pair<std::string, double>> volumes;
    for (const auto& rf : out.regions) {
        std::vector<std::string> row{rf.region};
        nlohmann::json models = nlohmann::json::object();
        for (auto fs : {lstm::FeatureSet::CasesOnly, lstm::FeatureSet::CasesPlusRestaurant, lstm::FeatureSet::CasesPlusBar}) {
            const auto it = rf.evaluations.find(fs);
            if (it == rf.evaluations.end()) {
                row.emplace_back();
                continue;
            }
            const auto& ev = it->second;
            row.push_back(sig6(ev.rmse));
            std::string trace = "date,actual,predicted\n";
            nlohmann::json preds = nlohmann::json::array();
            for (Eigen::Index k = 0; k < ev.predictions.size(); ++k) {
                trace += format_date(ev.dates[static_cast<std::size_t>(k)]) + "," + sig6(ev.actuals(k)) + "," +
                         sig6(ev.predictions(k)) + "\n";
            }
            const auto& losses = rf.losses.at(fs);
            models[std::string(lstm::to_string(fs))] = {
                {"rmse", round6(ev.rmse)},
                {"n_test", ev.n_test},
                {"split_index", ev.split_index},
                {"first_epoch_loss", losses.empty() ? 0.0 : round6(losses.front())},
                {"final_epoch_loss", losses.empty() ? 0.0 : round6(losses.back())},
                {"trace", "predictions_" + rf.region + "_" + std::string(lstm::to_string(fs)) + ".csv"}};
            files.emplace_back("predictions_" + rf.region + "_" + std::string(lstm::to_string(fs)) + ".csv", trace);
        }
        row.push_back(rf.skipped ? "skipped: " + *rf.skipped : "");
        rmse_csv += detail::csv_join(row);
        regions.push_back({{"region", rf.region},
                           {"name", region_name(rf.region)},
                           {"final_date_volume", round6(rf.volume)},
                           {"models", models},
                           {"skipped", rf.skipped ? nlohmann::json(*rf.skipped) : nlohmann::json()}});
        if (!rf.skipped) volumes.emplace_back(rf.region, rf.volume);
    }
    files.emplace_back("rmse.csv", rmse_csv);
    nlohmann::json report;
    report["config"] = config.to_json();
    report["metadata"] = {{"scale", "RMSE on the 0-100 normalized cases scale"},
                          {"split", "chronological 70/30"},
                          {"ranking", "7-day trailing mean of raw daily new cases on the final date"},
                          {"trends_fetch_date", config.trends_fetch_date}};
    report["regions"] = regions;
    report["warnings"] = out.warnings;
    if (config.group == "paper" && !volumes.empty()) {
        const Groups g = paper_groups(volumes);
        report["groups"] = {{"highest", g.highest}, {"lowest", g.lowest}};
        files.emplace_back("rmse_high.csv", rmse_group_csv(out.regions, g.highest));
        files.emplace_back("rmse_low.csv", rmse_group_csv(out.regions, g.lowest));
    }
    files.emplace_back("forecast.json", report.dump(2) + "\n");
    for (const auto& [name, content] : files) {
        io::write_file_atomic(out_dir / name, content);
        out.written.push_back(name);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Plot data

struct PlotOutcome {
    std::vector<std::string> warnings;
    std::vector<std::string> written;
};

/// Trailing moving averages of the three normalized series, one row per date.
inline std::string plot_csv(const RegionDataset& ds, int window) {
    const auto cases = moving_average(ds.cases, window);
    std::optional<TimeSeries> rest, bar;
    if (ds.restaurant) rest = moving_average(*ds.restaurant, window);
    if (ds.bar) bar = moving_average(*ds.bar, window);
    std::string out = "date,cases_ma,restaurant_ma,bar_ma\n";
    for (std::size_t i = 0; i < cases.size(); ++i) {
        out += format_date(cases.dates()[i]) + "," + sig6(cases[i]) + "," + (rest ? sig6((*rest)[i]) : "") + "," +
               (bar ? sig6((*bar)[i]) : "") + "\n";
    }
    return out;
}

inline PlotOutcome run_plotdata(const Inputs& inputs, const Config& config, const std::filesystem::path& out_dir) {
    auto loaded = load_inputs(inputs, config);
    PlotOutcome out;
    out.warnings = std::move(loaded.warnings);
    for (const auto& ds : loaded.datasets) {
        if (ds.size() < static_cast<std::size_t>(config.ma_window)) {
            out.warnings.push_back("region " + ds.region + " shorter than the moving-average window; skipped");
            continue;
        }
        const std::string name = "plot_" + ds.region + ".csv";
        io::write_file_atomic(out_dir / name, plot_csv(ds, config.ma_window));
        out.written.push_back(name);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Exit codes

/// 2: input/parse problems, 3: nothing left after alignment, 4: numerical failure.
inline int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::ParseError:
        case ErrorKind::ValueOutOfRange:
        case ErrorKind::UnknownRegion:
        case ErrorKind::InvalidConfig:
        case ErrorKind::DuplicateDate:
        case ErrorKind::IoError:
        case ErrorKind::InvalidSpec:
            return 2;
        case ErrorKind::EmptyIntersection:
            return 3;
        default:
            return 4;
    }
}

}  // namespace tc::report

#pragma once

#include <charconv>
#include <chrono>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "trendcause/error.hpp"
#include "trendcause/io.hpp"
#include "trendcause/series.hpp"

namespace tc {

/**
 * Resolved run configuration.
 *
 * File format: one `key = value` per line; `#` starts a comment; blank lines
 * are ignored. Unknown keys are an error. Command-line flags are applied after
 * the file, so flags win.
 *
 *   window_start, window_end   analysis window (YYYY-MM-DD)
 *   diff_order_search          differencing applied to search series
 *   diff_order_cases           differencing applied to the cases series
 *   max_lag                    cap for VAR lag selection
 *   ma_window                  trailing moving-average window for plot data
 *   group                      "all" or "paper" (top/bottom-10 tables)
 *   seed                       LSTM initialization and dropout seed
 *   lstm_hidden                comma-separated hidden sizes, bottom layer first
 *   lstm_window, lstm_dropout, lstm_learning_rate, lstm_epochs
 *   min_samples                windowed samples a region needs to be forecast
 *   trends_fetch_date          provenance note echoed into reports
 */
struct Config {
    Date window_start = Date{std::chrono::year{2020} / 4 / 9};
    Date window_end = Date{std::chrono::year{2020} / 7 / 7};
    int diff_order_search = 1;
    int diff_order_cases = 2;
    int max_lag = 14;
    int ma_window = 7;
    std::string group = "all";
    std::uint64_t seed = 42;
    std::vector<int> lstm_hidden = {32, 32, 32};
    int lstm_window = 7;
    double lstm_dropout = 0.2;
    double lstm_learning_rate = 1e-2;
    int lstm_epochs = 150;
    int min_samples = 20;
    std::string trends_fetch_date = "unknown";

    /// Applies one key/value pair; throws InvalidConfig on bad keys or values.
    void set(std::string_view key, std::string_view value) {
        const std::string k(key);
        auto bad = [&](const std::string& why) -> Error {
            return Error(ErrorKind::InvalidConfig, "'" + k + "' = '" + std::string(value) + "': " + why);
        };
        auto as_int = [&](int lo) {
            int v = 0;
            auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
            if (ec != std::errc() || ptr != value.data() + value.size()) throw bad("not an integer");
            if (v < lo) throw bad("must be >= " + std::to_string(lo));
            return v;
        };
        auto as_double = [&] {
            try {
                std::size_t used = 0;
                const double v = std::stod(std::string(value), &used);
                if (used != value.size()) throw bad("not a number");
                return v;
            } catch (const std::logic_error&) {
                throw bad("not a number");
            }
        };
        auto as_date = [&] {
            const auto d = try_parse_date(value);
            if (!d) throw bad("not a YYYY-MM-DD date");
            return *d;
        };
        if (k == "window_start") window_start = as_date();
        else if (k == "window_end") window_end = as_date();
        else if (k == "diff_order_search") diff_order_search = as_int(0);
        else if (k == "diff_order_cases") diff_order_cases = as_int(0);
        else if (k == "max_lag") max_lag = as_int(1);
        else if (k == "ma_window") ma_window = as_int(1);
        else if (k == "group") {
            if (value != "all" && value != "paper") throw bad("expected 'all' or 'paper'");
            group = std::string(value);
        } else if (k == "seed") {
            std::uint64_t v = 0;
            auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
            if (ec != std::errc() || ptr != value.data() + value.size()) throw bad("not an unsigned integer");
            seed = v;
        } else if (k == "lstm_hidden") {
            std::vector<int> sizes;
            for (auto part : io::split(value, ',')) {
                int v = 0;
                auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
                if (ec != std::errc() || ptr != part.data() + part.size() || v < 1)
                    throw bad("expected comma-separated positive integers");
                sizes.push_back(v);
            }
            if (sizes.empty()) throw bad("no layers");
            lstm_hidden = std::move(sizes);
        } else if (k == "lstm_window") lstm_window = as_int(1);
        else if (k == "lstm_dropout") {
            const double v = as_double();
            if (!(v >= 0.0 && v < 1.0)) throw bad("must lie in [0, 1)");
            lstm_dropout = v;
        } else if (k == "lstm_learning_rate") {
            const double v = as_double();
            if (!(v >= 0.0)) throw bad("must be >= 0");
            lstm_learning_rate = v;
        } else if (k == "lstm_epochs") lstm_epochs = as_int(0);
        else if (k == "min_samples") min_samples = as_int(10);
        else if (k == "trends_fetch_date") trends_fetch_date = std::string(value);
        else throw Error(ErrorKind::InvalidConfig, "unknown key '" + k + "'");
    }

    /// Cross-key checks, run once every source has been applied.
    void validate() const {
        if (window_end < window_start)
            throw Error(ErrorKind::InvalidConfig, "window_end precedes window_start");
    }

    void apply_text(std::string_view text, const std::string& source = "<config>") {
        int row = 0;
        for (auto line : io::lines(text)) {
            ++row;
            if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
            line = io::trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string_view::npos)
                throw Error(ErrorKind::InvalidConfig, source + ":" + std::to_string(row) + ": expected key = value");
            try {
                set(io::trim(line.substr(0, eq)), io::trim(line.substr(eq + 1)));
            } catch (const Error& e) {
                throw Error(ErrorKind::InvalidConfig, source + ":" + std::to_string(row) + ": " + e.what());
            }
        }
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["window_start"] = format_date(window_start);
        j["window_end"] = format_date(window_end);
        j["diff_order_search"] = diff_order_search;
        j["diff_order_cases"] = diff_order_cases;
        j["max_lag"] = max_lag;
        j["ma_window"] = ma_window;
        j["group"] = group;
        j["seed"] = seed;
        j["lstm_hidden"] = lstm_hidden;
        j["lstm_window"] = lstm_window;
        j["lstm_dropout"] = lstm_dropout;
        j["lstm_learning_rate"] = lstm_learning_rate;
        j["lstm_epochs"] = lstm_epochs;
        j["min_samples"] = min_samples;
        j["trends_fetch_date"] = trends_fetch_date;
        return j;
    }
};

}  // namespace tc

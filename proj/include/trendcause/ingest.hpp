#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "trendcause/io.hpp"
#include "trendcause/series.hpp"

namespace tc::ingest {

/// A non-fatal problem found while loading, tied to its source row.
struct Warning {
    std::string file;
    int row = 0;  ///< 1-based line number; 0 when not row-specific
    std::string reason;

    std::string to_string() const {
        return file + (row > 0 ? ":" + std::to_string(row) : "") + ": " + reason;
    }
};

using SeriesMap = std::map<std::string, TimeSeries>;

enum class Query { Restaurant, Bar };

constexpr std::string_view to_string(Query q) { return q == Query::Restaurant ? "restaurant" : "bar"; }

struct CasesRecord {
    Date date;
    std::string region;
    long long positive_increase = 0;
};

struct TrendsRecord {
    Date date;
    std::string region;
    Query query = Query::Restaurant;
    int value = 0;
};

/// The 50 states, DC, and five territories reported by the COVID Tracking Project.
inline const std::vector<std::string>& us_regions() {
    static const std::vector<std::string> codes = {
        "AK", "AL", "AR", "AS", "AZ", "CA", "CO", "CT", "DC", "DE", "FL", "GA", "GU", "HI",
        "IA", "ID", "IL", "IN", "KS", "KY", "LA", "MA", "MD", "ME", "MI", "MN", "MO", "MP",
        "MS", "MT", "NC", "ND", "NE", "NH", "NJ", "NM", "NV", "NY", "OH", "OK", "OR", "PA",
        "PR", "RI", "SC", "SD", "TN", "TX", "UT", "VA", "VI", "VT", "WA", "WI", "WV", "WY"};
    return codes;
}

struct LoadOptions {
    Date window_start = Date{std::chrono::year{2020} / 4 / 9};
    Date window_end = Date{std::chrono::year{2020} / 7 / 7};
    std::vector<std::string> regions = us_regions();
};

struct LoadResult {
    SeriesMap series;
    std::vector<Warning> warnings;
    std::size_t records = 0;  ///< rows accepted into a series
};

namespace detail {

inline std::vector<std::string_view> read_rows(const std::string& path, std::string_view header,
                                               std::string& storage) {
    storage = io::read_file(path);
    auto rows = io::lines(storage);
    while (!rows.empty() && io::trim(rows.back()).empty()) rows.pop_back();
    if (rows.empty()) throw Error(ErrorKind::ParseError, path + ":1: file is empty");
    if (io::trim(rows[0]) != header)
        throw Error(ErrorKind::ParseError, path + ":1: expected header '" + std::string(header) +
                                               "', got '" + std::string(rows[0]) + "'");
    return rows;
}

[[noreturn]] inline void parse_fail(const std::string& path, int row, const std::string& column,
                                    const std::string& what) {
    throw Error(ErrorKind::ParseError,
                path + ":" + std::to_string(row) + ": column '" + column + "': " + what);
}

template <class Int>
Int parse_integer(std::string_view text, const std::string& path, int row, const std::string& column) {
    Int value{};
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc() || ptr != end)
        parse_fail(path, row, column, "not an integer: '" + std::string(text) + "'");
    return value;
}

inline SeriesMap to_series(const std::string& path, const std::string& name,
                           std::map<std::string, std::vector<std::pair<Date, double>>>& points) {
    SeriesMap out;
    for (auto& [region, pts] : points) {
        try {
            out.emplace(region, TimeSeries::from_points(name, region, std::move(pts)));
        } catch (const Error& e) {
            throw Error(ErrorKind::ParseError, path + ": region " + region + ": " + e.what());
        }
    }
    return out;
}

}  // namespace detail

/**
 * Loads `date,region,positive_increase` rows into one series per region.
 * Rows outside the window are ignored; unknown regions are skipped and
 * negative increases (source corrections) are clamped to 0, both with a
 * warning.
 */
inline LoadResult load_cases_csv(const std::string& path, const LoadOptions& options = {}) {
    std::string storage;
    const auto rows = detail::read_rows(path, "date,region,positive_increase", storage);
    const std::set<std::string, std::less<>> known(options.regions.begin(), options.regions.end());
    std::map<std::string, std::vector<std::pair<Date, double>>> points;
    LoadResult out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const int row = static_cast<int>(i) + 1;
        if (io::trim(rows[i]).empty()) continue;
        const auto fields = io::split(rows[i], ',');
        if (fields.size() != 3)
            detail::parse_fail(path, row, "*", "expected 3 fields, got " + std::to_string(fields.size()));
        const auto date = try_parse_date(fields[0]);
        if (!date) detail::parse_fail(path, row, "date", "invalid date '" + std::string(fields[0]) + "'");
        const std::string region(fields[1]);
        auto value = detail::parse_integer<long long>(fields[2], path, row, "positive_increase");
        if (*date < options.window_start || *date > options.window_end) continue;
        if (!known.contains(region)) {
            out.warnings.push_back({path, row, "unknown region '" + region + "' skipped"});
            continue;
        }
        if (value < 0) {
            out.warnings.push_back({path, row, "negative positive_increase " + std::to_string(value) +
                                                   " clamped to 0"});
            value = 0;
        }
        points[region].emplace_back(*date, static_cast<double>(value));
        ++out.records;
    }
    out.series = detail::to_series(path, "new_cases", points);
    return out;
}

/**
 * Loads the rows of `date,region,query,value` matching `query` into one 0..100
 * series per region. Values outside [0, 100] are an error.
 */
inline LoadResult load_trends_csv(const std::string& path, Query query,
                                  const LoadOptions& options = {}) {
    std::string storage;
    const auto rows = detail::read_rows(path, "date,region,query,value", storage);
    const std::set<std::string, std::less<>> known(options.regions.begin(), options.regions.end());
    std::map<std::string, std::vector<std::pair<Date, double>>> points;
    LoadResult out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const int row = static_cast<int>(i) + 1;
        if (io::trim(rows[i]).empty()) continue;
        const auto fields = io::split(rows[i], ',');
        if (fields.size() != 4)
            detail::parse_fail(path, row, "*", "expected 4 fields, got " + std::to_string(fields.size()));
        const auto date = try_parse_date(fields[0]);
        if (!date) detail::parse_fail(path, row, "date", "invalid date '" + std::string(fields[0]) + "'");
        const std::string region(fields[1]);
        if (fields[2] != "restaurant" && fields[2] != "bar")
            detail::parse_fail(path, row, "query", "expected 'restaurant' or 'bar', got '" +
                                                       std::string(fields[2]) + "'");
        const int value = detail::parse_integer<int>(fields[3], path, row, "value");
        if (value < 0 || value > 100)
            throw Error(ErrorKind::ValueOutOfRange, path + ":" + std::to_string(row) +
                                                        ": column 'value': " + std::to_string(value) +
                                                        " outside [0, 100]");
        if (fields[2] != to_string(query)) continue;
        if (*date < options.window_start || *date > options.window_end) continue;
        if (!known.contains(region)) {
            out.warnings.push_back({path, row, "unknown region '" + region + "' skipped"});
            continue;
        }
        points[region].emplace_back(*date, static_cast<double>(value));
        ++out.records;
    }
    out.series = detail::to_series(path, std::string(to_string(query)) + "_search", points);
    return out;
}

struct BuildResult {
    std::vector<RegionDataset> datasets;  ///< sorted by region code
    std::vector<Warning> warnings;
};

/**
 * Assembles one dataset per region present in every supplied map. Search maps
 * may be null (forecast-only runs); cases are min-max scaled to 0..100 over the
 * aligned window. Regions whose cases are constant are dropped with a warning.
 */
inline BuildResult build_datasets(const SeriesMap& cases, const SeriesMap* restaurant,
                                  const SeriesMap* bar) {
    if (cases.empty()) throw Error(ErrorKind::EmptyIntersection, "no cases series loaded");
    BuildResult out;
    auto note = [&](const std::string& reason) { out.warnings.push_back({"", 0, reason}); };
    std::set<std::string> regions;
    for (const auto& [region, _] : cases) regions.insert(region);
    for (const SeriesMap* map : {restaurant, bar})
        if (map)
            for (const auto& [region, _] : *map) regions.insert(region);

    for (const auto& region : regions) {
        const auto cases_it = cases.find(region);
        if (cases_it == cases.end()) {
            note("region " + region + " has search data but no cases; excluded");
            continue;
        }
        std::vector<const TimeSeries*> parts{&cases_it->second};
        bool missing = false;
        for (const auto& [map, label] : {std::pair{restaurant, "restaurant"}, std::pair{bar, "bar"}}) {
            if (!map) continue;
            const auto it = map->find(region);
            if (it == map->end()) {
                note("region " + region + " missing from " + label + " trends; excluded");
                missing = true;
                break;
            }
            parts.push_back(&it->second);
        }
        if (missing) continue;
        const auto dates = common_dates(parts);
        if (dates.size() < 2) {
            note("region " + region + " has fewer than 2 common dates; excluded");
            continue;
        }
        RegionDataset ds;
        ds.region = region;
        ds.cases_raw = cases_it->second.restrict_to(dates);
        try {
            ds.cases = normalize_0_100(*ds.cases_raw);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::DegenerateRange) throw;
            note("region " + region + ": " + e.what() + "; excluded");
            continue;
        }
        if (restaurant) ds.restaurant = restaurant->at(region).restrict_to(dates);
        if (bar) ds.bar = bar->at(region).restrict_to(dates);
        out.datasets.push_back(std::move(ds));
    }
    if (out.datasets.empty())
        throw Error(ErrorKind::EmptyIntersection, "no region has complete, aligned data");
    return out;
}

inline std::string cases_csv(const SeriesMap& cases) {
    std::string out = "date,region,positive_increase\n";
    for (const auto& [region, ts] : cases)
        for (std::size_t i = 0; i < ts.size(); ++i)
            out += format_date(ts.dates()[i]) + "," + region + "," + io::format_number(ts[i]) + "\n";
    return out;
}

/// Either map may be null; rows are grouped by query, then region, then date.
inline std::string trends_csv(const SeriesMap* restaurant, const SeriesMap* bar) {
    std::string out = "date,region,query,value\n";
    for (const auto& [map, label] : {std::pair{restaurant, "restaurant"}, std::pair{bar, "bar"}}) {
        if (!map) continue;
        for (const auto& [region, ts] : *map)
            for (std::size_t i = 0; i < ts.size(); ++i)
                out += format_date(ts.dates()[i]) + "," + region + "," + label + "," +
                       io::format_number(ts[i]) + "\n";
    }
    return out;
}

struct ConvertResult {
    std::vector<CasesRecord> records;  ///< sorted by region, then date
    std::vector<Warning> warnings;
};

/**
 * Maps a COVID Tracking Project daily export (a JSON array of objects with
 * `date` as YYYYMMDD, `state`, and `positiveIncrease`) onto cases records.
 * Entries with a missing or null increase are skipped with a warning.
 */
inline ConvertResult convert_covidtracking_json(std::string_view json_text,
                                                const std::string& source = "<json>") {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::ParseError, source + ": " + e.what());
    }
    if (!doc.is_array()) throw Error(ErrorKind::ParseError, source + ": expected a JSON array");
    ConvertResult out;
    int index = 0;
    for (const auto& entry : doc) {
        ++index;
        auto where = [&] { return "entry " + std::to_string(index); };
        if (!entry.is_object()) throw Error(ErrorKind::ParseError, source + ": " + where() + " is not an object");
        if (!entry.contains("date") || !entry.contains("state"))
            throw Error(ErrorKind::ParseError, source + ": " + where() + " lacks date/state");
        const auto& raw_date = entry["date"];
        if (!raw_date.is_number_integer() && !raw_date.is_string())
            throw Error(ErrorKind::ParseError, source + ": " + where() + ": date must be YYYYMMDD");
        if (!entry["state"].is_string())
            throw Error(ErrorKind::ParseError, source + ": " + where() + ": state must be a string");
        const std::string date_text = raw_date.is_number_integer() ? std::to_string(raw_date.get<long long>())
                                                                   : raw_date.get<std::string>();
        const auto date = try_parse_date(date_text);
        if (!date) throw Error(ErrorKind::ParseError, source + ": " + where() + ": bad date '" + date_text + "'");
        const auto& inc = entry.value("positiveIncrease", nlohmann::json());
        if (!inc.is_number()) {
            out.warnings.push_back({source, index, "positiveIncrease missing or null; skipped"});
            continue;
        }
        out.records.push_back({*date, entry["state"].get<std::string>(),
                               static_cast<long long>(std::llround(inc.get<double>()))});
    }
    std::sort(out.records.begin(), out.records.end(), [](const auto& a, const auto& b) {
        return std::tie(a.region, a.date) < std::tie(b.region, b.date);
    });
    return out;
}

inline std::string cases_csv(const std::vector<CasesRecord>& records) {
    std::string out = "date,region,positive_increase\n";
    for (const auto& r : records)
        out += format_date(r.date) + "," + r.region + "," + std::to_string(r.positive_increase) + "\n";
    return out;
}

}  // namespace tc::ingest

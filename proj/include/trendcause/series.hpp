#pragma once

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "trendcause/error.hpp"

namespace tc {

/// Calendar date at daily resolution.
using Date = std::chrono::sys_days;

namespace detail {

inline bool parse_int(std::string_view text, int& out) {
    if (text.empty()) return false;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc() && ptr == end;
}

}  // namespace detail

/// Parses "YYYY-MM-DD" or the compact "YYYYMMDD". Returns nullopt on any
/// malformed or non-existent calendar date.
inline std::optional<Date> try_parse_date(std::string_view text) {
    int y = 0, m = 0, d = 0;
    if (text.size() == 10 && text[4] == '-' && text[7] == '-') {
        if (!detail::parse_int(text.substr(0, 4), y) || !detail::parse_int(text.substr(5, 2), m) ||
            !detail::parse_int(text.substr(8, 2), d))
            return std::nullopt;
    } else if (text.size() == 8) {
        if (!detail::parse_int(text.substr(0, 4), y) || !detail::parse_int(text.substr(4, 2), m) ||
            !detail::parse_int(text.substr(6, 2), d))
            return std::nullopt;
    } else {
        return std::nullopt;
    }
    const std::chrono::year_month_day ymd{std::chrono::year{y},
                                          std::chrono::month{static_cast<unsigned>(m)},
                                          std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return Date{ymd};
}

inline Date parse_date(std::string_view text) {
    auto date = try_parse_date(text);
    if (!date) throw Error(ErrorKind::ParseError, "invalid date '" + std::string(text) + "'");
    return *date;
}

inline std::string format_date(Date date) {
    const std::chrono::year_month_day ymd{date};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

/**
 * Ordered daily series with a name and a region tag.
 *
 * Dates are strictly increasing and every value is finite; both are checked
 * on construction, after which the object is immutable.
 */
class TimeSeries {
public:
    TimeSeries() = default;

    TimeSeries(std::string name, std::string region, std::vector<Date> dates,
               std::vector<double> values)
        : name_(std::move(name)),
          region_(std::move(region)),
          dates_(std::move(dates)),
          values_(std::move(values)) {
        if (dates_.size() != values_.size())
            throw Error(ErrorKind::LengthMismatch,
                        name_ + ": " + std::to_string(dates_.size()) + " dates vs " +
                            std::to_string(values_.size()) + " values");
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (!std::isfinite(values_[i]))
                throw Error(ErrorKind::NonFiniteValue, name_ + " at " + format_date(dates_[i]));
            if (i > 0 && dates_[i] <= dates_[i - 1]) {
                if (dates_[i] == dates_[i - 1])
                    throw Error(ErrorKind::DuplicateDate, name_ + " at " + format_date(dates_[i]));
                throw Error(ErrorKind::InvalidSpec, name_ + ": dates not increasing at " +
                                                        format_date(dates_[i]));
            }
        }
    }

    /// Builds a series from unordered (date, value) points.
    static TimeSeries from_points(std::string name, std::string region,
                                  std::vector<std::pair<Date, double>> points) {
        if (points.empty()) throw Error(ErrorKind::SeriesTooShort, name + ": no points");
        std::stable_sort(points.begin(), points.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<Date> dates;
        std::vector<double> values;
        dates.reserve(points.size());
        values.reserve(points.size());
        for (const auto& [date, value] : points) {
            if (!dates.empty() && dates.back() == date)
                throw Error(ErrorKind::DuplicateDate, name + " at " + format_date(date));
            dates.push_back(date);
            values.push_back(value);
        }
        return TimeSeries(std::move(name), std::move(region), std::move(dates), std::move(values));
    }

    const std::string& name() const noexcept { return name_; }
    const std::string& region() const noexcept { return region_; }
    std::span<const Date> dates() const noexcept { return dates_; }
    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }
    double operator[](std::size_t i) const { return values_[i]; }
    Date front_date() const { return dates_.front(); }
    Date back_date() const { return dates_.back(); }

    TimeSeries renamed(std::string name) const {
        TimeSeries copy = *this;
        copy.name_ = std::move(name);
        return copy;
    }

    /// Same dates, new values (validated).
    TimeSeries with_values(std::vector<double> values) const {
        return TimeSeries(name_, region_, dates_, std::move(values));
    }

    /// Sub-range [first, first + count).
    TimeSeries slice(std::size_t first, std::size_t count) const {
        if (first + count > size())
            throw Error(ErrorKind::SeriesTooShort, name_ + ": slice out of range");
        return TimeSeries(name_, region_,
                          std::vector<Date>(dates_.begin() + first, dates_.begin() + first + count),
                          std::vector<double>(values_.begin() + first,
                                              values_.begin() + first + count));
    }

    /// Points whose date lies in [from, to].
    TimeSeries window(Date from, Date to) const {
        auto lo = std::lower_bound(dates_.begin(), dates_.end(), from);
        auto hi = std::upper_bound(dates_.begin(), dates_.end(), to);
        if (hi < lo) hi = lo;
        const auto first = static_cast<std::size_t>(lo - dates_.begin());
        return slice(first, static_cast<std::size_t>(hi - lo));
    }

    /// Restricts to the given dates, all of which must be present.
    TimeSeries restrict_to(std::span<const Date> keep) const {
        std::vector<double> values;
        values.reserve(keep.size());
        auto it = dates_.begin();
        for (Date d : keep) {
            it = std::lower_bound(it, dates_.end(), d);
            if (it == dates_.end() || *it != d)
                throw Error(ErrorKind::EmptyIntersection,
                            name_ + " has no value on " + format_date(d));
            values.push_back(values_[static_cast<std::size_t>(it - dates_.begin())]);
        }
        return TimeSeries(name_, region_, std::vector<Date>(keep.begin(), keep.end()),
                          std::move(values));
    }

    friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

private:
    std::string name_;
    std::string region_;
    std::vector<Date> dates_;
    std::vector<double> values_;
};

/**
 * Date-aligned bundle for one region.
 *
 * All present series share the same date vector. Search series are optional
 * so forecasting can run in a degraded, cases-only mode; analyses that need
 * both queries check for them explicitly.
 */
struct RegionDataset {
    std::string region;
    TimeSeries cases;                       ///< daily new positives, scaled 0..100
    std::optional<TimeSeries> restaurant;   ///< 0..100
    std::optional<TimeSeries> bar;          ///< 0..100
    std::optional<TimeSeries> cases_raw;    ///< unscaled counts, same dates (ranking only)

    std::span<const Date> date_index() const noexcept { return cases.dates(); }
    std::size_t size() const noexcept { return cases.size(); }
};

/// Min-max rescaling onto [0, 100] over the whole series.
inline TimeSeries normalize_0_100(const TimeSeries& ts) {
    if (ts.size() < 2)
        throw Error(ErrorKind::SeriesTooShort, ts.name() + ": normalization needs >= 2 points");
    const auto [lo_it, hi_it] = std::minmax_element(ts.values().begin(), ts.values().end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (!(hi > lo))
        throw Error(ErrorKind::DegenerateRange, ts.name() + " (" + ts.region() + ") is constant");
    const double span = hi - lo;
    std::vector<double> out(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) out[i] = 100.0 * (ts[i] - lo) / span;
    // Pin the extremes so min/max land exactly on 0 and 100.
    out[static_cast<std::size_t>(lo_it - ts.values().begin())] = 0.0;
    out[static_cast<std::size_t>(hi_it - ts.values().begin())] = 100.0;
    return ts.with_values(std::move(out));
}

/// Applies `order` first differences; the first `order` dates are dropped.
inline TimeSeries difference(const TimeSeries& ts, int order) {
    if (order < 0) throw Error(ErrorKind::DomainError, "negative differencing order");
    if (ts.size() <= static_cast<std::size_t>(order))
        throw Error(ErrorKind::SeriesTooShort, ts.name() + ": length " + std::to_string(ts.size()) +
                                                   " cannot be differenced " +
                                                   std::to_string(order) + " times");
    std::vector<double> values(ts.values().begin(), ts.values().end());
    for (int k = 0; k < order; ++k) {
        for (std::size_t i = values.size() - 1; i > 0; --i) values[i] -= values[i - 1];
        values.erase(values.begin());
    }
    const auto n = static_cast<std::size_t>(order);
    return TimeSeries(ts.name(), ts.region(),
                      std::vector<Date>(ts.dates().begin() + n, ts.dates().end()),
                      std::move(values));
}

/// Trailing mean over `window` values, dated at the last day of each window.
inline TimeSeries moving_average(const TimeSeries& ts, int window) {
    if (window < 1) throw Error(ErrorKind::DomainError, "moving-average window must be >= 1");
    const auto w = static_cast<std::size_t>(window);
    if (ts.size() < w)
        throw Error(ErrorKind::SeriesTooShort, ts.name() + ": shorter than window " +
                                                   std::to_string(window));
    std::vector<double> out;
    out.reserve(ts.size() - w + 1);
    for (std::size_t end = w; end <= ts.size(); ++end) {
        // Deviations from the window's first value: exact for constant input.
        const double anchor = ts[end - w];
        double dev = 0.0;
        for (std::size_t i = end - w; i < end; ++i) dev += ts[i] - anchor;
        out.push_back(anchor + dev / static_cast<double>(w));
    }
    return TimeSeries(ts.name(), ts.region(),
                      std::vector<Date>(ts.dates().begin() + (w - 1), ts.dates().end()),
                      std::move(out));
}

/// Sorted intersection of the date sets of the given series.
inline std::vector<Date> common_dates(std::span<const TimeSeries* const> series) {
    if (series.empty()) return {};
    std::vector<Date> common(series[0]->dates().begin(), series[0]->dates().end());
    for (std::size_t k = 1; k < series.size(); ++k) {
        std::vector<Date> next;
        std::set_intersection(common.begin(), common.end(), series[k]->dates().begin(),
                              series[k]->dates().end(), std::back_inserter(next));
        common = std::move(next);
    }
    return common;
}

/// Restricts two series to their shared dates.
inline std::pair<TimeSeries, TimeSeries> align_pair(const TimeSeries& a, const TimeSeries& b) {
    const TimeSeries* both[] = {&a, &b};
    const auto dates = common_dates(both);
    if (dates.empty())
        throw Error(ErrorKind::EmptyIntersection, a.name() + " and " + b.name() + " share no dates");
    return {a.restrict_to(dates), b.restrict_to(dates)};
}

/**
 * Date-aligns a region's cases, restaurant and bar series. Only dates present
 * in all three survive; nothing is interpolated.
 */
inline RegionDataset align(const TimeSeries& cases, const TimeSeries& restaurant,
                           const TimeSeries& bar) {
    if (cases.region() != restaurant.region() || cases.region() != bar.region())
        throw Error(ErrorKind::RegionMismatch, "regions '" + cases.region() + "', '" +
                                                   restaurant.region() + "', '" + bar.region() +
                                                   "' differ");
    const TimeSeries* all[] = {&cases, &restaurant, &bar};
    const auto dates = common_dates(all);
    if (dates.empty())
        throw Error(ErrorKind::EmptyIntersection, cases.region() + ": series share no dates");
    return RegionDataset{cases.region(), cases.restrict_to(dates), restaurant.restrict_to(dates),
                         bar.restrict_to(dates), std::nullopt};
}

}  // namespace tc

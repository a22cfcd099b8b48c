#include <gtest/gtest.h>

#include "test_helpers.hpp"
#include "trendcause/series.hpp"

using namespace tc;
using tc::fixtures::as_vector;
using tc::fixtures::day;
using tc::fixtures::series;

namespace {

void expect_kind(ErrorKind kind, const auto& fn) {
    try {
        fn();
        FAIL() << "expected " << to_string(kind);
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), kind) << e.what();
    }
}

}  // namespace

TEST(Dates, ParsesBothLayouts) {
    EXPECT_EQ(parse_date("2020-07-07"), parse_date("20200707"));
    EXPECT_EQ(format_date(parse_date("2020-04-09")), "2020-04-09");
    EXPECT_FALSE(try_parse_date("2020-02-30"));
    EXPECT_FALSE(try_parse_date("2020/04/09"));
    EXPECT_FALSE(try_parse_date(""));
}

TEST(FromPoints, Singleton) {
    const auto ts = TimeSeries::from_points("x", "CA", {{day(0), 1.0}});
    EXPECT_EQ(ts.size(), 1u);
}

TEST(FromPoints, SortsByDate) {
    const auto ts = TimeSeries::from_points("x", "CA", {{day(1), 5.0}, {day(0), 3.0}});
    EXPECT_EQ(as_vector(ts), (std::vector<double>{3, 5}));
    EXPECT_EQ(ts.front_date(), day(0));
}

TEST(FromPoints, DuplicateDateRejected) {
    expect_kind(ErrorKind::DuplicateDate, [] { TimeSeries::from_points("x", "CA", {{day(0), 3.0}, {day(0), 4.0}}); });
}

TEST(TimeSeriesCtor, RejectsNonFinite) {
    expect_kind(ErrorKind::NonFiniteValue, [] { series({1.0, std::nan(""), 2.0}); });
}

TEST(Normalize, AlreadySpanningRange) {
    EXPECT_EQ(as_vector(normalize_0_100(series({0, 50, 100}))), (std::vector<double>{0, 50, 100}));
}

TEST(Normalize, AffineMap) {
    EXPECT_EQ(as_vector(normalize_0_100(series({2, 4, 6}))), (std::vector<double>{0, 50, 100}));
}

TEST(Normalize, ConstantIsDegenerate) {
    expect_kind(ErrorKind::DegenerateRange, [] { normalize_0_100(series({7, 7, 7})); });
}

TEST(Normalize, IdempotentAndKeepsExtremes) {
    const auto ts = series({3.1, -2.0, 8.25, 0.4, 8.0, 1e-3, -1.9});
    const auto once = normalize_0_100(ts);
    const auto twice = normalize_0_100(once);
    for (std::size_t i = 0; i < ts.size(); ++i) EXPECT_NEAR(once[i], twice[i], 1e-12);
    const auto v = as_vector(ts), n = as_vector(once);
    EXPECT_EQ(std::max_element(v.begin(), v.end()) - v.begin(), std::max_element(n.begin(), n.end()) - n.begin());
    EXPECT_EQ(std::min_element(v.begin(), v.end()) - v.begin(), std::min_element(n.begin(), n.end()) - n.begin());
}

TEST(Difference, OrderZeroIsIdentity) {
    const auto ts = series({1, 2, 4, 7});
    EXPECT_EQ(difference(ts, 0), ts);
}

TEST(Difference, FirstAndSecondOrder) {
    const auto ts = series({1, 2, 4, 7});
    const auto d1 = difference(ts, 1);
    EXPECT_EQ(as_vector(d1), (std::vector<double>{1, 2, 3}));
    EXPECT_EQ(d1.front_date(), day(1));
    EXPECT_EQ(as_vector(difference(ts, 2)), (std::vector<double>{1, 1}));
}

TEST(Difference, RepeatedFirstEqualsSecond) {
    const auto ts = series({0.3, 1.7, -4.2, 9.9, 2.5, 2.6, 11.0});
    EXPECT_EQ(difference(difference(ts, 1), 1), difference(ts, 2));
}

TEST(Difference, TooShort) {
    expect_kind(ErrorKind::SeriesTooShort, [] { difference(series({1, 2}), 2); });
}

TEST(MovingAverage, WindowOneIsIdentity) {
    const auto ts = series({4, 1, 9});
    EXPECT_EQ(moving_average(ts, 1), ts);
}

TEST(MovingAverage, Trailing) {
    const auto ma = moving_average(series({0, 10, 20, 30}), 2);
    EXPECT_EQ(as_vector(ma), (std::vector<double>{5, 15, 25}));
    EXPECT_EQ(ma.front_date(), day(1));
}

TEST(MovingAverage, ConstantStaysConstant) {
    const auto ma = moving_average(series(std::vector<double>(10, 0.1)), 7);
    EXPECT_EQ(ma.size(), 4u);
    for (double v : ma.values()) EXPECT_EQ(v, 0.1);
}

TEST(MovingAverage, RampKeepsSlope) {
    std::vector<double> ramp;
    for (int i = 0; i < 30; ++i) ramp.push_back(2.5 * i - 4.0);
    const auto ma = moving_average(series(ramp), 7);
    for (std::size_t i = 1; i < ma.size(); ++i) EXPECT_NEAR(ma[i] - ma[i - 1], 2.5, 1e-12);
}

TEST(Align, IdenticalDates) {
    const auto ds = align(series({1, 2, 3}, 0, "c"), series({4, 5, 6}, 0, "r"), series({7, 8, 9}, 0, "b"));
    EXPECT_EQ(ds.size(), 3u);
    EXPECT_EQ(ds.region, "CA");
}

TEST(Align, Intersection) {
    // a: days 1-90, b: 5-90, c: 1-85 -> 5-85
    const auto a = series(std::vector<double>(90, 1.0), 1, "a");
    const auto b = series(std::vector<double>(86, 2.0), 5, "b");
    const auto c = series(std::vector<double>(85, 3.0), 1, "c");
    const auto ds = align(a, b, c);
    EXPECT_EQ(ds.size(), 81u);
    EXPECT_EQ(ds.date_index().front(), day(5));
    EXPECT_EQ(ds.date_index().back(), day(85));
    for (const auto& perm : {align(b, c, a), align(c, a, b)})
        EXPECT_TRUE(std::equal(perm.date_index().begin(), perm.date_index().end(), ds.date_index().begin(),
                               ds.date_index().end()));
}

TEST(Align, Disjoint) {
    expect_kind(ErrorKind::EmptyIntersection,
                [] { align(series({1, 2}, 0), series({1, 2}, 10), series({1, 2}, 0)); });
}

TEST(Align, RegionMismatch) {
    expect_kind(ErrorKind::RegionMismatch,
                [] { align(series({1, 2}), series({1, 2}, 0, "r", "NY"), series({1, 2})); });
}

TEST(Window, InclusiveBounds) {
    const auto w = series({0, 1, 2, 3, 4, 5}).window(day(1), day(3));
    EXPECT_EQ(as_vector(w), (std::vector<double>{1, 2, 3}));
}

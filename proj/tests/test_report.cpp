#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "trendcause/io.hpp"
#include "trendcause/report.hpp"
#include "trendcause/synth.hpp"

using namespace tc;
using namespace tc::report;
namespace fs = std::filesystem;

namespace {

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
    std::vector<std::vector<std::string>> rows;
    const auto text = io::read_file(path.string());
    for (auto line : io::lines(text)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        for (auto cell : io::split(line, ',')) cells.emplace_back(cell);
        rows.push_back(std::move(cells));
    }
    return rows;
}

class Pipeline : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        root_ = fs::temp_directory_path() / "tc_report_tests";
        fs::remove_all(root_);
        fs::create_directories(root_ / "in");
        const auto bundle = synth::region_bundle(ingest::us_regions(), 12, 90, 17, Date{std::chrono::year{2020} / 4 / 9});
        io::write_file_atomic(root_ / "in" / "cases.csv", ingest::cases_csv(bundle.cases));
        io::write_file_atomic(root_ / "in" / "rest.csv", ingest::trends_csv(&bundle.restaurant, nullptr));
        io::write_file_atomic(root_ / "in" / "bar.csv", ingest::trends_csv(nullptr, &bundle.bar));
    }
    static void TearDownTestSuite() { fs::remove_all(root_); }

    static Inputs inputs(bool search = true) {
        Inputs in;
        in.cases_path = (root_ / "in" / "cases.csv").string();
        if (search) {
            in.restaurant_path = (root_ / "in" / "rest.csv").string();
            in.bar_path = (root_ / "in" / "bar.csv").string();
        }
        return in;
    }

    static Config quick_config() {
        Config c;
        c.lstm_hidden = {4};
        c.lstm_epochs = 3;
        return c;
    }

    static inline fs::path root_;
};

}  // namespace

TEST(Render, SixSignificantDigits) {
    EXPECT_EQ(sig6(0.123456789), "0.123457");
    EXPECT_EQ(sig6(24.19), "24.19");
    EXPECT_EQ(sig6(1234567.0), "1.23457e+06");
    EXPECT_EQ(round6(0.123456789), 0.123457);
    EXPECT_EQ(render_p(0.0009999), "<0.001");
    EXPECT_EQ(render_p(0.001), "0.001");
    EXPECT_EQ(render_p(0.004), "0.004");
}

TEST(Render, RegionNames) {
    EXPECT_EQ(region_name("CA"), "California");
    EXPECT_EQ(region_name("DC"), "District of Columbia");
    EXPECT_EQ(region_name("XX"), "XX");
    EXPECT_EQ(region_names().size(), ingest::us_regions().size());
}

TEST(Groups, TopAndBottomByVolume) {
    std::vector<std::pair<std::string, double>> v;
    for (int i = 0; i < 25; ++i) v.emplace_back("R" + std::to_string(100 + i), i);
    const auto g = paper_groups(v);
    ASSERT_EQ(g.highest.size(), 10u);
    ASSERT_EQ(g.lowest.size(), 10u);
    EXPECT_EQ(g.highest.front(), "R124");
    EXPECT_EQ(g.highest.back(), "R115");
    EXPECT_EQ(g.lowest.front(), "R109");
    EXPECT_EQ(g.lowest.back(), "R100");
}

TEST(ParallelMap, OrderAndErrors) {
    const auto out = parallel_map<int>(50, [](std::size_t i) { return static_cast<int>(i * i); });
    for (std::size_t i = 0; i < 50; ++i) EXPECT_EQ(out[i], static_cast<int>(i * i));
    EXPECT_THROW(parallel_map<int>(5,
                                   [](std::size_t i) -> int {
                                       if (i == 3) throw Error(ErrorKind::SingularDesign, "x");
                                       return 0;
                                   }),
                 Error);
}

TEST(ExitCodes, Stable) {
    EXPECT_EQ(exit_code_for(ErrorKind::ParseError), 2);
    EXPECT_EQ(exit_code_for(ErrorKind::ValueOutOfRange), 2);
    EXPECT_EQ(exit_code_for(ErrorKind::InvalidConfig), 2);
    EXPECT_EQ(exit_code_for(ErrorKind::EmptyIntersection), 3);
    EXPECT_EQ(exit_code_for(ErrorKind::SingularDesign), 4);
    EXPECT_EQ(exit_code_for(ErrorKind::NumericalDivergence), 4);
}

TEST_F(Pipeline, AnalyzeTablesAndJsonAgree) {
    Config c = quick_config();
    c.group = "paper";
    const auto dir = root_ / "analyze";
    const auto out = run_analyze(inputs(), c, dir);
    EXPECT_EQ(out.regions.size(), 12u);

    const auto granger = read_csv(dir / "granger.csv");
    ASSERT_EQ(granger.size(), 13u);
    EXPECT_EQ(granger[0].size(), 7u);
    const auto report = nlohmann::json::parse(io::read_file((dir / "report.json").string()));
    EXPECT_EQ(report["config"]["max_lag"], 14);
    EXPECT_TRUE(report["metadata"].contains("ranking"));
    auto check = [](const std::string& cell, double value) {
        if (cell == "<0.001")
            EXPECT_LT(value, 0.001);
        else
            EXPECT_EQ(std::strtod(cell.c_str(), nullptr), value) << cell;
    };
    for (std::size_t i = 1; i < granger.size(); ++i) {
        const auto& j = report["regions"][i - 1];
        EXPECT_EQ(granger[i][0], j["region"]);
        EXPECT_EQ(std::stoi(granger[i][1]), j["restaurant"]["lag"].get<int>());
        EXPECT_LE(std::stoi(granger[i][1]), 14);
        check(granger[i][3], j["restaurant"]["search_to_cases"]["p_value"]);
        check(granger[i][4], j["bar"]["search_to_cases"]["p_value"]);
        check(granger[i][5], j["restaurant"]["cases_to_search"]["p_value"]);
        check(granger[i][6], j["bar"]["cases_to_search"]["p_value"]);
    }
    const auto pearson = read_csv(dir / "pearson.csv");
    for (std::size_t i = 1; i < pearson.size(); ++i) {
        const auto& j = report["regions"][i - 1];
        EXPECT_EQ(std::strtod(pearson[i][2].c_str(), nullptr), j["restaurant"]["pearson"]["r"].get<double>());
        check(pearson[i][3], j["restaurant"]["pearson"]["p_value"]);
    }

    const auto high = read_csv(dir / "granger_high.csv");
    ASSERT_EQ(high.size(), 3u);
    EXPECT_EQ(high[0][0], "causing -> caused");
    EXPECT_EQ(high[0].size(), 11u);
    EXPECT_EQ(high[1][0], "Restaurant search -> new cases");
    EXPECT_EQ(high[2][0], "Bar search -> new cases");
    EXPECT_EQ(high[0][1], region_name(report["groups"]["highest"][0]));
    const auto low = read_csv(dir / "pearson_low.csv");
    EXPECT_EQ(low[0][0], "Correlation (r [P-value])");
    EXPECT_NE(low[1][1].find(" ["), std::string::npos);
}

TEST_F(Pipeline, AnalyzeNeedsBothSearchFiles) {
    EXPECT_THROW(run_analyze(inputs(false), quick_config(), root_ / "x"), Error);
}

TEST_F(Pipeline, ForecastDegradedModeAndSkips) {
    Config c = quick_config();
    c.min_samples = 84;  // 90 - 7 = 83 windows: everything skipped
    const auto skipped = run_forecast(inputs(false), c, root_ / "skip");
    for (const auto& r : skipped.regions) EXPECT_TRUE(r.skipped);
    EXPECT_EQ(skipped.warnings.size(), 12u);
    const auto rows = read_csv(root_ / "skip" / "rmse.csv");
    EXPECT_NE(rows[1].back().find("skipped"), std::string::npos);

    c.min_samples = 20;
    const auto dir = root_ / "degraded";
    run_forecast(inputs(false), c, dir);
    const auto text = io::read_file((dir / "rmse.csv").string());
    const auto table = read_csv(dir / "rmse.csv");
    EXPECT_EQ(table[0][1], "baseline");
    // Baseline filled, search columns empty.
    for (auto line : io::lines(text)) {
        if (line.empty() || line.starts_with("region")) continue;
        const auto cells = io::split(line, ',');
        ASSERT_EQ(cells.size(), 5u);
        EXPECT_FALSE(cells[1].empty());
        EXPECT_TRUE(cells[2].empty());
        EXPECT_TRUE(cells[3].empty());
    }
    const auto trace = read_csv(dir / "predictions_AK_baseline.csv");
    EXPECT_EQ(trace[0], (std::vector<std::string>{"date", "actual", "predicted"}));
    EXPECT_EQ(trace.size(), 1u + (83u - 83u * 7u / 10u));
    EXPECT_FALSE(fs::exists(dir / "predictions_AK_bar.csv"));
}

TEST_F(Pipeline, ForecastIsReproducible) {
    Config c = quick_config();
    c.group = "paper";
    run_forecast(inputs(), c, root_ / "f1");
    run_forecast(inputs(), c, root_ / "f2");
    for (const auto* name : {"rmse.csv", "forecast.json", "rmse_high.csv", "predictions_CA_bar.csv"})
        EXPECT_EQ(io::read_file((root_ / "f1" / name).string()), io::read_file((root_ / "f2" / name).string()));
    const auto high = read_csv(root_ / "f1" / "rmse_high.csv");
    ASSERT_EQ(high.size(), 4u);
    EXPECT_EQ(high[1][0], "Baseline");
    EXPECT_EQ(high[2][0], "Baseline + Restaurants");
    EXPECT_EQ(high[3][0], "Baseline + Bars");
    c.seed = 43;
    run_forecast(inputs(), c, root_ / "f3");
    EXPECT_NE(io::read_file((root_ / "f1" / "rmse.csv").string()), io::read_file((root_ / "f3" / "rmse.csv").string()));
}

TEST_F(Pipeline, PlotRowsAndIdentityWindow) {
    Config c;
    run_plotdata(inputs(), c, root_ / "plot7");
    EXPECT_EQ(read_csv(root_ / "plot7" / "plot_CA.csv").size(), 1u + 90u - 7u + 1u);
    c.ma_window = 1;
    run_plotdata(inputs(), c, root_ / "plot1");
    const auto rows = read_csv(root_ / "plot1" / "plot_CA.csv");
    ASSERT_EQ(rows.size(), 91u);
    const auto loaded = load_inputs(inputs(), c);
    const auto& ca = *std::find_if(loaded.datasets.begin(), loaded.datasets.end(),
                                   [](const auto& d) { return d.region == "CA"; });
    for (std::size_t i = 0; i < 90; ++i) {
        EXPECT_EQ(rows[i + 1][1], sig6(ca.cases[i]));
        EXPECT_EQ(rows[i + 1][2], sig6((*ca.restaurant)[i]));
    }
}

TEST(PlotData, ImpulsePeakNearInjectedDate) {
    std::vector<Date> dates;
    std::vector<double> cases, rest, bar;
    Rng rng(8);
    const int impulse = 40;
    for (int i = 0; i < 90; ++i) {
        dates.push_back(Date{std::chrono::year{2020} / 4 / 9} + std::chrono::days{i});
        cases.push_back(i == impulse ? 100.0 : 10.0 * rng.uniform());
        rest.push_back(50.0);
        bar.push_back(50.0);
    }
    RegionDataset ds{"CA", TimeSeries("c", "CA", dates, cases), TimeSeries("r", "CA", dates, rest),
                     TimeSeries("b", "CA", dates, bar), std::nullopt};
    const auto text = plot_csv(ds, 7);
    double best = -1.0;
    Date peak{};
    for (auto line : io::lines(text)) {
        if (line.empty() || line.starts_with("date")) continue;
        const auto cells = io::split(line, ',');
        const double v = std::strtod(std::string(cells[1]).c_str(), nullptr);
        if (v > best) {
            best = v;
            peak = parse_date(cells[0]);
        }
    }
    const auto offset = (peak - dates[impulse]).count();
    EXPECT_GE(offset, 0);
    EXPECT_LE(offset, 7);
}

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>
#include <sys/wait.h>

#include "trendcause/io.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string err;
};

const fs::path& work() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / "tc_cli_tests";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

Run run(const std::string& args) {
    const auto err = work() / "stderr.txt";
    const std::string cmd = std::string(TRENDCAUSE_BIN) + " " + args + " > " + (work() / "stdout.txt").string() +
                            " 2> " + err.string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, tc::io::read_file(err.string())};
}

std::string inputs(const fs::path& dir) {
    return "--cases " + (dir / "cases.csv").string() + " --trends-restaurant " +
           (dir / "trends_restaurant.csv").string() + " --trends-bar " + (dir / "trends_bar.csv").string();
}

}  // namespace

TEST(Cli, SynthThenAnalyze) {
    const auto in = work() / "bundle";
    ASSERT_EQ(run("synth --regions 5 --length 80 --seed 3 --out-dir " + in.string()).code, 0);
    const auto r = run("analyze " + inputs(in) + " --max-lag 6 --out-dir " + (work() / "a").string());
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(work() / "a" / "granger.csv"));
    const auto report = tc::io::read_file((work() / "a" / "report.json").string());
    EXPECT_NE(report.find("\"max_lag\": 6"), std::string::npos);
}

TEST(Cli, FlagsOverrideConfigFile) {
    const auto in = work() / "bundle2";
    ASSERT_EQ(run("synth --regions 3 --length 80 --out-dir " + in.string()).code, 0);
    const auto cfg = work() / "run.conf";
    std::ofstream(cfg) << "max_lag = 4\nseed = 5\n";
    const auto out = work() / "cfg";
    ASSERT_EQ(run("analyze " + inputs(in) + " --config " + cfg.string() + " --max-lag 9 --out-dir " + out.string()).code, 0);
    const auto report = tc::io::read_file((out / "report.json").string());
    EXPECT_NE(report.find("\"max_lag\": 9"), std::string::npos);
    EXPECT_NE(report.find("\"seed\": 5"), std::string::npos);
}

TEST(Cli, MissingTrendsFileExitsTwo) {
    const auto in = work() / "bundle3";
    ASSERT_EQ(run("synth --regions 2 --length 60 --out-dir " + in.string()).code, 0);
    const auto missing = (work() / "absent_trends.csv").string();
    const auto r = run("analyze --cases " + (in / "cases.csv").string() + " --trends-restaurant " + missing +
                       " --trends-bar " + (in / "trends_bar.csv").string() + " --out-dir " + (work() / "m").string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find(missing), std::string::npos);
}

TEST(Cli, DisjointDatesExitThree) {
    const auto dir = work() / "disjoint";
    fs::create_directories(dir);
    std::ofstream(dir / "cases.csv") << "date,region,positive_increase\n2020-04-09,CA,3\n2020-04-10,CA,5\n";
    std::ofstream(dir / "trends_restaurant.csv") << "date,region,query,value\n2020-05-09,CA,restaurant,3\n2020-05-10,CA,restaurant,5\n";
    std::ofstream(dir / "trends_bar.csv") << "date,region,query,value\n2020-05-09,CA,bar,3\n2020-05-10,CA,bar,5\n";
    EXPECT_EQ(run("analyze " + inputs(dir) + " --out-dir " + (dir / "out").string()).code, 3);
}

TEST(Cli, BadInputsExitTwo) {
    EXPECT_EQ(run("analyze --cases").code, 2);
    EXPECT_EQ(run("frobnicate").code, 2);
    EXPECT_EQ(run("analyze --cases x.csv --group best").code, 2);
    EXPECT_EQ(run("--help").code, 0);
    const auto cfg = work() / "bad.conf";
    std::ofstream(cfg) << "max_lag = many\n";
    const auto in = work() / "bundle";
    EXPECT_EQ(run("plotdata " + inputs(in) + " --config " + cfg.string()).code, 2);
}

TEST(Cli, ConvertJson) {
    const auto json = work() / "daily.json";
    std::ofstream(json) << R"([{"date":20200409,"state":"CA","positiveIncrease":4},{"date":20200409,"state":"NY","positiveIncrease":null}])";
    const auto csv = work() / "converted.csv";
    ASSERT_EQ(run("convert --input " + json.string() + " --output " + csv.string()).code, 0);
    EXPECT_EQ(tc::io::read_file(csv.string()), "date,region,positive_increase\n2020-04-09,CA,4\n");
    std::ofstream(work() / "broken.json") << "[{";
    EXPECT_EQ(run("convert --input " + (work() / "broken.json").string() + " --output " + csv.string()).code, 2);
}

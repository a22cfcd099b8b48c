// trendcause: search-trend / case-count causality and forecasting reports.
//
// Exit codes: 0 success, 2 bad input (parse error, missing file, bad flag or
// config), 3 no regions or dates left after alignment, 4 numerical failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "trendcause/config.hpp"
#include "trendcause/ingest.hpp"
#include "trendcause/io.hpp"
#include "trendcause/report.hpp"
#include "trendcause/synth.hpp"

namespace fs = std::filesystem;

namespace {

struct PipelineFlags {
    std::string cases;
    std::string restaurant;
    std::string bar;
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> group;
    std::optional<int> ma_window;
    std::optional<int> max_lag;
    std::vector<std::string> overrides;
    std::string out_dir = ".";
};

void add_pipeline_flags(CLI::App* cmd, PipelineFlags& f) {
    cmd->add_option("--cases", f.cases, "Cases CSV (date,region,positive_increase)")->required();
    cmd->add_option("--trends-restaurant", f.restaurant, "Restaurant search CSV (date,region,query,value)");
    cmd->add_option("--trends-bar", f.bar, "Bar search CSV (date,region,query,value)");
    cmd->add_option("--config", f.config_path, "key = value configuration file");
    cmd->add_option("--seed", f.seed, "Seed for model initialization and dropout");
    cmd->add_option("--group", f.group, "Region grouping")->check(CLI::IsMember({"all", "paper"}));
    cmd->add_option("--ma-window", f.ma_window, "Moving-average window for plot data");
    cmd->add_option("--max-lag", f.max_lag, "Cap on the VAR lag order");
    cmd->add_option("--set", f.overrides, "Override any config key (key=value), repeatable");
    cmd->add_option("--out-dir", f.out_dir, "Output directory");
}

tc::Config resolve_config(const PipelineFlags& f) {
    tc::Config config;
    if (!f.config_path.empty()) config.apply_text(tc::io::read_file(f.config_path), f.config_path);
    for (const auto& kv : f.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw tc::Error(tc::ErrorKind::InvalidConfig, "--set expects key=value: " + kv);
        config.set(tc::io::trim(std::string_view(kv).substr(0, eq)), tc::io::trim(std::string_view(kv).substr(eq + 1)));
    }
    if (f.seed) config.set("seed", std::to_string(*f.seed));
    if (f.group) config.set("group", *f.group);
    if (f.ma_window) config.set("ma_window", std::to_string(*f.ma_window));
    if (f.max_lag) config.set("max_lag", std::to_string(*f.max_lag));
    config.validate();
    return config;
}

tc::report::Inputs inputs_of(const PipelineFlags& f) {
    tc::report::Inputs in;
    in.cases_path = f.cases;
    if (!f.restaurant.empty()) in.restaurant_path = f.restaurant;
    if (!f.bar.empty()) in.bar_path = f.bar;
    return in;
}

void report(const std::vector<std::string>& warnings, const std::vector<std::string>& written, const fs::path& dir) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
    for (const auto& name : written) std::cout << (dir / name).string() << '\n';
}

fs::path prepare_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw tc::Error(tc::ErrorKind::IoError, "cannot create " + dir + ": " + ec.message());
    return dir;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Causality tests and LSTM forecasts linking search trends to daily case counts"};
    app.require_subcommand(1);

    PipelineFlags analyze_flags, forecast_flags, plot_flags;
    auto* analyze = app.add_subcommand("analyze", "Granger and Pearson tables per region");
    add_pipeline_flags(analyze, analyze_flags);
    auto* forecast = app.add_subcommand("forecast", "Train baseline and search-augmented LSTMs, report test RMSE");
    add_pipeline_flags(forecast, forecast_flags);
    auto* plotdata = app.add_subcommand("plotdata", "Moving averages of the normalized series per region");
    add_pipeline_flags(plotdata, plot_flags);

    std::string json_in, csv_out;
    auto* convert = app.add_subcommand("convert", "Convert a COVID Tracking Project JSON export to cases CSV");
    convert->add_option("--input", json_in, "JSON export (array of daily state records)")->required();
    convert->add_option("--output", csv_out, "Cases CSV to write")->required();

    int synth_regions = 45, synth_length = 90, synth_lag = 2;
    double synth_beta = 0.8;
    std::uint64_t synth_seed = 42;
    std::string synth_start = "2020-04-09", synth_dir = ".";
    auto* synth = app.add_subcommand("synth", "Write a seeded synthetic multi-region bundle in the input CSV formats");
    synth->add_option("--regions", synth_regions, "Number of regions")->check(CLI::Range(1, 56));
    synth->add_option("--length", synth_length, "Days per series");
    synth->add_option("--seed", synth_seed, "Generator seed");
    synth->add_option("--beta", synth_beta, "Restaurant-to-cases coupling in even-indexed regions");
    synth->add_option("--lag", synth_lag, "Coupling lag in days");
    synth->add_option("--start", synth_start, "First date (YYYY-MM-DD)");
    synth->add_option("--out-dir", synth_dir, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*analyze) {
            const auto dir = prepare_dir(analyze_flags.out_dir);
            const auto out = tc::report::run_analyze(inputs_of(analyze_flags), resolve_config(analyze_flags), dir);
            report(out.warnings, out.written, dir);
        } else if (*forecast) {
            const auto dir = prepare_dir(forecast_flags.out_dir);
            const auto out = tc::report::run_forecast(inputs_of(forecast_flags), resolve_config(forecast_flags), dir);
            report(out.warnings, out.written, dir);
        } else if (*plotdata) {
            const auto dir = prepare_dir(plot_flags.out_dir);
            const auto out = tc::report::run_plotdata(inputs_of(plot_flags), resolve_config(plot_flags), dir);
            report(out.warnings, out.written, dir);
        } else if (*convert) {
            const auto result = tc::ingest::convert_covidtracking_json(tc::io::read_file(json_in), json_in);
            for (const auto& w : result.warnings) std::cerr << "warning: " << w.to_string() << '\n';
            tc::io::write_file_atomic(csv_out, tc::ingest::cases_csv(result.records));
            std::cout << csv_out << '\n';
        } else if (*synth) {
            const auto start = tc::try_parse_date(synth_start);
            if (!start) throw tc::Error(tc::ErrorKind::ParseError, "bad --start date: " + synth_start);
            const auto bundle = tc::synth::region_bundle(tc::ingest::us_regions(), synth_regions, synth_length,
                                                         synth_seed, *start, synth_beta, synth_lag);
            const auto dir = prepare_dir(synth_dir);
            tc::io::write_file_atomic(dir / "cases.csv", tc::ingest::cases_csv(bundle.cases));
            tc::io::write_file_atomic(dir / "trends_restaurant.csv", tc::ingest::trends_csv(&bundle.restaurant, nullptr));
            tc::io::write_file_atomic(dir / "trends_bar.csv", tc::ingest::trends_csv(nullptr, &bundle.bar));
            report({}, {"cases.csv", "trends_restaurant.csv", "trends_bar.csv"}, dir);
        }
    } catch (const tc::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return tc::report::exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    }
    return 0;
}

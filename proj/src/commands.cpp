#include "cryptoval/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include "cryptoval/backtest.hpp"
#include "cryptoval/explain.hpp"
#include "cryptoval/metrics.hpp"
#include "cryptoval/report_io.hpp"
#include "cryptoval/stats.hpp"

namespace cryptoval::cli {

using nlohmann::json;

MarketDataset LoadedData::window() const {
    return slice(full, full.dates()[begin], full.dates()[end - 1]);
}

LoadedData load_data(const RunConfig& cfg) {
    validate(cfg);
    const CsvSchema schema = schema_for(cfg);
    std::vector<RawTable> tables;
    for (const auto& path : cfg.data_paths) tables.push_back(read_csv_file(path, schema));

    LoadedData data{build_dataset(tables, missing_policy_for(cfg)), 0, 0};
    const Date from = cfg.from.empty() ? data.full.first_date() : *Date::parse(cfg.from);
    const Date to = cfg.to.empty() ? data.full.last_date() : *Date::parse(cfg.to);
    if (from < data.full.first_date() || to > data.full.last_date()) {
        throw Error(ErrorKind::RangeOutOfBounds, "window [" + from.to_string() + ", " + to.to_string() +
                                                     "] outside data [" + data.full.first_date().to_string() +
                                                     ", " + data.full.last_date().to_string() + "]");
    }
    data.begin = static_cast<std::size_t>(from - data.full.first_date());
    data.end = static_cast<std::size_t>(to - data.full.first_date()) + 1;
    return data;
}

namespace {

class OutputDir {
public:
    OutputDir(const RunConfig& cfg, const std::string& command)
        : dir_(cfg.out_dir), hash_(config_hash(command, cfg)) {
        std::filesystem::create_directories(dir_);
    }

    const std::string& hash() const { return hash_; }

    void write(const std::string& stem, const std::string& ext, const std::function<void(std::ostream&)>& body) {
        const auto path = (dir_ / (stem + "_" + hash_ + "." + ext)).string();
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
        body(out);
        out.close();
        if (!out) throw Error(ErrorKind::Io, "failed writing " + path);
        written_.push_back(path);
    }

    void write_json(const std::string& stem, const json& j) {
        write(stem, "json", [&](std::ostream& o) { o << j.dump(2) << '\n'; });
    }

    std::vector<std::string> files() const { return written_; }

private:
    std::filesystem::path dir_;
    std::string hash_;
    std::vector<std::string> written_;
};

json header(const std::string& command, const RunConfig& cfg, const OutputDir& out, const MarketDataset& ds) {
    return {{"command", command},
            {"config_hash", out.hash()},
            {"config", to_json(cfg)},
            {"window", {{"start", ds.first_date().to_string()}, {"end", ds.last_date().to_string()}, {"rows", ds.size()}}},
            {"volume_degraded", ds.info().volume_degraded},
            {"filled_cells", ds.info().filled_cells}};
}

// Proxies use the full history as lookback, then are cut to the window.
metrics::ProxyPanel window_proxies(const LoadedData& data, const RunConfig& cfg) {
    const auto full = metrics::compute_proxies(data.full, proxy_options_for(cfg));
    return metrics::slice(full, data.begin, data.end);
}

}  // namespace

std::vector<std::string> cmd_metrics(const RunConfig& cfg) {
    const auto data = load_data(cfg);
    const auto ds = data.window();
    auto panel = window_proxies(data, cfg);

    OutputDir out(cfg, "metrics");
    json meta = header("metrics", cfg, out, ds);
    try {
        meta["fpc"] = io::to_json(stats::attach_first_pc(panel));
    } catch (const Error& e) {
        meta["fpc"] = {{"error", std::string(to_string(e.kind())) + ": " + e.what()}};
    }
    meta["columns"] = metrics::ProxyPanel::column_names();
    for (const auto& name : metrics::ProxyPanel::column_names()) {
        const auto& s = panel.column(name);
        const auto first = first_defined(s);
        meta["first_defined"][name] = first ? json(panel.dates[*first].to_string()) : json(nullptr);
    }

    out.write("proxies", "csv", [&](std::ostream& o) { metrics::write_proxy_csv(panel, o); });

    const Series price = to_series(ds.price());
    const Series zone_low(ds.size(), cfg.zone_low);
    const Series zone_high(ds.size(), cfg.zone_high);
    out.write("plot_pu", "csv", [&](std::ostream& o) {
        io::write_long_csv(panel.dates,
                           {{"price_usd", &price},
                            {"pu_ratio", &panel.pu_ratio},
                            {"token_utility", &panel.token_utility},
                            {"zone_low", &zone_low},
                            {"zone_high", &zone_high}},
                           o);
    });
    out.write_json("metrics", meta);
    return out.files();
}

std::vector<std::string> cmd_table1(const RunConfig& cfg) {
    const auto data = load_data(cfg);
    const auto ds = data.window();
    const auto rp = metrics::returns(ds, cfg.horizons);
    const auto summary = stats::summarize_returns(rp, lag_policy_for(cfg));

    OutputDir out(cfg, "table1");
    json j = header("table1", cfg, out, ds);
    j["table1"] = io::to_json(summary);
    out.write("table1", "csv", [&](std::ostream& o) { io::write_table1_csv(summary, o); });
    std::vector<io::PlotSeries> series;
    std::vector<std::string> names;
    for (int h : rp.horizons) names.push_back("roi_" + std::to_string(h));
    for (std::size_t k = 0; k < rp.horizons.size(); ++k) series.push_back({names[k], &rp.roi[k]});
    out.write("plot_returns", "csv", [&](std::ostream& o) { io::write_long_csv(rp.dates, series, o); });
    out.write_json("table1", j);
    return out.files();
}

std::vector<std::string> cmd_table2(const RunConfig& cfg) {
    const auto data = load_data(cfg);
    const auto ds = data.window();
    auto panel = window_proxies(data, cfg);

    OutputDir out(cfg, "table2");
    json j = header("table2", cfg, out, ds);
    try {
        j["fpc"] = io::to_json(stats::attach_first_pc(panel));
    } catch (const Error& e) {
        j["fpc"] = {{"error", std::string(to_string(e.kind())) + ": " + e.what()}};
    }
    const auto rp = metrics::returns(ds, cfg.table2_horizons);
    const auto table = stats::predictive_regressions(panel, rp, cfg.proxies, cfg.table2_horizons,
                                                     lag_policy_for(cfg));
    j["table2"] = io::to_json(table);
    out.write("table2", "csv", [&](std::ostream& o) { io::write_table2_csv(table, o); });
    out.write_json("table2", j);
    return out.files();
}

std::vector<std::string> cmd_cluster(const RunConfig& cfg) {
    const auto data = load_data(cfg);
    const auto ds = data.window();
    const auto panel = window_proxies(data, cfg);
    const auto rp = metrics::returns(ds, {cfg.cluster_horizon});
    const auto result = explain::cluster_investments(
        panel.column(cfg.ratio), rp, cfg.cluster_horizon, kmeans_options_for(cfg),
        cfg.roi_statistic == "median" ? explain::RoiStatistic::Median : explain::RoiStatistic::Mean);

    OutputDir out(cfg, "cluster");
    json j = header("cluster", cfg, out, ds);
    j["ratio"] = cfg.ratio;
    j["horizon"] = cfg.cluster_horizon;
    j["cluster"] = io::to_json(result);
    out.write("plot_cluster", "csv", [&](std::ostream& o) { io::write_cluster_points_csv(result, o); });
    out.write_json("cluster", j);
    return out.files();
}

std::vector<std::string> cmd_tree(const RunConfig& cfg) {
    const auto data = load_data(cfg);
    const auto ds = data.window();
    const auto panel = window_proxies(data, cfg);
    const auto rp = metrics::returns(ds, {cfg.tree_horizon});
    const auto points = explain::build_points(panel.column(cfg.ratio), rp, cfg.tree_horizon);
    const auto samples = explain::label_points(points, cfg.bull_threshold);
    const auto report = explain::fit_tree(samples, tree_options_for(cfg));

    OutputDir out(cfg, "tree");
    json j = header("tree", cfg, out, ds);
    j["horizon"] = cfg.tree_horizon;
    j["bull_threshold"] = cfg.bull_threshold;
    j["tree"] = io::to_json(report);
    out.write("tree", "txt", [&](std::ostream& o) { o << explain::render_tree(report); });
    out.write_json("tree", j);
    return out.files();
}

std::vector<std::string> cmd_backtest(const RunConfig& cfg) {
    const auto data = load_data(cfg);
    const auto ds = data.window();
    const auto panel = window_proxies(data, cfg);
    const auto params = run_params_for(cfg);

    OutputDir out(cfg, "backtest");
    json comparison = header("backtest", cfg, out, ds);
    comparison["strategies"] = json::array();
    std::vector<backtest::BacktestReport> reports;
    for (const auto& name : cfg.strategies) {
        backtest::SignalSeries signals;
        if (name == "pu_quantile") {
            signals = backtest::pu_quantile_signals(ds, panel.pu_ratio, quantile_options_for(cfg));
        } else if (name == "ma_cross") {
            signals = backtest::ma_cross_signals(ds, cfg.ma_short, cfg.ma_long);
        } else {
            signals = backtest::buy_hold_signals(ds);
        }
        auto report = backtest::run(ds, signals, params, name);

        json j = header("backtest", cfg, out, ds);
        j["report"] = io::to_json(report);
        out.write_json("backtest_" + name, j);
        out.write("trades_" + name, "csv", [&](std::ostream& o) { io::write_trades_csv(report, o); });
        out.write("equity_" + name, "csv", [&](std::ostream& o) { io::write_equity_csv(report, o); });

        comparison["strategies"].push_back({{"strategy", name},
                                            {"gross_roi", report.gross_roi},
                                            {"gross_roi_liquidated", report.gross_roi_liquidated},
                                            {"sharpe_annualized", report.sharpe_annualized
                                                                      ? json(*report.sharpe_annualized)
                                                                      : json(nullptr)},
                                            {"max_drawdown", report.max_drawdown},
                                            {"trade_count", report.trades.size()}});
        reports.push_back(std::move(report));
    }

    std::vector<Series> equity(reports.size());
    std::vector<io::PlotSeries> plot;
    for (std::size_t k = 0; k < reports.size(); ++k) {
        for (const auto& e : reports[k].equity) equity[k].push_back(e.equity);
        plot.push_back({reports[k].strategy, &equity[k]});
    }
    out.write("plot_equity", "csv", [&](std::ostream& o) { io::write_long_csv(ds.dates(), plot, o); });
    out.write_json("comparison", comparison);
    return out.files();
}

int exit_code_for(const std::string& command, ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument:
            return kExitUsage;
        case ErrorKind::MissingDateColumn:
        case ErrorKind::DuplicateDate:
        case ErrorKind::NonMonotoneDate:
        case ErrorKind::MalformedCsv:
        case ErrorKind::EmptyOverlap:
        case ErrorKind::InvariantViolation:
        case ErrorKind::UnfilledGap:
        case ErrorKind::RangeOutOfBounds:
        case ErrorKind::Io:
            return kExitData;
        default:
            break;
    }
    const auto it = std::find(kCommands.begin(), kCommands.end(), command);
    return kExitCommandBase + static_cast<int>(it - kCommands.begin());
}

namespace {

std::string quoted(const std::string& s) {
    std::string q = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') q.push_back('\\');
        if (c == '\n' || c == '\r') {
            q += ' ';
            continue;
        }
        q.push_back(c);
    }
    return q + "\"";
}

void add_options(CLI::App& app, RunConfig& cfg) {
    const std::string data = "Data";
    app.add_option("--data", cfg.data_paths, "Input CSV file(s), joined on date")->group(data);
    app.add_option("--map", cfg.column_map, "Extra column mapping SOURCE=canonical")->group(data);
    app.add_option("--date-column", cfg.date_columns, "Accepted date column header(s)")->group(data);
    app.add_option("--missing", cfg.missing_policy, "Missing-value policy: ffill | reject")->group(data);
    app.add_option("--max-gap", cfg.max_gap_days, "Longest forward-filled gap in days")->group(data);
    app.add_option("--from", cfg.from, "First day of the analysis window (YYYY-MM-DD)")->group(data);
    app.add_option("--to", cfg.to, "Last day of the analysis window (YYYY-MM-DD)")->group(data);
    app.add_option("--out", cfg.out_dir, "Output directory")->group(data);

    const std::string m = "Metrics";
    app.add_option("--mute-volatility", cfg.mute_volatility, "Drop the volatility term from token utility")->group(m);
    app.add_option("--volatility-window", cfg.volatility_window, "Volatility window when not muted")->group(m);
    app.add_option("--zone-low", cfg.zone_low, "Lower PU display threshold")->group(m);
    app.add_option("--zone-high", cfg.zone_high, "Upper PU display threshold")->group(m);

    const std::string s = "Statistics";
    app.add_option("--horizons", cfg.horizons, "Return horizons for table1 (days)")->group(s);
    app.add_option("--table2-horizons", cfg.table2_horizons, "Return horizons for table2 (days)")->group(s);
    app.add_option("--proxies", cfg.proxies, "Regressors for table2")->group(s);
    app.add_option("--lag-policy", cfg.lag_policy, "Newey-West lags: horizon-1 | fixed")->group(s);
    app.add_option("--fixed-lags", cfg.fixed_lags, "Lag count when --lag-policy fixed")->group(s);

    const std::string c = "Clustering";
    app.add_option("--ratio", cfg.ratio, "Ratio used by cluster and tree")->group(c);
    app.add_option("--k", cfg.k, "Number of clusters")->group(c);
    app.add_option("--seed", cfg.seed, "Random seed")->group(c);
    app.add_option("--restarts", cfg.restarts, "K-means restarts")->group(c);
    app.add_option("--cluster-horizon", cfg.cluster_horizon, "Investment horizon for clustering (days)")->group(c);
    app.add_option("--roi-statistic", cfg.roi_statistic, "Per-cluster ROI statistic: mean | median")->group(c);

    const std::string t = "Decision tree";
    app.add_option("--criterion", cfg.criterion, "entropy | gini")->group(t);
    app.add_option("--max-depth", cfg.max_depth, "Maximum tree depth")->group(t);
    app.add_option("--train-fraction", cfg.train_fraction, "Chronological training share")->group(t);
    app.add_option("--bull-threshold", cfg.bull_threshold, "ROI above which an investment is bull")->group(t);
    app.add_option("--tree-horizon", cfg.tree_horizon, "Investment horizon for the tree (days)")->group(t);
    app.add_option("--purge", cfg.purge, "Drop horizon-1 overlapping samples after the split")->group(t);

    const std::string b = "Backtest";
    app.add_option("--strategies", cfg.strategies, "pu_quantile, ma_cross, buy_hold")->group(b);
    app.add_option("--capital", cfg.capital, "Initial capital (USD)")->group(b);
    app.add_option("--fee-rate", cfg.fee_rate, "Proportional fee per trade")->group(b);
    app.add_option("--cap", cfg.cap, "Token limit per trade, 0 = none")->group(b);
    app.add_option("--low-q", cfg.low_q, "Buy quantile")->group(b);
    app.add_option("--high-q", cfg.high_q, "Sell quantile")->group(b);
    app.add_option("--warmup", cfg.warmup, "Observations before the first quantile signal")->group(b);
    app.add_option("--quantile-window", cfg.quantile_window, "Rolling quantile window, 0 = expanding")->group(b);
    app.add_option("--ma-short", cfg.ma_short, "Short moving-average window")->group(b);
    app.add_option("--ma-long", cfg.ma_long, "Long moving-average window")->group(b);
    app.add_option("--first-signal-only", cfg.first_signal_only, "Ignore repeated same-side signals")->group(b);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Valuation ratios, predictive regressions, explainability and backtests for crypto time series"};
    app.set_config("--config", "", "Key = value config file; flags override it");
    app.require_subcommand(1, 1);
    add_options(app, cfg);

    const std::vector<std::pair<std::string, std::string>> commands{
        {"metrics", "Compute the proxy panel"},
        {"table1", "Return summary statistics and extreme events"},
        {"table2", "Predictive regressions with Newey-West t-statistics"},
        {"cluster", "K-means on (buy, sell) ratio pairs"},
        {"tree", "Bull-market decision tree on the buy-date ratio"},
        {"backtest", "Run the trading strategies"},
    };
    for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error command=- kind=Usage message=" << quoted(e.what()) << '\n';
        return kExitUsage;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        std::vector<std::string> files;
        if (command == "metrics") files = cmd_metrics(cfg);
        else if (command == "table1") files = cmd_table1(cfg);
        else if (command == "table2") files = cmd_table2(cfg);
        else if (command == "cluster") files = cmd_cluster(cfg);
        else if (command == "tree") files = cmd_tree(cfg);
        else files = cmd_backtest(cfg);
        for (const auto& f : files) out << f << '\n';
        return kExitOk;
    } catch (const Error& e) {
        err << "error command=" << command << " kind=" << to_string(e.kind()) << " message=" << quoted(e.what())
            << '\n';
        return exit_code_for(command, e.kind());
    } catch (const std::exception& e) {
        err << "error command=" << command << " kind=Internal message=" << quoted(e.what()) << '\n';
        return exit_code_for(command, ErrorKind::InsufficientData);
    }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv;
    argv.push_back("cryptoval");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace cryptoval::cli

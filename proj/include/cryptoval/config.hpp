#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "cryptoval/backtest.hpp"
#include "cryptoval/explain.hpp"
#include "cryptoval/ingest.hpp"
#include "cryptoval/metrics.hpp"
#include "cryptoval/stats.hpp"

namespace cryptoval {

/// Every knob of a CLI run. Populated from the config file and flags.
struct RunConfig {
    // data
    std::vector<std::string> data_paths;
    /// Extra "SourceHeader=canonical_name" pairs layered over the default mapping.
    std::vector<std::string> column_map;
    std::vector<std::string> date_columns{"date", "time", "Date"};
    std::string missing_policy = "ffill";  // ffill | reject
    int max_gap_days = 3;
    /// Inclusive analysis window; empty = dataset bounds. Earlier history still
    /// serves as lookback for the proxies.
    std::string from;
    std::string to;

    // metrics
    bool mute_volatility = true;
    int volatility_window = 180;
    double zone_low = 60.0;
    double zone_high = 100.0;

    // table1 / table2
    std::vector<int> horizons{1, 7, 30, 90, 180, 360};
    std::vector<int> table2_horizons{7, 30, 90, 180, 360};
    std::vector<std::string> proxies{stats::kTable2Proxies};
    std::string lag_policy = "horizon-1";  // horizon-1 | fixed
    int fixed_lags = 0;

    // cluster
    std::string ratio = "pu_ratio";
    int k = 4;
    std::uint64_t seed = 0;
    int restarts = 10;
    int cluster_horizon = 90;
    std::string roi_statistic = "mean";  // mean | median

    // tree
    std::string criterion = "entropy";  // entropy | gini
    int max_depth = 1;
    double train_fraction = 0.75;
    double bull_threshold = 0.20;
    int tree_horizon = 180;
    bool purge = true;

    // backtest
    std::vector<std::string> strategies{"pu_quantile", "ma_cross", "buy_hold"};
    double capital = 100000.0;
    double fee_rate = 0.001;
    /// Per-trade token cap; 0 disables it.
    double cap = 100.0;
    double low_q = 0.1;
    double high_q = 0.9;
    int warmup = 30;
    int quantile_window = 0;
    int ma_short = 20;
    int ma_long = 100;
    bool first_signal_only = false;

    std::string out_dir = "out";
};

/// Throws Error(InvalidArgument) on the first field outside its domain or a missing input file.
void validate(const RunConfig& cfg);

/// Canonical JSON of every field except the output directory.
nlohmann::json to_json(const RunConfig& cfg);

/// 64-bit FNV-1a of `command` plus the canonical config, as 16 hex digits.
std::string config_hash(const std::string& command, const RunConfig& cfg);

CsvSchema schema_for(const RunConfig& cfg);
MissingPolicy missing_policy_for(const RunConfig& cfg);
stats::LagPolicy lag_policy_for(const RunConfig& cfg);
metrics::ProxyOptions proxy_options_for(const RunConfig& cfg);
explain::KMeansOptions kmeans_options_for(const RunConfig& cfg);
explain::TreeOptions tree_options_for(const RunConfig& cfg);
backtest::RunParams run_params_for(const RunConfig& cfg);
backtest::QuantileSignalOptions quantile_options_for(const RunConfig& cfg);

}  // namespace cryptoval

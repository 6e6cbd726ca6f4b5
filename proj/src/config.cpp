#include "cryptoval/config.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>

#include "cryptoval/error.hpp"

namespace cryptoval {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorKind::InvalidArgument, what);
}

bool one_of(const std::string& v, std::initializer_list<const char*> options) {
    return std::any_of(options.begin(), options.end(), [&](const char* o) { return v == o; });
}

}  // namespace

void validate(const RunConfig& cfg) {
    require(!cfg.data_paths.empty(), "no --data file given");
    for (const auto& p : cfg.data_paths) {
        require(std::filesystem::is_regular_file(p), "data file not found: " + p);
    }
    for (const auto& m : cfg.column_map) {
        const auto eq = m.find('=');
        require(eq != std::string::npos && eq > 0 && eq + 1 < m.size(),
                "column mapping '" + m + "' is not SOURCE=canonical");
    }
    require(!cfg.date_columns.empty(), "date_columns must not be empty");
    require(one_of(cfg.missing_policy, {"ffill", "reject"}), "missing_policy must be ffill or reject");
    require(cfg.max_gap_days >= 0, "max_gap_days must be >= 0");

    std::optional<Date> from, to;
    if (!cfg.from.empty()) {
        from = Date::parse(cfg.from);
        require(from.has_value(), "invalid --from date '" + cfg.from + "'");
    }
    if (!cfg.to.empty()) {
        to = Date::parse(cfg.to);
        require(to.has_value(), "invalid --to date '" + cfg.to + "'");
    }
    require(!(from && to && *from > *to), "--from is after --to");

    require(cfg.volatility_window >= 2, "volatility_window must be >= 2");
    require(cfg.zone_low < cfg.zone_high, "zone_low must be below zone_high");
    for (int h : cfg.horizons) require(h >= 1, "horizons must be >= 1");
    for (int h : cfg.table2_horizons) require(h >= 1, "table2_horizons must be >= 1");
    for (const auto& p : cfg.proxies) {
        require(std::find(metrics::ProxyPanel::column_names().begin(), metrics::ProxyPanel::column_names().end(),
                          p) != metrics::ProxyPanel::column_names().end(),
                "unknown proxy '" + p + "'");
    }
    require(one_of(cfg.lag_policy, {"horizon-1", "fixed"}), "lag_policy must be horizon-1 or fixed");
    require(cfg.fixed_lags >= 0, "fixed_lags must be >= 0");

    require(std::find(metrics::ProxyPanel::column_names().begin(), metrics::ProxyPanel::column_names().end(),
                      cfg.ratio) != metrics::ProxyPanel::column_names().end(),
            "unknown ratio '" + cfg.ratio + "'");
    require(cfg.k >= 1, "k must be >= 1");
    require(cfg.restarts >= 1, "restarts must be >= 1");
    require(cfg.cluster_horizon >= 1, "cluster_horizon must be >= 1");
    require(one_of(cfg.roi_statistic, {"mean", "median"}), "roi_statistic must be mean or median");

    require(one_of(cfg.criterion, {"entropy", "gini"}), "criterion must be entropy or gini");
    require(cfg.max_depth >= 0, "max_depth must be >= 0");
    require(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0, "train_fraction must lie in (0, 1)");
    require(cfg.tree_horizon >= 1, "tree_horizon must be >= 1");

    for (const auto& s : cfg.strategies) {
        require(one_of(s, {"pu_quantile", "ma_cross", "buy_hold"}), "unknown strategy '" + s + "'");
    }
    require(cfg.capital > 0.0, "capital must be > 0");
    require(cfg.fee_rate >= 0.0 && cfg.fee_rate < 1.0, "fee_rate must lie in [0, 1)");
    require(cfg.cap >= 0.0, "cap must be >= 0");
    require(cfg.low_q > 0.0 && cfg.low_q < cfg.high_q && cfg.high_q < 1.0,
            "quantiles must satisfy 0 < low_q < high_q < 1");
    require(cfg.warmup >= 1, "warmup must be >= 1");
    require(cfg.quantile_window >= 0, "quantile_window must be >= 0");
    require(cfg.ma_short >= 1 && cfg.ma_short < cfg.ma_long, "ma_short must be >= 1 and below ma_long");
}

nlohmann::json to_json(const RunConfig& cfg) {
    return {
        {"data", cfg.data_paths},
        {"column_map", cfg.column_map},
        {"date_columns", cfg.date_columns},
        {"missing_policy", cfg.missing_policy},
        {"max_gap_days", cfg.max_gap_days},
        {"from", cfg.from},
        {"to", cfg.to},
        {"mute_volatility", cfg.mute_volatility},
        {"volatility_window", cfg.volatility_window},
        {"zone_low", cfg.zone_low},
        {"zone_high", cfg.zone_high},
        {"horizons", cfg.horizons},
        {"table2_horizons", cfg.table2_horizons},
        {"proxies", cfg.proxies},
        {"lag_policy", cfg.lag_policy},
        {"fixed_lags", cfg.fixed_lags},
        {"ratio", cfg.ratio},
        {"k", cfg.k},
        {"seed", cfg.seed},
        {"restarts", cfg.restarts},
        {"cluster_horizon", cfg.cluster_horizon},
        {"roi_statistic", cfg.roi_statistic},
        {"criterion", cfg.criterion},
        {"max_depth", cfg.max_depth},
        {"train_fraction", cfg.train_fraction},
        {"bull_threshold", cfg.bull_threshold},
        {"tree_horizon", cfg.tree_horizon},
        {"purge", cfg.purge},
        {"strategies", cfg.strategies},
        {"capital", cfg.capital},
        {"fee_rate", cfg.fee_rate},
        {"cap", cfg.cap},
        {"low_q", cfg.low_q},
        {"high_q", cfg.high_q},
        {"warmup", cfg.warmup},
        {"quantile_window", cfg.quantile_window},
        {"ma_short", cfg.ma_short},
        {"ma_long", cfg.ma_long},
        {"first_signal_only", cfg.first_signal_only},
    };
}

std::string config_hash(const std::string& command, const RunConfig& cfg) {
    const std::string text = command + "\n" + to_json(cfg).dump();
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

CsvSchema schema_for(const RunConfig& cfg) {
    CsvSchema schema = CsvSchema::defaults();
    schema.date_columns = cfg.date_columns;
    for (const auto& m : cfg.column_map) {
        const auto eq = m.find('=');
        schema.rename[m.substr(0, eq)] = m.substr(eq + 1);
    }
    return schema;
}

MissingPolicy missing_policy_for(const RunConfig& cfg) {
    return {cfg.missing_policy == "reject" ? MissingPolicy::Mode::Reject : MissingPolicy::Mode::ForwardFill,
            cfg.max_gap_days};
}

stats::LagPolicy lag_policy_for(const RunConfig& cfg) {
    return {cfg.lag_policy == "fixed" ? stats::LagPolicy::Mode::Fixed : stats::LagPolicy::Mode::HorizonMinusOne,
            cfg.fixed_lags};
}

metrics::ProxyOptions proxy_options_for(const RunConfig& cfg) {
    return {cfg.mute_volatility, cfg.volatility_window};
}

explain::KMeansOptions kmeans_options_for(const RunConfig& cfg) {
    explain::KMeansOptions o;
    o.k = cfg.k;
    o.seed = cfg.seed;
    o.restarts = cfg.restarts;
    return o;
}

explain::TreeOptions tree_options_for(const RunConfig& cfg) {
    explain::TreeOptions o;
    o.criterion = cfg.criterion == "gini" ? explain::SplitCriterion::Gini : explain::SplitCriterion::Entropy;
    o.max_depth = cfg.max_depth;
    o.train_fraction = cfg.train_fraction;
    o.purge = cfg.purge ? static_cast<std::size_t>(cfg.tree_horizon - 1) : 0;
    o.feature_name = cfg.ratio;
    return o;
}

backtest::RunParams run_params_for(const RunConfig& cfg) {
    backtest::RunParams p;
    p.capital = cfg.capital;
    p.fee_rate = cfg.fee_rate;
    p.cap_tokens = cfg.cap > 0.0 ? std::optional<double>(cfg.cap) : std::nullopt;
    p.first_signal_only = cfg.first_signal_only;
    return p;
}

backtest::QuantileSignalOptions quantile_options_for(const RunConfig& cfg) {
    backtest::QuantileSignalOptions o;
    o.low_q = cfg.low_q;
    o.high_q = cfg.high_q;
    o.warmup = static_cast<std::size_t>(cfg.warmup);
    o.window = static_cast<std::size_t>(cfg.quantile_window);
    return o;
}

}  // namespace cryptoval

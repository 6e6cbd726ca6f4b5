#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cryptoval/date.hpp"
#include "cryptoval/ingest.hpp"
#include "cryptoval/series.hpp"

namespace cryptoval::backtest {

enum class Signal { Hold, Buy, Sell };
std::string to_string(Signal s);

/// Per-day actions aligned with a dataset's dates; `value` carries the
/// indicator that produced each action (recorded on executed trades).
struct SignalSeries {
    std::vector<Date> dates;
    std::vector<Signal> actions;
    Series value;
};

struct QuantileSignalOptions {
    double low_q = 0.1;
    double high_q = 0.9;
    /// Minimum number of defined observations (including today) before any signal.
    std::size_t warmup = 30;
    /// 0 = expanding history; otherwise the trailing number of defined observations.
    std::size_t window = 0;
};

/// Inclusive linear-interpolation quantile of sorted data.
double quantile_sorted(const std::vector<double>& sorted, double q);

std::vector<Signal> signal_pu_quantile(const Series& pu, const QuantileSignalOptions& options = {});
std::vector<Signal> signal_ma_cross(const std::vector<double>& price, int short_window, int long_window);
std::vector<Signal> signal_buy_hold(std::size_t days);

/// Simple moving average; undefined for the first window-1 days.
Series moving_average(const std::vector<double>& values, int window);

struct RunParams {
    double capital = 100000.0;
    double fee_rate = 0.001;
    /// Per-trade token limit; nullopt disables the cap.
    std::optional<double> cap_tokens = 100.0;
    /// When set, a signal only executes if the previous executed trade was on the other side.
    bool first_signal_only = false;
};

struct Trade {
    Date date;
    Signal side = Signal::Hold;
    double tokens = 0.0;
    double price = 0.0;
    double notional = 0.0;
    double fee_usd = 0.0;
    std::optional<double> signal_value;
};

struct EquityPoint {
    Date date;
    double cash = 0.0;
    double holdings = 0.0;
    double equity = 0.0;
};

struct BacktestReport {
    std::string strategy;
    RunParams params;
    std::vector<Trade> trades;
    std::vector<EquityPoint> equity;
    double gross_roi = 0.0;
    /// Final holdings valued at the last close net of the selling fee.
    double gross_roi_liquidated = 0.0;
    std::optional<double> sharpe_annualized;
    double max_drawdown = 0.0;
};

/// Smallest cash balance that still funds a buy.
inline constexpr double kCashDust = 1e-8;

BacktestReport run(const MarketDataset& ds, const SignalSeries& signals, const RunParams& params,
                   const std::string& strategy = "custom");

/// mean / sd of daily equity returns x sqrt(365); nullopt when sd is 0.
std::optional<double> annualized_sharpe(const std::vector<EquityPoint>& equity);
double max_drawdown(const std::vector<EquityPoint>& equity);

struct StrategyParams {
    QuantileSignalOptions quantile;
    int ma_short = 20;
    int ma_long = 100;
};

SignalSeries pu_quantile_signals(const MarketDataset& ds, const Series& pu, const QuantileSignalOptions& options);
SignalSeries ma_cross_signals(const MarketDataset& ds, int short_window, int long_window);
SignalSeries buy_hold_signals(const MarketDataset& ds);

}  // namespace cryptoval::backtest

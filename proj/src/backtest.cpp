#include "cryptoval/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "cryptoval/error.hpp"

namespace cryptoval::backtest {

std::string to_string(Signal s) {
    switch (s) {
        case Signal::Buy: return "buy";
        case Signal::Sell: return "sell";
        case Signal::Hold: return "hold";
    }
    return "hold";
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw Error(ErrorKind::InsufficientData, "quantile of empty sample");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<Signal> signal_pu_quantile(const Series& pu, const QuantileSignalOptions& options) {
    if (!(options.low_q > 0.0 && options.low_q < options.high_q && options.high_q < 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "quantiles must satisfy 0 < low_q < high_q < 1");
    }
    std::vector<Signal> out(pu.size(), Signal::Hold);
    std::vector<double> sorted;
    std::deque<double> window;
    for (std::size_t t = 0; t < pu.size(); ++t) {
        if (!pu[t]) continue;
        const double v = *pu[t];
        sorted.insert(std::upper_bound(sorted.begin(), sorted.end(), v), v);
        if (options.window > 0) {
            window.push_back(v);
            if (window.size() > options.window) {
                sorted.erase(std::lower_bound(sorted.begin(), sorted.end(), window.front()));
                window.pop_front();
            }
        }
        if (sorted.size() < options.warmup) continue;

        const bool buy = v <= quantile_sorted(sorted, options.low_q);
        const bool sell = v >= quantile_sorted(sorted, options.high_q);
        if (buy != sell) out[t] = buy ? Signal::Buy : Signal::Sell;
    }
    return out;
}

Series moving_average(const std::vector<double>& values, int window) {
    if (window < 1) throw Error(ErrorKind::InvalidArgument, "moving-average window must be >= 1");
    const auto w = static_cast<std::size_t>(window);
    Series out(values.size());
    for (std::size_t t = w - 1; t < values.size(); ++t) {
        double s = 0.0;
        for (std::size_t i = t + 1 - w; i <= t; ++i) s += values[i];
        out[t] = s / static_cast<double>(w);
    }
    return out;
}

std::vector<Signal> signal_ma_cross(const std::vector<double>& price, int short_window, int long_window) {
    if (short_window < 1 || short_window >= long_window) {
        throw Error(ErrorKind::WindowOrder, "short MA window must be shorter than the long window");
    }
    const Series fast = moving_average(price, short_window);
    const Series slow = moving_average(price, long_window);

    // -1 below, 0 level, +1 above. Averages within 1e-12 relative are level so
    // flat prices cannot produce rounding crossings.
    auto relation = [](double a, double b) {
        if (std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b))) return 0;
        return a > b ? 1 : -1;
    };

    std::vector<Signal> out(price.size(), Signal::Hold);
    int prev = 0;
    for (std::size_t t = 0; t < price.size(); ++t) {
        if (!fast[t] || !slow[t]) continue;
        const int cur = relation(*fast[t], *slow[t]);
        if (cur == 1 && prev <= 0) out[t] = Signal::Buy;
        if (cur == -1 && prev >= 0) out[t] = Signal::Sell;
        prev = cur;
    }
    return out;
}

std::vector<Signal> signal_buy_hold(std::size_t days) {
    std::vector<Signal> out(days, Signal::Hold);
    if (days > 0) out[0] = Signal::Buy;
    return out;
}

BacktestReport run(const MarketDataset& ds, const SignalSeries& signals, const RunParams& params,
                   const std::string& strategy) {
    if (signals.dates != ds.dates() || signals.actions.size() != ds.size()) {
        throw Error(ErrorKind::SignalDateMismatch, "signal dates are not aligned with the dataset");
    }
    if (!(params.capital > 0.0) || !(params.fee_rate >= 0.0) ||
        (params.cap_tokens && !(*params.cap_tokens > 0.0))) {
        throw Error(ErrorKind::InvalidArgument, "capital and cap must be positive, fee_rate non-negative");
    }

    BacktestReport report;
    report.strategy = strategy;
    report.params = params;
    report.equity.reserve(ds.size());

    double cash = params.capital;
    double holdings = 0.0;
    Signal last_side = Signal::Hold;
    const auto& price = ds.price();
    for (std::size_t t = 0; t < ds.size(); ++t) {
        const Signal action = signals.actions[t];
        const double p = price[t];
        const bool allowed = !params.first_signal_only || last_side != action;
        const std::optional<double> value = t < signals.value.size() ? signals.value[t] : std::nullopt;

        if (action == Signal::Buy && allowed && cash > kCashDust) {
            double tokens = cash / (p * (1.0 + params.fee_rate));
            if (params.cap_tokens) tokens = std::min(tokens, *params.cap_tokens);
            // Rounding can push the cost of an all-cash buy a few ulps past
            // the balance; step the size down until it fits.
            while (tokens > 0.0 && tokens * p + params.fee_rate * (tokens * p) > cash) {
                tokens = std::nextafter(tokens, 0.0);
            }
            const double notional = tokens * p;
            const double fee = params.fee_rate * notional;
            cash -= notional + fee;
            holdings += tokens;
            report.trades.push_back({ds.dates()[t], Signal::Buy, tokens, p, notional, fee, value});
            last_side = Signal::Buy;
        } else if (action == Signal::Sell && allowed && holdings > 0.0) {
            const double tokens = params.cap_tokens ? std::min(holdings, *params.cap_tokens) : holdings;
            const double notional = tokens * p;
            const double fee = params.fee_rate * notional;
            holdings -= tokens;
            cash += notional - fee;
            report.trades.push_back({ds.dates()[t], Signal::Sell, tokens, p, notional, fee, value});
            last_side = Signal::Sell;
        }
        report.equity.push_back({ds.dates()[t], cash, holdings, cash + holdings * p});
    }

    const auto& last = report.equity.back();
    report.gross_roi = last.equity / params.capital - 1.0;
    report.gross_roi_liquidated =
        (last.cash + last.holdings * price.back() * (1.0 - params.fee_rate)) / params.capital - 1.0;
    report.sharpe_annualized = annualized_sharpe(report.equity);
    report.max_drawdown = max_drawdown(report.equity);
    return report;
}

std::optional<double> annualized_sharpe(const std::vector<EquityPoint>& equity) {
    if (equity.size() < 3) return std::nullopt;
    std::vector<double> r;
    r.reserve(equity.size() - 1);
    for (std::size_t t = 1; t < equity.size(); ++t) r.push_back(equity[t].equity / equity[t - 1].equity - 1.0);
    double mean = 0.0;
    for (double x : r) mean += x;
    mean /= static_cast<double>(r.size());
    double ss = 0.0;
    for (double x : r) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / static_cast<double>(r.size() - 1));
    if (!(sd > 0.0)) return std::nullopt;
    return mean / sd * std::sqrt(365.0);
}

double max_drawdown(const std::vector<EquityPoint>& equity) {
    double peak = 0.0;
    double worst = 0.0;
    for (const auto& e : equity) {
        peak = std::max(peak, e.equity);
        if (peak > 0.0) worst = std::max(worst, 1.0 - e.equity / peak);
    }
    return worst;
}

SignalSeries pu_quantile_signals(const MarketDataset& ds, const Series& pu, const QuantileSignalOptions& options) {
    return {ds.dates(), signal_pu_quantile(pu, options), pu};
}

SignalSeries ma_cross_signals(const MarketDataset& ds, int short_window, int long_window) {
    auto actions = signal_ma_cross(ds.price(), short_window, long_window);
    const Series fast = moving_average(ds.price(), short_window);
    const Series slow = moving_average(ds.price(), long_window);
    return {ds.dates(), std::move(actions), safe_divide(fast, slow)};
}

SignalSeries buy_hold_signals(const MarketDataset& ds) {
    return {ds.dates(), signal_buy_hold(ds.size()), to_series(ds.price())};
}

}  // namespace cryptoval::backtest

#include "cryptoval/report_io.hpp"

#include <cmath>
#include <ostream>

namespace cryptoval::io {

namespace {

json opt(const std::optional<double>& v) {
    return v && std::isfinite(*v) ? json(*v) : json(nullptr);
}

json num(double v) {
    return std::isfinite(v) ? json(v) : json(nullptr);
}

}  // namespace

json to_json(const stats::SummaryStats& s) {
    return {{"horizon", s.horizon},   {"n", s.n},
            {"lags", s.lags},         {"mean", num(s.mean)},
            {"sd", num(s.sd)},        {"t_stat", opt(s.t_stat)},
            {"sharpe", opt(s.sharpe)}, {"skewness", opt(s.skewness)},
            {"kurtosis", opt(s.kurtosis)}, {"pct_positive", num(s.pct_positive)}};
}

json to_json(const stats::ReturnSummary& s) {
    json rows = json::array();
    for (const auto& h : s.by_horizon) rows.push_back(to_json(h));
    json extremes = json::array();
    for (const auto& e : s.extremes) {
        extremes.push_back({{"threshold", e.threshold},
                            {"disasters", e.disasters},
                            {"disasters_pct", e.disasters_pct},
                            {"miracles", e.miracles},
                            {"miracles_pct", e.miracles_pct}});
    }
    return {{"summary", rows}, {"extreme_events", extremes}};
}

json to_json(const stats::RegressionResult& r) {
    return {{"proxy", r.proxy_name},  {"horizon", r.horizon_days},     {"alpha", num(r.alpha)},
            {"beta", num(r.beta)},    {"beta_variance", num(r.beta_variance)},
            {"t_stat", num(r.t_stat)}, {"r_squared", num(r.r_squared)}, {"n_obs", r.n_obs},
            {"lags", r.lags},         {"stars", stats::significance_stars(r.t_stat)}};
}

json to_json(const stats::Table2& t) {
    json rows = json::array();
    for (const auto& row : t.rows) {
        json cells = json::array();
        for (const auto& c : row.cells) {
            if (c.result) {
                cells.push_back(to_json(*c.result));
            } else {
                cells.push_back({{"horizon", c.horizon}, {"error", c.error}});
            }
        }
        rows.push_back({{"proxy", row.proxy}, {"cells", cells}});
    }
    return {{"horizons", t.horizons}, {"lag_policy", t.lag_policy.describe()}, {"rows", rows}};
}

json to_json(const stats::PCAResult& p) {
    return {{"inputs", p.names},
            {"loadings", p.loadings},
            {"eigenvalue", num(p.eigenvalue)},
            {"explained_variance_fraction", num(p.explained_variance_fraction)},
            {"rows", p.n_rows},
            {"iterations", p.iterations}};
}

json to_json(const explain::ClusterReport& r) {
    json centroids = json::array();
    for (const auto& c : r.centroids) centroids.push_back({{"buy", num(c[0])}, {"sell", num(c[1])}});
    return {{"k", r.k},
            {"seed", r.seed},
            {"restarts", r.restarts},
            {"best_restart", r.best_restart},
            {"iterations", r.iterations},
            {"wcss", num(r.wcss)},
            {"centroids", centroids},
            {"sizes", r.sizes},
            {"labels", r.labels}};
}

json to_json(const explain::Criteria& c) {
    json mean = json::array();
    json median = json::array();
    for (double v : c.cluster_mean_roi) mean.push_back(num(v));
    for (double v : c.cluster_median_roi) median.push_back(num(v));
    return {{"exists_buy_low_sell_high", c.exists_buy_low_sell_high},
            {"best_cluster_has_max_roi", c.best_cluster_has_max_roi},
            {"winning_cluster", c.winning_cluster},
            {"cluster_mean_roi", mean},
            {"cluster_median_roi", median}};
}

json to_json(const explain::InvestmentClustering& c) {
    json j = to_json(c.report);
    j["criteria"] = to_json(c.criteria);
    j["points"] = c.points.size();
    // Per-cluster extremes of the buy and sell ratio, as annotated on cluster plots.
    json ranges = json::array();
    for (int k = 0; k < c.report.k; ++k) {
        double buy_max = -INFINITY, sell_min = INFINITY;
        for (std::size_t i = 0; i < c.points.size(); ++i) {
            if (c.report.labels[i] != k) continue;
            buy_max = std::max(buy_max, c.points[i].ratio_buy);
            sell_min = std::min(sell_min, c.points[i].ratio_sell);
        }
        ranges.push_back({{"cluster", k}, {"buy_max", num(buy_max)}, {"sell_min", num(sell_min)}});
    }
    j["cluster_ranges"] = ranges;
    return j;
}

json to_json(const explain::TreeNode& n) {
    json j = {{"impurity", num(n.impurity)},
              {"samples", n.samples},
              {"class_counts", {{"bull", n.counts[1]}, {"not_bull", n.counts[0]}}},
              {"class", n.predicted_bull ? "bull" : "not bull"}};
    if (n.threshold) {
        j["threshold"] = *n.threshold;
        j["gain"] = num(n.gain);
        j["left"] = to_json(*n.left);
        j["right"] = to_json(*n.right);
    }
    return j;
}

json to_json(const explain::TreeReport& r) {
    auto metrics = [](const explain::ClassificationMetrics& m) {
        return json{{"n", m.n}, {"accuracy", num(m.accuracy)}, {"precision", opt(m.precision)},
                    {"recall", opt(m.recall)}};
    };
    return {{"criterion", explain::to_string(r.options.criterion)},
            {"max_depth", r.options.max_depth},
            {"train_fraction", r.options.train_fraction},
            {"purge", r.options.purge},
            {"feature", r.options.feature_name},
            {"train_size", r.train_size},
            {"test_size", r.test_size},
            {"train", metrics(r.train)},
            {"test", metrics(r.test)},
            {"root", r.root ? to_json(*r.root) : json(nullptr)}};
}

json to_json(const backtest::RunParams& p) {
    return {{"capital", p.capital},
            {"fee_rate", p.fee_rate},
            {"cap_tokens", p.cap_tokens ? json(*p.cap_tokens) : json(nullptr)},
            {"first_signal_only", p.first_signal_only}};
}

json to_json(const backtest::BacktestReport& r) {
    json trades = json::array();
    for (const auto& t : r.trades) {
        trades.push_back({{"date", t.date.to_string()},
                          {"side", backtest::to_string(t.side)},
                          {"tokens", t.tokens},
                          {"price", t.price},
                          {"fee", t.fee_usd},
                          {"signal_value", opt(t.signal_value)}});
    }
    return {{"strategy", r.strategy},
            {"params", to_json(r.params)},
            {"start", r.equity.empty() ? "" : r.equity.front().date.to_string()},
            {"end", r.equity.empty() ? "" : r.equity.back().date.to_string()},
            {"final_equity", r.equity.empty() ? json(nullptr) : num(r.equity.back().equity)},
            {"gross_roi", num(r.gross_roi)},
            {"gross_roi_liquidated", num(r.gross_roi_liquidated)},
            {"sharpe_annualized", opt(r.sharpe_annualized)},
            {"max_drawdown", num(r.max_drawdown)},
            {"trade_count", r.trades.size()},
            {"trades", trades}};
}

void write_table1_csv(const stats::ReturnSummary& s, std::ostream& out) {
    out << "horizon,n,lags,mean,sd,t_stat,sharpe,skewness,kurtosis,pct_positive\n";
    for (const auto& h : s.by_horizon) {
        out << h.horizon << ',' << h.n << ',' << h.lags << ',' << format_number(h.mean) << ','
            << format_number(h.sd) << ',' << format_number(h.t_stat) << ',' << format_number(h.sharpe) << ','
            << format_number(h.skewness) << ',' << format_number(h.kurtosis) << ','
            << format_number(h.pct_positive) << '\n';
    }
}

void write_table2_csv(const stats::Table2& t, std::ostream& out) {
    out << "proxy,horizon,beta,t_stat,r_squared,n_obs,lags,stars\n";
    for (const auto& row : t.rows) {
        for (const auto& c : row.cells) {
            out << row.proxy << ',' << c.horizon;
            if (c.result) {
                const auto& r = *c.result;
                out << ',' << format_number(r.beta) << ',' << format_number(r.t_stat) << ','
                    << format_number(r.r_squared) << ',' << r.n_obs << ',' << r.lags << ','
                    << stats::significance_stars(r.t_stat);
            } else {
                out << ",,,,,,";
            }
            out << '\n';
        }
    }
}

void write_trades_csv(const backtest::BacktestReport& r, std::ostream& out) {
    out << "date,side,tokens,price,fee,signal_value\n";
    for (const auto& t : r.trades) {
        out << t.date.to_string() << ',' << backtest::to_string(t.side) << ',' << format_number(t.tokens) << ','
            << format_number(t.price) << ',' << format_number(t.fee_usd) << ',' << format_number(t.signal_value)
            << '\n';
    }
}

void write_equity_csv(const backtest::BacktestReport& r, std::ostream& out) {
    out << "date,cash,holdings,equity\n";
    for (const auto& e : r.equity) {
        out << e.date.to_string() << ',' << format_number(e.cash) << ',' << format_number(e.holdings) << ','
            << format_number(e.equity) << '\n';
    }
}

void write_cluster_points_csv(const explain::InvestmentClustering& c, std::ostream& out) {
    out << "buy_date,ratio_buy,ratio_sell,roi,cluster\n";
    for (std::size_t i = 0; i < c.points.size(); ++i) {
        const auto& p = c.points[i];
        out << p.buy_date.to_string() << ',' << format_number(p.ratio_buy) << ',' << format_number(p.ratio_sell)
            << ',' << format_number(p.roi) << ',' << c.report.labels[i] << '\n';
    }
}

void write_long_csv(const std::vector<Date>& dates, const std::vector<PlotSeries>& series, std::ostream& out) {
    out << "date,series,value\n";
    for (const auto& s : series) {
        for (std::size_t i = 0; i < dates.size() && i < s.values->size(); ++i) {
            if (!(*s.values)[i]) continue;
            out << dates[i].to_string() << ',' << s.name << ',' << format_number(*(*s.values)[i]) << '\n';
        }
    }
}

}  // namespace cryptoval::io

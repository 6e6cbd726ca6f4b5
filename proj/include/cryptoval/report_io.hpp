#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "cryptoval/backtest.hpp"
#include "cryptoval/explain.hpp"
#include "cryptoval/stats.hpp"

namespace cryptoval::io {

using nlohmann::json;

json to_json(const stats::SummaryStats& s);
json to_json(const stats::ReturnSummary& s);
json to_json(const stats::RegressionResult& r);
json to_json(const stats::Table2& t);
json to_json(const stats::PCAResult& p);
json to_json(const explain::ClusterReport& r);
json to_json(const explain::Criteria& c);
json to_json(const explain::InvestmentClustering& c);
json to_json(const explain::TreeNode& n);
json to_json(const explain::TreeReport& r);
json to_json(const backtest::RunParams& p);
/// Summary plus full trade log; the equity curve goes to CSV.
json to_json(const backtest::BacktestReport& r);

void write_table1_csv(const stats::ReturnSummary& s, std::ostream& out);
void write_table2_csv(const stats::Table2& t, std::ostream& out);
void write_trades_csv(const backtest::BacktestReport& r, std::ostream& out);
void write_equity_csv(const backtest::BacktestReport& r, std::ostream& out);
void write_cluster_points_csv(const explain::InvestmentClustering& c, std::ostream& out);

/// Long-format plot data: one `date,series,value` row per defined point.
struct PlotSeries {
    std::string name;
    const Series* values;
};
void write_long_csv(const std::vector<Date>& dates, const std::vector<PlotSeries>& series, std::ostream& out);

}  // namespace cryptoval::io

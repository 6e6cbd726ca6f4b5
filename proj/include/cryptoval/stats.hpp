#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cryptoval/metrics.hpp"
#include "cryptoval/series.hpp"

namespace cryptoval::stats {

/// How many Newey-West lags a horizon-h statistic uses.
struct LagPolicy {
    enum class Mode { HorizonMinusOne, Fixed };
    Mode mode = Mode::HorizonMinusOne;
    int fixed_lags = 0;

    int lags_for(int horizon) const {
        return mode == Mode::Fixed ? fixed_lags : (horizon > 1 ? horizon - 1 : 0);
    }
    std::string describe() const;
};

/// Bartlett weight for lag j out of `lags`.
inline double bartlett_weight(int j, int lags) {
    return 1.0 - static_cast<double>(j) / static_cast<double>(lags + 1);
}

/// Newey-West long-run variance of the sample mean of `values` divided by n,
/// i.e. the HAC variance of the mean estimator. No small-sample correction.
double hac_variance_of_mean(const std::vector<double>& values, int lags);

struct SummaryStats {
    int horizon = 0;
    std::size_t n = 0;
    int lags = 0;
    double mean = 0.0;
    double sd = 0.0;
    std::optional<double> t_stat;
    std::optional<double> sharpe;
    std::optional<double> skewness;
    /// Raw (not excess) kurtosis.
    std::optional<double> kurtosis;
    double pct_positive = 0.0;
};

struct ExtremeEventRow {
    double threshold = 0.0;
    std::size_t disasters = 0;  // r < -threshold
    double disasters_pct = 0.0;
    std::size_t miracles = 0;  // r > threshold
    double miracles_pct = 0.0;
};

inline const std::vector<double> kExtremeThresholds{0.05, 0.10, 0.20, 0.30};

SummaryStats summarize(const Series& returns, int horizon, const LagPolicy& lags = {});
std::vector<ExtremeEventRow> extreme_events(const Series& daily_returns,
                                            const std::vector<double>& thresholds = kExtremeThresholds);

struct ReturnSummary {
    std::vector<SummaryStats> by_horizon;
    /// From the 1-day horizon, when the panel has one.
    std::vector<ExtremeEventRow> extremes;
};

ReturnSummary summarize_returns(const metrics::ReturnPanel& rp, const LagPolicy& lags = {});

struct RegressionResult {
    std::string proxy_name;
    int horizon_days = 0;
    double alpha = 0.0;
    double beta = 0.0;
    double beta_variance = 0.0;
    double t_stat = 0.0;
    double r_squared = 0.0;
    std::size_t n_obs = 0;
    int lags = 0;
};

/// OLS of y on x with intercept over jointly defined points; slope variance
/// from the Bartlett-kernel HAC estimator with `lags` lags.
RegressionResult nw_regress(const Series& y, const Series& x, int lags);

/// "", "*", "**" or "***" for two-sided 10/5/1% normal critical values.
std::string significance_stars(double t_stat);

struct Table2Cell {
    int horizon = 0;
    std::optional<RegressionResult> result;
    std::string error;
};

struct Table2Row {
    std::string proxy;
    std::vector<Table2Cell> cells;
};

struct Table2 {
    std::vector<int> horizons;
    LagPolicy lag_policy;
    std::vector<Table2Row> rows;
};

inline const std::vector<std::string> kTable2Proxies{"past100", "amr", "tmr", "pmr", "epr",
                                                     "tvn",     "mpr", "upr", "fpc"};
inline const std::vector<int> kTable2Horizons{7, 30, 90, 180, 360};
/// The eight fundamental-to-market proxies that feed the first principal component.
inline const std::vector<std::string> kFpcInputs{"past100", "amr", "tmr", "pmr",
                                                 "epr",     "tvn", "mpr", "upr"};

/// Predictive regressions of forward returns on each proxy. Expects `panel.fpc`
/// to be populated (see attach_first_pc).
Table2 predictive_regressions(const metrics::ProxyPanel& panel, const metrics::ReturnPanel& rp,
                              const std::vector<std::string>& proxies = kTable2Proxies,
                              const std::vector<int>& horizons = kTable2Horizons,
                              const LagPolicy& lags = {});

struct PCAResult {
    std::vector<std::string> names;
    std::vector<double> loadings;
    double eigenvalue = 0.0;
    double explained_variance_fraction = 0.0;
    std::vector<double> column_means;
    std::vector<double> column_sds;
    Series scores;
    std::size_t n_rows = 0;
    int iterations = 0;
};

struct PowerIterationOptions {
    double tolerance = 1e-12;
    int max_iterations = 100000;
};

/// Leading eigenpair of a symmetric positive semi-definite matrix (row-major, p x p).
struct Eigenpair {
    double value = 0.0;
    std::vector<double> vector;
    int iterations = 0;
};
Eigenpair leading_eigenpair(const std::vector<double>& matrix, std::size_t p,
                            const PowerIterationOptions& options = {});

/// First principal component of the z-scored columns over rows where every
/// column is defined. Loading sign is fixed so the largest |loading| is positive.
PCAResult first_pc(const std::vector<Series>& columns, const std::vector<std::string>& names = {},
                   const PowerIterationOptions& options = {});

/// Computes the FPC of kFpcInputs and stores the scores in panel.fpc.
PCAResult attach_first_pc(metrics::ProxyPanel& panel);

}  // namespace cryptoval::stats

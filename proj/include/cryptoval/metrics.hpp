#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cryptoval/date.hpp"
#include "cryptoval/ingest.hpp"
#include "cryptoval/series.hpp"

namespace cryptoval::metrics {

inline constexpr int kDilutionWindow = 90;
inline constexpr int kPast100Lag = 700;
inline const std::vector<int> kVolatilityWindows{30, 60, 90, 180};
inline const std::vector<int> kReturnHorizons{1, 7, 30, 90, 180, 360};

Series velocity(const MarketDataset& ds);
Series staking_ratio(const MarketDataset& ds);
/// 365 x trailing 90-day mean issuance / supply; undefined for the first 89 days.
Series dilution_rate(const MarketDataset& ds);
/// Sample std (n-1) of the last `window` daily log returns; first defined at index `window`.
Series volatility(const MarketDataset& ds, int window);

/// velocity x staking / (volatility x dilution). `volatility` is ignored when muted.
Series token_utility(const Series& velocity, const Series& staking, const Series& dilution,
                     const Series& volatility, bool mute_volatility = true);
Series pu_ratio(const MarketDataset& ds, const Series& token_utility);

Series pe_ratio(const MarketDataset& ds);
Series nvt_ratio(const MarketDataset& ds);
Series pm_ratio(const MarketDataset& ds);

struct AdoptionRatios {
    Series amr;
    Series tmr;
    Series pmr;
};
AdoptionRatios adoption_ratios(const MarketDataset& ds);

/// -(price(t) / price(t-700) - 1).
Series past100(const MarketDataset& ds);

struct ReturnPanel {
    std::vector<Date> dates;
    std::vector<int> horizons;
    /// roi[k] holds the forward simple return over horizons[k] days.
    std::vector<Series> roi;

    /// Throws InvalidArgument if the horizon is not in the panel.
    const Series& at(int horizon) const;
};

ReturnPanel returns(const MarketDataset& ds, const std::vector<int>& horizons = kReturnHorizons);

struct ProxyOptions {
    bool mute_volatility = true;
    /// Window of the volatility term used when it is not muted.
    int volatility_window = 180;
};

struct ProxyPanel {
    std::vector<Date> dates;
    Series velocity;
    Series staking_ratio;
    Series dilution_rate;
    Series volatility_30;
    Series volatility_60;
    Series volatility_90;
    Series volatility_180;
    Series token_utility;
    Series pu_ratio;
    Series pe_ratio;
    Series nvt_ratio;
    Series pm_ratio;
    Series upr;
    Series epr;
    Series tvn;
    Series mpr;
    Series amr;
    Series tmr;
    Series pmr;
    Series past100;
    /// Filled by stats::attach_first_pc.
    Series fpc;

    /// Column names in export order.
    static const std::vector<std::string>& column_names();
    const Series& column(const std::string& name) const;
};

ProxyPanel compute_proxies(const MarketDataset& ds, const ProxyOptions& options = {});

/// Rows [begin, end) of every column.
ProxyPanel slice(const ProxyPanel& panel, std::size_t begin, std::size_t end);

void write_proxy_csv(const ProxyPanel& panel, std::ostream& out);
void write_returns_csv(const ReturnPanel& panel, std::ostream& out);

}  // namespace cryptoval::metrics

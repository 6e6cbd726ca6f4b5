#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "cryptoval/date.hpp"
#include "cryptoval/ingest.hpp"

namespace cvtest {

using cryptoval::Date;
using cryptoval::MarketColumns;
using cryptoval::MarketDataset;

inline Date day0() { return Date::from_ymd(2015, 1, 1); }

// Well-formed columns around a given price path. Fundamentals grow slowly so
// every ratio is defined and positive.
inline MarketColumns columns_from_price(const std::vector<double>& price, Date start = day0()) {
    MarketColumns c;
    const std::size_t n = price.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double k = static_cast<double>(i);
        const double supply = 1.0e6 + 100.0 * k;
        c.date.push_back(start + static_cast<std::int32_t>(i));
        c.price_usd.push_back(price[i]);
        c.market_cap_usd.push_back(price[i] * supply);
        c.supply.push_back(supply);
        c.issuance.push_back(100.0);
        c.fees_usd.push_back(1.0e3 + k);
        c.block_rewards_usd.push_back(1.0e4);
        c.volume_usd.push_back(0.05 * price[i] * supply * (1.0 + 0.3 * std::sin(0.1 * k)));
        c.active_addresses.push_back(1.0e5 + 10.0 * k);
        c.tx_count.push_back(2.0e5 + 7.0 * k);
        c.transfer_count.push_back(3.0e5 + 3.0 * k);
        c.supply_active_1y.push_back((0.4 + 0.1 * std::cos(0.05 * k)) * supply);
    }
    return c;
}

inline MarketDataset dataset_from_price(const std::vector<double>& price, Date start = day0()) {
    return MarketDataset(columns_from_price(price, start));
}

inline std::vector<double> random_walk(std::mt19937_64& rng, std::size_t n, double p0, double sigma,
                                       double drift = 0.0) {
    std::normal_distribution<double> z(drift, sigma);
    std::vector<double> p{p0};
    while (p.size() < n) p.push_back(p.back() * std::exp(z(rng)));
    return p;
}

inline bool close_rel(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace cvtest

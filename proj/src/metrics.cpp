#include "cryptoval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "cryptoval/error.hpp"

namespace cryptoval::metrics {

namespace {

Series ratio_of(const std::vector<double>& num, const std::vector<double>& den) {
    return safe_divide(to_series(num), to_series(den));
}

}  // namespace

Series velocity(const MarketDataset& ds) {
    return ratio_of(ds.columns().volume_usd, ds.market_cap());
}

Series staking_ratio(const MarketDataset& ds) {
    const auto& c = ds.columns();
    Series out(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        out[i] = std::clamp(1.0 - c.supply_active_1y[i] / c.supply[i], 0.0, 1.0);
    }
    return out;
}

Series dilution_rate(const MarketDataset& ds) {
    const auto& c = ds.columns();
    Series out(ds.size());
    const auto w = static_cast<std::size_t>(kDilutionWindow);
    for (std::size_t t = w - 1; t < ds.size(); ++t) {
        double sum = 0.0;
        for (std::size_t s = t + 1 - w; s <= t; ++s) sum += c.issuance[s];
        out[t] = 365.0 * (sum / static_cast<double>(w)) / c.supply[t];
    }
    return out;
}

Series volatility(const MarketDataset& ds, int window) {
    if (window < 2) throw Error(ErrorKind::InvalidArgument, "volatility window must be >= 2");
    const auto& p = ds.price();
    const auto w = static_cast<std::size_t>(window);
    Series out(ds.size());
    if (ds.size() <= w) return out;

    std::vector<double> lr(ds.size(), 0.0);
    for (std::size_t s = 1; s < ds.size(); ++s) lr[s] = std::log(p[s] / p[s - 1]);

    for (std::size_t t = w; t < ds.size(); ++t) {
        double mean = 0.0;
        for (std::size_t s = t + 1 - w; s <= t; ++s) mean += lr[s];
        mean /= static_cast<double>(w);
        double ss = 0.0;
        for (std::size_t s = t + 1 - w; s <= t; ++s) ss += (lr[s] - mean) * (lr[s] - mean);
        out[t] = std::sqrt(ss / static_cast<double>(w - 1));
    }
    return out;
}

Series token_utility(const Series& velocity, const Series& staking, const Series& dilution,
                     const Series& volatility, bool mute_volatility) {
    Series out(velocity.size());
    for (std::size_t i = 0; i < velocity.size(); ++i) {
        if (!velocity[i] || !staking[i] || !dilution[i]) continue;
        double vol_term = 1.0;
        if (!mute_volatility) {
            if (i >= volatility.size() || !volatility[i]) continue;
            vol_term = *volatility[i];
        }
        const double den = vol_term * *dilution[i];
        if (den == 0.0) continue;
        const double tu = *velocity[i] * *staking[i] / den;
        if (std::isfinite(tu)) out[i] = tu;
    }
    return out;
}

Series pu_ratio(const MarketDataset& ds, const Series& token_utility) {
    return safe_divide(to_series(ds.price()), token_utility);
}

Series pe_ratio(const MarketDataset& ds) {
    const auto& c = ds.columns();
    std::vector<double> revenue(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) revenue[i] = c.fees_usd[i] + c.block_rewards_usd[i];
    return ratio_of(c.market_cap_usd, revenue);
}

Series nvt_ratio(const MarketDataset& ds) {
    return ratio_of(ds.market_cap(), ds.columns().volume_usd);
}

Series pm_ratio(const MarketDataset& ds) {
    const auto& c = ds.columns();
    std::vector<double> sq(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) sq[i] = c.active_addresses[i] * c.active_addresses[i];
    return ratio_of(c.market_cap_usd, sq);
}

AdoptionRatios adoption_ratios(const MarketDataset& ds) {
    const auto& c = ds.columns();
    return {ratio_of(c.active_addresses, c.market_cap_usd), ratio_of(c.tx_count, c.market_cap_usd),
            ratio_of(c.transfer_count, c.market_cap_usd)};
}

Series past100(const MarketDataset& ds) {
    const auto& p = ds.price();
    const auto lag = static_cast<std::size_t>(kPast100Lag);
    Series out(ds.size());
    for (std::size_t t = lag; t < ds.size(); ++t) out[t] = -(p[t] / p[t - lag] - 1.0);
    return out;
}

const Series& ReturnPanel::at(int horizon) const {
    for (std::size_t k = 0; k < horizons.size(); ++k) {
        if (horizons[k] == horizon) return roi[k];
    }
    throw Error(ErrorKind::InvalidArgument, "horizon " + std::to_string(horizon) + " not in return panel");
}

ReturnPanel returns(const MarketDataset& ds, const std::vector<int>& horizons) {
    ReturnPanel panel;
    panel.dates = ds.dates();
    panel.horizons = horizons;
    const auto& p = ds.price();
    for (int h : horizons) {
        if (h <= 0) throw Error(ErrorKind::InvalidArgument, "horizon must be positive");
        if (static_cast<std::size_t>(h) >= ds.size()) {
            throw Error(ErrorKind::HorizonExceedsData, "horizon " + std::to_string(h) +
                                                           " needs more than " + std::to_string(ds.size()) +
                                                           " rows");
        }
        const auto hh = static_cast<std::size_t>(h);
        Series roi(ds.size());
        for (std::size_t t = 0; t + hh < ds.size(); ++t) roi[t] = p[t + hh] / p[t] - 1.0;
        panel.roi.push_back(std::move(roi));
    }
    return panel;
}

const std::vector<std::string>& ProxyPanel::column_names() {
    static const std::vector<std::string> names{
        "velocity", "staking_ratio", "dilution_rate", "volatility_30", "volatility_60",
        "volatility_90", "volatility_180", "token_utility", "pu_ratio", "pe_ratio",
        "nvt_ratio", "pm_ratio", "upr", "epr", "tvn", "mpr", "amr", "tmr", "pmr", "past100", "fpc"};
    return names;
}

const Series& ProxyPanel::column(const std::string& name) const {
    if (name == "velocity") return velocity;
    if (name == "staking_ratio") return staking_ratio;
    if (name == "dilution_rate") return dilution_rate;
    if (name == "volatility_30") return volatility_30;
    if (name == "volatility_60") return volatility_60;
    if (name == "volatility_90") return volatility_90;
    if (name == "volatility_180") return volatility_180;
    if (name == "token_utility") return token_utility;
    if (name == "pu_ratio") return pu_ratio;
    if (name == "pe_ratio") return pe_ratio;
    if (name == "nvt_ratio") return nvt_ratio;
    if (name == "pm_ratio") return pm_ratio;
    if (name == "upr") return upr;
    if (name == "epr") return epr;
    if (name == "tvn") return tvn;
    if (name == "mpr") return mpr;
    if (name == "amr") return amr;
    if (name == "tmr") return tmr;
    if (name == "pmr") return pmr;
    if (name == "past100") return past100;
    if (name == "fpc") return fpc;
    throw Error(ErrorKind::InvalidArgument, "unknown proxy column '" + name + "'");
}

ProxyPanel compute_proxies(const MarketDataset& ds, const ProxyOptions& options) {
    ProxyPanel p;
    p.dates = ds.dates();
    p.velocity = velocity(ds);
    p.staking_ratio = staking_ratio(ds);
    p.dilution_rate = dilution_rate(ds);
    p.volatility_30 = volatility(ds, 30);
    p.volatility_60 = volatility(ds, 60);
    p.volatility_90 = volatility(ds, 90);
    p.volatility_180 = volatility(ds, 180);

    const Series vol_term = options.mute_volatility ? Series(ds.size())
                                                    : volatility(ds, options.volatility_window);
    p.token_utility = token_utility(p.velocity, p.staking_ratio, p.dilution_rate, vol_term,
                                    options.mute_volatility);
    p.pu_ratio = pu_ratio(ds, p.token_utility);
    p.pe_ratio = pe_ratio(ds);
    p.nvt_ratio = nvt_ratio(ds);
    p.pm_ratio = pm_ratio(ds);

    // Inverses are computed from the fundamentals directly, so they stay
    // defined where the market-to-fundamental ratio has a zero denominator.
    const auto& c = ds.columns();
    const Series price = to_series(ds.price());
    const Series mcap = to_series(c.market_cap_usd);
    p.upr = safe_divide(p.token_utility, price);
    Series revenue(ds.size());
    Series addr_sq(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        revenue[i] = c.fees_usd[i] + c.block_rewards_usd[i];
        addr_sq[i] = c.active_addresses[i] * c.active_addresses[i];
    }
    p.epr = safe_divide(revenue, mcap);
    p.tvn = safe_divide(to_series(c.volume_usd), mcap);
    p.mpr = safe_divide(addr_sq, mcap);

    auto adoption = adoption_ratios(ds);
    p.amr = std::move(adoption.amr);
    p.tmr = std::move(adoption.tmr);
    p.pmr = std::move(adoption.pmr);
    p.past100 = past100(ds);
    p.fpc = Series(ds.size());
    return p;
}

ProxyPanel slice(const ProxyPanel& panel, std::size_t begin, std::size_t end) {
    static constexpr Series ProxyPanel::*kColumns[] = {
        &ProxyPanel::velocity,      &ProxyPanel::staking_ratio,  &ProxyPanel::dilution_rate,
        &ProxyPanel::volatility_30, &ProxyPanel::volatility_60,  &ProxyPanel::volatility_90,
        &ProxyPanel::volatility_180, &ProxyPanel::token_utility, &ProxyPanel::pu_ratio,
        &ProxyPanel::pe_ratio,      &ProxyPanel::nvt_ratio,      &ProxyPanel::pm_ratio,
        &ProxyPanel::upr,           &ProxyPanel::epr,            &ProxyPanel::tvn,
        &ProxyPanel::mpr,           &ProxyPanel::amr,            &ProxyPanel::tmr,
        &ProxyPanel::pmr,           &ProxyPanel::past100,        &ProxyPanel::fpc,
    };
    if (begin > end || end > panel.dates.size()) {
        throw Error(ErrorKind::RangeOutOfBounds, "proxy panel slice out of range");
    }
    ProxyPanel out;
    out.dates.assign(panel.dates.begin() + begin, panel.dates.begin() + end);
    for (auto member : kColumns) {
        const Series& src = panel.*member;
        (out.*member).assign(src.begin() + begin, src.begin() + end);
    }
    return out;
}

void write_proxy_csv(const ProxyPanel& panel, std::ostream& out) {
    const auto& names = ProxyPanel::column_names();
    out << "date";
    for (const auto& n : names) out << ',' << n;
    out << '\n';
    for (std::size_t i = 0; i < panel.dates.size(); ++i) {
        out << panel.dates[i].to_string();
        for (const auto& n : names) out << ',' << format_number(panel.column(n)[i]);
        out << '\n';
    }
}

void write_returns_csv(const ReturnPanel& panel, std::ostream& out) {
    out << "date";
    for (int h : panel.horizons) out << ",roi_" << h;
    out << '\n';
    for (std::size_t i = 0; i < panel.dates.size(); ++i) {
        out << panel.dates[i].to_string();
        for (const auto& s : panel.roi) out << ',' << format_number(s[i]);
        out << '\n';
    }
}

}  // namespace cryptoval::metrics

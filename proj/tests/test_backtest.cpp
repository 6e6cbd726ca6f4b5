#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>

#include "cryptoval/backtest.hpp"
#include "cryptoval/error.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace cryptoval;
namespace bt = cryptoval::backtest;
using bt::Signal;

namespace {

bt::SignalSeries signals_for(const MarketDataset& ds, std::vector<Signal> actions) {
    return {ds.dates(), std::move(actions), Series(ds.size())};
}

// Inclusive linear-interpolation quantile, recomputed from scratch.
double naive_quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double h = (static_cast<double>(v.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::vector<double> naive_ma(const std::vector<double>& p, std::size_t w, std::size_t t) {
    std::vector<double> out;
    double s = 0.0;
    for (std::size_t i = t + 1 - w; i <= t; ++i) s += p[i];
    out.push_back(s / static_cast<double>(w));
    return out;
}

}  // namespace

TEST_CASE("quantile signal: increasing PU sells after warm-up") {
    Series pu;
    for (int i = 0; i < 60; ++i) pu.push_back(1.0 + i);
    const auto s = bt::signal_pu_quantile(pu);
    for (int i = 0; i < 29; ++i) CHECK(s[i] == Signal::Hold);
    for (int i = 29; i < 60; ++i) CHECK(s[i] == Signal::Sell);
}

TEST_CASE("quantile signal: constant PU resolves to hold") {
    const auto s = bt::signal_pu_quantile(Series(80, 42.0));
    CHECK(std::all_of(s.begin(), s.end(), [](Signal x) { return x == Signal::Hold; }));
}

TEST_CASE("quantile signal: alternating PU against a direct oracle") {
    Series pu;
    for (int i = 0; i < 120; ++i) pu.push_back(i % 2 ? 100.0 : 1.0);
    pu[50] = std::nullopt;
    const auto s = bt::signal_pu_quantile(pu);
    std::vector<double> seen;
    for (std::size_t t = 0; t < pu.size(); ++t) {
        if (!pu[t]) {
            CHECK(s[t] == Signal::Hold);
            continue;
        }
        seen.push_back(*pu[t]);
        Signal want = Signal::Hold;
        if (seen.size() >= 30) {
            const bool buy = *pu[t] <= naive_quantile(seen, 0.1);
            const bool sell = *pu[t] >= naive_quantile(seen, 0.9);
            if (buy != sell) want = buy ? Signal::Buy : Signal::Sell;
        }
        CHECK(s[t] == want);
        if (seen.size() >= 30) CHECK(s[t] == (*pu[t] == 1.0 ? Signal::Buy : Signal::Sell));
    }
}

TEST_CASE("quantile signal: rolling window and argument checks") {
    Series pu;
    for (int i = 0; i < 100; ++i) pu.push_back(static_cast<double>(100 - i));
    bt::QuantileSignalOptions o;
    o.window = 40;
    const auto s = bt::signal_pu_quantile(pu, o);
    CHECK(s[99] == Signal::Buy);
    o.low_q = 0.95;
    CHECK_THROWS_AS(bt::signal_pu_quantile(pu, o), Error);
}

TEST_CASE("MA crossover") {
    SUBCASE("monotone price buys once") {
        std::vector<double> p;
        for (int i = 0; i < 300; ++i) p.push_back(100.0 + i);
        const auto s = bt::signal_ma_cross(p, 20, 100);
        CHECK(std::count(s.begin(), s.end(), Signal::Buy) == 1);
        CHECK(std::count(s.begin(), s.end(), Signal::Sell) == 0);
        CHECK(s[99] == Signal::Buy);
    }
    SUBCASE("constant price never crosses") {
        const auto s = bt::signal_ma_cross(std::vector<double>(300, 7.1), 20, 100);
        CHECK(std::all_of(s.begin(), s.end(), [](Signal x) { return x == Signal::Hold; }));
    }
    SUBCASE("triangular bump gives one buy then one sell") {
        std::vector<double> p(150, 100.0);
        for (int i = 1; i <= 50; ++i) p.push_back(100.0 + 2.0 * i);
        for (int i = 1; i <= 50; ++i) p.push_back(200.0 - 2.0 * i);
        p.resize(p.size() + 150, 100.0);
        const auto s = bt::signal_ma_cross(p, 10, 40);
        std::vector<std::size_t> buys, sells;
        for (std::size_t t = 0; t < s.size(); ++t) {
            if (s[t] == Signal::Buy) buys.push_back(t);
            if (s[t] == Signal::Sell) sells.push_back(t);
        }
        REQUIRE(buys.size() == 1);
        REQUIRE(sells.size() == 1);
        CHECK(buys[0] < sells[0]);
        CHECK(buys[0] == 150);
        // on the sell day the short average has just dropped below the long one
        const auto t = sells[0];
        CHECK(naive_ma(p, 10, t)[0] < naive_ma(p, 40, t)[0]);
        CHECK(naive_ma(p, 10, t - 1)[0] >= naive_ma(p, 40, t - 1)[0]);
    }
    CHECK_THROWS_AS(bt::signal_ma_cross({1, 2, 3}, 5, 5), Error);
}

TEST_CASE("buy and hold emits one buy") {
    const auto s = bt::signal_buy_hold(10);
    CHECK(std::count(s.begin(), s.end(), Signal::Buy) == 1);
    CHECK(s[0] == Signal::Buy);
}

TEST_CASE("no signals keep equity at capital") {
    const auto ds = cvtest::dataset_from_price({10, 11, 9, 12});
    const auto r = bt::run(ds, signals_for(ds, std::vector<Signal>(4, Signal::Hold)), {});
    CHECK(r.gross_roi == 0.0);
    CHECK_FALSE(r.sharpe_annualized.has_value());
    for (const auto& e : r.equity) CHECK(e.equity == 100000.0);
}

TEST_CASE("two-trade ledger") {
    const auto ds = cvtest::dataset_from_price({100, 200});
    bt::RunParams p;
    p.cap_tokens = std::nullopt;
    const auto r = bt::run(ds, signals_for(ds, {Signal::Buy, Signal::Sell}), p);
    const double expected = 100000.0 * 2.0 * (1.0 - 0.001) / (1.0 + 0.001);
    CHECK(r.equity.back().equity == doctest::Approx(expected).epsilon(1e-13));
    CHECK(r.equity.back().equity == doctest::Approx(199600.3996).epsilon(1e-10));
    CHECK(r.trades.size() == 2);
    CHECK(r.trades[0].fee_usd == doctest::Approx(0.001 * r.trades[0].notional).epsilon(1e-15));
}

TEST_CASE("buy and hold on a constant price loses the round-trip fees") {
    const auto ds = cvtest::dataset_from_price(std::vector<double>(30, 100.0));
    bt::RunParams p;
    p.cap_tokens = std::nullopt;
    const auto r = bt::run(ds, bt::buy_hold_signals(ds), p);
    const double ratio = 1.0 + r.gross_roi_liquidated;
    CHECK(ratio == doctest::Approx((1.0 - 0.001) / (1.0 + 0.001)).epsilon(1e-13));
    CHECK(ratio == doctest::Approx(0.998).epsilon(1e-5));
    CHECK(r.gross_roi == doctest::Approx(1.0 / 1.001 - 1.0 + 0.0).epsilon(1e-9));
}

TEST_CASE("cap arithmetic") {
    const auto ds = cvtest::dataset_from_price({10000, 10000});
    const auto small = bt::run(ds, signals_for(ds, {Signal::Buy, Signal::Hold}), {});
    CHECK(small.trades[0].tokens == doctest::Approx(100000.0 / (10000.0 * 1.001)).epsilon(1e-15));
    bt::RunParams big;
    big.capital = 1e7;
    const auto capped = bt::run(ds, signals_for(ds, {Signal::Buy, Signal::Buy}), big);
    REQUIRE(capped.trades.size() == 2);
    CHECK(capped.trades[0].tokens == 100.0);
    CHECK(capped.trades[1].tokens == 100.0);
}

TEST_CASE("consecutive signals accumulate unless first-signal-only") {
    const auto ds = cvtest::dataset_from_price({100, 100, 100, 100});
    bt::RunParams p;
    p.capital = 1e5;
    p.cap_tokens = 300.0;
    const std::vector<Signal> a{Signal::Buy, Signal::Buy, Signal::Buy, Signal::Sell};
    const auto acc = bt::run(ds, signals_for(ds, a), p);
    CHECK(acc.trades.size() == 4);
    CHECK(acc.equity[2].holdings == doctest::Approx(900.0));
    p.first_signal_only = true;
    const auto once = bt::run(ds, signals_for(ds, a), p);
    CHECK(once.trades.size() == 2);
    CHECK(once.equity[2].holdings == 300.0);
}

TEST_CASE("misaligned signals are rejected") {
    const auto ds = cvtest::dataset_from_price({1, 2, 3});
    auto s = signals_for(ds, {Signal::Hold, Signal::Hold, Signal::Hold});
    s.dates[1] = s.dates[1] + 1;
    try {
        bt::run(ds, s, {});
        FAIL("expected SignalDateMismatch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SignalDateMismatch);
    }
}

TEST_CASE("random backtests keep the books straight") {
    std::mt19937_64 rng(41);
    std::uniform_int_distribution<int> side(0, 5);
    std::uniform_real_distribution<double> fee(0.0, 0.01), cap(0.5, 50.0);
    for (int rep = 0; rep < 100; ++rep) {
        const auto price = cvtest::random_walk(rng, 250, 50.0 + rep, 0.05);
        const auto ds = cvtest::dataset_from_price(price);
        std::vector<Signal> actions(price.size());
        for (auto& a : actions) {
            const int v = side(rng);
            a = v == 0 ? Signal::Buy : v == 1 ? Signal::Sell : Signal::Hold;
        }
        bt::RunParams p;
        p.fee_rate = fee(rng);
        p.cap_tokens = rep % 3 == 0 ? std::nullopt : std::optional<double>(cap(rng));
        p.first_signal_only = rep % 4 == 0;
        const auto r = bt::run(ds, signals_for(ds, actions), p);
        const auto check = cvtest::check_ledger(r, price);
        CHECK(check.identity);
        CHECK(check.non_negative);
        CHECK(check.fees_conserved);
        CHECK(check.cap_respected);
        CHECK(r.gross_roi == doctest::Approx(r.equity.back().equity / p.capital - 1.0).epsilon(1e-10));
        const auto again = bt::run(ds, signals_for(ds, actions), p);
        CHECK(std::memcmp(&again.gross_roi, &r.gross_roi, sizeof(double)) == 0);
        CHECK(again.trades.size() == r.trades.size());
    }
}

TEST_CASE("zero-fee buy and hold equals the price relative") {
    std::mt19937_64 rng(42);
    for (int rep = 0; rep < 20; ++rep) {
        const auto price = cvtest::random_walk(rng, 400, 30.0, 0.03, 0.001);
        const auto ds = cvtest::dataset_from_price(price);
        bt::RunParams p;
        p.fee_rate = 0.0;
        p.cap_tokens = std::nullopt;
        const auto r = bt::run(ds, bt::buy_hold_signals(ds), p);
        CHECK(cvtest::close_rel(r.gross_roi, price.back() / price.front() - 1.0, 1e-12));
    }
}

TEST_CASE("Sharpe and drawdown on a known equity curve") {
    std::vector<bt::EquityPoint> eq;
    const double values[] = {100, 110, 99, 121};
    for (int i = 0; i < 4; ++i) eq.push_back({cvtest::day0() + i, values[i], 0.0, values[i]});
    const double r[] = {0.1, -0.1, 121.0 / 99.0 - 1.0};
    const double mean = (r[0] + r[1] + r[2]) / 3.0;
    double ss = 0.0;
    for (double x : r) ss += (x - mean) * (x - mean);
    CHECK(*bt::annualized_sharpe(eq) == doctest::Approx(mean / std::sqrt(ss / 2.0) * std::sqrt(365.0)));
    CHECK(bt::max_drawdown(eq) == doctest::Approx(0.1));
}

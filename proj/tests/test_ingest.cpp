#include <doctest.h>

#include <sstream>

#include "cryptoval/error.hpp"
#include "cryptoval/ingest.hpp"
#include "support.hpp"

using namespace cryptoval;

namespace {

std::string coinmetrics_csv(Date start, int days, double onchain_volume) {
    std::ostringstream s;
    s << "time,PriceUSD,CapMrktCurUSD,SplyCur,IssTotNtv,FeeTotUSD,IssTotUSD,TxTfrValAdjUSD,AdrActCnt,TxCnt,"
         "TxTfrCnt,SplyAct1yr\n";
    for (int i = 0; i < days; ++i) {
        s << (start + i).to_string() << ",100,1000000," << 10000 + i << ",1,10,20," << onchain_volume
          << ",50,60,70,4000\n";
    }
    return s.str();
}

std::string volume_csv(Date start, int days, double v) {
    std::ostringstream s;
    s << "Date,Volume\n";
    for (int i = 0; i < days; ++i) s << (start + i).to_string() << ',' << v << '\n';
    return s.str();
}

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error thrown");
    return ErrorKind::Io;
}

}  // namespace

TEST_CASE("parse_csv reads rows and keeps blank cells missing") {
    const auto t = parse_csv("date,PriceUSD\n2020-01-01,1\n2020-01-02,\n2020-01-03,3.5\n");
    REQUIRE(t.rows() == 3);
    const auto* p = t.find("price_usd");
    REQUIRE(p != nullptr);
    CHECK(p->values[0] == 1.0);
    CHECK_FALSE(p->values[1].has_value());
    CHECK(p->values[2] == 3.5);
}

TEST_CASE("parse_csv date errors") {
    CHECK(kind_of([] { parse_csv("date,PriceUSD\n2020-01-02,1\n2020-01-01,2\n"); }) ==
          ErrorKind::NonMonotoneDate);
    CHECK(kind_of([] { parse_csv("date,PriceUSD\n2020-01-02,1\n2020-01-02,2\n"); }) == ErrorKind::DuplicateDate);
    CHECK(kind_of([] { parse_csv("day,PriceUSD\n2020-01-02,1\n"); }) == ErrorKind::MissingDateColumn);
    CHECK(kind_of([] { parse_csv("date,PriceUSD\n2020-01-02,1,5\n"); }) == ErrorKind::MalformedCsv);
}

TEST_CASE("parse_csv handles quotes, CRLF and a byte-order mark") {
    const auto t = parse_csv("\xEF\xBB\xBF\"date\",\"PriceUSD\"\r\n\"2020-01-01\",\"12.5\"\r\n");
    REQUIRE(t.rows() == 1);
    CHECK(t.find("price_usd")->values[0] == 12.5);
}

TEST_CASE("build_dataset intersects date ranges") {
    const std::vector<RawTable> tables{
        parse_csv(coinmetrics_csv(Date::from_ymd(2015, 1, 1), 10, 5)),
        parse_csv(volume_csv(Date::from_ymd(2015, 1, 5), 16, 7)),
    };
    const auto ds = build_dataset(tables);
    CHECK(ds.first_date() == Date::from_ymd(2015, 1, 5));
    CHECK(ds.last_date() == Date::from_ymd(2015, 1, 10));
    CHECK(ds.size() == 6);
}

TEST_CASE("volume_usd sums on-chain and off-chain volume") {
    const std::vector<RawTable> both{parse_csv(coinmetrics_csv(Date::from_ymd(2015, 1, 1), 3, 5)),
                                     parse_csv(volume_csv(Date::from_ymd(2015, 1, 1), 3, 7))};
    const auto ds = build_dataset(both);
    CHECK(ds.columns().volume_usd[0] == 12.0);
    CHECK_FALSE(ds.info().volume_degraded);

    const std::vector<RawTable> onchain{parse_csv(coinmetrics_csv(Date::from_ymd(2015, 1, 1), 3, 5))};
    const auto degraded = build_dataset(onchain);
    CHECK(degraded.columns().volume_usd[0] == 5.0);
    CHECK(degraded.info().volume_degraded);
}

TEST_CASE("build_dataset rejects invariant violations and disjoint inputs") {
    auto text = coinmetrics_csv(Date::from_ymd(2015, 1, 1), 3, 5);
    // active supply above total supply on the second row
    text.replace(text.find(",4000\n", text.find("2015-01-02")), 6, ",99999\n");
    const std::vector<RawTable> bad{parse_csv(text)};
    CHECK(kind_of([&] { build_dataset(bad); }) == ErrorKind::InvariantViolation);

    const std::vector<RawTable> disjoint{parse_csv(coinmetrics_csv(Date::from_ymd(2015, 1, 1), 3, 5)),
                                         parse_csv(volume_csv(Date::from_ymd(2016, 1, 1), 3, 7))};
    CHECK(kind_of([&] { build_dataset(disjoint); }) == ErrorKind::EmptyOverlap);
}

TEST_CASE("forward fill bridges short gaps only") {
    auto rows = [](std::initializer_list<int> missing) {
        std::ostringstream s;
        s << "date,Volume\n";
        for (int i = 0; i < 10; ++i) {
            s << (Date::from_ymd(2015, 1, 1) + i).to_string() << ',';
            if (std::find(missing.begin(), missing.end(), i) == missing.end()) s << 7;
            s << '\n';
        }
        return s.str();
    };
    const auto base = parse_csv(coinmetrics_csv(Date::from_ymd(2015, 1, 1), 10, 5));

    const std::vector<RawTable> short_gap{base, parse_csv(rows({3, 4, 5}))};
    const auto ds = build_dataset(short_gap);
    CHECK(ds.columns().volume_usd[4] == 12.0);
    CHECK(ds.info().filled_cells == 3);

    const std::vector<RawTable> long_gap{base, parse_csv(rows({3, 4, 5, 6}))};
    CHECK(kind_of([&] { build_dataset(long_gap); }) == ErrorKind::UnfilledGap);
    CHECK(kind_of([&] { build_dataset(short_gap, {MissingPolicy::Mode::Reject, 3}); }) == ErrorKind::UnfilledGap);

    const std::vector<RawTable> leading{base, parse_csv(rows({0}))};
    CHECK(kind_of([&] { build_dataset(leading); }) == ErrorKind::UnfilledGap);
}

TEST_CASE("calendar holes inside a source are filled like missing cells") {
    std::string text = coinmetrics_csv(Date::from_ymd(2015, 1, 1), 6, 5);
    const auto at = text.find("2015-01-03");
    text.erase(at, text.find('\n', at) - at + 1);
    const std::vector<RawTable> tables{parse_csv(text)};
    const auto ds = build_dataset(tables);
    CHECK(ds.size() == 6);
    CHECK(ds.columns().supply[2] == ds.columns().supply[1]);
}

TEST_CASE("slice") {
    const auto ds = cvtest::dataset_from_price({1, 2, 3, 4, 5});
    const auto one = slice(ds, ds.first_date() + 2, ds.first_date() + 2);
    CHECK(one.size() == 1);
    CHECK(one.price()[0] == 3.0);
    CHECK(slice(ds, ds.first_date(), ds.last_date()) == ds);
    CHECK(kind_of([&] { slice(ds, ds.last_date() + 1, ds.last_date() + 3); }) == ErrorKind::RangeOutOfBounds);
    CHECK(kind_of([&] { slice(ds, ds.last_date(), ds.first_date()); }) == ErrorKind::RangeOutOfBounds);
}

TEST_CASE("canonical csv round trip is value-equal") {
    std::mt19937_64 rng(7);
    const auto ds = cvtest::dataset_from_price(cvtest::random_walk(rng, 300, 123.456789, 0.04));
    const auto text = to_csv(ds);
    CHECK(text.rfind("date,price_usd,market_cap_usd,supply,issuance,fees_usd,block_rewards_usd,volume_usd,"
                     "active_addresses,tx_count,transfer_count,supply_active_1y\n",
                     0) == 0);
    const auto back = read_canonical_csv(text);
    CHECK(back.columns() == ds.columns());
    CHECK(to_csv(back) == text);
}

TEST_CASE("build_dataset is deterministic") {
    const std::vector<RawTable> tables{parse_csv(coinmetrics_csv(Date::from_ymd(2015, 1, 1), 40, 5)),
                                       parse_csv(volume_csv(Date::from_ymd(2015, 1, 3), 40, 7))};
    CHECK(build_dataset(tables) == build_dataset(tables));
}

TEST_CASE("validate reports every broken invariant") {
    auto cols = cvtest::columns_from_price({1, 2, 3});
    CHECK(validate(cols).empty());
    cols.supply[2] = cols.supply[1] - 1;
    cols.price_usd[0] = 0;
    cols.date[1] = cols.date[1] + 5;
    const auto v = validate(cols);
    auto has = [&](const std::string& field, std::size_t row) {
        return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.field == field && x.row == row; });
    };
    CHECK(has("supply", 2));
    CHECK(has("price_usd", 0));
    CHECK(has("date", 1));
    CHECK_THROWS_AS(MarketDataset{cols}, Error);
}

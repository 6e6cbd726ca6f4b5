#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cryptoval/date.hpp"

namespace cryptoval {

/// Column names of MarketDataset, in canonical CSV order (after `date`).
inline constexpr std::string_view kDatasetFields[] = {
    "price_usd",        "market_cap_usd",    "supply",     "issuance",
    "fees_usd",         "block_rewards_usd", "volume_usd", "active_addresses",
    "tx_count",         "transfer_count",    "supply_active_1y",
};

// Alternative input columns understood by build_dataset.
inline constexpr std::string_view kVolumeOnchain = "volume_onchain_usd";
inline constexpr std::string_view kVolumeOffchain = "volume_offchain_usd";
inline constexpr std::string_view kSupplyActive1yPct = "supply_active_1y_pct";

struct CsvSchema {
    /// Header names accepted for the date column; the first one present wins.
    std::vector<std::string> date_columns{"date"};
    /// Source header -> canonical column name. Unmapped headers keep their name.
    std::map<std::string, std::string> rename;

    /// Canonical names plus the public CoinMetrics / CoinMarketCap export headers.
    static CsvSchema defaults();
};

struct RawColumn {
    std::string name;
    std::vector<std::optional<double>> values;
};

struct RawTable {
    std::vector<Date> dates;
    std::vector<RawColumn> columns;

    std::size_t rows() const { return dates.size(); }
    const RawColumn* find(std::string_view name) const;
};

RawTable parse_csv(std::string_view text, const CsvSchema& schema = CsvSchema::defaults());
RawTable read_csv_file(const std::string& path, const CsvSchema& schema = CsvSchema::defaults());

struct MarketColumns {
    std::vector<Date> date;
    std::vector<double> price_usd;
    std::vector<double> market_cap_usd;
    std::vector<double> supply;
    std::vector<double> issuance;
    std::vector<double> fees_usd;
    std::vector<double> block_rewards_usd;
    std::vector<double> volume_usd;
    std::vector<double> active_addresses;
    std::vector<double> tx_count;
    std::vector<double> transfer_count;
    std::vector<double> supply_active_1y;

    /// Numeric column by canonical field name; nullptr for an unknown name.
    const std::vector<double>* field(std::string_view name) const;
    std::vector<double>* field(std::string_view name);
    std::size_t rows() const { return date.size(); }

    bool operator==(const MarketColumns&) const = default;
};

struct Violation {
    std::size_t row;
    std::string field;
    std::string message;
};

/// Every MarketDataset invariant, checked row by row. Empty result means valid.
std::vector<Violation> validate(const MarketColumns& cols);

struct DatasetInfo {
    /// True when volume_usd holds on-chain volume only.
    bool volume_degraded = false;
    std::size_t filled_cells = 0;

    bool operator==(const DatasetInfo&) const = default;
};

/// Validated, contiguous daily table. Immutable once constructed.
class MarketDataset {
public:
    /// Throws Error(InvariantViolation) naming the first offending row and field.
    explicit MarketDataset(MarketColumns cols, DatasetInfo info = {});

    const MarketColumns& columns() const { return cols_; }
    const DatasetInfo& info() const { return info_; }
    std::size_t size() const { return cols_.date.size(); }
    Date first_date() const { return cols_.date.front(); }
    Date last_date() const { return cols_.date.back(); }
    const std::vector<Date>& dates() const { return cols_.date; }
    const std::vector<double>& price() const { return cols_.price_usd; }
    const std::vector<double>& market_cap() const { return cols_.market_cap_usd; }

    bool operator==(const MarketDataset&) const = default;

private:
    MarketColumns cols_;
    DatasetInfo info_;
};

struct MissingPolicy {
    enum class Mode { ForwardFill, Reject };
    Mode mode = Mode::ForwardFill;
    /// Longest run of consecutive missing days that forward-fill may bridge.
    int max_gap_days = 3;
};

/// Inner-joins `tables` on their common date range, fills gaps per `policy`,
/// derives volume_usd, and validates the result.
MarketDataset build_dataset(std::span<const RawTable> tables, const MissingPolicy& policy = {});

MarketDataset slice(const MarketDataset& ds, Date start, Date end);

void write_csv(const MarketDataset& ds, std::ostream& out);
std::string to_csv(const MarketDataset& ds);
/// Parses the canonical CSV written by write_csv. No gap filling.
MarketDataset read_canonical_csv(std::string_view text);

}  // namespace cryptoval

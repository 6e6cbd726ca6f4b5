#include "cryptoval/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "cryptoval/error.hpp"
#include "cryptoval/series.hpp"

namespace cryptoval {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

// RFC-4180 style split of one record: quoted cells may contain commas and "" escapes.
std::vector<std::string> split_record(std::string_view line) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(std::string(trim(cur)));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    cells.push_back(std::string(trim(cur)));
    return cells;
}

std::optional<double> parse_number(std::string_view cell) {
    cell = trim(cell);
    if (cell.empty()) return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

const RawColumn* find_any(std::span<const RawTable> tables, std::string_view name,
                          const RawTable** owner) {
    for (const auto& t : tables) {
        if (const auto* c = t.find(name)) {
            *owner = &t;
            return c;
        }
    }
    return nullptr;
}

}  // namespace

CsvSchema CsvSchema::defaults() {
    CsvSchema s;
    s.date_columns = {"date", "time", "Date"};
    s.rename = {
        // CoinMetrics community export
        {"PriceUSD", "price_usd"},
        {"CapMrktCurUSD", "market_cap_usd"},
        {"SplyCur", "supply"},
        {"IssTotNtv", "issuance"},
        {"FeeTotUSD", "fees_usd"},
        {"IssTotUSD", "block_rewards_usd"},
        {"TxTfrValAdjUSD", std::string(kVolumeOnchain)},
        {"AdrActCnt", "active_addresses"},
        {"TxCnt", "tx_count"},
        {"TxTfrCnt", "transfer_count"},
        {"SplyActPct1yr", std::string(kSupplyActive1yPct)},
        {"SplyAct1yr", "supply_active_1y"},
        // CoinMarketCap historical data
        {"Volume", std::string(kVolumeOffchain)},
    };
    return s;
}

const RawColumn* RawTable::find(std::string_view name) const {
    for (const auto& c : columns) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

RawTable parse_csv(std::string_view text, const CsvSchema& schema) {
    std::vector<std::string_view> lines;
    for (std::size_t pos = 0; pos < text.size();) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        if (!trim(line).empty()) lines.push_back(line);
        pos = end + 1;
    }
    if (lines.empty()) throw Error(ErrorKind::MissingDateColumn, "csv has no header row");

    // Strip a UTF-8 byte-order mark.
    if (lines[0].substr(0, 3) == "\xEF\xBB\xBF") lines[0].remove_prefix(3);
    const auto header = split_record(lines[0]);

    std::optional<std::size_t> date_idx;
    for (const auto& candidate : schema.date_columns) {
        auto it = std::find(header.begin(), header.end(), candidate);
        if (it != header.end()) {
            date_idx = static_cast<std::size_t>(it - header.begin());
            break;
        }
    }
    if (!date_idx) throw Error(ErrorKind::MissingDateColumn, "no date column in csv header");

    RawTable table;
    std::vector<std::size_t> src_index;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i == *date_idx) continue;
        auto it = schema.rename.find(header[i]);
        table.columns.push_back({it != schema.rename.end() ? it->second : header[i], {}});
        src_index.push_back(i);
    }

    for (std::size_t li = 1; li < lines.size(); ++li) {
        const auto cells = split_record(lines[li]);
        if (cells.size() != header.size()) {
            throw Error(ErrorKind::MalformedCsv, "line " + std::to_string(li + 1) + " has " +
                                                     std::to_string(cells.size()) + " cells, expected " +
                                                     std::to_string(header.size()));
        }
        const auto date = Date::parse(cells[*date_idx]);
        if (!date) {
            throw Error(ErrorKind::MalformedCsv,
                        "line " + std::to_string(li + 1) + ": unparseable date '" + cells[*date_idx] + "'");
        }
        if (!table.dates.empty()) {
            if (*date == table.dates.back()) {
                throw Error(ErrorKind::DuplicateDate, "duplicate date " + date->to_string());
            }
            if (*date < table.dates.back()) {
                throw Error(ErrorKind::NonMonotoneDate, "date " + date->to_string() + " follows " +
                                                            table.dates.back().to_string());
            }
        }
        table.dates.push_back(*date);
        for (std::size_t c = 0; c < src_index.size(); ++c) {
            table.columns[c].values.push_back(parse_number(cells[src_index[c]]));
        }
    }
    return table;
}

RawTable read_csv_file(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), schema);
}

const std::vector<double>* MarketColumns::field(std::string_view name) const {
    return const_cast<MarketColumns*>(this)->field(name);
}

std::vector<double>* MarketColumns::field(std::string_view name) {
    if (name == "price_usd") return &price_usd;
    if (name == "market_cap_usd") return &market_cap_usd;
    if (name == "supply") return &supply;
    if (name == "issuance") return &issuance;
    if (name == "fees_usd") return &fees_usd;
    if (name == "block_rewards_usd") return &block_rewards_usd;
    if (name == "volume_usd") return &volume_usd;
    if (name == "active_addresses") return &active_addresses;
    if (name == "tx_count") return &tx_count;
    if (name == "transfer_count") return &transfer_count;
    if (name == "supply_active_1y") return &supply_active_1y;
    return nullptr;
}

std::vector<Violation> validate(const MarketColumns& cols) {
    std::vector<Violation> out;
    const std::size_t n = cols.rows();
    if (n == 0) {
        out.push_back({0, "date", "dataset is empty"});
        return out;
    }
    for (auto name : kDatasetFields) {
        if (cols.field(name)->size() != n) {
            out.push_back({0, std::string(name), "column length differs from date index"});
        }
    }
    if (!out.empty()) return out;

    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0 && cols.date[i] - cols.date[i - 1] != 1) {
            out.push_back({i, "date", "date index not contiguous at " + cols.date[i].to_string()});
        }
        for (auto name : kDatasetFields) {
            const double v = (*cols.field(name))[i];
            if (!std::isfinite(v)) out.push_back({i, std::string(name), "not finite"});
        }
        auto require = [&](bool ok, std::string_view field, const char* what) {
            if (!ok) out.push_back({i, std::string(field), what});
        };
        require(cols.price_usd[i] > 0, "price_usd", "must be > 0");
        require(cols.market_cap_usd[i] > 0, "market_cap_usd", "must be > 0");
        require(cols.supply[i] > 0, "supply", "must be > 0");
        require(i == 0 || cols.supply[i] >= cols.supply[i - 1], "supply", "must be non-decreasing");
        require(cols.issuance[i] >= 0, "issuance", "must be >= 0");
        require(cols.fees_usd[i] >= 0, "fees_usd", "must be >= 0");
        require(cols.block_rewards_usd[i] >= 0, "block_rewards_usd", "must be >= 0");
        require(cols.volume_usd[i] >= 0, "volume_usd", "must be >= 0");
        require(cols.active_addresses[i] >= 0, "active_addresses", "must be >= 0");
        require(cols.tx_count[i] >= 0, "tx_count", "must be >= 0");
        require(cols.transfer_count[i] >= 0, "transfer_count", "must be >= 0");
        require(cols.supply_active_1y[i] >= 0, "supply_active_1y", "must be >= 0");
        require(cols.supply_active_1y[i] <= cols.supply[i], "supply_active_1y", "must be <= supply");
    }
    return out;
}

MarketDataset::MarketDataset(MarketColumns cols, DatasetInfo info)
    : cols_(std::move(cols)), info_(info) {
    const auto violations = validate(cols_);
    if (!violations.empty()) {
        const auto& v = violations.front();
        std::string where = v.row < cols_.date.size() ? cols_.date[v.row].to_string() : "-";
        throw Error(ErrorKind::InvariantViolation, "row " + std::to_string(v.row) + " (" + where +
                                                       ") field " + v.field + ": " + v.message);
    }
}

MarketDataset build_dataset(std::span<const RawTable> tables, const MissingPolicy& policy) {
    if (tables.empty()) throw Error(ErrorKind::EmptyOverlap, "no input tables");
    Date lo = tables.front().dates.empty() ? Date{} : tables.front().dates.front();
    Date hi = tables.front().dates.empty() ? Date{} : tables.front().dates.back();
    for (const auto& t : tables) {
        if (t.dates.empty()) throw Error(ErrorKind::EmptyOverlap, "input table has no rows");
        lo = std::max(lo, t.dates.front());
        hi = std::min(hi, t.dates.back());
    }
    if (lo > hi) throw Error(ErrorKind::EmptyOverlap, "input tables share no dates");

    const auto n = static_cast<std::size_t>(hi - lo + 1);

    // Aligns one source column onto the lo..hi calendar; absent days are missing.
    auto align = [&](const RawTable& t, const RawColumn& c) {
        Series out(n);
        for (std::size_t r = 0; r < t.rows(); ++r) {
            if (t.dates[r] < lo || t.dates[r] > hi) continue;
            out[static_cast<std::size_t>(t.dates[r] - lo)] = c.values[r];
        }
        return out;
    };

    std::size_t filled = 0;
    auto fill = [&](Series s, std::string_view name) {
        std::size_t run = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (s[i]) {
                run = 0;
                continue;
            }
            const std::string at = (lo + static_cast<std::int32_t>(i)).to_string();
            if (policy.mode == MissingPolicy::Mode::Reject) {
                throw Error(ErrorKind::UnfilledGap, std::string(name) + " missing on " + at);
            }
            if (i == 0 || ++run > static_cast<std::size_t>(policy.max_gap_days)) {
                throw Error(ErrorKind::UnfilledGap,
                            std::string(name) + " has an unfillable gap at " + at);
            }
            s[i] = s[i - 1];
            ++filled;
        }
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = *s[i];
        return out;
    };

    auto require = [&](std::string_view name) -> std::optional<std::vector<double>> {
        const RawTable* owner = nullptr;
        const RawColumn* col = find_any(tables, name, &owner);
        if (!col) return std::nullopt;
        return fill(align(*owner, *col), name);
    };

    MarketColumns cols;
    cols.date.reserve(n);
    for (std::size_t i = 0; i < n; ++i) cols.date.push_back(lo + static_cast<std::int32_t>(i));

    DatasetInfo info;
    for (auto name : kDatasetFields) {
        if (name == "volume_usd" || name == "supply_active_1y") continue;
        auto v = require(name);
        if (!v) throw Error(ErrorKind::InvariantViolation, "required column " + std::string(name) + " not mapped");
        *cols.field(name) = std::move(*v);
    }

    if (auto total = require("volume_usd")) {
        cols.volume_usd = std::move(*total);
    } else {
        auto onchain = require(kVolumeOnchain);
        if (!onchain) {
            throw Error(ErrorKind::InvariantViolation, "neither volume_usd nor volume_onchain_usd mapped");
        }
        cols.volume_usd = std::move(*onchain);
        if (auto offchain = require(kVolumeOffchain)) {
            for (std::size_t i = 0; i < n; ++i) cols.volume_usd[i] += (*offchain)[i];
        } else {
            info.volume_degraded = true;
        }
    }

    if (auto active = require("supply_active_1y")) {
        cols.supply_active_1y = std::move(*active);
    } else if (auto pct = require(kSupplyActive1yPct)) {
        cols.supply_active_1y.resize(n);
        for (std::size_t i = 0; i < n; ++i) cols.supply_active_1y[i] = (*pct)[i] / 100.0 * cols.supply[i];
    } else {
        throw Error(ErrorKind::InvariantViolation, "neither supply_active_1y nor supply_active_1y_pct mapped");
    }

    info.filled_cells = filled;
    return MarketDataset(std::move(cols), info);
}

MarketDataset slice(const MarketDataset& ds, Date start, Date end) {
    if (start > end || start < ds.first_date() || end > ds.last_date()) {
        throw Error(ErrorKind::RangeOutOfBounds, "slice [" + start.to_string() + ", " + end.to_string() +
                                                     "] outside dataset [" + ds.first_date().to_string() +
                                                     ", " + ds.last_date().to_string() + "]");
    }
    const auto b = static_cast<std::size_t>(start - ds.first_date());
    const auto e = static_cast<std::size_t>(end - ds.first_date()) + 1;
    const auto& src = ds.columns();
    MarketColumns cols;
    cols.date.assign(src.date.begin() + b, src.date.begin() + e);
    for (auto name : kDatasetFields) {
        const auto& v = *src.field(name);
        cols.field(name)->assign(v.begin() + b, v.begin() + e);
    }
    return MarketDataset(std::move(cols), ds.info());
}

void write_csv(const MarketDataset& ds, std::ostream& out) {
    out << "date";
    for (auto name : kDatasetFields) out << ',' << name;
    out << '\n';
    const auto& cols = ds.columns();
    for (std::size_t i = 0; i < ds.size(); ++i) {
        out << cols.date[i].to_string();
        for (auto name : kDatasetFields) out << ',' << format_number((*cols.field(name))[i]);
        out << '\n';
    }
}

std::string to_csv(const MarketDataset& ds) {
    std::ostringstream out;
    write_csv(ds, out);
    return out.str();
}

MarketDataset read_canonical_csv(std::string_view text) {
    CsvSchema schema;
    const RawTable table = parse_csv(text, schema);
    return build_dataset(std::span<const RawTable>(&table, 1),
                         MissingPolicy{MissingPolicy::Mode::Reject, 0});
}

}  // namespace cryptoval

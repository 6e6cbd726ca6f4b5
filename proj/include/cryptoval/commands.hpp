#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cryptoval/config.hpp"
#include "cryptoval/error.hpp"
#include "cryptoval/ingest.hpp"

namespace cryptoval::cli {

/// Full dataset plus the [begin, end) row window selected by --from/--to.
struct LoadedData {
    MarketDataset full;
    std::size_t begin = 0;
    std::size_t end = 0;

    MarketDataset window() const;
};

LoadedData load_data(const RunConfig& cfg);

// Each command writes its reports under cfg.out_dir and returns the paths written.
std::vector<std::string> cmd_metrics(const RunConfig& cfg);
std::vector<std::string> cmd_table1(const RunConfig& cfg);
std::vector<std::string> cmd_table2(const RunConfig& cfg);
std::vector<std::string> cmd_cluster(const RunConfig& cfg);
std::vector<std::string> cmd_tree(const RunConfig& cfg);
std::vector<std::string> cmd_backtest(const RunConfig& cfg);

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 2,
    kExitData = 3,
    // Analysis failures: kExitCommandBase + position of the command in kCommands.
    kExitCommandBase = 10,
};

inline const std::vector<std::string> kCommands{"metrics", "table1", "table2", "cluster", "tree", "backtest"};

int exit_code_for(const std::string& command, ErrorKind kind);

/// Parses argv, runs one command and reports errors as single-line diagnostics on `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cryptoval::cli

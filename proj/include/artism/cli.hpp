#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace artism::cli {

enum Exit : int { kOk = 0, kUsage = 1, kDataError = 2, kRuntimeError = 3 };

struct IngestArgs {
    std::filesystem::path corpus;
    std::filesystem::path kb;
    std::filesystem::path out;
    bool strict = false;
};

struct RunArgs {
    std::optional<std::filesystem::path> config;
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> ticks;
    std::filesystem::path out;
    bool audit = false;
};

struct ServeArgs {
    std::optional<std::filesystem::path> state;
    std::optional<std::filesystem::path> config;
    std::string host = "127.0.0.1";
    std::optional<int> port;
    std::optional<std::filesystem::path> ui;
    bool debug = false;
};

struct ExportArgs {
    std::filesystem::path state;
    std::string what;
    std::string format = "jsonl";
};

/// Writes profiles.jsonl, kb.jsonl and report.txt into `out`.
int cmd_ingest(const IngestArgs& a, std::ostream& out, std::ostream& err);
/// Writes events.jsonl, snapshot.json and config.conf into `out`; prints "log_hash: <hex>".
int cmd_run(const RunArgs& a, std::ostream& out, std::ostream& err);
/// Blocks until SIGINT/SIGTERM, then persists the state directory (when given).
int cmd_serve(const ServeArgs& a, std::ostream& out, std::ostream& err);
/// Writes <state>/<what>.jsonl in chronological order.
int cmd_export(const ExportArgs& a, std::ostream& out, std::ostream& err);

/// Parses argv ("artism <command> ...") and dispatches.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// ARTISM_DATA_DIR, else the data directory of the source tree this was built from.
std::filesystem::path data_dir();

}  // namespace artism::cli

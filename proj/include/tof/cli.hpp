#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "tof/config.hpp"
#include "tof/tf_distribution.hpp"

namespace tof {

inline constexpr std::string_view version = TOF_VERSION;

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 1;
inline constexpr int numerical = 2;
inline constexpr int audit_failed = 3;
}  // namespace exit_code

enum class OutputFormat { csv, json };

/// Column-major-free little table: a header and rows of cells.
struct Table {
  using Cell = std::variant<double, std::int64_t, std::string>;

  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
};

/// Doubles are written with 17 significant digits so outputs round-trip.
void write_csv(std::ostream& os, const Table& table);
nlohmann::json table_to_json(const Table& table);

struct NamedTable {
  std::string name;  // file stem, e.g. "tf"
  Table table;
};

struct AuditRecord {
  std::string context;
  BoundAudit audit;
};

struct RunOptions {
  std::optional<std::string> out_dir;
  OutputFormat format = OutputFormat::csv;
  std::optional<std::uint64_t> seed;  // overrides the config seed
};

struct RunReport {
  std::string workflow;
  std::vector<NamedTable> tables;  // the first is the primary output
  std::vector<std::string> outputs;
  std::vector<AuditRecord> audits;
  nlohmann::json summary = nlohmann::json::object();
  std::optional<std::uint64_t> seed;
  double wall_time = 0.0;  // seconds
  std::string version{tof::version};

  bool audits_passed() const;
  int exit_status() const { return audits_passed() ? exit_code::ok : exit_code::audit_failed; }
  nlohmann::json to_json() const;
};

/// Runs the configured workflow. With an output directory the tables and
/// report.json are written there; otherwise nothing touches the disk.
RunReport run(const RunConfig& config, const RunOptions& options = {});

/// Entry point of the `tof` executable. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tof

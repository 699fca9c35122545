#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gredo/analytics.hpp"
#include "gredo/database.hpp"
#include "gredo/query.hpp"

namespace gredo {

enum class OutputFormat { Table, Csv, Json };
std::optional<OutputFormat> parse_output_format(std::string_view name);

struct SessionConfig {
  std::optional<std::filesystem::path> db_dir;  // in-memory when empty
  QueryOptions query;
  std::size_t workers = 1;
  std::size_t buffer_bytes = 64u << 20;
  OutputFormat format = OutputFormat::Table;
  std::uint64_t seed = 42;

  /// Throws ContractError when workers is 0 or the costs are out of range.
  void validate() const;
};

struct CommandResult {
  std::string output;
  int exit_code = 0;  // 0 ok, 1 command error, 2 audit failure
};

// ------------------------------------------------------------------ bench

struct BenchEntry {
  std::string scenario;
  std::string mode;  // full, no-pushdown, optimizer-off, join-emulation
  double wall_ms = 0;  // median over the repetitions
  std::uint64_t scanned = 0;
  std::uint64_t tid_fetches = 0;
  std::size_t rows = 0;
  std::uint64_t hash = 0;

  std::uint64_t record_reads() const { return scanned + tid_fetches; }
};

struct BenchReport {
  std::string suite;
  int scale = 0;
  std::vector<BenchEntry> entries;

  /// Every scenario produced one result hash in all modes.
  bool hashes_agree() const;
  const BenchEntry* find(std::string_view scenario, std::string_view mode) const;
  std::string to_string(bool with_times = true) const;
};

const std::vector<std::string>& bench_modes();
QueryOptions bench_mode_options(std::string_view mode, const QueryOptions& base);

/// Suites: social (one selective cross-model query over a Persons/Tags graph of
/// 10^4 * scale edges), commerce (fixed queries over the randomized e-commerce
/// fixture grown by scale) and all. Scale 0 yields an empty report.
BenchReport bench(std::string_view suite, int scale, std::uint64_t seed, const QueryOptions& base = {},
                  int repetitions = 3);

// ---------------------------------------------------------------- session

class Session {
 public:
  explicit Session(SessionConfig config = {});
  ~Session();
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  /// Runs one command. Errors come back as `error [<category>]: <message>`
  /// with exit code 1, never as exceptions.
  CommandResult run_command(std::string_view text);

  Database& db() { return *db_; }
  SessionConfig& config() { return config_; }
  InterBuffer& buffer() { return buffer_; }

 private:
  CommandResult dispatch(std::string_view text);
  std::string format_result(const QueryResult& r) const;

  SessionConfig config_;
  std::unique_ptr<Database> db_;
  InterBuffer buffer_;
};

/// Splits a script into commands: dot commands end at the newline, everything
/// else at a `;` outside string literals.
std::vector<std::string> split_commands(std::string_view script);

std::string format_table(const std::vector<std::string>& columns, const std::vector<std::vector<Value>>& rows);
std::string format_csv(const std::vector<std::string>& columns, const std::vector<std::vector<Value>>& rows);
std::string format_json(const std::vector<std::string>& columns, const std::vector<std::vector<Value>>& rows);

}  // namespace gredo

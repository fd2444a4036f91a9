#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace embedstab {

inline constexpr const char* kToolVersion = "0.1.0";

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Locale-independent shortest round-trip text of a number.
std::string cell(double value);
std::string cell(std::size_t value);
/// "undefined" for an empty value.
std::string cell(const std::optional<double>& value);

/// A table with metadata (tool version, seeds, input hashes, ...).
struct Report {
  std::string command;
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  Report(std::string command, std::vector<std::string> columns);
  Report() = default;

  void add_meta(std::string key, std::string value);
  /// Adds "input:<label>" with the SHA-256 of `path`.
  void add_input(const std::string& label, const std::filesystem::path& path);
  void add_row(std::vector<std::string> row);

  friend bool operator==(const Report&, const Report&) = default;
};

/// TSV: "#"-prefixed "key<TAB>value" metadata lines, a header row, then rows.
void write_tsv(const Report& report, const std::filesystem::path& path);
Report read_tsv(const std::filesystem::path& path);

/// JSON object {command, meta, columns, rows}; numeric cells become numbers.
void write_json(const Report& report, const std::filesystem::path& path);
Report read_json(const std::filesystem::path& path);

}  // namespace embedstab

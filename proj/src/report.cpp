#include "embedstab/report.hpp"

#include "detail/text.hpp"
#include "embedstab/error.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <array>
#include <cmath>
#include <fstream>
#include <memory>

namespace embedstab {

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string() + " for hashing");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    throw NumericalError("SHA-256 initialization failed");
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

std::string cell(double value) { return detail::format_double(value); }
std::string cell(std::size_t value) { return std::to_string(value); }
std::string cell(const std::optional<double>& value) {
  return value ? cell(*value) : std::string("undefined");
}

Report::Report(std::string command, std::vector<std::string> columns)
    : command(std::move(command)), columns(std::move(columns)) {
  add_meta("tool", "embedstab");
  add_meta("version", kToolVersion);
  add_meta("command", this->command);
}

void Report::add_meta(std::string key, std::string value) {
  meta.emplace_back(std::move(key), std::move(value));
}

void Report::add_input(const std::string& label, const std::filesystem::path& path) {
  add_meta("input:" + label, path.filename().string() + " sha256=" + sha256_file(path));
}

void Report::add_row(std::vector<std::string> row) {
  if (row.size() != columns.size())
    throw UsageError("report row has " + std::to_string(row.size()) + " cells, expected " +
                     std::to_string(columns.size()));
  rows.push_back(std::move(row));
}

namespace {

std::string joined(const std::vector<std::string>& cells) {
  std::string s;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) s += '\t';
    s += cells[i];
  }
  return s;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

nlohmann::ordered_json cell_to_json(const std::string& c) {
  // Only text that reads back identically becomes a JSON number.
  std::int64_t i = 0;
  if (detail::parse_int(c, i) && std::to_string(i) == c) return i;
  double d = 0.0;
  if (detail::parse_double(c, d) && std::isfinite(d) && cell(d) == c) return d;
  return c;
}

std::string json_to_cell(const nlohmann::ordered_json& j) {
  if (j.is_number_integer()) return std::to_string(j.get<std::int64_t>());
  if (j.is_number()) return cell(j.get<double>());
  return j.get<std::string>();
}

}  // namespace

void write_tsv(const Report& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write report " + path.string());
  for (const auto& [k, v] : report.meta) out << '#' << k << '\t' << v << '\n';
  out << joined(report.columns) << '\n';
  for (const auto& r : report.rows) out << joined(r) << '\n';
  if (!out) throw DataError("I/O failure while writing " + path.string());
}

Report read_tsv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open report " + path.string());
  Report r;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (!header && !line.empty() && line.front() == '#') {
      const auto tab = line.find('\t');
      if (tab == std::string::npos) throw DataError("malformed metadata line in " + path.string());
      r.meta.emplace_back(line.substr(1, tab - 1), line.substr(tab + 1));
      if (r.meta.back().first == "command") r.command = r.meta.back().second;
      continue;
    }
    if (!header) {
      r.columns = split_tabs(line);
      header = true;
      continue;
    }
    auto cells = split_tabs(line);
    if (cells.size() != r.columns.size())
      throw DataError("row width mismatch in " + path.string());
    r.rows.push_back(std::move(cells));
  }
  if (!header) throw DataError("report " + path.string() + " has no header row");
  return r;
}

void write_json(const Report& report, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["command"] = report.command;
  auto& meta = j["meta"] = nlohmann::ordered_json::array();
  for (const auto& [k, v] : report.meta) meta.push_back({k, v});
  j["columns"] = report.columns;
  auto& rows = j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    auto row = nlohmann::ordered_json::array();
    for (const auto& c : r) row.push_back(cell_to_json(c));
    rows.push_back(std::move(row));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write report " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw DataError("I/O failure while writing " + path.string());
}

Report read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open report " + path.string());
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed JSON report " + path.string() + ": " + e.what());
  }
  Report r;
  try {
    r.command = j.at("command").get<std::string>();
    for (const auto& m : j.at("meta"))
      r.meta.emplace_back(m.at(0).get<std::string>(), m.at(1).get<std::string>());
    r.columns = j.at("columns").get<std::vector<std::string>>();
    for (const auto& row : j.at("rows")) {
      std::vector<std::string> cells;
      for (const auto& c : row) cells.push_back(json_to_cell(c));
      r.rows.push_back(std::move(cells));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError("unexpected JSON report layout in " + path.string() + ": " + e.what());
  }
  return r;
}

}  // namespace embedstab

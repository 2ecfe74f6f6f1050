#include "csv.hpp"

#include "gridplan/error.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gridplan::detail {

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view text, char separator) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(separator, start);
    out.push_back(trim(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

CsvTable::CsvTable(std::string source, std::vector<std::string> header, std::vector<std::vector<std::string>> rows)
    : source_(std::move(source)), header_(std::move(header)), rows_(std::move(rows)) {}

bool CsvTable::has_column(std::string_view name) const {
  return std::find(header_.begin(), header_.end(), name) != header_.end();
}

std::size_t CsvTable::column(std::string_view name) const {
  const auto it = std::find(header_.begin(), header_.end(), name);
  if (it == header_.end()) throw SchemaError(source_ + ": missing column '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - header_.begin());
}

std::string CsvTable::where(std::size_t row) const { return source_ + ":" + std::to_string(row + 2); }

const std::string& CsvTable::text(std::size_t row, std::string_view name) const {
  return rows_.at(row).at(column(name));
}

double CsvTable::number(std::size_t row, std::string_view name) const {
  const auto value = optional_number(row, name);
  if (!value) throw SchemaError(where(row) + ": column '" + std::string(name) + "' must not be empty");
  return *value;
}

std::optional<double> CsvTable::optional_number(std::size_t row, std::string_view name) const {
  const std::string& field = text(row, name);
  if (field.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw SchemaError(where(row) + ": column '" + std::string(name) + "' is not a number: '" + field + "'");
  }
  return value;
}

long CsvTable::integer(std::size_t row, std::string_view name) const {
  const std::string& field = text(row, name);
  long value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
    throw SchemaError(where(row) + ": column '" + std::string(name) + "' is not an integer: '" + field + "'");
  }
  return value;
}

bool CsvTable::boolean(std::size_t row, std::string_view name) const {
  const std::string& field = text(row, name);
  if (field == "1" || field == "true") return true;
  if (field == "0" || field == "false") return false;
  throw SchemaError(where(row) + ": column '" + std::string(name) + "' is not a boolean: '" + field + "'");
}

CsvTable read_csv(const std::filesystem::path& path, const std::vector<std::string>& required_columns) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    auto fields = split(stripped, ',');
    if (header.empty()) {
      header = std::move(fields);
      continue;
    }
    if (fields.size() != header.size()) {
      throw SchemaError(path.string() + ":" + std::to_string(rows.size() + 2) + ": expected " +
                        std::to_string(header.size()) + " fields, found " + std::to_string(fields.size()));
    }
    rows.push_back(std::move(fields));
  }
  CsvTable table(path.string(), header, std::move(rows));
  for (const auto& name : required_columns) {
    if (!table.has_column(name)) throw SchemaError(path.string() + ": missing column '" + name + "'");
  }
  return table;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

std::string format_general(double value, int significant_digits) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*g", significant_digits, value);
  return buffer;
}

}  // namespace gridplan::detail

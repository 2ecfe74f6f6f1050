#pragma once

// Small header-addressed CSV reader and text helpers shared by the loaders.
// Fields are comma separated, no quoting; '#' starts a comment line.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gridplan::detail {

class CsvTable {
public:
  CsvTable(std::string source, std::vector<std::string> header, std::vector<std::vector<std::string>> rows);

  std::size_t size() const noexcept { return rows_.size(); }
  bool has_column(std::string_view name) const;

  const std::string& text(std::size_t row, std::string_view column) const;
  double number(std::size_t row, std::string_view column) const;
  std::optional<double> optional_number(std::size_t row, std::string_view column) const;
  long integer(std::size_t row, std::string_view column) const;
  bool boolean(std::size_t row, std::string_view column) const;

  // "<file>:<line>" for error messages.
  std::string where(std::size_t row) const;

private:
  std::size_t column(std::string_view name) const;

  std::string source_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

CsvTable read_csv(const std::filesystem::path& path, const std::vector<std::string>& required_columns);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view contents);

// Shortest decimal that round-trips to the same double.
std::string format_double(double value);
// printf-style %.<digits>g rendering.
std::string format_general(double value, int significant_digits);

std::string trim(std::string_view text);
std::vector<std::string> split(std::string_view text, char separator);

}  // namespace gridplan::detail

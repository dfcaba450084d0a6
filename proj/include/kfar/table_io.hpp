#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace kfar {

using Cell = std::variant<std::int64_t, double, std::string>;

/// A column-named table of mixed integer, real and string cells. Every
/// artifact the CLI emits is one of these written as CSV.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
  std::size_t column_index(const std::string& name) const;
  double number(std::size_t row, const std::string& column) const;
};

/// Shortest form is not used: reals are printed with 17 significant digits so
/// that re-reading yields the identical double.
std::string format_number(double x);

/// UTF-8, LF line endings, no quoting (cells never contain commas).
void write_csv(std::ostream& out, const Table& table);
void write_csv(const std::filesystem::path& path, const Table& table);

/// Parses a CSV with a header row. Cells that parse fully as numbers become
/// doubles; everything else is kept as a string.
Table read_csv(std::istream& in);
Table read_csv(const std::filesystem::path& path);

}  // namespace kfar

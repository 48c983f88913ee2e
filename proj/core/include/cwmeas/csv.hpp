#ifndef CWMEAS_CSV_HPP
#define CWMEAS_CSV_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cwmeas::csv {

using Cell = std::variant<double, std::int64_t, std::string>;

/// Rows of cells under a header; optional `#` comment lines precede the
/// header.
struct Table {
  std::vector<std::string> comments;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  Table() = default;
  explicit Table(std::vector<std::string> cols) : columns(std::move(cols)) {}

  /// Throws ValidationError if the row width differs from the header.
  void add_row(std::vector<Cell> row);
};

/// Shortest form with 17 significant digits, '.' decimal point. Throws
/// GuardError on NaN or infinity.
std::string format_double(double value);

/// Serialised form: `\n` line endings, header row, no quoting (cells must
/// not contain commas or newlines).
std::string to_string(const Table& table);

/// Writes to_string(table); throws IoError naming the path on failure.
void emit_csv(const Table& table, const std::filesystem::path& path);

struct ParsedTable {
  std::vector<std::string> comments;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

ParsedTable parse(std::string_view text);
ParsedTable read_file(const std::filesystem::path& path);

/// strtod-equivalent parse of one field; throws ValidationError on junk.
double parse_double(std::string_view field);

}  // namespace cwmeas::csv

#endif  // CWMEAS_CSV_HPP

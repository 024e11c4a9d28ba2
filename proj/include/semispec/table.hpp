#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace semispec {

using Cell = std::variant<std::int64_t, double, std::string>;

/// Column-named rows, rendered as CSV with doubles at 17 significant digits.
class Table {
 public:
  Table() = default;
  explicit Table(std::vector<std::string> columns);

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }
  std::size_t row_count() const { return rows_.size(); }
  std::size_t column_index(const std::string& name) const;

  void add_row(std::vector<Cell> row);
  void append(const Table& other);

  /// Numeric view of a cell; strings throw.
  double number(std::size_t row, std::size_t col) const;
  double number(std::size_t row, const std::string& col) const { return number(row, column_index(col)); }
  std::string text(std::size_t row, std::size_t col) const;

  std::string to_csv() const;

  /// Writes through a temporary file renamed into place, so a failed run
  /// leaves no partial file.
  void write_csv(const std::string& path) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

/// "%.17g" rendering used by every CSV writer.
std::string format_double(double v);

/// Writes text atomically (temporary file + rename).
void write_text_file(const std::string& path, const std::string& contents);

}  // namespace semispec

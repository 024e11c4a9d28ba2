#include "semispec/table.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "semispec/error.hpp"

namespace semispec {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Table::Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

std::size_t Table::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i)
    if (columns_[i] == name) return i;
  fail(ErrorKind::InvalidArgument, "table has no column '" + name + "'");
}

void Table::add_row(std::vector<Cell> row) {
  require(row.size() == columns_.size(), "table row has " + std::to_string(row.size()) + " cells, expected " +
                                             std::to_string(columns_.size()));
  rows_.push_back(std::move(row));
}

void Table::append(const Table& other) {
  require(other.columns_ == columns_, "cannot append tables with different columns");
  rows_.insert(rows_.end(), other.rows_.begin(), other.rows_.end());
}

double Table::number(std::size_t row, std::size_t col) const {
  require(row < rows_.size() && col < columns_.size(), "table index out of range");
  const Cell& c = rows_[row][col];
  if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&c)) return *d;
  fail(ErrorKind::InvalidArgument, "table cell (" + std::to_string(row) + ", " + columns_[col] + ") is not numeric");
}

std::string Table::text(std::size_t row, std::size_t col) const {
  require(row < rows_.size() && col < columns_.size(), "table index out of range");
  const Cell& c = rows_[row][col];
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  return std::get<std::string>(c);
}

std::string Table::to_csv() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < columns_.size(); ++i) out << (i ? "," : "") << columns_[i];
  out << '\n';
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    for (std::size_t c = 0; c < columns_.size(); ++c) {
      if (c) out << ',';
      std::string cell = text(r, c);
      if (cell.find_first_of(",\"\n") != std::string::npos) {
        std::string quoted = "\"";
        for (char ch : cell) quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        cell = quoted + "\"";
      }
      out << cell;
    }
    out << '\n';
  }
  return out.str();
}

void Table::write_csv(const std::string& path) const { write_text_file(path, to_csv()); }

void write_text_file(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot write '" + path + "'");
    out << contents;
    if (!out) fail(ErrorKind::Io, "write failed for '" + path + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorKind::Io, "cannot move '" + tmp + "' to '" + path + "': " + ec.message());
}

}  // namespace semispec

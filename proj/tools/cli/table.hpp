#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace ness::cli {

using Cell = std::variant<double, std::int64_t, bool, std::string>;

/// One output record; column order is the insertion order.
struct Row {
  std::vector<std::pair<std::string, Cell>> cells;

  Row &add(std::string key, Cell value) {
    cells.emplace_back(std::move(key), std::move(value));
    return *this;
  }
  Row &add(std::string key, double value) { return add(std::move(key), Cell{value}); }
  Row &add(std::string key, bool value) { return add(std::move(key), Cell{value}); }
  Row &add(std::string key, int value) { return add(std::move(key), Cell{std::int64_t{value}}); }
  Row &add(std::string key, std::int64_t value) { return add(std::move(key), Cell{value}); }
  Row &add(std::string key, std::string value) { return add(std::move(key), Cell{std::move(value)}); }
  Row &add(std::string key, const char *value) { return add(std::move(key), Cell{std::string(value)}); }
};

/// Floats use 17 significant digits; non-finite values print as inf, -inf, nan.
std::string format_cell(const Cell &cell);

/// Header from the first row; every row must carry the same columns.
void write_csv(std::ostream &out, const std::vector<Row> &rows);
/// Array of objects mirroring the CSV rows.
void write_json(std::ostream &out, const std::vector<Row> &rows);

/// Minimal JSON string escaping.
std::string json_quote(const std::string &s);

} // namespace ness::cli

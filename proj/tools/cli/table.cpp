#include "table.hpp"

#include "ness/errors.hpp"

#include <cmath>
#include <cstdio>

namespace ness::cli {

namespace {

std::string format_double(double v) {
  if (std::isnan(v))
    return "nan";
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string &s) {
  if (s.find_first_of(",\"\n") == std::string::npos)
    return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"')
      out += '"';
    out += c;
  }
  return out + "\"";
}

void check_columns(const std::vector<Row> &rows) {
  for (const Row &r : rows) {
    bool same = r.cells.size() == rows.front().cells.size();
    for (std::size_t i = 0; same && i < r.cells.size(); ++i)
      same = r.cells[i].first == rows.front().cells[i].first;
    if (!same)
      throw InvalidArgument("output rows do not share one column layout");
  }
}

} // namespace

std::string json_quote(const std::string &s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
    case '"': out += "\\\""; break;
    case '\\': out += "\\\\"; break;
    case '\n': out += "\\n"; break;
    case '\t': out += "\\t"; break;
    case '\r': out += "\\r"; break;
    default:
      if (static_cast<unsigned char>(c) < 0x20) {
        char buf[8];
        std::snprintf(buf, sizeof buf, "\\u%04x", c);
        out += buf;
      } else {
        out += c;
      }
    }
  }
  return out + "\"";
}

std::string format_cell(const Cell &cell) {
  return std::visit(
      [](const auto &v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>)
          return format_double(v);
        else if constexpr (std::is_same_v<T, bool>)
          return v ? "true" : "false";
        else if constexpr (std::is_same_v<T, std::int64_t>)
          return std::to_string(v);
        else
          return v;
      },
      cell);
}

void write_csv(std::ostream &out, const std::vector<Row> &rows) {
  if (rows.empty())
    return;
  check_columns(rows);
  const auto &head = rows.front().cells;
  for (std::size_t i = 0; i < head.size(); ++i)
    out << (i ? "," : "") << csv_field(head[i].first);
  out << '\n';
  for (const Row &r : rows) {
    for (std::size_t i = 0; i < r.cells.size(); ++i)
      out << (i ? "," : "") << csv_field(format_cell(r.cells[i].second));
    out << '\n';
  }
}

void write_json(std::ostream &out, const std::vector<Row> &rows) {
  check_columns(rows.empty() ? std::vector<Row>{} : rows);
  out << "[";
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out << (k ? ",\n " : "\n ") << "{";
    const auto &cells = rows[k].cells;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      out << (i ? "," : "") << json_quote(cells[i].first) << ":";
      const Cell &c = cells[i].second;
      const bool quoted = std::holds_alternative<std::string>(c) ||
                          (std::holds_alternative<double>(c) && !std::isfinite(std::get<double>(c)));
      out << (quoted ? json_quote(format_cell(c)) : format_cell(c));
    }
    out << "}";
  }
  out << (rows.empty() ? "]\n" : "\n]\n");
}

} // namespace ness::cli

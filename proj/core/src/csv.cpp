#include "bayesdoe/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <atomic>
#include <system_error>

#include <unistd.h>

#include "bayesdoe/errors.hpp"

namespace bayesdoe {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::string unquote(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    std::string out;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
      out.push_back(s[i]);
      if (s[i] == '"' && s[i + 1] == '"') ++i;
    }
    return out;
  }
  return std::string(s);
}

std::vector<std::string> split_line(std::string_view line, char delimiter) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (c == '"') quoted = !quoted;
    if (c == delimiter && !quoted) {
      cells.push_back(unquote(cell));
      cell.clear();
    } else {
      cell.push_back(c);
    }
  }
  cells.push_back(unquote(cell));
  return cells;
}

}  // namespace

void CsvSchema::validate() const {
  if (input_columns.empty()) throw SchemaError("schema needs at least one input column");
  if (output_columns.empty()) throw SchemaError("schema needs at least one output column");
  for (const auto& out : output_columns) {
    if (std::find(input_columns.begin(), input_columns.end(), out.name) != input_columns.end()) {
      throw SchemaError("column '" + out.name + "' is both an input and an output");
    }
  }
}

CsvSchema CsvSchema::for_space(const DesignSpace& space, std::vector<OutputColumn> outputs) {
  CsvSchema schema;
  for (const auto& v : space.variables()) schema.input_columns.push_back(v.name);
  schema.output_columns = std::move(outputs);
  return schema;
}

std::size_t CsvTable::column(std::string_view name) const {
  return static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
}

CsvTable parse_csv_table(std::string_view text, char delimiter) {
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  CsvTable table;
  bool have_header = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;
    auto cells = split_line(line, delimiter);
    if (!have_header) {
      table.header = std::move(cells);
      have_header = true;
    } else {
      if (cells.size() != table.header.size()) {
        throw ParseError("row " + std::to_string(table.rows.size() + 1) + ": expected " +
                         std::to_string(table.header.size()) + " cells, found " + std::to_string(cells.size()));
      }
      table.rows.push_back(std::move(cells));
    }
  }
  if (!have_header) throw SchemaError("CSV has no header row");
  return table;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot read file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CsvTable read_csv_table(const std::string& path, char delimiter) {
  return parse_csv_table(read_file(path), delimiter);
}

bool parse_number(std::string_view cell, double& out) {
  cell = trim(cell);
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc() && ptr == cell.data() + cell.size() && std::isfinite(out);
}

std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

Dataset parse_dataset(std::string_view text, const CsvSchema& schema, const DesignSpace& space,
                      const CsvOptions& options) {
  schema.validate();
  if (schema.input_columns.size() != space.dim()) {
    throw SchemaError("schema has " + std::to_string(schema.input_columns.size()) +
                      " input columns but the space has " + std::to_string(space.dim()) + " variables");
  }
  const CsvTable table = parse_csv_table(text, schema.delimiter);
  auto locate = [&](const std::string& name) {
    const std::size_t c = table.column(name);
    if (c == table.header.size()) throw SchemaError("missing column '" + name + "'");
    return c;
  };
  std::vector<std::size_t> in_cols, out_cols;
  for (const auto& name : schema.input_columns) in_cols.push_back(locate(name));
  for (const auto& col : schema.output_columns) out_cols.push_back(locate(col.name));

  const auto n = static_cast<Eigen::Index>(table.rows.size());
  Eigen::MatrixXd points(n, static_cast<Eigen::Index>(in_cols.size()));
  Eigen::MatrixXd outputs(n, static_cast<Eigen::Index>(out_cols.size()));
  auto cell_value = [&](Eigen::Index r, std::size_t c) {
    const auto& row = table.rows[static_cast<std::size_t>(r)];
    double v = 0.0;
    if (c >= row.size() || !parse_number(row[c], v)) {
      throw ParseError("row " + std::to_string(r + 1) + ", column '" + table.header[c] +
                       "': not a number: '" + (c < row.size() ? row[c] : std::string()) + "'");
    }
    return v;
  };
  for (Eigen::Index r = 0; r < n; ++r) {
    for (std::size_t k = 0; k < in_cols.size(); ++k) points(r, static_cast<Eigen::Index>(k)) = cell_value(r, in_cols[k]);
    for (std::size_t k = 0; k < out_cols.size(); ++k) outputs(r, static_cast<Eigen::Index>(k)) = cell_value(r, out_cols[k]);
  }

  const auto bad = out_of_bounds_rows(space, points);
  if (!bad.empty()) {
    std::string rows;
    for (std::size_t i : bad) rows += (rows.empty() ? "" : ", ") + std::to_string(i + 1);
    if (!options.clamp_out_of_bounds) {
      std::string detail;
      for (std::size_t i : bad) {
        std::string cells;
        for (std::size_t k = 0; k < space.dim(); ++k) {
          const Variable& v = space[k];
          const double x = points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
          if (x >= v.lower && x <= v.upper) continue;
          cells += (cells.empty() ? "" : ", ") + v.name + "=" + format_number(x) + " not in [" +
                   format_number(v.lower) + ", " + format_number(v.upper) + "]";
        }
        detail += (detail.empty() ? "" : "; ") + ("row " + std::to_string(i + 1) + ": ") + cells;
      }
      throw ValidationError("out of bounds: " + detail);
    }
    for (std::size_t i : bad) {
      const auto r = static_cast<Eigen::Index>(i);
      points.row(r) = space.clamp(points.row(r).transpose()).transpose();
    }
    if (options.warn) options.warn("clamped out-of-bounds rows into the design space: " + rows);
  }
  return Dataset(std::move(points), std::move(outputs), schema.output_columns);
}

Dataset load_csv(const std::string& path, const CsvSchema& schema, const DesignSpace& space,
                 const CsvOptions& options) {
  return parse_dataset(read_file(path), schema, space, options);
}

std::string to_csv(const Eigen::Ref<const Eigen::MatrixXd>& rows, const std::vector<std::string>& header,
                   char delimiter) {
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c) out.push_back(delimiter);
    out += header[c];
  }
  out.push_back('\n');
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    for (Eigen::Index c = 0; c < rows.cols(); ++c) {
      if (c) out.push_back(delimiter);
      out += format_number(rows(r, c));
    }
    out.push_back('\n');
  }
  return out;
}

std::string to_csv(const Dataset& data, const CsvSchema& schema) {
  std::vector<std::string> header = schema.input_columns;
  for (const auto& c : schema.output_columns) header.push_back(c.name);
  Eigen::MatrixXd all(static_cast<Eigen::Index>(data.size()),
                      static_cast<Eigen::Index>(data.dim() + data.num_outputs()));
  all << data.points(), data.outputs();
  return to_csv(all, header, schema.delimiter);
}

std::vector<std::pair<std::size_t, std::size_t>> parse_preference_pairs(std::string_view text,
                                                                        char delimiter) {
  const CsvTable table = parse_csv_table(text, delimiter);
  if (table.header.size() < 2) throw SchemaError("preference file needs winner and loser columns");
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    std::size_t idx[2];
    for (std::size_t c = 0; c < 2; ++c) {
      const std::string cell = c < table.rows[r].size() ? table.rows[r][c] : std::string();
      const std::string_view t = trim(cell);
      const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), idx[c]);
      if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
        throw ParseError("row " + std::to_string(r + 1) + ", column '" + table.header[c] +
                         "': not a row index: '" + cell + "'");
      }
    }
    pairs.emplace_back(idx[0], idx[1]);
  }
  return pairs;
}

std::vector<bool> parse_validity(const CsvTable& table, std::string_view column) {
  const std::size_t c = table.column(column);
  if (c == table.header.size()) throw SchemaError("missing column '" + std::string(column) + "'");
  std::vector<bool> flags;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::string cell = c < table.rows[r].size() ? table.rows[r][c] : std::string();
    const auto t = trim(cell);
    if (t == "1") {
      flags.push_back(true);
    } else if (t == "0") {
      flags.push_back(false);
    } else {
      throw ParseError("row " + std::to_string(r + 1) + ", column '" + std::string(column) +
                       "': expected 0 or 1, got '" + cell + "'");
    }
  }
  return flags;
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target = fs::absolute(path);
  fs::path tmp = target;
  static std::atomic<unsigned long> counter{0};
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ArgumentError("cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw ArgumentError("failed writing '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw ArgumentError("cannot replace '" + target.string() + "'");
  }
}

}  // namespace bayesdoe

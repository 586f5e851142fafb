#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "bayesdoe/dataset.hpp"
#include "bayesdoe/design_space.hpp"

namespace bayesdoe {

/// Column layout of a campaign CSV. Extra columns in the file are ignored.
struct CsvSchema {
  std::vector<std::string> input_columns;
  std::vector<OutputColumn> output_columns;
  char delimiter = ',';

  /// Throws SchemaError on empty or overlapping column sets.
  void validate() const;
  /// Inputs named after the space variables, in space order.
  static CsvSchema for_space(const DesignSpace& space, std::vector<OutputColumn> outputs);
};

struct CsvOptions {
  /// Clamp out-of-bounds inputs into the space instead of rejecting them.
  bool clamp_out_of_bounds = false;
  std::function<void(const std::string&)> warn;
};

/// Header row plus string cells, CRLF or LF line endings, optional UTF-8 BOM.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name, or header.size() if absent.
  std::size_t column(std::string_view name) const;
};

CsvTable parse_csv_table(std::string_view text, char delimiter = ',');
CsvTable read_csv_table(const std::string& path, char delimiter = ',');

/// Locale-independent decimal parse of a whole cell; nullopt-like failure is
/// reported by returning false.
bool parse_number(std::string_view cell, double& out);
/// Shortest text that parses back to exactly `value`.
std::string format_number(double value);

Dataset parse_dataset(std::string_view text, const CsvSchema& schema, const DesignSpace& space,
                      const CsvOptions& options = {});
Dataset load_csv(const std::string& path, const CsvSchema& schema, const DesignSpace& space,
                 const CsvOptions& options = {});

/// Inputs then outputs, named per `schema`, one row per observation.
std::string to_csv(const Dataset& data, const CsvSchema& schema);
/// Plain numeric matrix with a header.
std::string to_csv(const Eigen::Ref<const Eigen::MatrixXd>& rows, const std::vector<std::string>& header,
                   char delimiter = ',');

/// Winner/loser pairs from a two-column file of row indices.
std::vector<std::pair<std::size_t, std::size_t>> parse_preference_pairs(std::string_view text,
                                                                        char delimiter = ',');
/// 0/1 validity flags from the named column (default "Class").
std::vector<bool> parse_validity(const CsvTable& table, std::string_view column = "Class");

/// Writes `contents` to `path` through a temporary file and an atomic rename.
void write_file_atomic(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace bayesdoe

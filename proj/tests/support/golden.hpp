#pragma once

#include <string>

#include "bayesdoe/csv.hpp"
#include "bayesdoe/persistence.hpp"
#include "paths.hpp"

namespace testing_support {

struct Golden {
  bayesdoe::SpaceDocument doc;
  bayesdoe::Dataset data;
};

/// Loads data/<name>.csv against data/<name>.space.json.
inline Golden load_golden(const std::string& name) {
  Golden g;
  g.doc = bayesdoe::parse_space_document(bayesdoe::read_file(data_file(name + ".space.json")));
  g.data = bayesdoe::load_csv(data_file(name + ".csv"), bayesdoe::CsvSchema::for_space(g.doc.space, g.doc.outputs),
                              g.doc.space);
  return g;
}

}  // namespace testing_support

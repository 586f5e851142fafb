#pragma once

#include <string>

namespace testing_support {

inline std::string data_file(const std::string& name) { return std::string(BAYESDOE_DATA_DIR) + "/" + name; }

}  // namespace testing_support

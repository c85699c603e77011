#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "cekab/dllite.hpp"

namespace cekab::testing {

inline std::string data_path(const std::string& rel) { return std::string(CEKAB_DATA_DIR) + "/" + rel; }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline bool closure_equal(const Tbox& t, const State& a, const State& b) {
  return abox_closure(t, a) == abox_closure(t, b);
}

inline State facts(const std::string& text) { return parse_facts(text); }

}  // namespace cekab::testing

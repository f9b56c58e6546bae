#pragma once

#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "nlbash/spec_db.hpp"

namespace testing {

// Reads a two-column TSV fixture, skipping "#" comments.
inline std::vector<std::pair<std::string, std::string>> read_tsv_pairs(const std::string& name) {
  std::ifstream in(nlbash::data_dir() / "fixtures" / name);
  std::vector<std::pair<std::string, std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) continue;
    rows.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return rows;
}

inline std::vector<std::string> read_lines(const std::string& name) {
  std::ifstream in(nlbash::data_dir() / "fixtures" / name);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') lines.push_back(line);
  }
  return lines;
}

}  // namespace testing

#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#ifndef SWING_CORPUS_DIR
#error "SWING_CORPUS_DIR must be defined"
#endif

namespace swing::test {

inline std::string corpus_path(const std::string &name) {
  return std::string(SWING_CORPUS_DIR) + "/" + name;
}

inline std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string read_corpus(const std::string &name) { return read_file(corpus_path(name)); }

inline std::vector<std::string> corpus_files() {
  std::vector<std::string> out;
  for (const auto &e : std::filesystem::directory_iterator(SWING_CORPUS_DIR))
    if (e.path().extension() == ".wisl")
      out.push_back(e.path().filename().string());
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace swing::test

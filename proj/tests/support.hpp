#pragma once

#include <fstream>
#include <sstream>
#include <string>

inline std::string corpus_file(const std::string& name) {
  std::ifstream in(std::string(PGV_CORPUS) + "/" + name);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

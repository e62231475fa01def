#pragma once

#include "accelbmc/frontend.hpp"

#include <fstream>
#include <sstream>

namespace accelbmc::testing {

inline Cfa cfa_of(const std::string& text, std::optional<unsigned> width = std::nullopt)
{
  return lower(parse(SourceProgram{text, "<test>"}, width));
}

inline std::string repo_path(const std::string& rel)
{
  return std::string(ACCELBMC_SOURCE_DIR) + "/" + rel;
}

inline std::string slurp(const std::string& path)
{
  std::ifstream f(path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

inline std::vector<std::string> var_names(const Cfa& cfa)
{
  std::vector<std::string> out;
  for (const auto& d : cfa.vars()) {
    out.push_back(d.name);
  }
  return out;
}

} // namespace accelbmc::testing

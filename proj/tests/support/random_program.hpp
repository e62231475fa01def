#pragma once

// Seeded generators of small `.imp` programs for property tests.

#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace accelbmc::testing {

struct ProgramShape {
  unsigned width = 4;
  int num_vars = 3;
  int loops = 1;          // sequential loops; 0 gives a straight-line program
  int max_body = 3;       // statements per loop body
  bool branches = true;   // allow if (*) inside loop bodies
  bool asserts = true;
};

class ProgramGenerator {
public:
  explicit ProgramGenerator(std::uint64_t seed, ProgramShape shape = {})
      : rng_(seed), shape_(shape)
  {
    const char* names[] = {"a", "b", "c", "d"};
    for (int i = 0; i < shape_.num_vars && i < 4; ++i) {
      vars_.push_back(names[i]);
    }
  }

  std::string generate()
  {
    std::ostringstream os;
    os << "unsigned<" << shape_.width << "> ";
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      os << (i ? ", " : "") << vars_[i];
      if (coin(2)) {
        os << " := " << konst();
      }
    }
    os << ";\n";
    for (int i = pick(0, 1); i > 0; --i) {
      os << assignment() << "\n";
    }
    for (int l = 0; l < shape_.loops; ++l) {
      os << "while (" << loop_guard() << ") {\n";
      int n = pick(1, shape_.max_body);
      for (int k = 0; k < n; ++k) {
        if (shape_.branches && coin(5)) {
          os << "  if (*) {\n    " << update() << "\n  } else {\n    " << update() << "\n  }\n";
        } else {
          os << "  " << update() << "\n";
        }
      }
      os << "}\n";
    }
    if (shape_.loops == 0) {
      for (int i = pick(1, 4); i > 0; --i) {
        os << assignment() << "\n";
      }
    }
    if (shape_.asserts) {
      os << "assert(" << comparison() << ");\n";
    }
    return os.str();
  }

private:
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(int n) { return pick(0, n - 1) == 0; }
  const std::string& some_var() { return vars_[pick(0, static_cast<int>(vars_.size()) - 1)]; }
  unsigned konst() { return static_cast<unsigned>(pick(0, (1 << shape_.width) - 1)); }
  unsigned small() { return static_cast<unsigned>(pick(1, 3)); }

  std::string assignment()
  {
    const std::string& x = some_var();
    switch (pick(0, 4)) {
    case 0: return x + " := " + std::to_string(konst()) + ";";
    case 1: return x + " := " + some_var() + " + " + std::to_string(konst()) + ";";
    case 2: return x + " := *;";
    case 3: return x + " := " + some_var() + " - " + some_var() + ";";
    default: return x + " := " + std::to_string(small()) + " * " + some_var() + ";";
    }
  }

  // Mostly accelerable updates, with a few that are not.
  std::string update()
  {
    const std::string& x = some_var();
    switch (pick(0, 7)) {
    case 0:
    case 1:
    case 2: return x + " := " + x + " + " + std::to_string(small()) + ";";
    case 3:
    case 4: return x + " := " + x + " - " + std::to_string(small()) + ";";
    case 5: return x + " := " + std::to_string(konst()) + ";";
    case 6: return x + " := " + some_var() + ";";
    default: return "assume(" + comparison() + ");";
    }
  }

  std::string loop_guard()
  {
    const std::string& x = some_var();
    switch (pick(0, 5)) {
    case 0: return x + " < " + std::to_string(konst());
    case 1: return x + " > " + std::to_string(konst());
    case 2: return x + " <= " + some_var();
    case 3: return x + " >= " + std::to_string(konst());
    case 4: return x + " != " + std::to_string(konst());
    default: return "*";
    }
  }

  std::string comparison()
  {
    static const char* ops[] = {"=", "!=", "<", "<=", ">", ">="};
    std::string rhs = coin(2) ? some_var() : std::to_string(konst());
    return some_var() + " " + ops[pick(0, 5)] + " " + rhs;
  }

  std::mt19937_64 rng_;
  ProgramShape shape_;
  std::vector<std::string> vars_;
};

} // namespace accelbmc::testing

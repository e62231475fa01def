#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace accelbmc {

/// DIMACS literal: +v or -v for variable v >= 1.
using Lit = int;

struct Cnf {
  int num_vars = 0;
  std::vector<std::vector<Lit>> clauses;
  /// Free-form `c` lines emitted before the header, e.g. symbol-to-bit maps.
  std::vector<std::string> comments;

  int new_var() { return ++num_vars; }
  void add(std::vector<Lit> clause) { clauses.push_back(std::move(clause)); }
};

std::string to_dimacs(const Cnf& cnf);
/// Throws std::runtime_error on malformed input.
Cnf parse_dimacs(const std::string& text);

enum class SatResult { Sat, Unsat, Unknown };
const char* to_string(SatResult r);

struct SolverOptions {
  std::uint64_t seed = 0;
  /// Give up with Unknown after this many conflicts (negative: no limit).
  std::int64_t conflict_budget = -1;
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct SolverStats {
  std::uint64_t decisions = 0;
  std::uint64_t propagations = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t restarts = 0;
  std::uint64_t learned = 0;
  std::uint64_t deleted = 0;
};

/// Conflict-driven clause-learning solver: two watched literals, first-UIP
/// learning, VSIDS with phase saving, geometric restarts and activity-based
/// learned-clause deletion. Incremental under assumptions.
class Solver {
public:
  explicit Solver(SolverOptions opts = {});
  ~Solver();
  Solver(const Solver&) = delete;
  Solver& operator=(const Solver&) = delete;

  int new_var();
  int num_vars() const;
  /// Variables are created on demand.
  void add_clause(const std::vector<Lit>& clause);
  void add_cnf(const Cnf& cnf);

  SatResult solve(const std::vector<Lit>& assumptions = {});

  /// Valid after Sat.
  bool value(int var) const;
  bool value_lit(Lit l) const { return l > 0 ? value(l) : !value(-l); }
  /// model()[v] for v in 1..num_vars; index 0 unused.
  std::vector<bool> model() const;

  const SolverStats& stats() const;

private:
  struct Impl;
  Impl* impl_;
};

/// Runs a DIMACS solver binary: `cmd` is executed through the shell with the
/// CNF file path appended. Accepts `s SATISFIABLE` / `s UNSATISFIABLE` and
/// `v` model lines; exit codes 10/20 are honoured when no `s` line appears.
SatResult solve_external(const Cnf& cnf, const std::string& cmd, std::vector<bool>* model);

} // namespace accelbmc

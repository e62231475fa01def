#pragma once

#include "accelbmc/bmc.hpp"

#include <json.hpp>

#include <optional>

namespace accelbmc {

enum class Mode { Plain, Accel, AccelTa, Oracle };
const char* to_string(Mode m);
std::optional<Mode> parse_mode(const std::string& s);

struct RunConfig {
  Mode mode = Mode::AccelTa;
  std::optional<int> unwind;  // default: 100 plain, 3 otherwise
  std::optional<int> kmax;    // when set, bounds 1..kmax are tried in turn
  std::optional<unsigned> width;
  int max_loop_paths = 8;
  double timeout = 30;  // seconds; 0 disables
  std::uint64_t seed = 0;
  std::string dump_cfa;
  std::string dump_ta;
  std::string dimacs;
  std::string external_solver;

  int effective_unwind() const { return unwind.value_or(mode == Mode::Plain ? 100 : 3); }
};

struct OracleSummary {
  std::size_t reachable = 0;
  int diameter_edges = 0;
  int diameter_weighted = 0;
  bool error_reachable = false;
};

struct Report {
  std::string file;
  Mode mode = Mode::AccelTa;
  std::optional<VerdictKind> verdict;  // empty on error
  std::string error;
  int bound = 0;
  double accel_time = 0;
  double check_time = 0;
  std::size_t edges_original = 0;
  std::size_t edges_accelerated = 0;
  std::size_t edges_instrumented = 0;
  int accelerators = 0;
  int dfa_states = 0;
  std::size_t cnf_vars = 0;
  std::size_t cnf_clauses = 0;
  std::vector<std::string> notes;  // acceleration decisions
  std::vector<std::string> warnings;
  std::vector<std::string> trace;  // human-readable counterexample, one step per line
  nlohmann::json counterexample;   // null unless UNSAFE
  std::vector<std::string> live_back_edges;
  std::optional<OracleSummary> oracle;

  /// (|P̃ edges| - |P̂ edges|) / |P̂ edges| in percent; 0 without instrumentation.
  double size_increase() const;
};

/// Exit status: 0 SAFE, 1 UNSAFE, 2 UNKNOWN, 3 error, 4 timeout.
int exit_code(const Report& r);

/// Runs one configuration on one file. Parse and usage errors are reported
/// in `error`, never thrown.
Report run(const RunConfig& cfg, const std::string& path);

nlohmann::json to_json(const Report& r);
std::string to_text(const Report& r);

enum class Expectation { Safe, Unsafe };
/// Reads a `// EXPECT: safe|unsafe` header line.
std::optional<Expectation> read_expectation(const std::string& path);

struct BenchEntry {
  std::string category;  // directory relative to the bench root
  Expectation expected = Expectation::Safe;
  Report report;

  bool correct() const;
  bool mismatch() const;  // decisive verdict contradicting the expectation, or an error
};

struct BenchSummary {
  std::vector<BenchEntry> entries;
  std::vector<std::string> skipped;  // files without an EXPECT header

  bool ok() const;
};

/// Runs every `.imp` file below `dir` (recursively) with up to `jobs`
/// workers. Entries come back in path order.
BenchSummary bench(const std::string& dir, const RunConfig& cfg, int jobs = 1);
std::string format_table(const BenchSummary& s);

} // namespace accelbmc

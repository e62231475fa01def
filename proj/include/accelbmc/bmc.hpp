#pragma once

#include "accelbmc/cfa.hpp"
#include "accelbmc/sat.hpp"

#include <map>

namespace accelbmc {

/// Acyclic unwinding. A node is a CFA vertex plus, for every loop head, the
/// number of back edges into that head taken since the loop was entered.
/// Back edges that would exceed the bound become markers instead.
struct UnwoundDag {
  struct Node {
    int vertex = 0;
    std::vector<int> counts;  // per loop head (LoopInfo::heads order)
  };
  struct Arc {
    int from = 0;
    int to = 0;  // -1 for unwinding markers
    int edge = 0;
  };

  int bound = 0;
  std::vector<Node> nodes;  // topologically ordered, nodes[0] is initial
  std::vector<Arc> arcs;
  std::vector<Arc> markers;
  std::vector<int> heads;

  std::vector<int> error_nodes(const Cfa& cfa) const;
};

UnwoundDag unwind(const Cfa& cfa, int k, std::size_t max_nodes = 2000000);

/// Path encoding of an unwinding: one "on path" literal per node, one
/// "taken" literal per arc (at most one taken arc leaves a node), node
/// states as bit-vector terms with fresh symbols at joins and havocs.
struct Encoding {
  Cnf cnf;
  Lit error = 0;      // some error node is on the path
  Lit violation = 0;  // some unwinding marker is enabled on the path
  std::vector<Lit> on;
  std::vector<Lit> taken;            // per arc
  std::vector<Lit> marker_enabled;   // per marker
  std::map<std::string, std::vector<Lit>> symbols;
  std::vector<std::vector<std::string>> havoc_symbol;  // per arc: symbol or empty
};

Encoding encode(const Cfa& cfa, const UnwoundDag& dag);

struct Counterexample {
  std::vector<int> edges;
  Env initial;                 // values of every variable at v0
  std::vector<Wide> havocs;    // values chosen by havocs, in path order
  std::vector<Env> states;     // state after each edge (filled by replay)
};

enum class VerdictKind { Safe, Unsafe, Unknown, Timeout };
const char* to_string(VerdictKind k);

struct Verdict {
  VerdictKind kind = VerdictKind::Unknown;
  int bound = 0;
  std::optional<Counterexample> cex;
  std::vector<int> live_back_edges;  // Unknown: back edges still enabled at the bound
  std::size_t cnf_vars = 0;
  std::size_t cnf_clauses = 0;
};

struct BmcOptions {
  SolverOptions solver;
  std::int64_t conflict_budget = 10000000;
  std::string external_solver;  // empty: embedded solver
  std::string dimacs_path;      // when set, the encoding is written here
  bool shallowest_cex = true;   // re-check smaller bounds once a bug is found
};

Verdict check_safety(const Cfa& cfa, int k, const BmcOptions& opts = {});

struct ProofBound {
  bool found = false;
  int k = 0;
  Verdict verdict;
};

/// Smallest k in 1..kmax with a decisive verdict.
ProofBound find_proof_bound(const Cfa& cfa, int kmax, const BmcOptions& opts = {});

class ReplayError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Runs the counterexample on the concrete interpreter, filling
/// `cex.states`. True iff it ends in an error vertex; throws ReplayError
/// when the trace does not follow the CFA.
bool replay(const Cfa& cfa, Counterexample& cex);

/// Initial environment: nondet variables from `values` (default 0), all
/// others 0.
Env initial_env(const Cfa& cfa, const Env& values);

} // namespace accelbmc

#pragma once

#include "accelbmc/accel.hpp"

#include <cstddef>

namespace accelbmc {

/// Symbols of an accelerated CFA: accelerator `a` is symbol `a`; edge `e`
/// outside accelerator paths is symbol `num_accels + e`.
struct Alphabet {
  int num_accels = 0;
  int num_edges = 0;

  static Alphabet of(const AcceleratedCfa& acc);
  int size() const { return num_accels + num_edges; }
  int of_accel(int a) const { return a; }
  int of_edge(int e) const { return num_accels + e; }
  bool is_accel(int sym) const { return sym < num_accels; }
  std::string name(const AcceleratedCfa& acc, int sym) const;
};

struct Nfa {
  int num_symbols = 0;
  int start = 0;
  std::vector<bool> accepting;
  std::vector<std::vector<std::pair<int, int>>> trans;  // per state: (symbol, target)
  std::vector<std::vector<int>> eps;

  int add_state(bool accept = false);
  int num_states() const { return static_cast<int>(accepting.size()); }
  bool accepts(const std::vector<int>& word) const;
};

/// Σ* (p_1 | ... | p_n) Σ*: every word containing one of the patterns.
Nfa substring_nfa(int num_symbols, const std::vector<std::vector<int>>& patterns);

/// Patterns (π | û·û) for every accelerator carrying the π ⪯ û certificate.
std::vector<std::vector<int>> restriction_patterns(const AcceleratedCfa& acc);
Nfa build_restriction_nfa(const AcceleratedCfa& acc);

struct Dfa {
  int num_symbols = 0;
  int start = 0;
  std::vector<std::vector<int>> delta;  // per state, per symbol
  std::vector<bool> accepting;

  int num_states() const { return static_cast<int>(delta.size()); }
  bool accepts(const std::vector<int>& word) const;
};

class AutomatonTooLarge : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Subset construction, breadth first with symbols in ascending order.
/// Unreachable subsets never appear; when every accepting NFA state is
/// absorbing, all accepting subsets merge into one sink numbered last.
/// No minimization.
Dfa determinize(const Nfa& nfa, std::size_t max_states = std::size_t{1} << 16);

std::string dump_dot(const Dfa& dfa, const std::vector<std::string>& symbol_names,
                     const std::string& name = "ta");

struct InstrumentedCfa {
  Cfa cfa;
  std::string g;           // empty when no automaton state is needed
  unsigned g_width = 0;
  int base_vertices = 0;   // vertices shared with the accelerated CFA
  Alphabet alphabet;
  Dfa dfa;
};

/// Inlines `dfa` through a fresh variable g. Each edge becomes one guarded
/// path `[g in S]; s; g := m` per target state m (runs of consecutive source
/// states share a range guard); moves into accepting states are dropped and
/// symbols that never change g are copied as they are.
InstrumentedCfa inline_automaton(const AcceleratedCfa& acc, const Dfa& dfa);

/// Projection of a P̃ edge sequence onto the alphabet of the accelerated
/// CFA: bookkeeping edges vanish and an accelerator path counts once.
std::vector<int> project_trace(const InstrumentedCfa& inst, const std::vector<int>& edges);

} // namespace accelbmc

#include "accelbmc/trace_automata.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

namespace accelbmc {

Alphabet Alphabet::of(const AcceleratedCfa& acc)
{
  return Alphabet{static_cast<int>(acc.accels.size()), acc.base_edges};
}

std::string Alphabet::name(const AcceleratedCfa& acc, int sym) const
{
  if (is_accel(sym)) {
    return "acc" + std::to_string(sym);
  }
  return to_string(acc.cfa.edge(sym - num_accels).stmt);
}

int Nfa::add_state(bool accept)
{
  accepting.push_back(accept);
  trans.emplace_back();
  eps.emplace_back();
  return num_states() - 1;
}

namespace {

std::vector<int> eps_closure(const Nfa& nfa, std::vector<int> states)
{
  std::vector<bool> in(nfa.num_states(), false);
  std::vector<int> work = states;
  for (int s : states) {
    in[s] = true;
  }
  while (!work.empty()) {
    int s = work.back();
    work.pop_back();
    for (int t : nfa.eps[s]) {
      if (!in[t]) {
        in[t] = true;
        states.push_back(t);
        work.push_back(t);
      }
    }
  }
  std::sort(states.begin(), states.end());
  return states;
}

std::vector<int> step(const Nfa& nfa, const std::vector<int>& from, int sym)
{
  std::vector<int> to;
  for (int s : from) {
    for (const auto& [a, t] : nfa.trans[s]) {
      if (a == sym) {
        to.push_back(t);
      }
    }
  }
  std::sort(to.begin(), to.end());
  to.erase(std::unique(to.begin(), to.end()), to.end());
  return eps_closure(nfa, to);
}

} // namespace

bool Nfa::accepts(const std::vector<int>& word) const
{
  std::vector<int> cur = eps_closure(*this, {start});
  for (int sym : word) {
    cur = step(*this, cur, sym);
  }
  return std::any_of(cur.begin(), cur.end(), [&](int s) { return accepting[s]; });
}

Nfa substring_nfa(int num_symbols, const std::vector<std::vector<int>>& patterns)
{
  Nfa nfa;
  nfa.num_symbols = num_symbols;
  nfa.start = nfa.add_state();
  int sink = -1;
  for (int a = 0; a < num_symbols; ++a) {
    nfa.trans[nfa.start].emplace_back(a, nfa.start);
  }
  for (const auto& p : patterns) {
    if (sink < 0) {
      sink = nfa.add_state(true);
      for (int a = 0; a < num_symbols; ++a) {
        nfa.trans[sink].emplace_back(a, sink);
      }
    }
    int cur = nfa.add_state();
    nfa.eps[nfa.start].push_back(cur);
    for (std::size_t k = 0; k < p.size(); ++k) {
      int next = k + 1 == p.size() ? sink : nfa.add_state();
      nfa.trans[cur].emplace_back(p[k], next);
      cur = next;
    }
    if (p.empty()) {
      nfa.eps[cur].push_back(sink);
    }
  }
  return nfa;
}

std::vector<std::vector<int>> restriction_patterns(const AcceleratedCfa& acc)
{
  Alphabet sigma = Alphabet::of(acc);
  std::vector<std::vector<int>> out;
  for (std::size_t a = 0; a < acc.accels.size(); ++a) {
    const Accelerator& x = acc.accels[a];
    if (!x.subsumes) {
      continue;
    }
    std::vector<int> pi;
    for (int e : x.pattern) {
      pi.push_back(sigma.of_edge(e));
    }
    out.push_back(pi);
    int u = sigma.of_accel(static_cast<int>(a));
    out.push_back({u, u});
  }
  return out;
}

Nfa build_restriction_nfa(const AcceleratedCfa& acc)
{
  return substring_nfa(Alphabet::of(acc).size(), restriction_patterns(acc));
}

bool Dfa::accepts(const std::vector<int>& word) const
{
  int s = start;
  for (int sym : word) {
    s = delta[s][sym];
  }
  return accepting[s];
}

Dfa determinize(const Nfa& nfa, std::size_t max_states)
{
  bool absorbing = true;
  for (int s = 0; s < nfa.num_states(); ++s) {
    if (!nfa.accepting[s]) {
      continue;
    }
    std::vector<bool> loops(nfa.num_symbols, false);
    for (const auto& [a, t] : nfa.trans[s]) {
      if (t == s) {
        loops[a] = true;
      }
    }
    if (std::find(loops.begin(), loops.end(), false) != loops.end()) {
      absorbing = false;
    }
  }
  auto is_accepting = [&](const std::vector<int>& set) {
    return std::any_of(set.begin(), set.end(), [&](int s) { return nfa.accepting[s]; });
  };

  constexpr int kSink = -1;
  std::map<std::vector<int>, int> index;
  std::vector<std::vector<int>> subsets;
  std::vector<std::vector<int>> delta;
  bool sink_used = false;
  auto intern = [&](const std::vector<int>& set) {
    if (absorbing && is_accepting(set)) {
      sink_used = true;
      return kSink;
    }
    auto it = index.find(set);
    if (it != index.end()) {
      return it->second;
    }
    if (subsets.size() + 1 > max_states) {
      throw AutomatonTooLarge("trace automaton exceeds " + std::to_string(max_states) +
                              " states");
    }
    int id = static_cast<int>(subsets.size());
    index.emplace(set, id);
    subsets.push_back(set);
    delta.emplace_back();
    return id;
  };

  Dfa dfa;
  dfa.num_symbols = nfa.num_symbols;
  dfa.start = intern(eps_closure(nfa, {nfa.start}));
  for (std::size_t cur = 0; cur < subsets.size(); ++cur) {
    std::vector<int> row;
    for (int a = 0; a < nfa.num_symbols; ++a) {
      row.push_back(intern(step(nfa, subsets[cur], a)));
    }
    delta[cur] = std::move(row);
  }
  const int n = static_cast<int>(subsets.size());
  for (int s = 0; s < n; ++s) {
    dfa.accepting.push_back(is_accepting(subsets[s]));
  }
  if (sink_used || dfa.start == kSink) {
    for (auto& row : delta) {
      for (int& t : row) {
        if (t == kSink) {
          t = n;
        }
      }
    }
    delta.emplace_back(nfa.num_symbols, n);
    dfa.accepting.push_back(true);
    if (dfa.start == kSink) {
      dfa.start = n;
    }
  }
  dfa.delta = std::move(delta);
  return dfa;
}

std::string dump_dot(const Dfa& dfa, const std::vector<std::string>& symbol_names,
                     const std::string& name)
{
  auto escape = [](const std::string& s) {
    std::string out;
    for (char c : s) {
      if (c == '"' || c == '\\') {
        out += '\\';
      }
      out += c;
    }
    return out;
  };
  std::ostringstream os;
  os << "digraph " << name << " {\n";
  os << "  node [shape=circle];\n";
  os << "  start [shape=point];\n";
  for (int s = 0; s < dfa.num_states(); ++s) {
    os << "  q" << s << " [label=\"" << (dfa.accepting[s] ? std::string() : std::to_string(s))
       << "\"";
    if (dfa.accepting[s]) {
      os << ", shape=doublecircle";
    }
    os << "];\n";
  }
  os << "  start -> q" << dfa.start << ";\n";
  for (int s = 0; s < dfa.num_states(); ++s) {
    if (dfa.accepting[s]) {
      continue;
    }
    std::map<int, std::vector<int>> by_target;
    for (int a = 0; a < dfa.num_symbols; ++a) {
      by_target[dfa.delta[s][a]].push_back(a);
    }
    for (const auto& [t, syms] : by_target) {
      std::string label;
      for (int a : syms) {
        label += (label.empty() ? "" : ", ") + symbol_names.at(a);
      }
      os << "  q" << s << " -> q" << t << " [label=\"" << escape(label) << "\"];\n";
    }
  }
  os << "}\n";
  return os.str();
}

namespace {

// Vertices that carry automaton state: everything except accelerator
// interiors.
bool carries_state(const AcceleratedCfa& acc, int v) { return v < acc.base_vertices; }

} // namespace

InstrumentedCfa inline_automaton(const AcceleratedCfa& acc, const Dfa& dfa)
{
  const Cfa& src = acc.cfa;
  Alphabet sigma = Alphabet::of(acc);
  if (dfa.num_symbols != sigma.size()) {
    throw std::invalid_argument("automaton alphabet does not match the CFA");
  }
  InstrumentedCfa out;
  out.alphabet = sigma;
  out.dfa = dfa;
  out.base_vertices = acc.base_vertices;

  int nonaccepting = 0;
  for (int s = 0; s < dfa.num_states(); ++s) {
    if (!dfa.accepting[s]) {
      nonaccepting = std::max(nonaccepting, s + 1);
    }
  }
  unsigned gw = 1;
  while ((Wide{1} << gw) < static_cast<Wide>(dfa.num_states())) {
    ++gw;
  }
  out.g_width = gw;

  Cfa& p = out.cfa;
  for (const auto& d : src.vars()) {
    p.add_var(d);
  }
  for (int v = 0; v < acc.base_vertices; ++v) {
    p.add_vertex();
    if (src.is_error(v)) {
      p.mark_error(v);
    }
  }
  p.set_initial(src.initial());

  // Automaton states possible at each vertex, ignoring data.
  std::vector<std::vector<bool>> possible(acc.base_vertices,
                                          std::vector<bool>(dfa.num_states(), false));
  {
    std::vector<std::vector<std::pair<int, int>>> moves(acc.base_vertices);  // (symbol, dst)
    for (int e = 0; e < acc.base_edges; ++e) {
      const Edge& ed = src.edge(e);
      moves[ed.src].emplace_back(sigma.of_edge(e), ed.dst);
    }
    for (std::size_t a = 0; a < acc.accels.size(); ++a) {
      int h = acc.accels[a].head;
      moves[h].emplace_back(sigma.of_accel(static_cast<int>(a)), h);
    }
    std::deque<std::pair<int, int>> queue;
    if (!dfa.accepting[dfa.start]) {
      possible[src.initial()][dfa.start] = true;
      queue.emplace_back(src.initial(), dfa.start);
    }
    while (!queue.empty()) {
      auto [v, n] = queue.front();
      queue.pop_front();
      for (const auto& [sym, w] : moves[v]) {
        int m = dfa.delta[n][sym];
        if (!dfa.accepting[m] && !possible[w][m]) {
          possible[w][m] = true;
          queue.emplace_back(w, m);
        }
      }
    }
  }

  // g is only needed when some possible state moves.
  auto moves_state = [&](int from, int sym) {
    for (int n = 0; n < dfa.num_states(); ++n) {
      if (possible[from][n] && dfa.delta[n][sym] != n) {
        return true;
      }
    }
    return false;
  };
  bool needs_g = false;
  for (int e = 0; e < acc.base_edges; ++e) {
    const Edge& ed = src.edge(e);
    needs_g = needs_g || (carries_state(acc, ed.src) && moves_state(ed.src, sigma.of_edge(e)));
  }
  for (std::size_t a = 0; a < acc.accels.size(); ++a) {
    needs_g = needs_g || moves_state(acc.accels[a].head, sigma.of_accel(static_cast<int>(a)));
  }
  if (needs_g) {
    out.g = src.fresh_var_name("g");
    p.add_var(VarDecl{out.g, gw, false});
  } else {
    out.g_width = 0;
  }
  const Expr g = var(needs_g ? out.g : std::string("g"), gw);
  auto guard_for = [&](int lo, int hi) -> BExpr {
    if (lo == hi) {
      return cmp(CmpOp::Eq, g, constant(static_cast<Wide>(lo), gw));
    }
    if (lo == 0) {
      return cmp(CmpOp::Le, g, constant(static_cast<Wide>(hi), gw));
    }
    if (hi == nonaccepting - 1) {
      return cmp(CmpOp::Ge, g, constant(static_cast<Wide>(lo), gw));
    }
    return band(cmp(CmpOp::Le, constant(static_cast<Wide>(lo), gw), g),
                cmp(CmpOp::Le, g, constant(static_cast<Wide>(hi), gw)));
  };

  // Emits guarded copies of a statement sequence for one symbol.
  auto emit = [&](int from, int to, int sym, const std::vector<Stmt>& stmts,
                  const std::vector<EdgeKind>& kinds, int accel_index) {
    std::vector<bool> states = possible[from];
    bool unchanged = true;
    for (int n = 0; n < dfa.num_states(); ++n) {
      if (states[n] && dfa.delta[n][sym] != n) {
        unchanged = false;
      }
    }
    auto add_path = [&](std::optional<BExpr> guard, std::optional<int> update) {
      std::vector<std::pair<Stmt, EdgeKind>> seq;
      if (guard) {
        seq.emplace_back(Stmt::assume(*guard), EdgeKind::Guard);
      }
      for (std::size_t k = 0; k < stmts.size(); ++k) {
        seq.emplace_back(stmts[k], kinds[k]);
      }
      if (update) {
        seq.emplace_back(Stmt::assign(g, constant(static_cast<Wide>(*update), gw)),
                         EdgeKind::Update);
      }
      int cur = from;
      for (std::size_t k = 0; k < seq.size(); ++k) {
        int next = k + 1 == seq.size() ? to : p.add_vertex();
        int id = p.add_edge(cur, seq[k].first, next, seq[k].second);
        Edge& ed = p.edge(id);
        bool bookkeeping = seq[k].second == EdgeKind::Guard || seq[k].second == EdgeKind::Update;
        ed.origin = bookkeeping ? -1 : sym;
        ed.accel = bookkeeping ? -1 : accel_index;
        cur = next;
      }
    };
    if (std::find(states.begin(), states.end(), true) == states.end()) {
      return;
    }
    if (unchanged) {
      add_path(std::nullopt, std::nullopt);
      return;
    }
    std::map<int, std::vector<int>> by_target;
    for (int n = 0; n < dfa.num_states(); ++n) {
      if (states[n] && !dfa.accepting[dfa.delta[n][sym]]) {
        by_target[dfa.delta[n][sym]].push_back(n);
      }
    }
    for (const auto& [m, sources] : by_target) {
      bool everywhere = static_cast<int>(sources.size()) == nonaccepting;
      std::size_t k = 0;
      while (k < sources.size()) {
        std::size_t j = k;
        while (j + 1 < sources.size() && sources[j + 1] == sources[j] + 1) {
          ++j;
        }
        int lo = sources[k];
        int hi = sources[j];
        std::optional<BExpr> guard;
        if (!everywhere) {
          guard = guard_for(lo, hi);
        }
        std::optional<int> update;
        if (!(lo == hi && lo == m)) {
          update = m;
        }
        add_path(guard, update);
        k = j + 1;
      }
    }
  };

  for (int e = 0; e < acc.base_edges; ++e) {
    const Edge& ed = src.edge(e);
    if (!carries_state(acc, ed.src)) {
      continue;
    }
    emit(ed.src, ed.dst, sigma.of_edge(e), {ed.stmt}, {ed.kind}, -1);
  }
  for (std::size_t a = 0; a < acc.accels.size(); ++a) {
    const Accelerator& x = acc.accels[a];
    std::vector<EdgeKind> kinds(x.stmts.size(), EdgeKind::AccelBody);
    kinds[0] = EdgeKind::AccelEntry;
    emit(x.head, x.head, sigma.of_accel(static_cast<int>(a)), x.stmts, kinds,
         static_cast<int>(a));
  }
  p.validate();
  return out;
}

std::vector<int> project_trace(const InstrumentedCfa& inst, const std::vector<int>& edges)
{
  std::vector<int> out;
  for (int e : edges) {
    const Edge& ed = inst.cfa.edge(e);
    if (ed.kind == EdgeKind::Guard || ed.kind == EdgeKind::Update ||
        ed.kind == EdgeKind::AccelBody) {
      continue;
    }
    out.push_back(ed.origin);
  }
  return out;
}

} // namespace accelbmc

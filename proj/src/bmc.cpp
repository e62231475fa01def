#include "accelbmc/bmc.hpp"

#include "accelbmc/bitblast.hpp"
#include "accelbmc/semantics.hpp"

#include <deque>
#include <fstream>

namespace accelbmc {

std::vector<int> UnwoundDag::error_nodes(const Cfa& cfa) const
{
  std::vector<int> out;
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    if (cfa.is_error(nodes[n].vertex)) {
      out.push_back(static_cast<int>(n));
    }
  }
  return out;
}

UnwoundDag unwind(const Cfa& cfa, int k, std::size_t max_nodes)
{
  if (k < 0) {
    throw std::invalid_argument("unwinding bound must be non-negative");
  }
  LoopInfo loops = analyze_loops(cfa);
  const int h = static_cast<int>(loops.heads.size());
  const auto& edges = cfa.edges();

  // Per edge: head index of a back edge, and heads whose loop it leaves or
  // enters.
  std::vector<int> back_head(edges.size(), -1);
  std::vector<std::vector<int>> resets(edges.size());
  for (const auto& e : edges) {
    for (int hi = 0; hi < h; ++hi) {
      bool in_src = loops.loop_contains(hi, e.src);
      bool in_dst = loops.loop_contains(hi, e.dst);
      if (loops.is_back_edge[e.id] && e.dst == loops.heads[hi]) {
        back_head[e.id] = hi;
      } else if (in_src != in_dst || (e.dst == loops.heads[hi])) {
        resets[e.id].push_back(hi);
      }
    }
  }

  UnwoundDag dag;
  dag.bound = k;
  dag.heads = loops.heads;
  std::map<std::pair<int, std::vector<int>>, int> index;
  std::vector<UnwoundDag::Node> nodes;
  std::vector<UnwoundDag::Arc> arcs;
  auto intern = [&](int v, const std::vector<int>& c) {
    auto key = std::make_pair(v, c);
    auto it = index.find(key);
    if (it != index.end()) {
      return it->second;
    }
    if (nodes.size() >= max_nodes) {
      throw std::runtime_error("unwinding exceeds " + std::to_string(max_nodes) + " nodes");
    }
    int id = static_cast<int>(nodes.size());
    index.emplace(key, id);
    nodes.push_back({v, c});
    return id;
  };
  auto succ = cfa.successors();
  intern(cfa.initial(), std::vector<int>(h, 0));
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    const int v = nodes[n].vertex;
    for (int eid : succ[v]) {
      const Edge& e = cfa.edge(eid);
      std::vector<int> c = nodes[n].counts;
      int bh = back_head[eid];
      if (bh >= 0) {
        if (c[bh] >= k) {
          dag.markers.push_back({static_cast<int>(n), -1, eid});
          continue;
        }
        ++c[bh];
      }
      for (int hi : resets[eid]) {
        c[hi] = 0;
      }
      int to = intern(e.dst, c);
      arcs.push_back({static_cast<int>(n), to, eid});
    }
  }

  // Topological order (Kahn); a cycle means the CFA is not reducible.
  const int n = static_cast<int>(nodes.size());
  std::vector<int> indeg(n, 0);
  std::vector<std::vector<int>> out(n);
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    ++indeg[arcs[a].to];
    out[arcs[a].from].push_back(static_cast<int>(a));
  }
  std::vector<int> order;
  std::deque<int> ready;
  for (int i = 0; i < n; ++i) {
    if (indeg[i] == 0) {
      ready.push_back(i);
    }
  }
  while (!ready.empty()) {
    int i = ready.front();
    ready.pop_front();
    order.push_back(i);
    for (int a : out[i]) {
      if (--indeg[arcs[a].to] == 0) {
        ready.push_back(arcs[a].to);
      }
    }
  }
  if (static_cast<int>(order.size()) != n || order.front() != 0) {
    throw std::runtime_error("unwinding is cyclic; the CFA is not reducible");
  }
  std::vector<int> pos(n);
  for (int i = 0; i < n; ++i) {
    pos[order[i]] = i;
    dag.nodes.push_back(nodes[order[i]]);
  }
  for (auto a : arcs) {
    a.from = pos[a.from];
    a.to = pos[a.to];
    dag.arcs.push_back(a);
  }
  for (auto& m : dag.markers) {
    m.from = pos[m.from];
  }
  return dag;
}

Encoding encode(const Cfa& cfa, const UnwoundDag& dag)
{
  Encoding enc;
  BitBlaster bb(enc.cnf);
  const auto& vars = cfa.vars();
  const int n = static_cast<int>(dag.nodes.size());
  std::vector<std::vector<int>> in(n);
  std::vector<std::vector<int>> out(n);
  std::vector<std::vector<int>> markers_of(n);
  for (std::size_t a = 0; a < dag.arcs.size(); ++a) {
    in[dag.arcs[a].to].push_back(static_cast<int>(a));
    out[dag.arcs[a].from].push_back(static_cast<int>(a));
  }
  for (std::size_t m = 0; m < dag.markers.size(); ++m) {
    markers_of[dag.markers[m].from].push_back(static_cast<int>(m));
  }

  using State = std::vector<Expr>;
  std::vector<State> state(n);
  std::vector<State> post(dag.arcs.size());
  enc.on.assign(n, 0);
  enc.taken.assign(dag.arcs.size(), 0);
  enc.marker_enabled.assign(dag.markers.size(), 0);
  enc.havoc_symbol.assign(dag.arcs.size(), {});

  auto substitution = [&](const State& s) {
    Substitution sub;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      sub.emplace(vars[i].name, s[i]);
    }
    return sub;
  };

  for (int node = 0; node < n; ++node) {
    if (node == 0) {
      enc.on[0] = bb.true_lit();
      for (const auto& d : vars) {
        state[0].push_back(d.nondet_init ? var(d.name + "@0", d.width) : constant(0, d.width));
      }
    } else if (in[node].size() == 1) {
      int a = in[node][0];
      enc.on[node] = enc.taken[a];
      state[node] = std::move(post[a]);
    } else {
      Lit on = enc.cnf.new_var();
      std::vector<Lit> any{-on};
      for (int a : in[node]) {
        any.push_back(enc.taken[a]);
        enc.cnf.add({on, -enc.taken[a]});
      }
      enc.cnf.add(any);
      enc.on[node] = on;
      for (std::size_t i = 0; i < vars.size(); ++i) {
        const Expr& first = post[in[node][0]][i];
        bool same = true;
        for (int a : in[node]) {
          if (post[a][i].get() != first.get()) {
            same = false;
          }
        }
        if (same) {
          state[node].push_back(first);
          continue;
        }
        Expr sym = var(vars[i].name + "@n" + std::to_string(node), vars[i].width);
        for (int a : in[node]) {
          Lit eq = bb.blast(cmp(CmpOp::Eq, sym, post[a][i]));
          enc.cnf.add({-enc.taken[a], eq});
        }
        state[node].push_back(sym);
      }
    }

    const Lit on = enc.on[node];
    const Substitution sub = substitution(state[node]);
    auto guard_of = [&](const Stmt& st) {
      return st.kind == StmtKind::Assume ? bb.blast(substitute(st.cond, sub)) : bb.true_lit();
    };
    std::vector<Lit> leaving;
    for (int a : out[node]) {
      const Edge& e = cfa.edge(dag.arcs[a].edge);
      const Stmt& st = e.stmt;
      Lit t = enc.cnf.new_var();
      enc.cnf.add({-t, on});
      Lit cond = guard_of(st);
      if (cond != bb.true_lit()) {
        enc.cnf.add({-t, cond});
      }
      enc.taken[a] = t;
      leaving.push_back(t);
      State next = state[node];
      if (st.kind == StmtKind::Assign || st.kind == StmtKind::Havoc) {
        int idx = cfa.var_index(st.var());
        if (st.kind == StmtKind::Assign) {
          next[idx] = substitute(st.rhs, sub);
        } else {
          std::string name = st.var() + "@h" + std::to_string(a);
          next[idx] = var(name, vars[idx].width);
          enc.havoc_symbol[a] = {name};
        }
      }
      post[a] = std::move(next);
    }
    // At most one arc leaves a node on the path.
    if (leaving.size() <= 6) {
      for (std::size_t i = 0; i < leaving.size(); ++i) {
        for (std::size_t j = i + 1; j < leaving.size(); ++j) {
          enc.cnf.add({-leaving[i], -leaving[j]});
        }
      }
    } else {
      Lit prev = 0;
      for (std::size_t i = 0; i < leaving.size(); ++i) {
        Lit s = enc.cnf.new_var();
        enc.cnf.add({-leaving[i], s});
        if (prev != 0) {
          enc.cnf.add({-prev, s});
          enc.cnf.add({-prev, -leaving[i]});
        }
        prev = s;
      }
    }
    for (int m : markers_of[node]) {
      const Edge& e = cfa.edge(dag.markers[m].edge);
      enc.marker_enabled[m] = bb.mk_and(on, guard_of(e.stmt));
    }
    state[node].shrink_to_fit();
  }

  std::vector<Lit> errs;
  for (int node : dag.error_nodes(cfa)) {
    errs.push_back(enc.on[node]);
  }
  enc.error = bb.mk_or(errs);
  enc.violation = bb.mk_or(enc.marker_enabled);
  bb.annotate();
  enc.cnf.comments.push_back("error " + std::to_string(enc.error));
  enc.cnf.comments.push_back("violation " + std::to_string(enc.violation));
  enc.symbols = bb.symbols();
  return enc;
}

const char* to_string(VerdictKind k)
{
  switch (k) {
  case VerdictKind::Safe: return "SAFE";
  case VerdictKind::Unsafe: return "UNSAFE";
  case VerdictKind::Unknown: return "UNKNOWN";
  case VerdictKind::Timeout: return "TIMEOUT";
  }
  return "?";
}

Env initial_env(const Cfa& cfa, const Env& values)
{
  Env env;
  for (const auto& d : cfa.vars()) {
    auto it = values.find(d.name);
    env[d.name] = d.nondet_init && it != values.end() ? it->second & width_mask(d.width) : 0;
  }
  return env;
}

bool replay(const Cfa& cfa, Counterexample& cex)
{
  Env env = initial_env(cfa, cex.initial);
  cex.states.clear();
  int cur = cfa.initial();
  std::size_t next_havoc = 0;
  for (int eid : cex.edges) {
    if (eid < 0 || eid >= static_cast<int>(cfa.edges().size())) {
      throw ReplayError("counterexample names unknown edge " + std::to_string(eid));
    }
    const Edge& e = cfa.edge(eid);
    if (e.src != cur) {
      throw ReplayError("counterexample leaves vertex " + std::to_string(cur) + " by edge " +
                        std::to_string(eid) + " which starts at " + std::to_string(e.src));
    }
    std::optional<Wide> h;
    if (e.stmt.kind == StmtKind::Havoc) {
      if (next_havoc >= cex.havocs.size()) {
        throw ReplayError("counterexample lacks a value for havoc of " + e.stmt.var());
      }
      h = cex.havocs[next_havoc++];
    }
    if (!exec(e.stmt, env, h)) {
      return false;
    }
    cex.states.push_back(env);
    cur = e.dst;
  }
  return cfa.is_error(cur);
}

namespace {

struct Query {
  SatResult result = SatResult::Unknown;
  std::vector<bool> model;
};

Query run_query(const Encoding& enc, Lit goal, const BmcOptions& opts)
{
  Query q;
  if (!opts.external_solver.empty()) {
    Cnf cnf = enc.cnf;
    cnf.add({goal});
    q.result = solve_external(cnf, opts.external_solver, &q.model);
    return q;
  }
  SolverOptions so = opts.solver;
  so.conflict_budget = opts.conflict_budget;
  Solver s(so);
  s.add_cnf(enc.cnf);
  q.result = s.solve({goal});
  if (q.result == SatResult::Sat) {
    q.model = s.model();
  }
  return q;
}

Counterexample extract(const Cfa& cfa, const UnwoundDag& dag, const Encoding& enc,
                       const std::vector<bool>& model)
{
  Counterexample cex;
  std::vector<std::vector<int>> out(dag.nodes.size());
  for (std::size_t a = 0; a < dag.arcs.size(); ++a) {
    out[dag.arcs[a].from].push_back(static_cast<int>(a));
  }
  for (const auto& d : cfa.vars()) {
    auto it = enc.symbols.find(d.name + "@0");
    if (d.nondet_init) {
      cex.initial[d.name] = it == enc.symbols.end() ? 0 : decode(it->second, model);
    }
  }
  int cur = 0;
  while (!cfa.is_error(dag.nodes[cur].vertex)) {
    int next = -1;
    for (int a : out[cur]) {
      if (decode(enc.taken[a], model)) {
        next = a;
        break;
      }
    }
    if (next < 0) {
      throw std::logic_error("model does not describe a path to an error vertex");
    }
    const auto& arc = dag.arcs[next];
    cex.edges.push_back(arc.edge);
    if (!enc.havoc_symbol[next].empty()) {
      auto it = enc.symbols.find(enc.havoc_symbol[next][0]);
      cex.havocs.push_back(it == enc.symbols.end() ? 0 : decode(it->second, model));
    }
    cur = arc.to;
  }
  return cex;
}

struct Attempt {
  SatResult error = SatResult::Unknown;
  SatResult violation = SatResult::Unknown;
  std::optional<Counterexample> cex;
  std::vector<int> live;
  std::size_t vars = 0;
  std::size_t clauses = 0;
};

Attempt attempt(const Cfa& cfa, int k, const BmcOptions& opts, bool check_violation)
{
  Attempt at;
  UnwoundDag dag = unwind(cfa, k);
  Encoding enc = encode(cfa, dag);
  at.vars = static_cast<std::size_t>(enc.cnf.num_vars);
  at.clauses = enc.cnf.clauses.size();
  if (!opts.dimacs_path.empty()) {
    std::ofstream f(opts.dimacs_path);
    f << to_dimacs(enc.cnf);
  }
  Query q = run_query(enc, enc.error, opts);
  at.error = q.result;
  if (q.result == SatResult::Sat) {
    Counterexample cex = extract(cfa, dag, enc, q.model);
    if (!replay(cfa, cex)) {
      throw std::logic_error("counterexample does not replay");
    }
    at.cex = std::move(cex);
    return at;
  }
  if (q.result != SatResult::Unsat || !check_violation) {
    return at;
  }
  Query v = run_query(enc, enc.violation, opts);
  at.violation = v.result;
  if (v.result == SatResult::Sat) {
    for (std::size_t m = 0; m < dag.markers.size(); ++m) {
      if (decode(enc.marker_enabled[m], v.model)) {
        at.live.push_back(dag.markers[m].edge);
      }
    }
    std::sort(at.live.begin(), at.live.end());
    at.live.erase(std::unique(at.live.begin(), at.live.end()), at.live.end());
  }
  return at;
}

} // namespace

Verdict check_safety(const Cfa& cfa, int k, const BmcOptions& opts)
{
  Verdict v;
  v.bound = k;
  Attempt at = attempt(cfa, k, opts, true);
  v.cnf_vars = at.vars;
  v.cnf_clauses = at.clauses;
  if (at.error == SatResult::Unknown) {
    v.kind = VerdictKind::Timeout;
    return v;
  }
  if (at.error == SatResult::Sat) {
    v.kind = VerdictKind::Unsafe;
    v.cex = std::move(at.cex);
    if (opts.shallowest_cex) {
      BmcOptions quiet = opts;
      quiet.dimacs_path.clear();
      for (int kk = 0; kk < k; ++kk) {
        Attempt shallow = attempt(cfa, kk, quiet, false);
        if (shallow.error == SatResult::Sat) {
          v.cex = std::move(shallow.cex);
          v.bound = kk;
          break;
        }
        if (shallow.error == SatResult::Unknown) {
          break;
        }
      }
    }
    return v;
  }
  switch (at.violation) {
  case SatResult::Sat:
    v.kind = VerdictKind::Unknown;
    v.live_back_edges = std::move(at.live);
    break;
  case SatResult::Unsat: v.kind = VerdictKind::Safe; break;
  case SatResult::Unknown: v.kind = VerdictKind::Timeout; break;
  }
  return v;
}

ProofBound find_proof_bound(const Cfa& cfa, int kmax, const BmcOptions& opts)
{
  if (kmax < 1) {
    throw std::invalid_argument("kmax must be at least 1");
  }
  ProofBound pb;
  for (int k = 1; k <= kmax; ++k) {
    Verdict v = check_safety(cfa, k, opts);
    pb.k = k;
    pb.verdict = v;
    if (v.kind == VerdictKind::Safe || v.kind == VerdictKind::Unsafe) {
      pb.found = true;
      return pb;
    }
    if (v.kind == VerdictKind::Timeout) {
      return pb;
    }
  }
  return pb;
}

} // namespace accelbmc

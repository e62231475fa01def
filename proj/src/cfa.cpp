#include "accelbmc/cfa.hpp"

#include <algorithm>
#include <stdexcept>

namespace accelbmc {

Stmt Stmt::assign(Expr target, Expr rhs)
{
  if (target.kind() != ExprKind::Var) {
    throw std::invalid_argument("assignment target must be a variable");
  }
  if (rhs.kind() == ExprKind::Nondet) {
    return havoc(std::move(target));
  }
  if (contains_nondet(rhs)) {
    throw std::invalid_argument("nondet may only appear as a whole right-hand side");
  }
  if (rhs.width() != target.width()) {
    throw std::invalid_argument("assignment width mismatch for " + target->name);
  }
  Stmt s;
  s.kind = StmtKind::Assign;
  s.target = std::move(target);
  s.rhs = std::move(rhs);
  return s;
}

Stmt Stmt::havoc(Expr target)
{
  if (target.kind() != ExprKind::Var) {
    throw std::invalid_argument("havoc target must be a variable");
  }
  Stmt s;
  s.kind = StmtKind::Havoc;
  s.target = std::move(target);
  return s;
}

Stmt Stmt::assume(BExpr cond)
{
  Stmt s;
  s.kind = StmtKind::Assume;
  s.cond = std::move(cond);
  return s;
}

Stmt Stmt::skip() { return Stmt{}; }

std::string to_string(const Stmt& s)
{
  switch (s.kind) {
  case StmtKind::Assign: return s.var() + ":=" + to_string(s.rhs);
  case StmtKind::Havoc: return s.var() + ":=*";
  case StmtKind::Assume: return "[" + to_string(s.cond) + "]";
  case StmtKind::Skip: return "skip";
  }
  return "?";
}

const char* to_string(EdgeKind k)
{
  switch (k) {
  case EdgeKind::Original: return "original";
  case EdgeKind::OverflowFork: return "fork";
  case EdgeKind::AccelEntry: return "accel-entry";
  case EdgeKind::AccelBody: return "accel";
  case EdgeKind::Guard: return "guard";
  case EdgeKind::Update: return "update";
  }
  return "?";
}

int trace_weight(EdgeKind k)
{
  return (k == EdgeKind::Original || k == EdgeKind::AccelEntry) ? 1 : 0;
}

int Cfa::add_vertex()
{
  is_error_.push_back(false);
  return num_vertices() - 1;
}

int Cfa::add_edge(int src, Stmt stmt, int dst, EdgeKind kind)
{
  if (src < 0 || src >= num_vertices() || dst < 0 || dst >= num_vertices()) {
    throw std::out_of_range("edge endpoint out of range");
  }
  Edge e;
  e.id = static_cast<int>(edges_.size());
  e.src = src;
  e.dst = dst;
  e.stmt = std::move(stmt);
  e.kind = kind;
  edges_.push_back(std::move(e));
  return edges_.back().id;
}

void Cfa::mark_error(int v) { is_error_.at(v) = true; }

void Cfa::add_var(VarDecl d)
{
  if (find_var(d.name) != nullptr) {
    throw std::invalid_argument("duplicate variable " + d.name);
  }
  vars_.push_back(std::move(d));
}

std::vector<int> Cfa::error_vertices() const
{
  std::vector<int> out;
  for (int v = 0; v < num_vertices(); ++v) {
    if (is_error_[v]) {
      out.push_back(v);
    }
  }
  return out;
}

const VarDecl* Cfa::find_var(const std::string& name) const
{
  for (const auto& d : vars_) {
    if (d.name == name) {
      return &d;
    }
  }
  return nullptr;
}

int Cfa::var_index(const std::string& name) const
{
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (vars_[i].name == name) {
      return static_cast<int>(i);
    }
  }
  return -1;
}

std::string Cfa::fresh_var_name(const std::string& base) const
{
  if (find_var(base) == nullptr) {
    return base;
  }
  for (int n = 1;; ++n) {
    std::string candidate = base + "_" + std::to_string(n);
    if (find_var(candidate) == nullptr) {
      return candidate;
    }
  }
}

std::vector<std::vector<int>> Cfa::successors() const
{
  std::vector<std::vector<int>> out(num_vertices());
  for (const auto& e : edges_) {
    out[e.src].push_back(e.id);
  }
  return out;
}

std::vector<std::vector<int>> Cfa::predecessors() const
{
  std::vector<std::vector<int>> out(num_vertices());
  for (const auto& e : edges_) {
    out[e.dst].push_back(e.id);
  }
  return out;
}

void Cfa::validate() const
{
  if (initial_ < 0 || initial_ >= num_vertices()) {
    throw std::logic_error("initial vertex out of range");
  }
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    if (e.id != static_cast<int>(i)) {
      throw std::logic_error("edge id does not match its index");
    }
    if (e.src < 0 || e.src >= num_vertices() || e.dst < 0 || e.dst >= num_vertices()) {
      throw std::logic_error("edge endpoint out of range");
    }
    if (e.stmt.kind == StmtKind::Assign || e.stmt.kind == StmtKind::Havoc) {
      const VarDecl* d = find_var(e.stmt.var());
      if (d == nullptr || d->width != e.stmt.target.width()) {
        throw std::logic_error("edge assigns undeclared variable " + e.stmt.var());
      }
    }
  }
}

int LoopInfo::head_index(int v) const
{
  auto it = std::lower_bound(heads.begin(), heads.end(), v);
  if (it == heads.end() || *it != v) {
    return -1;
  }
  return static_cast<int>(it - heads.begin());
}

LoopInfo analyze_loops(const Cfa& cfa)
{
  const int n = cfa.num_vertices();
  auto succ = cfa.successors();
  auto pred = cfa.predecessors();

  LoopInfo info;
  info.is_back_edge.assign(cfa.edges().size(), false);
  info.reachable.assign(n, false);

  // Iterative DFS; colour 1 = on stack, 2 = finished.
  std::vector<int> colour(n, 0);
  std::vector<std::pair<int, std::size_t>> stack;
  stack.emplace_back(cfa.initial(), 0);
  colour[cfa.initial()] = 1;
  info.reachable[cfa.initial()] = true;
  while (!stack.empty()) {
    auto& [v, next] = stack.back();
    if (next == succ[v].size()) {
      colour[v] = 2;
      stack.pop_back();
      continue;
    }
    const Edge& e = cfa.edge(succ[v][next++]);
    if (colour[e.dst] == 1) {
      info.is_back_edge[e.id] = true;
    } else if (colour[e.dst] == 0) {
      colour[e.dst] = 1;
      info.reachable[e.dst] = true;
      stack.emplace_back(e.dst, 0);
    }
  }

  std::vector<bool> is_head(n, false);
  for (const auto& e : cfa.edges()) {
    if (info.is_back_edge[e.id]) {
      is_head[e.dst] = true;
    }
  }
  for (int v = 0; v < n; ++v) {
    if (is_head[v]) {
      info.heads.push_back(v);
    }
  }

  for (int h : info.heads) {
    std::vector<bool> loop(n, false);
    loop[h] = true;
    std::vector<int> work;
    for (const auto& e : cfa.edges()) {
      if (info.is_back_edge[e.id] && e.dst == h && !loop[e.src]) {
        loop[e.src] = true;
        work.push_back(e.src);
      }
    }
    while (!work.empty()) {
      int v = work.back();
      work.pop_back();
      for (int eid : pred[v]) {
        int u = cfa.edge(eid).src;
        if (!loop[u] && info.reachable[u]) {
          loop[u] = true;
          work.push_back(u);
        }
      }
    }
    info.in_loop.push_back(std::move(loop));
  }
  return info;
}

} // namespace accelbmc

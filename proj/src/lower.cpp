#include "accelbmc/frontend.hpp"

#include <deque>
#include <map>
#include <sstream>

namespace accelbmc {

namespace {

class Lowerer {
public:
  explicit Lowerer(const Program& p) : prog_(p) {}

  Cfa run(std::vector<std::string>* warnings)
  {
    for (const auto& d : prog_.decls) {
      bool nondet_init = !d.init || d.init.kind() == ExprKind::Nondet;
      cfa_.add_var(VarDecl{d.name, prog_.width, nondet_init});
    }
    int cur = cfa_.add_vertex();
    cfa_.set_initial(cur);
    for (const auto& d : prog_.decls) {
      if (d.init && d.init.kind() != ExprKind::Nondet) {
        int next = cfa_.add_vertex();
        cfa_.add_edge(cur, Stmt::assign(var(d.name, prog_.width), d.init), next);
        cur = next;
      }
    }
    int exit = cfa_.add_vertex();
    lower_block(prog_.body, cur, exit);
    return cleanup(warnings);
  }

private:
  void lower_block(const Block& b, int entry, int exit)
  {
    if (b.empty()) {
      cfa_.add_edge(entry, Stmt::skip(), exit);
      return;
    }
    int cur = entry;
    for (std::size_t i = 0; i < b.size(); ++i) {
      int target = i + 1 == b.size() ? exit : cfa_.add_vertex();
      lower_stmt(b[i], cur, target);
      cur = target;
    }
  }

  // Edge `guard` from entry followed by `b`, ending in exit.
  void lower_guarded(Stmt guard, const Block& b, int entry, int exit)
  {
    if (b.empty()) {
      cfa_.add_edge(entry, std::move(guard), exit);
      return;
    }
    int mid = cfa_.add_vertex();
    cfa_.add_edge(entry, std::move(guard), mid);
    lower_block(b, mid, exit);
  }

  void lower_stmt(const AstStmt& s, int entry, int exit)
  {
    switch (s.kind) {
    case AstStmt::Kind::Assign:
      cfa_.add_edge(entry, Stmt::assign(s.target, s.rhs), exit);
      break;
    case AstStmt::Kind::Skip:
      cfa_.add_edge(entry, Stmt::skip(), exit);
      break;
    case AstStmt::Kind::Assume:
      cfa_.add_edge(entry, Stmt::assume(s.cond), exit);
      break;
    case AstStmt::Kind::Assert: {
      int err = cfa_.add_vertex();
      cfa_.mark_error(err);
      assert_lines_[err] = s.line;
      cfa_.add_edge(entry, Stmt::assume(s.cond), exit);
      cfa_.add_edge(entry, Stmt::assume(nnf(bnot(s.cond))), err);
      break;
    }
    case AstStmt::Kind::If: {
      auto [then_guard, else_guard] = branch_guards(s);
      lower_guarded(std::move(then_guard), s.body, entry, exit);
      lower_guarded(std::move(else_guard), s.orelse, entry, exit);
      break;
    }
    case AstStmt::Kind::While: {
      int head = entry;
      if (heads_.count(entry) != 0) {
        head = cfa_.add_vertex();
        cfa_.add_edge(entry, Stmt::skip(), head);
      }
      heads_.insert(head);
      auto [enter, leave] = branch_guards(s);
      // A trailing `if` would give one back edge per branch; route both
      // through a latch so every loop has a single back edge.
      int back = head;
      if (!s.body.empty() && s.body.back().kind == AstStmt::Kind::If) {
        back = cfa_.add_vertex();
      }
      bool infinite = !s.nondet_cond && s.cond.kind() == BoolKind::True;
      if (infinite) {
        lower_block(s.body, head, back);
      } else {
        lower_guarded(std::move(enter), s.body, head, back);
      }
      if (back != head) {
        cfa_.add_edge(back, Stmt::skip(), head);
      }
      if (!infinite) {
        cfa_.add_edge(head, std::move(leave), exit);
      }
      break;
    }
    }
  }

  std::pair<Stmt, Stmt> branch_guards(const AstStmt& s)
  {
    if (s.nondet_cond) {
      return {Stmt::skip(), Stmt::skip()};
    }
    return {Stmt::assume(s.cond), Stmt::assume(nnf(bnot(s.cond)))};
  }

  // Drops vertices unreachable from the initial vertex and renumbers the
  // rest in breadth-first order (successor edges in creation order).
  Cfa cleanup(std::vector<std::string>* warnings)
  {
    auto succ = cfa_.successors();
    std::vector<int> order(cfa_.num_vertices(), -1);
    std::deque<int> queue{cfa_.initial()};
    order[cfa_.initial()] = 0;
    int next = 1;
    while (!queue.empty()) {
      int v = queue.front();
      queue.pop_front();
      for (int eid : succ[v]) {
        int w = cfa_.edge(eid).dst;
        if (order[w] < 0) {
          order[w] = next++;
          queue.push_back(w);
        }
      }
    }

    Cfa out;
    for (const auto& d : cfa_.vars()) {
      out.add_var(d);
    }
    for (int i = 0; i < next; ++i) {
      out.add_vertex();
    }
    out.set_initial(0);
    for (int v = 0; v < cfa_.num_vertices(); ++v) {
      if (order[v] < 0) {
        if (cfa_.is_error(v) && warnings != nullptr) {
          warnings->push_back("assertion at line " + std::to_string(assert_lines_[v]) +
                              " is unreachable");
        }
        continue;
      }
      if (cfa_.is_error(v)) {
        out.mark_error(order[v]);
      }
    }
    for (const auto& e : cfa_.edges()) {
      if (order[e.src] >= 0) {
        out.add_edge(order[e.src], e.stmt, order[e.dst], e.kind);
      }
    }
    out.validate();
    return out;
  }

  const Program& prog_;
  Cfa cfa_;
  std::set<int> heads_;
  std::map<int, int> assert_lines_;
};

std::string escape(const std::string& s)
{
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') {
      out += '\\';
    }
    out += c;
  }
  return out;
}

} // namespace

Cfa lower(const Program& program, std::vector<std::string>* warnings)
{
  Lowerer l(program);
  return l.run(warnings);
}

std::string dump_dot(const Cfa& cfa, const std::string& name)
{
  std::ostringstream os;
  os << "digraph " << name << " {\n";
  os << "  node [shape=circle];\n";
  os << "  start [shape=point];\n";
  for (int v = 0; v < cfa.num_vertices(); ++v) {
    os << "  v" << v << " [label=\"" << v << "\"";
    if (cfa.is_error(v)) {
      os << ", shape=doublecircle";
    }
    os << "];\n";
  }
  os << "  start -> v" << cfa.initial() << ";\n";
  for (const auto& e : cfa.edges()) {
    os << "  v" << e.src << " -> v" << e.dst << " [label=\"" << escape(to_string(e.stmt)) << "\"";
    switch (e.kind) {
    case EdgeKind::AccelEntry:
    case EdgeKind::AccelBody: os << ", style=bold"; break;
    case EdgeKind::Guard:
    case EdgeKind::Update: os << ", style=dashed"; break;
    default: break;
    }
    os << "];\n";
  }
  os << "}\n";
  return os.str();
}

} // namespace accelbmc

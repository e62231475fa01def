#include "accelbmc/accel.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

namespace accelbmc {

std::vector<Stmt> trace_stmts(const Cfa& cfa, const std::vector<int>& edges)
{
  std::vector<Stmt> out;
  for (int e : edges) {
    out.push_back(cfa.edge(e).stmt);
  }
  return out;
}

std::string to_string(const Cfa& cfa, const LoopingTrace& tr)
{
  std::string out;
  for (int e : tr.edges) {
    if (!out.empty()) {
      out += "; ";
    }
    out += to_string(cfa.edge(e).stmt);
  }
  return out;
}

std::vector<LoopingTrace> enumerate_looping_traces(const Cfa& cfa, int max_paths,
                                                   std::vector<std::string>* warnings)
{
  LoopInfo loops = analyze_loops(cfa);
  auto succ = cfa.successors();
  std::vector<LoopingTrace> out;
  for (std::size_t hi = 0; hi < loops.heads.size(); ++hi) {
    const int head = loops.heads[hi];
    bool nested = false;
    for (int other : loops.heads) {
      if (other != head && loops.loop_contains(static_cast<int>(hi), other)) {
        nested = true;
      }
    }
    if (nested) {
      if (warnings != nullptr) {
        warnings->push_back("loop at vertex " + std::to_string(head) +
                            " contains another loop; not accelerated");
      }
      continue;
    }
    int found = 0;
    bool truncated = false;
    std::vector<int> path;
    std::vector<bool> on_path(cfa.num_vertices(), false);
    on_path[head] = true;
    std::function<void(int)> dfs = [&](int v) {
      for (int eid : succ[v]) {
        if (truncated) {
          return;
        }
        const Edge& e = cfa.edge(eid);
        if (!loops.loop_contains(static_cast<int>(hi), e.dst)) {
          continue;
        }
        if (e.dst == head) {
          if (found == max_paths) {
            truncated = true;
            return;
          }
          path.push_back(eid);
          out.push_back(LoopingTrace{head, path});
          path.pop_back();
          ++found;
        } else if (!on_path[e.dst]) {
          on_path[e.dst] = true;
          path.push_back(eid);
          dfs(e.dst);
          path.pop_back();
          on_path[e.dst] = false;
        }
      }
    };
    dfs(head);
    if (truncated && warnings != nullptr) {
      warnings->push_back("loop at vertex " + std::to_string(head) + " has more than " +
                          std::to_string(max_paths) + " looping paths; extra paths ignored");
    }
  }
  return out;
}

const VarUpdate& ClosedForm::at(const std::string& name) const
{
  for (const auto& [n, u] : vars) {
    if (n == name) {
      return u;
    }
  }
  throw std::out_of_range("no closed form for " + name);
}

bool ClosedForm::has_affine() const
{
  return std::any_of(vars.begin(), vars.end(),
                     [](const auto& p) { return p.second.kind == UpdateKind::Affine; });
}

std::string to_string(const ClosedForm& cf)
{
  std::string out;
  for (const auto& [name, u] : cf.vars) {
    if (!out.empty()) {
      out += ", ";
    }
    out += name + ": ";
    switch (u.kind) {
    case UpdateKind::Frozen: out += "frozen"; break;
    case UpdateKind::Affine: out += (u.increasing ? "+" : "-") + to_string(u.step); break;
    case UpdateKind::ResetTo: {
      std::ostringstream os;
      os << "reset " << static_cast<unsigned long long>(u.reset);
      out += os.str();
      break;
    }
    }
  }
  return out;
}

namespace {

bool is_var(const Expr& e, const std::string& name)
{
  return e.kind() == ExprKind::Var && e->name == name;
}

bool is_step(const Expr& e, const std::string& self)
{
  return e.kind() == ExprKind::Const || (e.kind() == ExprKind::Var && e->name != self);
}

} // namespace

Recurrence solve_recurrence(const std::vector<Stmt>& body, const std::vector<VarDecl>& vars)
{
  Recurrence r;
  std::map<std::string, VarUpdate> upd;
  std::set<std::string> assigned;
  auto fail = [&](const std::string& why, const Stmt& st) {
    r.supported = false;
    r.reason = why;
    r.offending = st;
    return r;
  };
  for (const auto& st : body) {
    if (st.kind == StmtKind::Havoc) {
      return fail("nondeterministic assignment", st);
    }
    if (st.kind != StmtKind::Assign) {
      continue;
    }
    const std::string& x = st.var();
    if (!assigned.insert(x).second) {
      return fail("variable assigned twice", st);
    }
    const Expr& rhs = st.rhs;
    VarUpdate u;
    if (rhs.kind() == ExprKind::Const) {
      u.kind = UpdateKind::ResetTo;
      u.reset = rhs->value;
    } else if (is_var(rhs, x)) {
      u.kind = UpdateKind::Frozen;
    } else if (rhs.kind() == ExprKind::Add && is_var(rhs->lhs, x) && is_step(rhs->rhs, x)) {
      u.kind = UpdateKind::Affine;
      u.step = rhs->rhs;
    } else if (rhs.kind() == ExprKind::Add && is_var(rhs->rhs, x) && is_step(rhs->lhs, x)) {
      u.kind = UpdateKind::Affine;
      u.step = rhs->lhs;
    } else if (rhs.kind() == ExprKind::Sub && is_var(rhs->lhs, x) && is_step(rhs->rhs, x)) {
      u.kind = UpdateKind::Affine;
      u.increasing = false;
      u.step = rhs->rhs;
    } else {
      return fail("update is not of the form x := x +/- c or x := k", st);
    }
    upd[x] = u;
  }
  // Steps must be loop-invariant.
  for (const auto& st : body) {
    if (st.kind == StmtKind::Assign) {
      const VarUpdate& u = upd[st.var()];
      if (u.kind == UpdateKind::Affine && u.step.kind() == ExprKind::Var &&
          assigned.count(u.step->name) != 0) {
        return fail("step variable " + u.step->name + " changes in the loop", st);
      }
    }
  }
  for (const auto& d : vars) {
    auto it = upd.find(d.name);
    r.form.vars.emplace_back(d.name, it == upd.end() ? VarUpdate{} : it->second);
  }
  r.supported = true;
  return r;
}

namespace {

void flatten_conj(const BExpr& b, std::vector<BExpr>& out)
{
  if (b.kind() == BoolKind::And) {
    for (const auto& a : b->args) {
      flatten_conj(a, out);
    }
  } else if (b.kind() != BoolKind::True) {
    out.push_back(b);
  }
}

// Value of an affine variable after `n` further updates.
Expr advance(const Expr& x, const VarUpdate& u, const Expr& n)
{
  Expr delta = u.step.kind() == ExprKind::Const ? scale(n, u.step->value) : mul(u.step, n);
  return u.increasing ? add(x, delta) : sub(x, delta);
}

} // namespace

std::vector<Stmt> synth_accelerator(const std::vector<Stmt>& body, const ClosedForm& cf,
                                    const std::string& counter, unsigned width)
{
  const Expr i = var(counter, width);
  const Expr one = constant(1, width);
  std::vector<Stmt> out;
  out.push_back(Stmt::havoc(i));
  out.push_back(Stmt::assume(cmp(CmpOp::Gt, i, constant(0, width))));

  auto kind_of = [&](const std::string& name) -> const VarUpdate* {
    for (const auto& [n, u] : cf.vars) {
      if (n == name) {
        return &u;
      }
    }
    return nullptr;
  };

  std::vector<BExpr> first;
  std::vector<BExpr> last;
  std::set<std::string> assigned;
  for (const auto& st : body) {
    if (st.kind == StmtKind::Assign) {
      assigned.insert(st.var());
      continue;
    }
    if (st.kind != StmtKind::Assume) {
      continue;
    }
    std::vector<BExpr> atoms;
    flatten_conj(nnf(st.cond), atoms);
    for (const auto& atom : atoms) {
      std::set<std::string> names;
      collect_vars(atom, names);
      std::vector<std::string> moving;
      for (const auto& n : names) {
        const VarUpdate* u = kind_of(n);
        if (u != nullptr && u->kind == UpdateKind::ResetTo) {
          throw AccelError(AccelError::Kind::NonMonotoneGuard,
                           "guard " + to_string(atom) + " reads reset variable " + n);
        }
        if (u != nullptr && u->kind == UpdateKind::Affine) {
          moving.push_back(n);
        }
      }
      if (moving.empty()) {
        first.push_back(atom);
        continue;
      }
      bool monotone = moving.size() == 1 && atom.kind() == BoolKind::Cmp &&
                      atom->op != CmpOp::Ne;
      if (monotone) {
        const std::string& x = moving[0];
        std::set<std::string> lhs_names;
        std::set<std::string> rhs_names;
        collect_vars(atom->lhs, lhs_names);
        collect_vars(atom->rhs, rhs_names);
        bool left = is_var(atom->lhs, x) && rhs_names.count(x) == 0;
        bool right = is_var(atom->rhs, x) && lhs_names.count(x) == 0;
        monotone = left || right;
      }
      if (!monotone) {
        throw AccelError(AccelError::Kind::NonMonotoneGuard,
                         "guard " + to_string(atom) + " is not monotone in the iteration count");
      }
      const std::string& x = moving[0];
      const VarUpdate& u = *kind_of(x);
      const Expr xv = var(x, width);
      bool before = assigned.count(x) != 0;
      Expr at_first = before ? advance(xv, u, one) : xv;
      Expr at_last = advance(xv, u, before ? i : sub(i, one));
      first.push_back(substitute(atom, Substitution{{x, at_first}}));
      last.push_back(substitute(atom, Substitution{{x, at_last}}));
    }
  }
  if (!first.empty()) {
    out.push_back(Stmt::assume(band(first)));
  }
  if (!last.empty()) {
    out.push_back(Stmt::assume(band(last)));
  }

  for (const auto& st : body) {
    if (st.kind != StmtKind::Assign) {
      continue;
    }
    const VarUpdate& u = cf.at(st.var());
    const Expr xv = var(st.var(), width);
    if (u.kind == UpdateKind::Affine) {
      out.push_back(Stmt::assign(xv, advance(xv, u, i)));
    } else if (u.kind == UpdateKind::ResetTo) {
      out.push_back(Stmt::assign(xv, constant(u.reset, width)));
    }
  }

  // No-wrap bounds on the post-state: a monotone trajectory wraps first
  // at its last step, so checking the final value suffices.
  const unsigned w2 = 2 * width;
  for (const auto& st : body) {
    if (st.kind != StmtKind::Assign) {
      continue;
    }
    const VarUpdate& u = cf.at(st.var());
    if (u.kind != UpdateKind::Affine) {
      continue;
    }
    Expr x2 = zext(var(st.var(), width), w2);
    Expr i2 = zext(i, w2);
    Expr total = u.step.kind() == ExprKind::Const ? scale(i2, u.step->value)
                                                  : mul(zext(u.step, w2), i2);
    if (u.increasing) {
      out.push_back(Stmt::assume(cmp(CmpOp::Le, total, x2)));
    } else {
      out.push_back(Stmt::assume(cmp(CmpOp::Le, add(x2, total), constant(width_mask(width), w2))));
    }
  }
  return out;
}

BExpr wrap_predicate(const ClosedForm& cf, unsigned width)
{
  std::vector<BExpr> parts;
  for (const auto& [name, u] : cf.vars) {
    if (u.kind != UpdateKind::Affine) {
      continue;
    }
    if (u.step.kind() == ExprKind::Const && u.step->value == 0) {
      continue;
    }
    Expr x = var(name, width);
    if (u.increasing) {
      parts.push_back(cmp(CmpOp::Lt, x, u.step));
    } else {
      Expr bound = u.step.kind() == ExprKind::Const
                       ? constant(width_mask(width) - u.step->value, width)
                       : sub(constant(width_mask(width), width), u.step);
      parts.push_back(cmp(CmpOp::Gt, x, bound));
    }
  }
  return bor(std::move(parts));
}

int overflow_split(Cfa& cfa, int split_edge, const std::string& label, const BExpr& wrap)
{
  const int target = cfa.edge(split_edge).dst;
  const int u = cfa.add_vertex();
  cfa.edge(split_edge).dst = u;
  BExpr flag = overflow_flag(label, wrap);
  cfa.add_edge(u, Stmt::assume(flag), target, EdgeKind::OverflowFork);
  return cfa.add_edge(u, Stmt::assume(bnot(flag)), target, EdgeKind::OverflowFork);
}

AcceleratedCfa accelerate_cfa(const Cfa& input, int max_paths)
{
  AcceleratedCfa out;
  out.cfa = input;
  if (input.vars().empty()) {
    out.base_vertices = input.num_vertices();
    out.base_edges = static_cast<int>(input.edges().size());
    return out;
  }
  const unsigned width = input.vars().front().width;
  auto traces = enumerate_looping_traces(input, max_paths, &out.warnings);
  const std::string counter = input.fresh_var_name("i");

  for (const auto& tr : traces) {
    std::string desc = "head " + std::to_string(tr.head) + ": " + to_string(input, tr);
    std::vector<Stmt> body = trace_stmts(input, tr.edges);
    Recurrence rec = solve_recurrence(body, input.vars());
    if (!rec.supported) {
      out.report.push_back(desc + " -- unsupported: " + rec.reason + " (" +
                           to_string(*rec.offending) + ")");
      continue;
    }
    Accelerator acc;
    acc.head = tr.head;
    acc.trace_edges = tr.edges;
    acc.body = body;
    acc.form = rec.form;
    acc.counter = counter;
    try {
      acc.stmts = synth_accelerator(body, rec.form, counter, width);
    } catch (const AccelError& e) {
      out.report.push_back(desc + " -- not accelerated: " + e.what());
      continue;
    }
    acc.wrap = wrap_predicate(rec.form, width);
    acc.beta_note = "largest i for which no affine update wraps";
    out.report.push_back(desc + " -- accelerated: " + to_string(rec.form));
    out.accels.push_back(std::move(acc));
  }

  if (!out.accels.empty()) {
    out.counter = counter;
    out.cfa.add_var(VarDecl{counter, width, false});
  }

  // Split edge per accelerator: the last edge of its trace not used by any
  // other accelerated trace of the same head, else the trace's last edge.
  std::map<int, std::vector<std::size_t>> groups;  // split edge -> accelerators
  for (std::size_t a = 0; a < out.accels.size(); ++a) {
    Accelerator& acc = out.accels[a];
    if (acc.wrap.kind() == BoolKind::False) {
      continue;
    }
    int chosen = acc.trace_edges.back();
    for (auto it = acc.trace_edges.rbegin(); it != acc.trace_edges.rend(); ++it) {
      bool shared = false;
      for (std::size_t b = 0; b < out.accels.size(); ++b) {
        const auto& other = out.accels[b].trace_edges;
        if (b != a && out.accels[b].head == acc.head &&
            std::find(other.begin(), other.end(), *it) != other.end()) {
          shared = true;
        }
      }
      if (!shared) {
        chosen = *it;
        break;
      }
    }
    groups[chosen].push_back(a);
  }
  for (const auto& [edge, members] : groups) {
    std::vector<BExpr> preds;
    std::set<std::string> names;
    for (std::size_t a : members) {
      preds.push_back(out.accels[a].wrap);
      for (const auto& [n, u] : out.accels[a].form.vars) {
        if (u.kind == UpdateKind::Affine) {
          names.insert(n);
        }
      }
    }
    std::string label;
    for (const auto& n : names) {
      label += (label.empty() ? "" : ",") + n;
    }
    int no_ovf = overflow_split(out.cfa, edge, label, bor(preds));
    out.fork_edges.push_back(no_ovf - 1);
    out.fork_edges.push_back(no_ovf);
    for (std::size_t a : members) {
      Accelerator& acc = out.accels[a];
      for (int e : acc.trace_edges) {
        acc.pattern.push_back(e);
        if (e == edge) {
          acc.pattern.push_back(no_ovf);
        }
      }
    }
  }
  for (auto& acc : out.accels) {
    if (acc.pattern.empty()) {
      acc.pattern = acc.trace_edges;
    }
  }

  out.base_vertices = out.cfa.num_vertices();
  out.base_edges = static_cast<int>(out.cfa.edges().size());

  for (std::size_t a = 0; a < out.accels.size(); ++a) {
    Accelerator& acc = out.accels[a];
    int cur = acc.head;
    for (std::size_t k = 0; k < acc.stmts.size(); ++k) {
      int next = k + 1 == acc.stmts.size() ? acc.head : out.cfa.add_vertex();
      int id = out.cfa.add_edge(cur, acc.stmts[k], next,
                                k == 0 ? EdgeKind::AccelEntry : EdgeKind::AccelBody);
      out.cfa.edge(id).accel = static_cast<int>(a);
      acc.path.push_back(id);
      cur = next;
    }
  }
  out.cfa.validate();
  return out;
}

} // namespace accelbmc

#include "accelbmc/semantics.hpp"

#include "accelbmc/bitblast.hpp"

#include <atomic>
#include <stdexcept>

namespace accelbmc {

namespace {

std::atomic<unsigned long> fresh_counter{0};

std::string fresh_name(const std::string& base, const char* tag)
{
  return base + "#" + tag + std::to_string(fresh_counter++);
}

} // namespace

BExpr wlp(const Stmt& st, const BExpr& post)
{
  switch (st.kind) {
  case StmtKind::Assign: return substitute(post, Substitution{{st.var(), st.rhs}});
  case StmtKind::Havoc: {
    Expr h = var(fresh_name(st.var(), "h"), st.target.width());
    return substitute(post, Substitution{{st.var(), h}});
  }
  case StmtKind::Assume: return bor(bnot(st.cond), post);
  case StmtKind::Skip: return post;
  }
  return post;
}

std::string primed(const std::string& name) { return name + "'"; }

BExpr identity_rel(const std::vector<VarDecl>& vars)
{
  std::vector<BExpr> eqs;
  for (const auto& d : vars) {
    eqs.push_back(cmp(CmpOp::Eq, var(d.name, d.width), var(primed(d.name), d.width)));
  }
  return band(std::move(eqs));
}

BExpr trans_rel(const Stmt& st, const std::vector<VarDecl>& vars)
{
  std::vector<BExpr> changed;
  for (const auto& d : vars) {
    changed.push_back(cmp(CmpOp::Ne, var(d.name, d.width), var(primed(d.name), d.width)));
  }
  return nnf(bnot(wlp(st, bor(std::move(changed)))));
}

BExpr compose(const BExpr& r1, const BExpr& r2, const std::vector<VarDecl>& vars)
{
  Substitution out_of_first;
  Substitution into_second;
  for (const auto& d : vars) {
    Expr mid = var(fresh_name(d.name, "m"), d.width);
    out_of_first.emplace(primed(d.name), mid);
    into_second.emplace(d.name, mid);
  }
  return band(substitute(r1, out_of_first), substitute(r2, into_second));
}

BExpr trace_rel(const std::vector<Stmt>& trace, const std::vector<VarDecl>& vars)
{
  BExpr rel = identity_rel(vars);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    BExpr step = trans_rel(trace[i], vars);
    rel = i == 0 ? step : compose(rel, step, vars);
  }
  return rel;
}

bool rel_contains(const BExpr& rel, const std::vector<VarDecl>& vars, const Env& pre,
                  const Env& post)
{
  Substitution fix;
  for (const auto& d : vars) {
    fix.emplace(d.name, constant(pre.at(d.name) & width_mask(d.width), d.width));
    fix.emplace(primed(d.name), constant(post.at(d.name) & width_mask(d.width), d.width));
  }
  BExpr closed = substitute(rel, fix);
  std::set<std::string> free;
  collect_vars(closed, free);
  if (free.empty()) {
    return eval(closed, Env{});
  }
  Cnf cnf;
  BitBlaster bb(cnf);
  bb.require(closed);
  Solver s;
  s.add_cnf(cnf);
  SatResult r = s.solve();
  if (r == SatResult::Unknown) {
    throw std::runtime_error("relation membership query did not finish");
  }
  return r == SatResult::Sat;
}

bool exec(const Stmt& st, Env& env, std::optional<Wide> havoc_value)
{
  switch (st.kind) {
  case StmtKind::Assign: {
    Wide v = eval(st.rhs, env);
    env[st.var()] = v;
    return true;
  }
  case StmtKind::Havoc:
    if (!havoc_value) {
      throw std::invalid_argument("havoc of " + st.var() + " needs a value");
    }
    env[st.var()] = *havoc_value & width_mask(st.target.width());
    return true;
  case StmtKind::Assume: return eval(st.cond, env);
  case StmtKind::Skip: return true;
  }
  return true;
}

std::vector<Env> post_states(const Stmt& st, const Env& env)
{
  std::vector<Env> out;
  if (st.kind == StmtKind::Havoc) {
    unsigned w = st.target.width();
    if (w > 20) {
      throw std::invalid_argument("refusing to enumerate a havoc of " + std::to_string(w) +
                                  " bits");
    }
    for (Wide v = 0; v <= width_mask(w); ++v) {
      Env next = env;
      next[st.var()] = v;
      out.push_back(std::move(next));
    }
    return out;
  }
  Env next = env;
  if (exec(st, next)) {
    out.push_back(std::move(next));
  }
  return out;
}

} // namespace accelbmc

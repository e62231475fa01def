#pragma once

#include "accelbmc/cfa.hpp"

#include <optional>

namespace accelbmc {

/// Weakest liberal precondition. A havoc introduces a fresh symbol, read as
/// universally quantified in `wlp` and existentially once negated.
BExpr wlp(const Stmt& st, const BExpr& post);

/// Post-state name of a variable inside a transition relation.
std::string primed(const std::string& name);

/// ⋀ x = x' over `vars`.
BExpr identity_rel(const std::vector<VarDecl>& vars);

/// Transition relation over x and x': ¬wlp(st, ⋁ x ≠ x') in negation
/// normal form.
BExpr trans_rel(const Stmt& st, const std::vector<VarDecl>& vars);

/// Relational composition; the intermediate state becomes fresh symbols.
BExpr compose(const BExpr& r1, const BExpr& r2, const std::vector<VarDecl>& vars);

/// Left fold of `compose` over the statements; the empty trace is the
/// identity.
BExpr trace_rel(const std::vector<Stmt>& trace, const std::vector<VarDecl>& vars);

/// Whether (pre, post) belongs to the relation, with every symbol other than
/// the listed variables and their primed copies existentially quantified.
bool rel_contains(const BExpr& rel, const std::vector<VarDecl>& vars, const Env& pre,
                  const Env& post);

/// Executes one statement in place. Returns false when an assumption
/// blocks. A havoc needs `havoc_value` (masked to the variable width).
bool exec(const Stmt& st, Env& env, std::optional<Wide> havoc_value = std::nullopt);

/// All successor states of one statement; havocs enumerate the whole
/// domain of the target (refused above 20 bits).
std::vector<Env> post_states(const Stmt& st, const Env& env);

} // namespace accelbmc

#pragma once

#include "accelbmc/cfa.hpp"

#include <stdexcept>

namespace accelbmc {

/// A simple path head -> ... -> head, as edge ids.
struct LoopingTrace {
  int head = 0;
  std::vector<int> edges;
};

std::vector<Stmt> trace_stmts(const Cfa& cfa, const std::vector<int>& edges);
std::string to_string(const Cfa& cfa, const LoopingTrace& tr);

/// Simple looping paths per innermost loop head, in lexicographic edge-id
/// order, at most `max_paths` per head. Heads whose natural loop contains
/// another head are skipped. Truncation is reported in `warnings`.
std::vector<LoopingTrace> enumerate_looping_traces(const Cfa& cfa, int max_paths,
                                                   std::vector<std::string>* warnings = nullptr);

enum class UpdateKind { Frozen, Affine, ResetTo };

/// Effect of one body iteration on a variable. Affine steps are a constant
/// or a frozen variable; the direction is recorded, never inferred.
struct VarUpdate {
  UpdateKind kind = UpdateKind::Frozen;
  bool increasing = true;
  Expr step;
  Wide reset = 0;
};

struct ClosedForm {
  std::vector<std::pair<std::string, VarUpdate>> vars;  // in declaration order

  const VarUpdate& at(const std::string& name) const;
  bool has_affine() const;
};

std::string to_string(const ClosedForm& cf);

struct Recurrence {
  bool supported = false;
  ClosedForm form;
  std::string reason;           // when unsupported
  std::optional<Stmt> offending;
};

Recurrence solve_recurrence(const std::vector<Stmt>& body, const std::vector<VarDecl>& vars);

class AccelError : public std::runtime_error {
public:
  enum class Kind { Unsupported, NonMonotoneGuard };
  AccelError(Kind k, const std::string& msg) : std::runtime_error(msg), kind_(k) {}
  Kind kind() const { return kind_; }

private:
  Kind kind_;
};

/// Accelerator path for `body`:
///   i := *; [i > 0]; guards at iteration 0; guards at iteration i-1;
///   closed-form assignments; no-wrap bounds evaluated in 2w bits.
/// Throws AccelError(NonMonotoneGuard) for guards outside the monotone
/// affine class.
std::vector<Stmt> synth_accelerator(const std::vector<Stmt>& body, const ClosedForm& cf,
                                    const std::string& counter, unsigned width);

/// Post-hoc wrap test for one iteration of `cf`, over the post-state.
/// False when no variable is updated affinely.
BExpr wrap_predicate(const ClosedForm& cf, unsigned width);

struct Accelerator {
  int head = 0;
  std::vector<int> trace_edges;  // looping trace in the input CFA
  std::vector<Stmt> body;
  ClosedForm form;
  std::string counter;
  std::vector<Stmt> stmts;
  /// Own one-iteration wrap predicate; the fork edge may test a
  /// disjunction when several traces share their split edge.
  BExpr wrap;
  std::vector<int> pattern;  // π: the trace plus its [!overflow] edge, in the result CFA
  std::vector<int> path;     // accelerator edges in the result CFA
  bool subsumes = true;      // π ⪯ û holds by construction
  std::string beta_note;
};

struct AcceleratedCfa {
  Cfa cfa;
  int base_vertices = 0;  // vertices of the split CFA; accelerator interiors follow
  int base_edges = 0;     // edges of the split CFA; accelerator paths follow
  std::vector<Accelerator> accels;
  std::vector<int> fork_edges;
  std::string counter;  // empty when nothing was accelerated
  std::vector<std::string> report;
  std::vector<std::string> warnings;
};

/// Forks the edge `split_edge` through a new vertex u into
/// `[overflow(label)]` and `[!overflow(label)]` edges back to its old
/// target. Returns the id of the `[!overflow]` edge.
int overflow_split(Cfa& cfa, int split_edge, const std::string& label, const BExpr& wrap);

AcceleratedCfa accelerate_cfa(const Cfa& cfa, int max_paths = 8);

} // namespace accelbmc

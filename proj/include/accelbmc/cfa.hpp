#pragma once

#include "accelbmc/expr.hpp"

#include <optional>
#include <string>
#include <vector>

namespace accelbmc {

enum class StmtKind { Assign, Havoc, Assume, Skip };

/// `x := e`, `x := *`, `[B]` or `skip`.
struct Stmt {
  StmtKind kind = StmtKind::Skip;
  Expr target;  // Var node for Assign/Havoc
  Expr rhs;     // Assign
  BExpr cond;   // Assume

  static Stmt assign(Expr target, Expr rhs);
  static Stmt havoc(Expr target);
  static Stmt assume(BExpr cond);
  static Stmt skip();

  const std::string& var() const { return target->name; }
};

std::string to_string(const Stmt& s);

struct VarDecl {
  std::string name;
  unsigned width = 32;
  /// Uninitialized declarations start with an arbitrary value; everything
  /// else (initialized declarations, synthesized variables) starts at 0.
  bool nondet_init = true;
};

/// Role of an edge in the pipeline; drives DOT styling and the weighted
/// trace-length measure used by the oracle.
enum class EdgeKind {
  Original,      // lowered from source
  OverflowFork,  // [overflow] / [!overflow] discriminator
  AccelEntry,    // first statement of an accelerator path
  AccelBody,     // remaining accelerator statements
  Guard,         // trace-automaton state guard
  Update,        // trace-automaton state update
};

const char* to_string(EdgeKind k);

/// Statement-length weight of an edge: original statements and whole
/// accelerators count one, bookkeeping edges count zero.
int trace_weight(EdgeKind k);

struct Edge {
  int id = 0;  // occurrence id; equals the index in Cfa::edges
  int src = 0;
  int dst = 0;
  Stmt stmt;
  EdgeKind kind = EdgeKind::Original;
  int accel = -1;   // accelerator index for AccelEntry/AccelBody edges
  int origin = -1;  // source symbol for copies made during instrumentation
};

class Cfa {
public:
  int add_vertex();
  int add_edge(int src, Stmt stmt, int dst, EdgeKind kind = EdgeKind::Original);
  void mark_error(int v);
  void add_var(VarDecl d);

  int num_vertices() const { return static_cast<int>(is_error_.size()); }
  int initial() const { return initial_; }
  void set_initial(int v) { initial_ = v; }
  bool is_error(int v) const { return is_error_.at(v); }
  std::vector<int> error_vertices() const;

  const std::vector<Edge>& edges() const { return edges_; }
  Edge& edge(int id) { return edges_.at(id); }
  const Edge& edge(int id) const { return edges_.at(id); }

  const std::vector<VarDecl>& vars() const { return vars_; }
  const VarDecl* find_var(const std::string& name) const;
  int var_index(const std::string& name) const;
  /// A name not used by any variable, derived from `base`.
  std::string fresh_var_name(const std::string& base) const;

  /// Edge ids leaving each vertex, in id order.
  std::vector<std::vector<int>> successors() const;
  std::vector<std::vector<int>> predecessors() const;

  /// Structural consistency: endpoints in range, ids equal indices,
  /// assigned variables declared with matching width.
  void validate() const;

private:
  int initial_ = 0;
  std::vector<bool> is_error_;
  std::vector<Edge> edges_;
  std::vector<VarDecl> vars_;
};

/// Back edges from a depth-first search of the initial vertex (edges taken
/// in id order), their heads, and the natural loop of every head.
struct LoopInfo {
  std::vector<bool> is_back_edge;           // per edge id
  std::vector<int> heads;                   // ascending vertex order
  std::vector<std::vector<bool>> in_loop;   // per head index, per vertex
  std::vector<bool> reachable;              // per vertex

  int head_index(int v) const;
  bool loop_contains(int head_idx, int v) const { return in_loop[head_idx][v]; }
};

LoopInfo analyze_loops(const Cfa& cfa);

} // namespace accelbmc

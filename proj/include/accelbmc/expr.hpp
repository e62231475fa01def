#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace accelbmc {

/// Concrete values. Program variables are at most 64 bits wide, but
/// intermediate terms (double-width iteration bounds) reach 128.
using Value = std::uint64_t;
using Wide = unsigned __int128;

constexpr unsigned kMaxWidth = 64;
constexpr unsigned kMaxTermWidth = 128;

Wide width_mask(unsigned width);

enum class ExprKind { Var, Const, Nondet, Add, Sub, Mul, ZExt, Ite };
enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };
enum class BoolKind { True, False, Cmp, Not, And, Or, Var, Overflow };

struct ExprNode;
struct BoolNode;

/// Immutable, structurally shared bit-vector term.
class Expr {
public:
  Expr() = default;
  explicit Expr(std::shared_ptr<const ExprNode> n) : node_(std::move(n)) {}

  const ExprNode& operator*() const { return *node_; }
  const ExprNode* operator->() const { return node_.get(); }
  const ExprNode* get() const { return node_.get(); }
  explicit operator bool() const { return node_ != nullptr; }

  ExprKind kind() const;
  unsigned width() const;

private:
  std::shared_ptr<const ExprNode> node_;
};

/// Immutable boolean formula over bit-vector terms and boolean symbols.
class BExpr {
public:
  BExpr() = default;
  explicit BExpr(std::shared_ptr<const BoolNode> n) : node_(std::move(n)) {}

  const BoolNode& operator*() const { return *node_; }
  const BoolNode* operator->() const { return node_.get(); }
  const BoolNode* get() const { return node_.get(); }
  explicit operator bool() const { return node_ != nullptr; }

  BoolKind kind() const;

private:
  std::shared_ptr<const BoolNode> node_;
};

struct ExprNode {
  ExprKind kind;
  unsigned width;
  std::string name;  // Var
  Wide value = 0;    // Const
  Expr lhs, rhs;     // Add/Sub/Mul; lhs is the operand of ZExt, then/else of Ite
  BExpr cond;        // Ite
};

struct BoolNode {
  BoolKind kind;
  CmpOp op = CmpOp::Eq;
  Expr lhs, rhs;              // Cmp
  std::vector<BExpr> args;    // Not (one), And, Or, Overflow (the predicate)
  std::string name;           // Var, Overflow label
};

// Term construction. Operand widths must agree; violations throw
// std::invalid_argument.
Expr var(std::string name, unsigned width);
Expr constant(Wide value, unsigned width);
Expr nondet(unsigned width);
Expr add(Expr a, Expr b);
Expr sub(Expr a, Expr b);
Expr mul(Expr a, Expr b);
Expr zext(Expr a, unsigned width);
Expr ite(BExpr c, Expr a, Expr b);

/// a * k with the trivial cases (k = 0, k = 1) folded away.
Expr scale(Expr a, Wide k);

BExpr btrue();
BExpr bfalse();
BExpr cmp(CmpOp op, Expr a, Expr b);
BExpr bnot(BExpr a);
BExpr band(std::vector<BExpr> args);
BExpr bor(std::vector<BExpr> args);
BExpr band(BExpr a, BExpr b);
BExpr bor(BExpr a, BExpr b);
BExpr implies(BExpr a, BExpr b);
BExpr bvar(std::string name);
/// Named predicate rendered as `overflow(label)`; evaluates as `pred`.
BExpr overflow_flag(std::string label, BExpr pred);

/// Negation normal form: negations pushed down to comparisons, boolean
/// symbols and overflow flags.
BExpr nnf(const BExpr& e);

CmpOp negate(CmpOp op);
const char* to_string(CmpOp op);
std::string to_string(const Expr& e);
std::string to_string(const BExpr& e);

bool contains_nondet(const Expr& e);

/// Variable names (bit-vector and boolean) occurring in a term.
void collect_vars(const Expr& e, std::set<std::string>& out);
void collect_vars(const BExpr& e, std::set<std::string>& out);

/// Simultaneous substitution of variables by terms, keyed by name.
/// Replacement widths must match the replaced variable.
using Substitution = std::map<std::string, Expr>;
Expr substitute(const Expr& e, const Substitution& sub);
BExpr substitute(const BExpr& e, const Substitution& sub);

/// Evaluation environment: unknown names throw std::out_of_range.
using Env = std::unordered_map<std::string, Wide>;

/// Memoizing evaluator, suitable for large shared term DAGs.
class Evaluator {
public:
  explicit Evaluator(const Env& env) : env_(env) {}
  Wide eval(const Expr& e);
  bool eval(const BExpr& e);

private:
  const Env& env_;
  std::unordered_map<const ExprNode*, Wide> terms_;
  std::unordered_map<const BoolNode*, bool> bools_;
};

Wide eval(const Expr& e, const Env& env);
bool eval(const BExpr& e, const Env& env);

} // namespace accelbmc

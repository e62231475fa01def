#include "accelbmc/expr.hpp"

#include <sstream>
#include <stdexcept>

namespace accelbmc {

Wide width_mask(unsigned width)
{
  if (width >= 128) {
    return ~Wide{0};
  }
  return (Wide{1} << width) - 1;
}

ExprKind Expr::kind() const { return node_->kind; }
unsigned Expr::width() const { return node_->width; }
BoolKind BExpr::kind() const { return node_->kind; }

namespace {

Expr make(ExprNode n) { return Expr(std::make_shared<const ExprNode>(std::move(n))); }
BExpr make(BoolNode n) { return BExpr(std::make_shared<const BoolNode>(std::move(n))); }

void check_width(unsigned w)
{
  if (w == 0 || w > kMaxTermWidth) {
    throw std::invalid_argument("bit width out of range: " + std::to_string(w));
  }
}

void same_width(const Expr& a, const Expr& b, const char* op)
{
  if (!a || !b) {
    throw std::invalid_argument(std::string("null operand to ") + op);
  }
  if (a.width() != b.width()) {
    throw std::invalid_argument(std::string("width mismatch in ") + op + ": " +
                                to_string(a) + " (" + std::to_string(a.width()) + ") vs " +
                                to_string(b) + " (" + std::to_string(b.width()) + ")");
  }
}

std::string wide_to_string(Wide v)
{
  if (v == 0) {
    return "0";
  }
  std::string s;
  while (v != 0) {
    s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  return s;
}

} // namespace

Expr var(std::string name, unsigned width)
{
  check_width(width);
  ExprNode n{ExprKind::Var, width};
  n.name = std::move(name);
  return make(std::move(n));
}

Expr constant(Wide value, unsigned width)
{
  check_width(width);
  ExprNode n{ExprKind::Const, width};
  n.value = value & width_mask(width);
  return make(std::move(n));
}

Expr nondet(unsigned width)
{
  check_width(width);
  return make(ExprNode{ExprKind::Nondet, width});
}

Expr add(Expr a, Expr b)
{
  same_width(a, b, "+");
  ExprNode n{ExprKind::Add, a.width()};
  n.lhs = std::move(a);
  n.rhs = std::move(b);
  return make(std::move(n));
}

Expr sub(Expr a, Expr b)
{
  same_width(a, b, "-");
  ExprNode n{ExprKind::Sub, a.width()};
  n.lhs = std::move(a);
  n.rhs = std::move(b);
  return make(std::move(n));
}

Expr mul(Expr a, Expr b)
{
  same_width(a, b, "*");
  ExprNode n{ExprKind::Mul, a.width()};
  n.lhs = std::move(a);
  n.rhs = std::move(b);
  return make(std::move(n));
}

Expr zext(Expr a, unsigned width)
{
  check_width(width);
  if (width < a.width()) {
    throw std::invalid_argument("zext to a narrower width");
  }
  if (width == a.width()) {
    return a;
  }
  ExprNode n{ExprKind::ZExt, width};
  n.lhs = std::move(a);
  return make(std::move(n));
}

Expr ite(BExpr c, Expr a, Expr b)
{
  same_width(a, b, "ite");
  ExprNode n{ExprKind::Ite, a.width()};
  n.cond = std::move(c);
  n.lhs = std::move(a);
  n.rhs = std::move(b);
  return make(std::move(n));
}

Expr scale(Expr a, Wide k)
{
  k &= width_mask(a.width());
  if (k == 0) {
    return constant(0, a.width());
  }
  if (k == 1) {
    return a;
  }
  Expr c = constant(k, a.width());
  return mul(std::move(c), std::move(a));
}

BExpr btrue() { return make(BoolNode{BoolKind::True}); }
BExpr bfalse() { return make(BoolNode{BoolKind::False}); }

BExpr cmp(CmpOp op, Expr a, Expr b)
{
  same_width(a, b, to_string(op));
  BoolNode n{BoolKind::Cmp, op};
  n.lhs = std::move(a);
  n.rhs = std::move(b);
  return make(std::move(n));
}

BExpr bnot(BExpr a)
{
  BoolNode n{BoolKind::Not};
  n.args.push_back(std::move(a));
  return make(std::move(n));
}

BExpr band(std::vector<BExpr> args)
{
  if (args.empty()) {
    return btrue();
  }
  if (args.size() == 1) {
    return args.front();
  }
  BoolNode n{BoolKind::And};
  n.args = std::move(args);
  return make(std::move(n));
}

BExpr bor(std::vector<BExpr> args)
{
  if (args.empty()) {
    return bfalse();
  }
  if (args.size() == 1) {
    return args.front();
  }
  BoolNode n{BoolKind::Or};
  n.args = std::move(args);
  return make(std::move(n));
}

BExpr band(BExpr a, BExpr b) { return band(std::vector<BExpr>{std::move(a), std::move(b)}); }
BExpr bor(BExpr a, BExpr b) { return bor(std::vector<BExpr>{std::move(a), std::move(b)}); }
BExpr implies(BExpr a, BExpr b) { return bor(bnot(std::move(a)), std::move(b)); }

BExpr bvar(std::string name)
{
  BoolNode n{BoolKind::Var};
  n.name = std::move(name);
  return make(std::move(n));
}

BExpr overflow_flag(std::string label, BExpr pred)
{
  BoolNode n{BoolKind::Overflow};
  n.name = std::move(label);
  n.args.push_back(std::move(pred));
  return make(std::move(n));
}

CmpOp negate(CmpOp op)
{
  switch (op) {
  case CmpOp::Eq: return CmpOp::Ne;
  case CmpOp::Ne: return CmpOp::Eq;
  case CmpOp::Lt: return CmpOp::Ge;
  case CmpOp::Le: return CmpOp::Gt;
  case CmpOp::Gt: return CmpOp::Le;
  case CmpOp::Ge: return CmpOp::Lt;
  }
  return op;
}

namespace {

BExpr nnf_rec(const BExpr& e, bool negated)
{
  switch (e.kind()) {
  case BoolKind::True: return negated ? bfalse() : e;
  case BoolKind::False: return negated ? btrue() : e;
  case BoolKind::Cmp:
    return negated ? cmp(negate(e->op), e->lhs, e->rhs) : e;
  case BoolKind::Var:
  case BoolKind::Overflow:
    return negated ? bnot(e) : e;
  case BoolKind::Not:
    return nnf_rec(e->args[0], !negated);
  case BoolKind::And:
  case BoolKind::Or: {
    std::vector<BExpr> args;
    args.reserve(e->args.size());
    for (const auto& a : e->args) {
      args.push_back(nnf_rec(a, negated));
    }
    bool conj = (e.kind() == BoolKind::And) != negated;
    return conj ? band(std::move(args)) : bor(std::move(args));
  }
  }
  return e;
}

} // namespace

BExpr nnf(const BExpr& e) { return nnf_rec(e, false); }

const char* to_string(CmpOp op)
{
  switch (op) {
  case CmpOp::Eq: return "=";
  case CmpOp::Ne: return "!=";
  case CmpOp::Lt: return "<";
  case CmpOp::Le: return "<=";
  case CmpOp::Gt: return ">";
  case CmpOp::Ge: return ">=";
  }
  return "?";
}

namespace {

int precedence(const Expr& e)
{
  switch (e.kind()) {
  case ExprKind::Add:
  case ExprKind::Sub: return 1;
  case ExprKind::Mul: return 2;
  default: return 3;
  }
}

void print(std::ostream& os, const Expr& e, int min_prec);
void print(std::ostream& os, const BExpr& e, int min_prec);

void print(std::ostream& os, const Expr& e, int min_prec)
{
  bool paren = precedence(e) < min_prec;
  if (paren) {
    os << '(';
  }
  switch (e.kind()) {
  case ExprKind::Var: os << e->name; break;
  case ExprKind::Const: os << wide_to_string(e->value); break;
  case ExprKind::Nondet: os << '*'; break;
  case ExprKind::Add:
    print(os, e->lhs, 1);
    os << '+';
    print(os, e->rhs, 2);
    break;
  case ExprKind::Sub:
    print(os, e->lhs, 1);
    os << '-';
    print(os, e->rhs, 2);
    break;
  case ExprKind::Mul:
    print(os, e->lhs, 2);
    os << '*';
    print(os, e->rhs, 3);
    break;
  case ExprKind::ZExt:
    os << "zext" << e.width() << '(';
    print(os, e->lhs, 0);
    os << ')';
    break;
  case ExprKind::Ite:
    os << '(';
    print(os, e->cond, 0);
    os << " ? ";
    print(os, e->lhs, 0);
    os << " : ";
    print(os, e->rhs, 0);
    os << ')';
    break;
  }
  if (paren) {
    os << ')';
  }
}

int precedence(const BExpr& e)
{
  switch (e.kind()) {
  case BoolKind::Or: return 1;
  case BoolKind::And: return 2;
  default: return 3;
  }
}

void print(std::ostream& os, const BExpr& e, int min_prec)
{
  bool paren = precedence(e) < min_prec;
  if (paren) {
    os << '(';
  }
  switch (e.kind()) {
  case BoolKind::True: os << "true"; break;
  case BoolKind::False: os << "false"; break;
  case BoolKind::Cmp:
    print(os, e->lhs, 1);
    os << to_string(e->op);
    print(os, e->rhs, 1);
    break;
  case BoolKind::Not: {
    const BExpr& a = e->args[0];
    os << '!';
    bool atomic = a.kind() == BoolKind::Var || a.kind() == BoolKind::Overflow ||
                  a.kind() == BoolKind::True || a.kind() == BoolKind::False;
    if (atomic) {
      print(os, a, 3);
    } else {
      os << '(';
      print(os, a, 0);
      os << ')';
    }
    break;
  }
  case BoolKind::And:
  case BoolKind::Or: {
    const char* sep = e.kind() == BoolKind::And ? " && " : " || ";
    int inner = precedence(e) + 1;
    for (std::size_t i = 0; i < e->args.size(); ++i) {
      if (i != 0) {
        os << sep;
      }
      print(os, e->args[i], inner);
    }
    break;
  }
  case BoolKind::Var: os << e->name; break;
  case BoolKind::Overflow: os << "overflow(" << e->name << ')'; break;
  }
  if (paren) {
    os << ')';
  }
}

} // namespace

std::string to_string(const Expr& e)
{
  std::ostringstream os;
  print(os, e, 0);
  return os.str();
}

std::string to_string(const BExpr& e)
{
  std::ostringstream os;
  print(os, e, 0);
  return os.str();
}

bool contains_nondet(const Expr& e)
{
  switch (e.kind()) {
  case ExprKind::Nondet: return true;
  case ExprKind::Var:
  case ExprKind::Const: return false;
  case ExprKind::ZExt: return contains_nondet(e->lhs);
  default: return contains_nondet(e->lhs) || contains_nondet(e->rhs);
  }
}

void collect_vars(const Expr& e, std::set<std::string>& out)
{
  switch (e.kind()) {
  case ExprKind::Var: out.insert(e->name); break;
  case ExprKind::Const:
  case ExprKind::Nondet: break;
  case ExprKind::ZExt: collect_vars(e->lhs, out); break;
  case ExprKind::Ite:
    collect_vars(e->cond, out);
    [[fallthrough]];
  default:
    collect_vars(e->lhs, out);
    collect_vars(e->rhs, out);
  }
}

void collect_vars(const BExpr& e, std::set<std::string>& out)
{
  switch (e.kind()) {
  case BoolKind::Cmp:
    collect_vars(e->lhs, out);
    collect_vars(e->rhs, out);
    break;
  case BoolKind::Var: out.insert(e->name); break;
  default:
    for (const auto& a : e->args) {
      collect_vars(a, out);
    }
  }
}

namespace {

class Substituter {
public:
  explicit Substituter(const Substitution& sub) : sub_(sub) {}

  Expr run(const Expr& e)
  {
    if (auto it = terms_.find(e.get()); it != terms_.end()) {
      return it->second;
    }
    Expr out = e;
    switch (e.kind()) {
    case ExprKind::Var:
      if (auto it = sub_.find(e->name); it != sub_.end()) {
        if (it->second.width() != e.width()) {
          throw std::invalid_argument("substitution changes width of " + e->name);
        }
        out = it->second;
      }
      break;
    case ExprKind::Const:
    case ExprKind::Nondet: break;
    case ExprKind::Add: out = add(run(e->lhs), run(e->rhs)); break;
    case ExprKind::Sub: out = sub(run(e->lhs), run(e->rhs)); break;
    case ExprKind::Mul: out = mul(run(e->lhs), run(e->rhs)); break;
    case ExprKind::ZExt: out = zext(run(e->lhs), e.width()); break;
    case ExprKind::Ite: out = ite(run(e->cond), run(e->lhs), run(e->rhs)); break;
    }
    terms_.emplace(e.get(), out);
    return out;
  }

  BExpr run(const BExpr& e)
  {
    if (auto it = bools_.find(e.get()); it != bools_.end()) {
      return it->second;
    }
    BExpr out = e;
    switch (e.kind()) {
    case BoolKind::True:
    case BoolKind::False:
    case BoolKind::Var: break;
    case BoolKind::Cmp: out = cmp(e->op, run(e->lhs), run(e->rhs)); break;
    case BoolKind::Not: out = bnot(run(e->args[0])); break;
    case BoolKind::Overflow: out = overflow_flag(e->name, run(e->args[0])); break;
    case BoolKind::And:
    case BoolKind::Or: {
      std::vector<BExpr> args;
      for (const auto& a : e->args) {
        args.push_back(run(a));
      }
      out = e.kind() == BoolKind::And ? band(std::move(args)) : bor(std::move(args));
      break;
    }
    }
    bools_.emplace(e.get(), out);
    return out;
  }

private:
  const Substitution& sub_;
  std::unordered_map<const ExprNode*, Expr> terms_;
  std::unordered_map<const BoolNode*, BExpr> bools_;
};

} // namespace

Expr substitute(const Expr& e, const Substitution& sub)
{
  Substituter s(sub);
  return s.run(e);
}

BExpr substitute(const BExpr& e, const Substitution& sub)
{
  Substituter s(sub);
  return s.run(e);
}

Wide Evaluator::eval(const Expr& e)
{
  if (auto it = terms_.find(e.get()); it != terms_.end()) {
    return it->second;
  }
  Wide mask = width_mask(e.width());
  Wide v = 0;
  switch (e.kind()) {
  case ExprKind::Var: {
    auto it = env_.find(e->name);
    if (it == env_.end()) {
      throw std::out_of_range("unbound variable " + e->name);
    }
    v = it->second & mask;
    break;
  }
  case ExprKind::Const: v = e->value; break;
  case ExprKind::Nondet: throw std::logic_error("cannot evaluate nondet");
  case ExprKind::Add: v = (eval(e->lhs) + eval(e->rhs)) & mask; break;
  case ExprKind::Sub: v = (eval(e->lhs) - eval(e->rhs)) & mask; break;
  case ExprKind::Mul: v = (eval(e->lhs) * eval(e->rhs)) & mask; break;
  case ExprKind::ZExt: v = eval(e->lhs); break;
  case ExprKind::Ite: v = eval(e->cond) ? eval(e->lhs) : eval(e->rhs); break;
  }
  terms_.emplace(e.get(), v);
  return v;
}

bool Evaluator::eval(const BExpr& e)
{
  if (auto it = bools_.find(e.get()); it != bools_.end()) {
    return it->second;
  }
  bool v = false;
  switch (e.kind()) {
  case BoolKind::True: v = true; break;
  case BoolKind::False: v = false; break;
  case BoolKind::Cmp: {
    Wide a = eval(e->lhs);
    Wide b = eval(e->rhs);
    switch (e->op) {
    case CmpOp::Eq: v = a == b; break;
    case CmpOp::Ne: v = a != b; break;
    case CmpOp::Lt: v = a < b; break;
    case CmpOp::Le: v = a <= b; break;
    case CmpOp::Gt: v = a > b; break;
    case CmpOp::Ge: v = a >= b; break;
    }
    break;
  }
  case BoolKind::Not: v = !eval(e->args[0]); break;
  case BoolKind::And:
    v = true;
    for (const auto& a : e->args) {
      if (!eval(a)) {
        v = false;
        break;
      }
    }
    break;
  case BoolKind::Or:
    v = false;
    for (const auto& a : e->args) {
      if (eval(a)) {
        v = true;
        break;
      }
    }
    break;
  case BoolKind::Var: {
    auto it = env_.find(e->name);
    if (it == env_.end()) {
      throw std::out_of_range("unbound boolean " + e->name);
    }
    v = it->second != 0;
    break;
  }
  case BoolKind::Overflow: v = eval(e->args[0]); break;
  }
  bools_.emplace(e.get(), v);
  return v;
}

Wide eval(const Expr& e, const Env& env)
{
  Evaluator ev(env);
  return ev.eval(e);
}

bool eval(const BExpr& e, const Env& env)
{
  Evaluator ev(env);
  return ev.eval(e);
}

} // namespace accelbmc

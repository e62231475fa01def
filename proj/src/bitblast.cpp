#include "accelbmc/bitblast.hpp"

#include <sstream>
#include <stdexcept>

namespace accelbmc {

BitBlaster::BitBlaster(Cnf& cnf) : cnf_(cnf)
{
  true_ = fresh();
  cnf_.add({true_});
}

Lit BitBlaster::mk_and(Lit a, Lit b)
{
  const Lit t = true_;
  if (a == -t || b == -t || a == -b) {
    return -t;
  }
  if (a == t) {
    return b;
  }
  if (b == t || a == b) {
    return a;
  }
  auto key = std::minmax(a, b);
  auto it = and_cache_.find(key);
  if (it != and_cache_.end()) {
    return it->second;
  }
  Lit g = fresh();
  cnf_.add({-g, a});
  cnf_.add({-g, b});
  cnf_.add({g, -a, -b});
  and_cache_.emplace(key, g);
  return g;
}

Lit BitBlaster::mk_xor(Lit a, Lit b)
{
  const Lit t = true_;
  if (a == -t) {
    return b;
  }
  if (b == -t) {
    return a;
  }
  if (a == t) {
    return -b;
  }
  if (b == t) {
    return -a;
  }
  if (a == b) {
    return -t;
  }
  if (a == -b) {
    return t;
  }
  // Normalize to positive inputs: x ^ ¬y = ¬(x ^ y).
  bool flip = false;
  if (a < 0) {
    a = -a;
    flip = !flip;
  }
  if (b < 0) {
    b = -b;
    flip = !flip;
  }
  auto key = std::minmax(a, b);
  Lit g;
  auto it = xor_cache_.find(key);
  if (it != xor_cache_.end()) {
    g = it->second;
  } else {
    g = fresh();
    cnf_.add({-g, a, b});
    cnf_.add({-g, -a, -b});
    cnf_.add({g, -a, b});
    cnf_.add({g, a, -b});
    xor_cache_.emplace(key, g);
  }
  return flip ? -g : g;
}

Lit BitBlaster::mk_ite(Lit c, Lit a, Lit b)
{
  if (c == true_) {
    return a;
  }
  if (c == -true_) {
    return b;
  }
  if (a == b) {
    return a;
  }
  return mk_or(mk_and(c, a), mk_and(-c, b));
}

Lit BitBlaster::mk_and(const std::vector<Lit>& xs)
{
  Lit acc = true_;
  for (Lit x : xs) {
    acc = mk_and(acc, x);
  }
  return acc;
}

Lit BitBlaster::mk_or(const std::vector<Lit>& xs)
{
  Lit acc = -true_;
  for (Lit x : xs) {
    acc = mk_or(acc, x);
  }
  return acc;
}

std::vector<Lit> BitBlaster::symbol_bits(const std::string& name, unsigned width)
{
  auto it = symbols_.find(name);
  if (it != symbols_.end()) {
    if (it->second.size() != width) {
      throw std::invalid_argument("symbol " + name + " used at two widths");
    }
    return it->second;
  }
  std::vector<Lit> bits;
  for (unsigned i = 0; i < width; ++i) {
    bits.push_back(fresh());
  }
  symbols_.emplace(name, bits);
  return bits;
}

Lit BitBlaster::bool_symbol(const std::string& name)
{
  auto it = bool_symbols_.find(name);
  if (it != bool_symbols_.end()) {
    return it->second;
  }
  Lit l = fresh();
  bool_symbols_.emplace(name, l);
  return l;
}

std::vector<Lit> BitBlaster::add_bits(const std::vector<Lit>& a, const std::vector<Lit>& b,
                                      Lit carry_in, Lit* carry_out)
{
  std::vector<Lit> out(a.size());
  Lit c = carry_in;
  for (std::size_t i = 0; i < a.size(); ++i) {
    Lit axb = mk_xor(a[i], b[i]);
    out[i] = mk_xor(axb, c);
    c = mk_or(mk_and(a[i], b[i]), mk_and(c, axb));
  }
  if (carry_out != nullptr) {
    *carry_out = c;
  }
  return out;
}

std::vector<Lit> BitBlaster::mul_bits(const std::vector<Lit>& a, const std::vector<Lit>& b)
{
  const std::size_t w = a.size();
  std::vector<Lit> acc(w, -true_);
  for (std::size_t i = 0; i < w; ++i) {
    if (b[i] == -true_) {
      continue;
    }
    std::vector<Lit> partial(w, -true_);
    for (std::size_t j = 0; j + i < w; ++j) {
      partial[j + i] = mk_and(a[j], b[i]);
    }
    acc = add_bits(acc, partial, -true_);
  }
  return acc;
}

Lit BitBlaster::ult(const std::vector<Lit>& a, const std::vector<Lit>& b)
{
  // a - b = a + ~b + 1 carries out exactly when a >= b.
  std::vector<Lit> nb;
  for (Lit x : b) {
    nb.push_back(-x);
  }
  Lit carry;
  add_bits(a, nb, true_, &carry);
  return -carry;
}

Lit BitBlaster::eq(const std::vector<Lit>& a, const std::vector<Lit>& b)
{
  std::vector<Lit> same;
  for (std::size_t i = 0; i < a.size(); ++i) {
    same.push_back(-mk_xor(a[i], b[i]));
  }
  return mk_and(same);
}

std::vector<Lit> BitBlaster::blast(const Expr& e)
{
  auto it = terms_.find(e.get());
  if (it != terms_.end()) {
    return it->second.second;
  }
  const ExprNode& n = *e;
  std::vector<Lit> out;
  switch (n.kind) {
  case ExprKind::Var: out = symbol_bits(n.name, n.width); break;
  case ExprKind::Const:
    for (unsigned i = 0; i < n.width; ++i) {
      out.push_back(((n.value >> i) & 1) != 0 ? true_ : -true_);
    }
    break;
  case ExprKind::Nondet: throw std::invalid_argument("cannot bit-blast a nondet term");
  case ExprKind::Add: out = add_bits(blast(n.lhs), blast(n.rhs), -true_); break;
  case ExprKind::Sub: {
    std::vector<Lit> nb;
    for (Lit x : blast(n.rhs)) {
      nb.push_back(-x);
    }
    out = add_bits(blast(n.lhs), nb, true_);
    break;
  }
  case ExprKind::Mul: {
    // Put a constant operand on the right so its zero bits skip rows.
    if (n.lhs.kind() == ExprKind::Const) {
      out = mul_bits(blast(n.rhs), blast(n.lhs));
    } else {
      out = mul_bits(blast(n.lhs), blast(n.rhs));
    }
    break;
  }
  case ExprKind::ZExt:
    out = blast(n.lhs);
    out.resize(n.width, -true_);
    break;
  case ExprKind::Ite: {
    Lit c = blast(n.cond);
    auto a = blast(n.lhs);
    auto b = blast(n.rhs);
    for (std::size_t i = 0; i < a.size(); ++i) {
      out.push_back(mk_ite(c, a[i], b[i]));
    }
    break;
  }
  }
  terms_.emplace(e.get(), std::make_pair(e, out));
  return out;
}

Lit BitBlaster::blast(const BExpr& e)
{
  auto it = formulas_.find(e.get());
  if (it != formulas_.end()) {
    return it->second.second;
  }
  const BoolNode& n = *e;
  Lit out = true_;
  switch (n.kind) {
  case BoolKind::True: out = true_; break;
  case BoolKind::False: out = -true_; break;
  case BoolKind::Var: out = bool_symbol(n.name); break;
  case BoolKind::Not: out = -blast(n.args[0]); break;
  case BoolKind::Overflow: out = blast(n.args[0]); break;
  case BoolKind::And:
  case BoolKind::Or: {
    std::vector<Lit> xs;
    for (const auto& a : n.args) {
      xs.push_back(blast(a));
    }
    out = n.kind == BoolKind::And ? mk_and(xs) : mk_or(xs);
    break;
  }
  case BoolKind::Cmp: {
    auto a = blast(n.lhs);
    auto b = blast(n.rhs);
    switch (n.op) {
    case CmpOp::Eq: out = eq(a, b); break;
    case CmpOp::Ne: out = -eq(a, b); break;
    case CmpOp::Lt: out = ult(a, b); break;
    case CmpOp::Le: out = -ult(b, a); break;
    case CmpOp::Gt: out = ult(b, a); break;
    case CmpOp::Ge: out = -ult(a, b); break;
    }
    break;
  }
  }
  formulas_.emplace(e.get(), std::make_pair(e, out));
  return out;
}

void BitBlaster::require(const BExpr& e) { cnf_.add({blast(e)}); }

void BitBlaster::annotate() const
{
  for (const auto& [name, bits] : symbols_) {
    std::ostringstream os;
    os << "sym " << name << " " << bits.size();
    for (Lit l : bits) {
      os << " " << l;
    }
    cnf_.comments.push_back(os.str());
  }
  for (const auto& [name, l] : bool_symbols_) {
    cnf_.comments.push_back("sym " + name + " 1 " + std::to_string(l));
  }
}

bool decode(Lit l, const std::vector<bool>& model)
{
  std::size_t v = static_cast<std::size_t>(l > 0 ? l : -l);
  bool val = v < model.size() && model[v];
  return l > 0 ? val : !val;
}

Wide decode(const std::vector<Lit>& bits, const std::vector<bool>& model)
{
  Wide out = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (decode(bits[i], model)) {
      out |= Wide{1} << i;
    }
  }
  return out;
}

} // namespace accelbmc

#pragma once

#include "accelbmc/expr.hpp"
#include "accelbmc/sat.hpp"

#include <map>
#include <unordered_map>

namespace accelbmc {

/// Translates terms and formulas into clauses of `cnf` (Tseitin style, with
/// constant folding and structural hashing of gates). Variables become
/// symbol bit vectors, least significant bit first.
class BitBlaster {
public:
  explicit BitBlaster(Cnf& cnf);

  Lit true_lit() const { return true_; }
  Lit false_lit() const { return -true_; }

  Lit blast(const BExpr& e);
  std::vector<Lit> blast(const Expr& e);

  /// Asserts `e` as a unit clause.
  void require(const BExpr& e);

  Lit mk_and(Lit a, Lit b);
  Lit mk_or(Lit a, Lit b) { return -mk_and(-a, -b); }
  Lit mk_xor(Lit a, Lit b);
  Lit mk_ite(Lit c, Lit a, Lit b);
  Lit mk_and(const std::vector<Lit>& xs);
  Lit mk_or(const std::vector<Lit>& xs);

  std::vector<Lit> symbol_bits(const std::string& name, unsigned width);
  Lit bool_symbol(const std::string& name);

  const std::map<std::string, std::vector<Lit>>& symbols() const { return symbols_; }
  const std::map<std::string, Lit>& bool_symbols() const { return bool_symbols_; }

  /// Adds one `c sym NAME WIDTH lit...` comment per symbol to the CNF.
  void annotate() const;

private:
  Lit fresh() { return cnf_.new_var(); }
  std::vector<Lit> add_bits(const std::vector<Lit>& a, const std::vector<Lit>& b, Lit carry_in,
                            Lit* carry_out = nullptr);
  std::vector<Lit> mul_bits(const std::vector<Lit>& a, const std::vector<Lit>& b);
  Lit ult(const std::vector<Lit>& a, const std::vector<Lit>& b);
  Lit eq(const std::vector<Lit>& a, const std::vector<Lit>& b);

  Cnf& cnf_;
  Lit true_;
  std::map<std::pair<Lit, Lit>, Lit> and_cache_;
  std::map<std::pair<Lit, Lit>, Lit> xor_cache_;
  std::unordered_map<const ExprNode*, std::pair<Expr, std::vector<Lit>>> terms_;
  std::unordered_map<const BoolNode*, std::pair<BExpr, Lit>> formulas_;
  std::map<std::string, std::vector<Lit>> symbols_;
  std::map<std::string, Lit> bool_symbols_;
};

/// Reads a bit vector out of a model indexed by variable (see Solver::model).
Wide decode(const std::vector<Lit>& bits, const std::vector<bool>& model);
bool decode(Lit l, const std::vector<bool>& model);

} // namespace accelbmc

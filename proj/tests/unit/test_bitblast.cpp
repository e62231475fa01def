#include "support/oracles.hpp"

#include "accelbmc/bitblast.hpp"

#include <doctest.h>

using namespace accelbmc;
using namespace accelbmc::testing;

namespace {

struct Blasted {
  Cnf cnf;
  std::map<std::string, std::vector<Lit>> symbols;
};

Blasted blast_required(const BExpr& f)
{
  Blasted b;
  BitBlaster bb(b.cnf);
  bb.require(f);
  b.symbols = bb.symbols();
  return b;
}

// All models projected on the symbols, by blocking each one found.
std::set<std::vector<Wide>> all_models(Blasted b, const std::vector<std::string>& names)
{
  std::set<std::vector<Wide>> out;
  for (;;) {
    Solver s;
    s.add_cnf(b.cnf);
    if (s.solve() != SatResult::Sat) {
      return out;
    }
    auto m = s.model();
    std::vector<Wide> vals;
    std::vector<Lit> block;
    for (const auto& n : names) {
      const auto& bits = b.symbols.at(n);
      vals.push_back(decode(bits, m));
      for (Lit l : bits) {
        block.push_back(decode(l, m) ? -l : l);
      }
    }
    out.insert(vals);
    b.cnf.add(block);
  }
}

} // namespace

TEST_SUITE("bitblast") {

TEST_CASE("models of x1 = x0 + 1 decode to successors mod 16")
{
  Expr x0 = var("x0", 4), x1 = var("x1", 4);
  auto models = all_models(blast_required(cmp(CmpOp::Eq, x1, add(x0, constant(1, 4)))), {"x0", "x1"});
  CHECK(models.size() == 16);
  for (const auto& m : models) {
    CHECK(m[1] == ((m[0] + 1) & 15));
  }
}

TEST_CASE("false blasts to an unsatisfiable CNF")
{
  Blasted b = blast_required(bfalse());
  Solver s;
  s.add_cnf(b.cnf);
  CHECK(s.solve() == SatResult::Unsat);
}

TEST_CASE("x = x has one model per value of x")
{
  Expr x = var("x", 4);
  Cnf cnf;
  BitBlaster bb(cnf);
  bb.require(cmp(CmpOp::Eq, x, x));
  auto bits = bb.blast(x);  // x is otherwise unconstrained
  Blasted b{cnf, {{"x", bits}}};
  CHECK(all_models(b, {"x"}).size() == 16);
}

TEST_CASE("random width-4 formulas agree with exhaustive evaluation")
{
  int sat = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    FormulaGenerator gen(seed, 4);
    BExpr f = gen.formula();
    CAPTURE(to_string(f));
    Cnf cnf;
    BitBlaster bb(cnf);
    bb.require(f);
    Solver s;
    s.add_cnf(cnf);
    SatResult r = s.solve();
    bool expected = exhaustive_sat(f, gen.names(), 4);
    CHECK((r == SatResult::Sat) == expected);
    if (r == SatResult::Sat) {
      ++sat;
      Env env;
      auto m = s.model();
      for (const auto& n : gen.names()) {
        auto it = bb.symbols().find(n);
        env[n] = it == bb.symbols().end() ? 0 : decode(it->second, m);
      }
      CHECK(eval(f, env));
    }
  }
  CHECK(sat > 20);
  CHECK(sat < 200);
}

TEST_CASE("terms blast to their evaluated value at every assignment")
{
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    FormulaGenerator gen(seed, 3, 2);
    Expr t = gen.term(3);
    for (Wide a = 0; a < 8; ++a) {
      for (Wide b = 0; b < 8; ++b) {
        Cnf cnf;
        BitBlaster bb(cnf);
        bb.require(cmp(CmpOp::Eq, var("a", 3), constant(a, 3)));
        bb.require(cmp(CmpOp::Eq, var("b", 3), constant(b, 3)));
        auto bits = bb.blast(t);
        Solver s;
        s.add_cnf(cnf);
        REQUIRE(s.solve() == SatResult::Sat);
        CHECK(decode(bits, s.model()) == eval(t, Env{{"a", a}, {"b", b}}));
      }
    }
  }
}

TEST_CASE("structural hashing shares gates")
{
  Cnf cnf;
  BitBlaster bb(cnf);
  Lit a = bb.bool_symbol("p"), b = bb.bool_symbol("q");
  CHECK(bb.mk_and(a, b) == bb.mk_and(b, a));
  CHECK(bb.mk_and(a, bb.true_lit()) == a);
  CHECK(bb.mk_and(a, -a) == bb.false_lit());
  CHECK(bb.mk_xor(a, a) == bb.false_lit());
}

TEST_CASE("annotations name every symbol")
{
  Cnf cnf;
  BitBlaster bb(cnf);
  bb.require(cmp(CmpOp::Lt, var("x", 4), var("y", 4)));
  bb.annotate();
  int syms = 0;
  for (const auto& c : cnf.comments) {
    syms += c.rfind("sym ", 0) == 0;
  }
  CHECK(syms == 2);
  CHECK(to_dimacs(cnf).find("c sym x 4") != std::string::npos);
}

}

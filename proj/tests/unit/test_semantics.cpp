#include "support/helpers.hpp"

#include "accelbmc/oracle.hpp"
#include "accelbmc/semantics.hpp"

#include <doctest.h>

#include <random>

using namespace accelbmc;
using namespace accelbmc::testing;

namespace {

std::vector<VarDecl> xy(unsigned w)
{
  return {VarDecl{"x", w, true}, VarDecl{"y", w, true}};
}

Expr X(unsigned w = 4) { return var("x", w); }
Expr Y(unsigned w = 4) { return var("y", w); }

// Random term over x, y at width w together with a big-integer evaluator
// that reduces only once, at the end.
struct RandomTerm {
  Expr e;
  std::function<long long(long long, long long)> f;  // exact integer value
};

RandomTerm random_term(std::mt19937_64& rng, unsigned w, int depth)
{
  std::uniform_int_distribution<int> pick(0, depth > 0 ? 5 : 2);
  int k = pick(rng);
  switch (k) {
  case 0: return {X(w), [](long long x, long long) { return x; }};
  case 1: return {Y(w), [](long long, long long y) { return y; }};
  case 2: {
    long long c = std::uniform_int_distribution<long long>(0, (1 << w) - 1)(rng);
    return {constant(c, w), [c](long long, long long) { return c; }};
  }
  default: {
    RandomTerm a = random_term(rng, w, depth - 1);
    RandomTerm b = random_term(rng, w, depth - 1);
    if (k == 3) {
      return {add(a.e, b.e), [a, b](long long x, long long y) { return a.f(x, y) + b.f(x, y); }};
    }
    if (k == 4) {
      return {sub(a.e, b.e), [a, b](long long x, long long y) { return a.f(x, y) - b.f(x, y); }};
    }
    long long c = std::uniform_int_distribution<long long>(0, 5)(rng);
    return {mul(constant(c, w), a.e), [a, c](long long x, long long y) { return c * a.f(x, y); }};
  }
  }
}

long long mod(long long v, unsigned w)
{
  long long m = 1LL << w;
  return ((v % m) + m) % m;
}

// Pairs (pre, post) of the relation formula over {x,y} at width w, by
// checking every candidate pair.
std::set<std::pair<std::uint64_t, std::uint64_t>> pairs_of(const BExpr& rel, unsigned w)
{
  std::set<std::pair<std::uint64_t, std::uint64_t>> out;
  const std::uint64_t n = std::uint64_t{1} << w;
  for (std::uint64_t a = 0; a < n * n; ++a) {
    for (std::uint64_t b = 0; b < n * n; ++b) {
      Env pre{{"x", a % n}, {"y", a / n}};
      Env post{{"x", b % n}, {"y", b / n}};
      if (rel_contains(rel, xy(w), pre, post)) {
        out.emplace(a, b);
      }
    }
  }
  return out;
}

// Same set from the concrete interpreter.
std::set<std::pair<std::uint64_t, std::uint64_t>> interp_pairs(const std::vector<Stmt>& tr, unsigned w)
{
  StateSpace space(xy(w));
  std::set<std::pair<std::uint64_t, std::uint64_t>> out;
  for (auto [p, q] : enum_relation(tr, space)) {
    out.emplace(p, q);
  }
  return out;
}

Stmt random_stmt(std::mt19937_64& rng, unsigned w)
{
  std::uniform_int_distribution<int> pick(0, 5);
  Expr target = pick(rng) % 2 ? X(w) : Y(w);
  switch (pick(rng)) {
  case 0: return Stmt::havoc(target);
  case 1: return Stmt::skip();
  case 2:
  case 3: {
    CmpOp ops[] = {CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge};
    return Stmt::assume(cmp(ops[pick(rng)], random_term(rng, w, 1).e, random_term(rng, w, 1).e));
  }
  default: return Stmt::assign(target, random_term(rng, w, 2).e);
  }
}

} // namespace

TEST_SUITE("semantics") {

TEST_CASE("evaluation wraps around")
{
  CHECK(eval(add(X(8), constant(1, 8)), Env{{"x", 255}}) == 0);
  CHECK(eval(sub(X(32), constant(1, 32)), Env{{"x", 1000000}}) == 999999);
  CHECK(eval(sub(X(32), constant(1, 32)), Env{{"x", 0}}) == 0xffffffffu);
}

TEST_CASE("random terms agree with exact integer arithmetic reduced mod 16")
{
  std::mt19937_64 rng(7);
  for (int t = 0; t < 300; ++t) {
    RandomTerm rt = random_term(rng, 4, 3);
    for (long long x = 0; x < 16; ++x) {
      for (long long y = 0; y < 16; y += 5) {
        CHECK(eval(rt.e, Env{{"x", x}, {"y", y}}) == static_cast<Wide>(mod(rt.f(x, y), 4)));
      }
    }
  }
}

TEST_CASE("evaluating nondet throws")
{
  CHECK_THROWS(eval(nondet(4), Env{}));
}

TEST_CASE("wlp follows the statement table")
{
  BExpr post = cmp(CmpOp::Gt, X(), constant(0, 4));
  CHECK(to_string(wlp(Stmt::assign(X(), add(X(), constant(1, 4))), post)) == "x+1>0");
  CHECK(to_string(wlp(Stmt::skip(), post)) == to_string(post));
  BExpr b = cmp(CmpOp::Lt, Y(), constant(3, 4));
  BExpr w = wlp(Stmt::assume(b), post);
  for (Wide x = 0; x < 16; ++x) {
    for (Wide y = 0; y < 16; ++y) {
      Env env{{"x", x}, {"y", y}};
      CHECK(eval(w, env) == (!eval(b, env) || eval(post, env)));
    }
  }
}

TEST_CASE("wlp agrees with every successor satisfying the postcondition")
{
  std::mt19937_64 rng(11);
  for (int t = 0; t < 120; ++t) {
    Stmt st = random_stmt(rng, 3);
    BExpr post = cmp(CmpOp::Le, random_term(rng, 3, 1).e, random_term(rng, 3, 1).e);
    BExpr pre = wlp(st, post);
    std::set<std::string> syms;
    collect_vars(pre, syms);
    for (Wide x = 0; x < 8; ++x) {
      for (Wide y = 0; y < 8; ++y) {
        Env env{{"x", x}, {"y", y}};
        bool all = true;
        for (const Env& s : post_states(st, env)) {
          all = all && eval(post, s);
        }
        // Fresh havoc symbols are universally quantified.
        bool holds = true;
        std::vector<std::string> fresh;
        for (const auto& s : syms) {
          if (s != "x" && s != "y") {
            fresh.push_back(s);
          }
        }
        REQUIRE(fresh.size() <= 1);
        if (fresh.empty()) {
          holds = eval(pre, env);
        } else {
          for (Wide v = 0; v < 8; ++v) {
            Env e2 = env;
            e2[fresh[0]] = v;
            holds = holds && eval(pre, e2);
          }
        }
        CHECK(holds == all);
      }
    }
  }
}

TEST_CASE("skip relates each state to itself")
{
  auto p = pairs_of(trans_rel(Stmt::skip(), xy(2)), 2);
  CHECK(p.size() == 16);
  for (auto [a, b] : p) {
    CHECK(a == b);
  }
}

TEST_CASE("increment relation over x and y")
{
  BExpr r = trans_rel(Stmt::assign(X(), add(X(), constant(1, 4))), xy(4));
  CHECK(rel_contains(r, xy(4), {{"x", 3}, {"y", 9}}, {{"x", 4}, {"y", 9}}));
  CHECK(rel_contains(r, xy(4), {{"x", 15}, {"y", 9}}, {{"x", 0}, {"y", 9}}));
  CHECK_FALSE(rel_contains(r, xy(4), {{"x", 3}, {"y", 9}}, {{"x", 4}, {"y", 8}}));
  CHECK_FALSE(rel_contains(r, xy(4), {{"x", 3}, {"y", 9}}, {{"x", 5}, {"y", 9}}));
}

TEST_CASE("assume x>0 at width 4 has 15*16 pairs")
{
  StateSpace space(xy(4));
  BExpr r = trans_rel(Stmt::assume(cmp(CmpOp::Gt, X(), constant(0, 4))), xy(4));
  std::size_t n = 0;
  for (std::uint64_t s = 0; s < space.size(); ++s) {
    Env e = space.unpack(s);
    n += rel_contains(r, xy(4), e, e);
  }
  CHECK(n == 15 * 16);
  CHECK(enum_relation({Stmt::assume(cmp(CmpOp::Gt, X(), constant(0, 4)))}, space).size() == 15 * 16);
}

TEST_CASE("transition relations match the interpreter on every state pair")
{
  std::mt19937_64 rng(3);
  for (int t = 0; t < 40; ++t) {
    Stmt st = random_stmt(rng, 2);
    CAPTURE(to_string(st));
    CHECK(pairs_of(trans_rel(st, xy(2)), 2) == interp_pairs({st}, 2));
  }
}

TEST_CASE("composition with the identity")
{
  std::mt19937_64 rng(5);
  for (int t = 0; t < 10; ++t) {
    Stmt st = random_stmt(rng, 2);
    BExpr r = trans_rel(st, xy(2));
    CHECK(pairs_of(compose(identity_rel(xy(2)), r, xy(2)), 2) == pairs_of(r, 2));
  }
}

TEST_CASE("copy_count body composes to x-1, y+1")
{
  std::vector<Stmt> body{Stmt::assign(X(), sub(X(), constant(1, 4))),
                         Stmt::assign(Y(), add(Y(), constant(1, 4)))};
  BExpr r = trace_rel(body, xy(4));
  for (Wide x = 0; x < 16; ++x) {
    Env pre{{"x", x}, {"y", 7}};
    Env post{{"x", (x + 15) & 15}, {"y", 8}};
    CHECK(rel_contains(r, xy(4), pre, post));
  }
}

TEST_CASE("three random statements compose like the explicit relation")
{
  std::mt19937_64 rng(9);
  for (int t = 0; t < 15; ++t) {
    std::vector<Stmt> tr{random_stmt(rng, 2), random_stmt(rng, 2), random_stmt(rng, 2)};
    StateSpace space(xy(2));
    Relation composed = compose(compose(enum_relation({tr[0]}, space), enum_relation({tr[1]}, space)),
                                enum_relation({tr[2]}, space));
    std::set<std::pair<std::uint64_t, std::uint64_t>> expected(composed.begin(), composed.end());
    CHECK(pairs_of(trace_rel(tr, xy(2)), 2) == expected);
  }
}

TEST_CASE("composition is associative on enumerated relations")
{
  std::mt19937_64 rng(13);
  StateSpace space(xy(3));
  for (int t = 0; t < 10; ++t) {
    Relation a = enum_relation({random_stmt(rng, 3)}, space);
    Relation b = enum_relation({random_stmt(rng, 3)}, space);
    Relation c = enum_relation({random_stmt(rng, 3)}, space);
    CHECK(compose(compose(a, b), c) == compose(a, compose(b, c)));
  }
}

TEST_CASE("the empty trace is the identity and [false] is empty")
{
  CHECK(pairs_of(trace_rel({}, xy(2)), 2) == pairs_of(identity_rel(xy(2)), 2));
  CHECK(pairs_of(trace_rel({Stmt::assume(bfalse())}, xy(2)), 2).empty());
}

TEST_CASE("three iterations of the copy_count body at width 8 match the interpreter")
{
  std::vector<Stmt> body{Stmt::assume(cmp(CmpOp::Gt, X(8), constant(0, 8))),
                         Stmt::assign(X(8), sub(X(8), constant(1, 8))),
                         Stmt::assign(Y(8), add(Y(8), constant(1, 8)))};
  std::vector<Stmt> three;
  for (int k = 0; k < 3; ++k) {
    three.insert(three.end(), body.begin(), body.end());
  }
  BExpr r = trace_rel(three, xy(8));
  for (Wide x = 0; x < 256; x += 7) {
    for (Wide y = 0; y < 256; y += 51) {
      Env pre{{"x", x}, {"y", y}};
      Env run = pre;
      bool ok = true;
      for (const Stmt& s : three) {
        ok = ok && exec(s, run);
      }
      if (ok) {
        CHECK(rel_contains(r, xy(8), pre, run));
        Env off = run;
        off["y"] = (run["y"] + 1) & 255;
        CHECK_FALSE(rel_contains(r, xy(8), pre, off));
      } else {
        CHECK(x < 3);
        CHECK_FALSE(rel_contains(r, xy(8), pre, Env{{"x", 0}, {"y", (y + x) & 255}}));
      }
    }
  }
}

}

#include "support/dot_check.hpp"
#include "support/helpers.hpp"
#include "support/random_program.hpp"

#include "accelbmc/oracle.hpp"
#include "accelbmc/semantics.hpp"

#include <doctest.h>

using namespace accelbmc;
using namespace accelbmc::testing;

namespace {

const char* kCopyCount = R"(
unsigned N := *;
unsigned x := N, y := 0;
while (x > 0) {
  x := x - 1;
  y := y + 1;
}
assert(y = N);
)";

const char* kCopyCountBug = R"(
unsigned N := *;
unsigned x := N, y := 0;
while (x > 0) {
  x := x - 1;
  y := y + 1;
}
assert(y != N);
)";

ParseError::Kind parse_error_kind(const std::string& text)
{
  try {
    parse(SourceProgram{text});
  } catch (const ParseError& e) {
    return e.kind();
  }
  FAIL("expected a parse error for: " << text);
  return ParseError::Kind::Syntax;
}

int count_back_edges(const Cfa& cfa)
{
  LoopInfo li = analyze_loops(cfa);
  int n = 0;
  for (bool b : li.is_back_edge) {
    n += b;
  }
  return n;
}

} // namespace

TEST_SUITE("frontend") {

TEST_CASE("copy_count parses into one loop, two assignments, one assert")
{
  Program p = parse(SourceProgram{kCopyCount});
  CHECK(p.width == 32);
  CHECK(p.decls.size() == 3);
  REQUIRE(p.body.size() == 2);
  CHECK(p.body[0].kind == AstStmt::Kind::While);
  CHECK(p.body[0].body.size() == 2);
  CHECK(p.body[0].body[0].kind == AstStmt::Kind::Assign);
  CHECK(p.body[1].kind == AstStmt::Kind::Assert);
}

TEST_CASE("minimal program with a declaration and skip")
{
  Program p = parse(SourceProgram{"unsigned x:=0; skip;"});
  CHECK(p.decls.size() == 1);
  REQUIRE(p.body.size() == 1);
  CHECK(p.body[0].kind == AstStmt::Kind::Skip);
}

TEST_CASE("unclosed loop is a syntax error at end of input")
{
  try {
    parse(SourceProgram{"unsigned x;\nwhile (x>0) {"});
    FAIL("no error");
  } catch (const ParseError& e) {
    CHECK(e.kind() == ParseError::Kind::Syntax);
    CHECK(e.line() == 2);
  }
}

TEST_CASE("diagnostics carry their category")
{
  CHECK(parse_error_kind("unsigned x; y := 1;") == ParseError::Kind::Undeclared);
  CHECK(parse_error_kind("unsigned x, x;") == ParseError::Kind::Duplicate);
  CHECK(parse_error_kind("unsigned x; x := 1 $ 2;") == ParseError::Kind::Lexical);
  CHECK(parse_error_kind("unsigned<4> x := 16;") == ParseError::Kind::Semantic);
  CHECK(parse_error_kind("unsigned x; x := x * x;") == ParseError::Kind::Semantic);
  CHECK(parse_error_kind("unsigned x; x := * + 1;") == ParseError::Kind::Syntax);
}

TEST_CASE("width comes from the declaration or the override")
{
  CHECK(parse(SourceProgram{"unsigned<8> x;"}).width == 8);
  CHECK(parse(SourceProgram{"unsigned<8> x;"}, 4u).width == 4);
  CHECK(parse(SourceProgram{"unsigned N := 10^6;"}).width == 32);
}

TEST_CASE("copy_count_bug lowers to one loop head and an error guarded by y=N")
{
  Cfa cfa = cfa_of(kCopyCountBug);
  LoopInfo li = analyze_loops(cfa);
  CHECK(li.heads.size() == 1);
  auto errs = cfa.error_vertices();
  REQUIRE(errs.size() == 1);
  int into_error = 0;
  for (const auto& e : cfa.edges()) {
    if (e.dst == errs[0]) {
      ++into_error;
      CHECK(to_string(e.stmt) == "[y=N]");
    }
  }
  CHECK(into_error == 1);
}

TEST_CASE("straight-line program of n statements has n+1 vertices and n edges")
{
  for (int n = 1; n <= 6; ++n) {
    std::string text = "unsigned x;";
    for (int i = 0; i < n; ++i) {
      text += " x := x + " + std::to_string(i + 1) + ";";
    }
    Cfa cfa = cfa_of(text);
    CHECK(cfa.num_vertices() == n + 1);
    CHECK(cfa.edges().size() == static_cast<std::size_t>(n));
    CHECK(cfa.error_vertices().empty());
  }
}

TEST_CASE("assert guards are complementary")
{
  Cfa cfa = cfa_of("unsigned<4> x, y; assert(x < y || x = 3);");
  auto errs = cfa.error_vertices();
  REQUIRE(errs.size() == 1);
  auto succ = cfa.successors();
  int src = -1;
  for (const auto& e : cfa.edges()) {
    if (e.dst == errs[0]) {
      src = e.src;
    }
  }
  REQUIRE(src >= 0);
  REQUIRE(succ[src].size() == 2);
  const BExpr ok = cfa.edge(succ[src][0]).stmt.cond;
  const BExpr bad = cfa.edge(succ[src][1]).stmt.cond;
  for (Wide x = 0; x < 16; ++x) {
    for (Wide y = 0; y < 16; ++y) {
      Env env{{"x", x}, {"y", y}};
      CHECK(eval(ok, env) != eval(bad, env));
    }
  }
}

TEST_CASE("loops and asserts map to back edges and error vertices")
{
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    ProgramShape shape;
    shape.loops = static_cast<int>(seed % 3);
    std::string text = ProgramGenerator(seed, shape).generate();
    Cfa cfa = cfa_of(text);
    CAPTURE(text);
    CHECK(count_back_edges(cfa) == shape.loops);
    CHECK(cfa.error_vertices().size() == 1);
  }
}

TEST_CASE("lowering is deterministic")
{
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::string text = ProgramGenerator(seed).generate();
    CHECK(dump_dot(cfa_of(text)) == dump_dot(cfa_of(text)));
  }
}

TEST_CASE("every edge has a distinct occurrence id equal to its index")
{
  Cfa cfa = cfa_of(kCopyCount);
  for (std::size_t i = 0; i < cfa.edges().size(); ++i) {
    CHECK(cfa.edges()[i].id == static_cast<int>(i));
  }
  CHECK_NOTHROW(cfa.validate());
}

TEST_CASE("uninitialized declarations are nondeterministic")
{
  Cfa cfa = cfa_of("unsigned a, b := *, c := 0;");
  CHECK(cfa.find_var("a")->nondet_init);
  CHECK(cfa.find_var("b")->nondet_init);
  CHECK_FALSE(cfa.find_var("c")->nondet_init);
  // c:=0, then the skip standing in for the empty body.
  REQUIRE(cfa.edges().size() == 2);
  CHECK(to_string(cfa.edges()[0].stmt) == "c:=0");
}

TEST_CASE("unreachable assertions are dropped with a warning")
{
  std::vector<std::string> warnings;
  Cfa cfa = lower(parse(SourceProgram{"unsigned x; while (true) { x := x + 1; } assert(x = 0);"}),
                  &warnings);
  CHECK(cfa.error_vertices().empty());
  CHECK(warnings.size() == 1);
}

TEST_CASE("empty body dumps as a single skip edge")
{
  DotShape d = check_dot(dump_dot(cfa_of("unsigned x;")));
  REQUIRE(d.ok);
  CHECK(d.nodes.size() == 3);  // v0, v1 and the start marker
  CHECK(d.edges == 2);
}

TEST_CASE("self_loop self-loop dumps one node with one self-edge")
{
  Cfa cfa = cfa_of(slurp(repo_path("bench/core/self_loop.imp")));
  std::string dot = dump_dot(cfa);
  DotShape d = check_dot(dot);
  REQUIRE(d.ok);
  CHECK(d.nodes.size() == 2);
  CHECK(d.self_loops == 1);
  CHECK(dot.find("label=\"x:=x+1\"") != std::string::npos);
}

TEST_CASE("dumps of random programs are well-formed DOT with error vertices double-circled")
{
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    Cfa cfa = cfa_of(ProgramGenerator(seed).generate());
    std::string dot = dump_dot(cfa);
    DotShape d = check_dot(dot);
    CHECK_MESSAGE(d.ok, d.error);
    CHECK(d.edges == static_cast<int>(cfa.edges().size()) + 1);
    std::size_t circles = 0;
    for (std::size_t at = dot.find("doublecircle"); at != std::string::npos;
         at = dot.find("doublecircle", at + 1)) {
      ++circles;
    }
    CHECK(circles == cfa.error_vertices().size());
  }
}

TEST_CASE("copy_count at width 4 matches a direct interpreter of the source")
{
  // Straight simulation of the source loop for every N.
  Cfa cfa = cfa_of(kCopyCount, 4u);
  Reachability r(cfa);
  CHECK_FALSE(r.error_reachable());
  LoopInfo li = analyze_loops(cfa);
  const int head = li.heads.at(0);
  std::set<std::vector<Wide>> expected;
  for (Wide n = 0; n < 16; ++n) {
    Wide x = n, y = 0;
    expected.insert({n, x, y});
    while (x > 0) {
      x = (x - 1) & 15;
      y = (y + 1) & 15;
      expected.insert({n, x, y});
    }
  }
  std::set<std::vector<Wide>> at_head;
  for (const auto& [v, vals] : project(r, cfa.num_vertices(), {"N", "x", "y"})) {
    if (v == head) {
      at_head.insert(vals);
    }
  }
  CHECK(at_head == expected);
}

}

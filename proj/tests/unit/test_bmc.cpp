#include "support/helpers.hpp"
#include "support/random_program.hpp"

#include "accelbmc/bmc.hpp"
#include "accelbmc/oracle.hpp"

#include <doctest.h>

#include <filesystem>

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

struct Subject {
  std::string name;
  Cfa cfa;
};

// Corpus programs that fit width 4, plus random programs.
std::vector<Subject> subjects()
{
  std::vector<Subject> out;
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(repo_path("bench"))) {
    if (e.path().extension() == ".imp") {
      files.push_back(e.path());
    }
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    try {
      out.push_back({f.filename().string(), cfa_of(slurp(f.string()), 4u)});
    } catch (const ParseError&) {
      // constant too large for width 4
    }
  }
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    ProgramShape shape;
    shape.loops = static_cast<int>(seed % 3);
    shape.num_vars = 2;
    out.push_back({"random " + std::to_string(seed), cfa_of(ProgramGenerator(seed, shape).generate())});
  }
  return out;
}

BmcOptions quick()
{
  BmcOptions o;
  o.conflict_budget = 2000000;
  return o;
}

} // namespace

TEST_SUITE("bmc") {

TEST_CASE("unwinding a loop-free program copies it once")
{
  Cfa cfa = cfa_of("unsigned x; if (x < 3) { x := x + 1; } else { skip; } assert(x != 2);");
  UnwoundDag dag = unwind(cfa, 0);
  CHECK(dag.nodes.size() == static_cast<std::size_t>(cfa.num_vertices()));
  CHECK(dag.arcs.size() == cfa.edges().size());
  CHECK(dag.markers.empty());
  CHECK(dag.error_nodes(cfa).size() == 1);
}

TEST_CASE("unwinding copy_count copies the loop per iteration and cuts the last back edge")
{
  Cfa cfa = cfa_of(kCopyCount);
  LoopInfo li = analyze_loops(cfa);
  const int head = li.heads.at(0);
  for (int k = 0; k <= 5; ++k) {
    UnwoundDag dag = unwind(cfa, k);
    int head_copies = 0;
    for (const auto& n : dag.nodes) {
      head_copies += n.vertex == head;
    }
    CHECK(head_copies == k + 1);
    REQUIRE(dag.markers.size() == 1);
    CHECK(li.is_back_edge[dag.markers[0].edge]);
    CHECK(dag.markers[0].to == -1);
    // Topological order.
    for (const auto& a : dag.arcs) {
      CHECK(a.from < a.to);
    }
  }
}

TEST_CASE("node limit is enforced")
{
  CHECK_THROWS(unwind(cfa_of(kCopyCount), 50, 20));
}

TEST_CASE("copy_count_bug with N=1 needs one unwinding")
{
  Cfa cfa = cfa_of(R"(
unsigned N := *;
unsigned x, y;
assume(N = 1);
x := N;
y := 0;
while (x > 0) { x := x - 1; y := y + 1; }
assert(y != N);
)");
  CHECK(check_safety(cfa, 0).kind == VerdictKind::Unknown);
  Verdict v = check_safety(cfa, 1);
  REQUIRE(v.kind == VerdictKind::Unsafe);
  CHECK(v.bound == 1);
  REQUIRE(v.cex.has_value());
  CHECK(v.cex->initial.at("N") == 1);
  CHECK(v.cex->states.back().at("y") == 1);
  CHECK(replay(cfa, *v.cex));
}

TEST_CASE("copy_count is never proved by plain unwinding at 32 bits")
{
  Cfa cfa = cfa_of(kCopyCount);
  for (int k : {0, 1, 5}) {
    Verdict v = check_safety(cfa, k);
    CHECK(v.kind == VerdictKind::Unknown);
    CHECK(v.live_back_edges.size() == 1);
  }
}

TEST_CASE("verdicts agree with explicit-state reachability at width 4")
{
  int decided = 0;
  for (auto& [name, cfa] : subjects()) {
    CAPTURE(name);
    std::optional<int> mu;
    bool error = false;
    try {
      mu = max_unwinding(cfa, 20);
      error = Reachability(cfa).error_reachable();
    } catch (const StateSpaceTooLarge&) {
      continue;
    }
    if (!mu) {
      continue;
    }
    ++decided;
    // Below the true bound no proof is possible.
    for (int k = 0; k < *mu; k += std::max(1, *mu / 4)) {
      Verdict v = check_safety(cfa, k, quick());
      CHECK(v.kind != VerdictKind::Safe);
      if (v.kind == VerdictKind::Unsafe) {
        CHECK(error);
      }
    }
    Verdict v = check_safety(cfa, *mu, quick());
    CHECK(v.kind == (error ? VerdictKind::Unsafe : VerdictKind::Safe));
    if (v.cex) {
      CHECK(replay(cfa, *v.cex));
      CHECK(v.bound <= *mu);
    }
  }
  CHECK(decided >= 20);
}

TEST_CASE("a bug found at bound k is found at every larger bound")
{
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    Cfa cfa = cfa_of(ProgramGenerator(seed).generate());
    bool seen = false;
    int first = -1;
    for (int k = 0; k <= 6; ++k) {
      Verdict v = check_safety(cfa, k, quick());
      if (seen) {
        CHECK(v.kind == VerdictKind::Unsafe);
        CHECK(v.bound == first);
      }
      if (v.kind == VerdictKind::Unsafe && !seen) {
        seen = true;
        first = v.bound;
      }
    }
  }
}

TEST_CASE("proof bound search stops at the largest loop count")
{
  for (auto& [name, cfa] : subjects()) {
    CAPTURE(name);
    std::optional<int> mu;
    bool error = false;
    try {
      mu = max_unwinding(cfa, 12);
      error = Reachability(cfa).error_reachable();
    } catch (const StateSpaceTooLarge&) {
      continue;
    }
    if (!mu || error) {
      continue;
    }
    ProofBound pb = find_proof_bound(cfa, 13, quick());
    REQUIRE(pb.found);
    CHECK(pb.verdict.kind == VerdictKind::Safe);
    CHECK(pb.k == std::max(1, *mu));
  }
}

TEST_CASE("replay rejects traces that leave the CFA")
{
  Cfa cfa = cfa_of(slurp(repo_path("bench/core/copy_count_bug.imp")));
  Verdict v = check_safety(cfa, 2);
  REQUIRE(v.cex.has_value());
  Counterexample bad = *v.cex;
  REQUIRE(bad.edges.size() >= 2);
  bad.edges.erase(bad.edges.begin());
  CHECK_THROWS_AS(replay(cfa, bad), ReplayError);
  Counterexample good = *v.cex;
  CHECK(replay(cfa, good));
  CHECK(good.states.size() == good.edges.size());
}

TEST_CASE("initial environment zeroes synthesized and initialized variables")
{
  Cfa cfa = cfa_of("unsigned a, b := 4; a := a + b;");
  Env env = initial_env(cfa, Env{{"a", 9}});
  CHECK(env.at("a") == 9);
  CHECK(env.at("b") == 0);
}

TEST_CASE("an expired deadline is a timeout")
{
  BmcOptions o;
  o.solver.deadline = std::chrono::steady_clock::now();
  Cfa cfa = cfa_of(slurp(repo_path("bench/crafted/safe/transfer.imp")));
  CHECK(check_safety(cfa, 60, o).kind == VerdictKind::Timeout);
}

TEST_CASE("the encoding can be written as annotated DIMACS")
{
  BmcOptions o;
  o.dimacs_path = "/tmp/accelbmc_test_copy_count.cnf";
  Verdict v = check_safety(cfa_of(kCopyCount), 2, o);
  Cnf back = parse_dimacs(slurp(o.dimacs_path));
  CHECK(back.clauses.size() == v.cnf_clauses);
  bool has_error = false;
  bool has_sym = false;
  for (const auto& c : back.comments) {
    has_error = has_error || c.rfind("error ", 0) == 0;
    has_sym = has_sym || c.rfind("sym N@0 32 ", 0) == 0;
  }
  CHECK(has_error);
  CHECK(has_sym);
}

}

#include "support/oracles.hpp"

#include "accelbmc/sat.hpp"

#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>

using namespace accelbmc;
using namespace accelbmc::testing;

namespace {

SatResult solve(const Cnf& cnf, std::uint64_t seed = 0, std::vector<bool>* model = nullptr)
{
  SolverOptions o;
  o.seed = seed;
  Solver s(o);
  s.add_cnf(cnf);
  SatResult r = s.solve();
  if (r == SatResult::Sat && model) {
    *model = s.model();
  }
  return r;
}

// Pigeonhole: p pigeons into h holes.
Cnf pigeonhole(int p, int h)
{
  Cnf cnf;
  auto v = [h](int i, int j) { return i * h + j + 1; };
  cnf.num_vars = p * h;
  for (int i = 0; i < p; ++i) {
    std::vector<Lit> cl;
    for (int j = 0; j < h; ++j) {
      cl.push_back(v(i, j));
    }
    cnf.add(cl);
  }
  for (int j = 0; j < h; ++j) {
    for (int a = 0; a < p; ++a) {
      for (int b = a + 1; b < p; ++b) {
        cnf.add({-v(a, j), -v(b, j)});
      }
    }
  }
  return cnf;
}

std::string write_script(const std::string& name, const std::string& body)
{
  std::string path = "/tmp/accelbmc_test_" + name + ".sh";
  std::ofstream f(path);
  f << "#!/bin/sh\n" << body;
  f.close();
  std::string chmod = "chmod +x " + path;
  REQUIRE(std::system(chmod.c_str()) == 0);
  return path;
}

} // namespace

TEST_SUITE("sat") {

TEST_CASE("small unsatisfiable core")
{
  Cnf cnf;
  cnf.num_vars = 2;
  cnf.add({1, 2});
  cnf.add({-1});
  cnf.add({-2});
  CHECK(solve(cnf) == SatResult::Unsat);
}

TEST_CASE("pigeonhole 4 into 3 is unsatisfiable, 3 into 3 is not")
{
  CHECK(solve(pigeonhole(4, 3)) == SatResult::Unsat);
  CHECK(solve(pigeonhole(6, 5)) == SatResult::Unsat);
  std::vector<bool> m;
  REQUIRE(solve(pigeonhole(3, 3), 0, &m) == SatResult::Sat);
  CHECK(satisfies(pigeonhole(3, 3), m));
}

TEST_CASE("random 3-CNF agrees with the truth table")
{
  std::mt19937_64 rng(2024);
  int sat = 0;
  for (int t = 0; t < 120; ++t) {
    int n = 8 + t % 13;  // 8..20 variables
    Cnf cnf = random_kcnf(rng, n, static_cast<int>(n * 4.26));
    std::vector<bool> model;
    SatResult r = solve(cnf, t, &model);
    bool expected = truth_table_sat(cnf);
    REQUIRE(r != SatResult::Unknown);
    CHECK((r == SatResult::Sat) == expected);
    if (r == SatResult::Sat) {
      ++sat;
      CHECK(satisfies(cnf, model));
    }
  }
  // The ratio sits at the threshold, so both outcomes must occur.
  CHECK(sat > 10);
  CHECK(sat < 110);
}

TEST_CASE("assumptions restrict models without committing them")
{
  std::mt19937_64 rng(99);
  for (int t = 0; t < 40; ++t) {
    Cnf cnf = random_kcnf(rng, 12, 40);
    Solver s;
    s.add_cnf(cnf);
    for (int q = 0; q < 4; ++q) {
      std::vector<Lit> assume{(q % 2 ? 1 : -1) * (1 + q), (q / 2 ? 1 : -1) * (7 + q)};
      Cnf with = cnf;
      for (Lit l : assume) {
        with.add({l});
      }
      SatResult r = s.solve(assume);
      CHECK((r == SatResult::Sat) == truth_table_sat(with));
      if (r == SatResult::Sat) {
        CHECK(satisfies(with, s.model()));
      }
    }
    CHECK((s.solve() == SatResult::Sat) == truth_table_sat(cnf));
  }
}

TEST_CASE("fixed seed gives identical results and statistics")
{
  std::mt19937_64 rng(1);
  for (int t = 0; t < 10; ++t) {
    Cnf cnf = random_kcnf(rng, 60, 255);
    SolverOptions o;
    o.seed = 17;
    Solver a(o), b(o);
    a.add_cnf(cnf);
    b.add_cnf(cnf);
    SatResult ra = a.solve();
    SatResult rb = b.solve();
    CHECK(ra == rb);
    CHECK(a.stats().conflicts == b.stats().conflicts);
    CHECK(a.stats().learned == b.stats().learned);
    CHECK(a.stats().decisions == b.stats().decisions);
    if (ra == SatResult::Sat) {
      CHECK(a.model() == b.model());
    }
  }
}

TEST_CASE("conflict budget exhaustion reports Unknown")
{
  SolverOptions o;
  o.conflict_budget = 5;
  Solver s(o);
  s.add_cnf(pigeonhole(8, 7));
  CHECK(s.solve() == SatResult::Unknown);
}

TEST_CASE("expired deadline reports Unknown")
{
  SolverOptions o;
  o.deadline = std::chrono::steady_clock::now();
  Solver s(o);
  s.add_cnf(pigeonhole(9, 8));
  CHECK(s.solve() == SatResult::Unknown);
}

TEST_CASE("DIMACS format")
{
  Cnf empty;
  CHECK(to_dimacs(empty) == "p cnf 0 0\n");
  Cnf one;
  one.num_vars = 2;
  one.add({1, -2});
  CHECK(to_dimacs(one) == "p cnf 2 1\n1 -2 0\n");
}

TEST_CASE("DIMACS round trip preserves the clause multiset")
{
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    Cnf cnf = random_kcnf(rng, 15, 30 + t, 1 + t % 4);
    cnf.comments.push_back("sym x 4 1 2 3 4");
    Cnf back = parse_dimacs(to_dimacs(cnf));
    CHECK(back.num_vars == cnf.num_vars);
    auto a = cnf.clauses;
    auto b = back.clauses;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
    CHECK(back.comments == cnf.comments);
  }
}

TEST_CASE("malformed DIMACS is rejected")
{
  CHECK_THROWS(parse_dimacs("1 2 0\n"));
  CHECK_THROWS(parse_dimacs("p cnf 2 1\n1 x 0\n"));
}

TEST_CASE("external solver output conventions")
{
  Cnf cnf;
  cnf.num_vars = 2;
  cnf.add({1, 2});
  std::vector<bool> model;
  std::string sat = write_script("sat", "echo 's SATISFIABLE'\necho 'v -1 2 0'\nexit 10\n");
  CHECK(solve_external(cnf, sat, &model) == SatResult::Sat);
  REQUIRE(model.size() >= 3);
  CHECK_FALSE(model[1]);
  CHECK(model[2]);
  std::string unsat = write_script("unsat", "echo 's UNSATISFIABLE'\nexit 20\n");
  CHECK(solve_external(cnf, unsat, nullptr) == SatResult::Unsat);
  std::string code_only = write_script("code", "exit 20\n");
  CHECK(solve_external(cnf, code_only, nullptr) == SatResult::Unsat);
  std::string silent = write_script("silent", "exit 0\n");
  CHECK(solve_external(cnf, silent, nullptr) == SatResult::Unknown);
}

}

#include "lff/sat.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <chrono>
#include <set>
#include <sstream>

using namespace lff::sat;

namespace {

Cnf toCnf(int n, const std::vector<oracle::Clause> &clauses) {
  Cnf c;
  c.numVars = n;
  c.clauses = clauses;
  return c;
}

std::vector<int> allVars(int n) {
  std::vector<int> v;
  for (int i = 1; i <= n; ++i)
    v.push_back(i);
  return v;
}

} // namespace

TEST(Sat, EmptyFormulaIsSat) {
  Cnf c;
  c.numVars = 3;
  EXPECT_EQ(solve(c).status, Status::Sat);
}

TEST(Sat, EmptyClauseIsUnsat) {
  Cnf c;
  c.numVars = 1;
  c.add({});
  EXPECT_EQ(solve(c).status, Status::Unsat);
}

TEST(Sat, UnitPropagationChain) {
  Cnf c;
  c.numVars = 4;
  c.add({1});
  c.add({-1, 2});
  c.add({-2, 3});
  c.add({-3, 4});
  auto r = solve(c);
  ASSERT_EQ(r.status, Status::Sat);
  for (int v = 1; v <= 4; ++v)
    EXPECT_TRUE(r.value(v));
}

TEST(Sat, DuplicateAndTautologicalLiterals) {
  Cnf c;
  c.numVars = 2;
  c.add({1, 1, -1});
  c.add({2, 2});
  c.add({-2, -2});
  EXPECT_EQ(solve(c).status, Status::Unsat);
}

TEST(Sat, RandomCnfMatchesTruthTable) {
  std::mt19937 rng(20240501);
  int satCount = 0;
  for (int round = 0; round < 600; ++round) {
    const int n = std::uniform_int_distribution<int>(1, 12)(rng);
    const int m = std::uniform_int_distribution<int>(1, 60)(rng);
    const auto clauses = oracle::random_cnf(rng, n, m);
    const auto truth = oracle::truth_table(n, clauses);
    const auto cnf = toCnf(n, clauses);
    const auto r = solve(cnf);
    ASSERT_EQ(r.status == Status::Sat, truth.sat) << "round " << round;
    if (r.status == Status::Sat)
      EXPECT_TRUE(satisfies(cnf, r.model));
    satCount += truth.sat;

    // projected counts over a random prefix of the variables
    const int k = std::uniform_int_distribution<int>(1, n)(rng);
    std::vector<int> proj;
    for (int v = 1; v <= k; ++v)
      proj.push_back(v);
    const auto e = enumerate_models(cnf, proj, 1u << 13);
    ASSERT_TRUE(e.exhausted);
    EXPECT_EQ(e.models.size(), oracle::projected_count(n, clauses, proj)) << "round " << round;
  }
  // the generator must exercise both outcomes
  EXPECT_GT(satCount, 50);
  EXPECT_LT(satCount, 550);
}

TEST(Sat, FullModelCountMatchesTruthTable) {
  std::mt19937 rng(7);
  for (int round = 0; round < 100; ++round) {
    const int n = std::uniform_int_distribution<int>(1, 10)(rng);
    const auto clauses = oracle::random_cnf(rng, n, std::uniform_int_distribution<int>(1, 30)(rng));
    const auto e = enumerate_models(toCnf(n, clauses), allVars(n), 1u << 12);
    EXPECT_TRUE(e.exhausted);
    EXPECT_EQ(e.models.size(), oracle::truth_table(n, clauses).models);
  }
}

TEST(Sat, EnumerationLimitIsNotExhaustion) {
  Cnf c;
  c.numVars = 3;
  const auto v = allVars(3);
  auto e = enumerate_models(c, v, 5);
  EXPECT_EQ(e.models.size(), 5u);
  EXPECT_FALSE(e.exhausted);
  e = enumerate_models(c, v, 8);
  EXPECT_EQ(e.models.size(), 8u);
  // eight found, but only the next call proves there is no ninth
  e = enumerate_models(c, v, 9);
  EXPECT_EQ(e.models.size(), 8u);
  EXPECT_TRUE(e.exhausted);
}

class Pigeonhole : public ::testing::TestWithParam<int> {};

TEST_P(Pigeonhole, UnsatWithinTwoSeconds) {
  const int n = GetParam();
  int vars = 0;
  const auto clauses = oracle::pigeonhole(n + 1, n, vars);
  const auto start = std::chrono::steady_clock::now();
  const auto r = solve(toCnf(vars, clauses), {}, Budget::seconds(2));
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_EQ(r.status, Status::Unsat);
  EXPECT_LT(secs, 2.0);
}

INSTANTIATE_TEST_SUITE_P(Sizes, Pigeonhole, ::testing::Values(1, 2, 3, 4, 5, 6));

TEST(Sat, PigeonholeWithEqualCountsIsSat) {
  int vars = 0;
  const auto clauses = oracle::pigeonhole(6, 6, vars);
  const auto cnf = toCnf(vars, clauses);
  const auto r = solve(cnf);
  ASSERT_EQ(r.status, Status::Sat);
  EXPECT_TRUE(satisfies(cnf, r.model));
}

TEST(Sat, AssumptionsAndFailedCore) {
  Solver s;
  s.reserveVars(4);
  s.addClause({-1, -2});
  s.addClause({3, 4});
  const Lit a[] = {1, 2, 3};
  auto r = s.solve(a);
  ASSERT_EQ(r.status, Status::Unsat);
  std::set<Lit> core(r.failedAssumptions.begin(), r.failedAssumptions.end());
  EXPECT_TRUE(core.count(1) && core.count(2));
  EXPECT_FALSE(core.count(3));
  // assumptions do not persist
  EXPECT_EQ(s.solve().status, Status::Sat);
  const Lit b[] = {1, -3};
  r = s.solve(b);
  ASSERT_EQ(r.status, Status::Sat);
  EXPECT_TRUE(r.value(1));
  EXPECT_FALSE(r.value(2));
  EXPECT_TRUE(r.value(4));
}

TEST(Sat, FailedAssumptionsAreAnUnsatCore) {
  std::mt19937 rng(99);
  int checked = 0;
  for (int round = 0; round < 300; ++round) {
    const int n = std::uniform_int_distribution<int>(2, 10)(rng);
    auto clauses = oracle::random_cnf(rng, n, std::uniform_int_distribution<int>(1, 25)(rng));
    std::vector<Lit> assumptions;
    for (int v = 1; v <= n; ++v)
      if (rng() % 2)
        assumptions.push_back(rng() % 2 ? v : -v);
    const auto r = solve(toCnf(n, clauses), assumptions);
    auto withUnits = clauses;
    for (Lit l : assumptions)
      withUnits.push_back({l});
    ASSERT_EQ(r.status == Status::Sat, oracle::truth_table(n, withUnits).sat);
    if (r.status != Status::Unsat)
      continue;
    for (Lit l : r.failedAssumptions)
      EXPECT_NE(std::find(assumptions.begin(), assumptions.end(), l), assumptions.end());
    auto coreOnly = clauses;
    for (Lit l : r.failedAssumptions)
      coreOnly.push_back({l});
    EXPECT_FALSE(oracle::truth_table(n, coreOnly).sat);
    ++checked;
  }
  EXPECT_GT(checked, 20);
}

TEST(Sat, IncrementalClauseAddition) {
  Solver s;
  s.reserveVars(3);
  s.addClause({1, 2, 3});
  EXPECT_EQ(s.solve().status, Status::Sat);
  s.addClause({-1});
  s.addClause({-2});
  auto r = s.solve();
  ASSERT_EQ(r.status, Status::Sat);
  EXPECT_TRUE(r.value(3));
  s.addClause({-3});
  EXPECT_EQ(s.solve().status, Status::Unsat);
}

TEST(Sat, ConflictBudgetGivesUnknown) {
  int vars = 0;
  const auto clauses = oracle::pigeonhole(9, 8, vars);
  Budget b;
  b.maxConflicts = 10;
  const auto r = solve(toCnf(vars, clauses), {}, b);
  EXPECT_EQ(r.status, Status::Unknown);
  EXPECT_EQ(r.reason, UnknownReason::ConflictBudget);
}

TEST(Sat, ExpiredDeadlineGivesUnknown) {
  int vars = 0;
  const auto clauses = oracle::pigeonhole(10, 9, vars);
  Budget b;
  b.deadline = Clock::now();
  const auto r = solve(toCnf(vars, clauses), {}, b);
  EXPECT_EQ(r.status, Status::Unknown);
  EXPECT_EQ(r.reason, UnknownReason::Timeout);
}

TEST(Cardinality, AtMostKMatchesCounting) {
  for (int n = 1; n <= 6; ++n)
    for (int k = 0; k <= n; ++k) {
      std::vector<Lit> lits = allVars(n);
      const auto e = add_at_most_k(lits, k, n + 1);
      Cnf c;
      c.numVars = n + e.numAux;
      c.clauses = e.clauses;
      // each assignment of the n inputs extends to a model iff at most k are true
      const auto en = enumerate_models(c, lits, 1u << 7);
      ASSERT_TRUE(en.exhausted);
      std::uint64_t expected = 0;
      for (std::uint32_t bits = 0; bits < (1u << n); ++bits)
        expected += std::popcount(bits) <= k;
      EXPECT_EQ(en.models.size(), expected) << "n=" << n << " k=" << k;
    }
}

TEST(Cardinality, NegativeKThrows) {
  const std::vector<Lit> lits{1, 2};
  EXPECT_THROW(add_at_most_k(lits, -1, 3), std::invalid_argument);
}

TEST(Dimacs, RoundTripPreservesStatus) {
  std::mt19937 rng(3);
  for (int round = 0; round < 50; ++round) {
    const int n = std::uniform_int_distribution<int>(1, 10)(rng);
    const auto cnf = toCnf(n, oracle::random_cnf(rng, n, 20));
    std::stringstream ss;
    write_dimacs(ss, cnf);
    const auto back = read_dimacs(ss);
    EXPECT_EQ(back.numVars, cnf.numVars);
    EXPECT_EQ(back.clauses, cnf.clauses);
    EXPECT_EQ(solve(back).status, solve(cnf).status);
  }
}

TEST(Dimacs, CommentsAndLayout) {
  std::istringstream in("c hello\np cnf 3 2\n1 -2\n 0\nc mid\n3 0\n");
  const auto cnf = read_dimacs(in);
  EXPECT_EQ(cnf.numVars, 3);
  ASSERT_EQ(cnf.clauses.size(), 2u);
  EXPECT_EQ(cnf.clauses[0], (std::vector<Lit>{1, -2}));
}

TEST(Dimacs, MalformedInputThrows) {
  for (const char *bad : {"1 2 0\n", "p cnf 2 1\n3 0\n", "p cnf 2 2\n1 0\n", "p dnf 2 1\n1 0\n",
                          "p cnf 2 1\n1 x 0\n"}) {
    std::istringstream in(bad);
    EXPECT_THROW(read_dimacs(in), std::runtime_error) << bad;
  }
}

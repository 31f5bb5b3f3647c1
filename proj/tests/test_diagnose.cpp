#include "common.hpp"
#include "lff/diagnose.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

using namespace lff;
using testing_util::typed;

namespace {

// Exhaustive check that some interpretation satisfies every constraint in `subset`.
bool subsetSatisfiable(const TypedProblem &tp, const DomainAssignment &da,
                       const std::vector<int> &subset) {
  bool found = false;
  for_each_interpretation(tp, da, [&](const Interpretation &m) {
    bool all = true;
    for (int i : subset)
      if (!eval_constraint(tp, m, i)) {
        all = false;
        break;
      }
    found = all;
    return !found;
  });
  return found;
}

int bruteMaxSatisfied(const TypedProblem &tp, const DomainAssignment &da) {
  int best = 0;
  const int n = static_cast<int>(tp.constraints.size());
  for_each_interpretation(tp, da, [&](const Interpretation &m) {
    int k = 0;
    for (int i = 0; i < n; ++i)
      k += eval_constraint(tp, m, i);
    best = std::max(best, k);
    return true;
  });
  return best;
}

std::vector<int> without(const std::vector<int> &v, std::size_t skip) {
  std::vector<int> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (i != skip)
      out.push_back(v[i]);
  return out;
}

std::string slurp(const std::string &path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char *kThree = "Sorts:\n s.\nVocabulary:\n predicate p.\n predicate q.\nConstraints:\n"
                     " p.\n ~p.\n q.\n";

} // namespace

TEST(Mus, ThreeConstraints) {
  const auto tp = typed(kThree);
  ASSERT_TRUE(tp);
  const auto r = high_level_mus(*tp, DomainAssignment{{1}});
  EXPECT_EQ(r.kind, DiagnosisKind::HighLevelMUS);
  EXPECT_EQ(r.constraints, (std::vector<int>{0, 1}));
  EXPECT_TRUE(r.minimal);
  const auto text = render_report(*tp, r);
  EXPECT_NE(text.find("line 7"), std::string::npos);
  EXPECT_NE(text.find("line 8"), std::string::npos);
  EXPECT_EQ(text.find("line 9"), std::string::npos);
}

TEST(Approx, ThreeConstraints) {
  const auto tp = typed(kThree);
  const auto r = approximate_solution(*tp, DomainAssignment{{1}});
  EXPECT_EQ(r.kind, DiagnosisKind::Approximate);
  EXPECT_EQ(r.satisfiedCount, 2);
  EXPECT_EQ(r.total, 3);
  ASSERT_EQ(r.violated.size(), 1u);
  EXPECT_TRUE(r.violated[0] == 0 || r.violated[0] == 1);
  ASSERT_TRUE(r.interp);
  EXPECT_TRUE(eval_constraint(*tp, *r.interp, 2));
}

TEST(Diagnose, SatisfiableInputHasNothingToDiagnose) {
  const auto o = diagnose(testing_util::kMary, DiagnoseMode::Mus);
  EXPECT_EQ(o.solveKind, OutcomeKind::Solutions);
  ASSERT_TRUE(o.report);
  EXPECT_EQ(o.report->kind, DiagnosisKind::NothingToDiagnose);
}

TEST(Diagnose, InputErrorsPassThrough) {
  const auto o = diagnose("Sorts:\n s.\nVocabulary:\nConstraints:\n q(x).\n", DiagnoseMode::Mus);
  EXPECT_EQ(o.solveKind, OutcomeKind::InputErrors);
  EXPECT_FALSE(o.report);
  EXPECT_FALSE(o.diagnostics.empty());
}

TEST(Diagnose, ModesOnContradiction) {
  const auto mus = diagnose(kThree, DiagnoseMode::Mus);
  EXPECT_EQ(mus.solveKind, OutcomeKind::NoSolution);
  ASSERT_TRUE(mus.report);
  EXPECT_EQ(mus.report->constraints, (std::vector<int>{0, 1}));
  EXPECT_EQ(mus.report->da.sizes, std::vector<int>{1});

  const auto approx = diagnose(kThree, DiagnoseMode::Approx);
  ASSERT_TRUE(approx.report);
  EXPECT_EQ(approx.report->satisfiedCount, 2);

  const auto clauses = diagnose(kThree, DiagnoseMode::Clauses);
  ASSERT_TRUE(clauses.report);
  EXPECT_EQ(clauses.report->kind, DiagnosisKind::LowLevelMUS);
  ASSERT_EQ(clauses.report->clauses.size(), 2u);
  std::set<int> from;
  for (const auto &c : clauses.report->clauses)
    from.insert(c.provenance.constraint);
  EXPECT_EQ(from, (std::set<int>{0, 1}));
}

TEST(LowLevelMus, RandomGroundingsAreMinimal) {
  oracle::ProblemGen gen(5150);
  int checked = 0;
  for (int attempt = 0; attempt < 3000 && checked < 40; ++attempt) {
    const auto rp = gen.next(5);
    const auto tp = typed(rp.text);
    ASSERT_TRUE(tp) << rp.text;
    const DomainAssignment da{rp.sizes};
    const auto g = ground(*tp, da);
    if (sat::solve(g.cnf.cnf).status != sat::Status::Unsat)
      continue;
    const auto r = low_level_mus(g.cnf);
    ASSERT_EQ(r.kind, DiagnosisKind::LowLevelMUS);
    ASSERT_TRUE(r.minimal);
    auto cnfOf = [&](std::size_t skip) {
      sat::Cnf c;
      c.numVars = g.cnf.cnf.numVars;
      for (std::size_t i = 0; i < r.clauses.size(); ++i)
        if (i != skip)
          c.clauses.push_back(r.clauses[i].literals);
      return c;
    };
    EXPECT_EQ(sat::solve(cnfOf(r.clauses.size())).status, sat::Status::Unsat) << rp.text;
    for (std::size_t i = 0; i < r.clauses.size(); ++i) {
      EXPECT_EQ(r.clauses[i].literals, g.cnf.cnf.clauses[static_cast<std::size_t>(r.clauses[i].index)]);
      EXPECT_EQ(sat::solve(cnfOf(i)).status, sat::Status::Sat) << rp.text;
    }
    ++checked;
  }
  EXPECT_GE(checked, 40);
}

// Random over-constrained problems: the reported core is re-checked by
// exhaustive evaluation, and the approximate solution against the true optimum.
TEST(DiagnosisOracle, RandomOverConstrained) {
  oracle::ProblemGen gen(8086);
  int checked = 0, multi = 0;
  for (int attempt = 0; attempt < 20000 && checked < 120; ++attempt) {
    const auto rp = gen.next(8);
    const auto tp = typed(rp.text);
    ASSERT_TRUE(tp) << rp.text;
    const DomainAssignment da{rp.sizes};
    if (interpretation_space(*tp, da) > 20'000)
      continue;
    std::vector<int> all(tp->constraints.size());
    for (std::size_t i = 0; i < all.size(); ++i)
      all[i] = static_cast<int>(i);
    if (subsetSatisfiable(*tp, da, all))
      continue;

    const auto mus = high_level_mus(*tp, da);
    ASSERT_EQ(mus.kind, DiagnosisKind::HighLevelMUS) << rp.text;
    ASSERT_TRUE(mus.minimal);
    ASSERT_FALSE(mus.constraints.empty());
    EXPECT_FALSE(subsetSatisfiable(*tp, da, mus.constraints)) << rp.text;
    for (std::size_t i = 0; i < mus.constraints.size(); ++i)
      EXPECT_TRUE(subsetSatisfiable(*tp, da, without(mus.constraints, i))) << rp.text;
    multi += mus.constraints.size() > 1;

    const auto approx = approximate_solution(*tp, da);
    ASSERT_EQ(approx.kind, DiagnosisKind::Approximate);
    EXPECT_TRUE(approx.minimal);
    EXPECT_EQ(approx.satisfiedCount, bruteMaxSatisfied(*tp, da)) << rp.text;
    ASSERT_TRUE(approx.interp);
    const auto truth = check_constraints(*approx.interp, *tp);
    std::vector<int> violated;
    for (std::size_t i = 0; i < truth.size(); ++i)
      if (!truth[i])
        violated.push_back(static_cast<int>(i));
    EXPECT_EQ(violated, approx.violated);
    EXPECT_EQ(static_cast<int>(truth.size() - violated.size()), approx.satisfiedCount);
    ++checked;
  }
  EXPECT_GE(checked, 100);
  EXPECT_GT(multi, 10);
}

TEST(Diagnose, OverConstrainedLogicGames) {
  auto text = slurp(std::string(LFF_CORPUS_DIR) + "/logic-games/problem.lff");
  ASSERT_FALSE(text.empty());
  // the Buccaneers lost to the Eagles in the unique solution
  text += "  beat(Buccaneers,Eagles).\n";
  const auto o = diagnose(text, DiagnoseMode::Mus);
  ASSERT_EQ(o.solveKind, OutcomeKind::NoSolution) << o.message;
  ASSERT_TRUE(o.report);
  const int added = static_cast<int>(o.typed->constraints.size()) - 1;
  const auto &core = o.report->constraints;
  EXPECT_NE(std::find(core.begin(), core.end(), added), core.end());
  EXPECT_LT(core.size(), o.typed->constraints.size());
  EXPECT_NE(render_report(*o.typed, *o.report).find("beat(Buccaneers,Eagles)"), std::string::npos);
}

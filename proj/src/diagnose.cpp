#include "lff/diagnose.hpp"

#include "lff/evaluator.hpp"

#include <algorithm>
#include <sstream>

namespace lff {

using sat::Lit;

std::string_view diagnosis_kind_name(DiagnosisKind kind) {
  switch (kind) {
  case DiagnosisKind::HighLevelMUS:
    return "mus";
  case DiagnosisKind::LowLevelMUS:
    return "clauses";
  case DiagnosisKind::Approximate:
    return "approx";
  case DiagnosisKind::NothingToDiagnose:
    return "nothing-to-diagnose";
  }
  return "nothing-to-diagnose";
}

namespace {

// Constraint clauses carry a selector: clause | ~s. Axioms stay hard.
struct Relaxed {
  Grounding g;
  sat::Solver solver;
  std::vector<Lit> selectors; // per constraint
  int nextVar = 0;
};

Relaxed relax(const TypedProblem &tp, const DomainAssignment &da) {
  Relaxed r;
  r.g = ground(tp, da);
  const int base = r.g.cnf.cnf.numVars;
  const auto count = tp.constraints.size();
  for (std::size_t i = 0; i < count; ++i)
    r.selectors.push_back(base + 1 + static_cast<int>(i));
  r.nextVar = base + static_cast<int>(count) + 1;
  r.solver.reserveVars(r.nextVar - 1);
  const auto &cnf = r.g.cnf;
  for (std::size_t c = 0; c < cnf.cnf.clauses.size(); ++c) {
    auto clause = cnf.cnf.clauses[c];
    const auto &prov = cnf.provenance[c];
    if (!prov.isAxiom())
      clause.push_back(-r.selectors[static_cast<std::size_t>(prov.constraint)]);
    r.solver.addClause(clause);
  }
  return r;
}

// Keeps only the members of `from` that appear in `failed`, in order.
std::vector<Lit> restrict(const std::vector<Lit> &from, const std::vector<Lit> &failed) {
  std::vector<Lit> out;
  for (Lit l : from)
    if (std::find(failed.begin(), failed.end(), l) != failed.end())
      out.push_back(l);
  return out;
}

// Deletion-based shrinking of an unsatisfiable assumption set. Returns false
// if the budget ran out before minimality was established.
bool shrink(sat::Solver &solver, std::vector<Lit> &core, const sat::Budget &budget) {
  std::size_t i = 0;
  while (i < core.size()) {
    std::vector<Lit> trial = core;
    trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(i));
    const auto r = solver.solve(trial, budget);
    if (r.status == sat::Status::Unknown)
      return false;
    if (r.status == sat::Status::Unsat)
      core = restrict(trial, r.failedAssumptions);
    else
      ++i;
  }
  return true;
}

DiagnosisReport nothing(const DomainAssignment &da) {
  DiagnosisReport r;
  r.kind = DiagnosisKind::NothingToDiagnose;
  r.da = da;
  r.message = "nothing to diagnose: the problem has a model at these sizes";
  return r;
}

} // namespace

DiagnosisReport high_level_mus(const TypedProblem &tp, const DomainAssignment &da,
                               const sat::Budget &budget) {
  auto rx = relax(tp, da);
  const auto first = rx.solver.solve(rx.selectors, budget);
  if (first.status == sat::Status::Sat)
    return nothing(da);

  DiagnosisReport report;
  report.kind = DiagnosisKind::HighLevelMUS;
  report.da = da;
  report.total = static_cast<int>(tp.constraints.size());
  std::vector<Lit> core = rx.selectors;
  if (first.status == sat::Status::Unknown) {
    report.minimal = false;
    report.message = "budget exhausted; the core is not minimised";
  } else {
    core = restrict(rx.selectors, first.failedAssumptions);
    if (!shrink(rx.solver, core, budget)) {
      report.minimal = false;
      report.message = "budget exhausted; the core may not be minimal";
    }
  }
  for (Lit s : core)
    report.constraints.push_back(s - rx.selectors.front());
  return report;
}

DiagnosisReport low_level_mus(const CnfInstance &inst, const sat::Budget &budget) {
  sat::Solver solver;
  const int base = inst.cnf.numVars;
  const auto count = inst.cnf.clauses.size();
  solver.reserveVars(base + static_cast<int>(count));
  std::vector<Lit> selectors;
  for (std::size_t c = 0; c < count; ++c) {
    const Lit t = base + 1 + static_cast<int>(c);
    selectors.push_back(t);
    auto clause = inst.cnf.clauses[c];
    clause.push_back(-t);
    solver.addClause(clause);
  }
  const auto first = solver.solve(selectors, budget);
  if (first.status == sat::Status::Sat)
    return nothing({});

  DiagnosisReport report;
  report.kind = DiagnosisKind::LowLevelMUS;
  std::vector<Lit> core = selectors;
  if (first.status == sat::Status::Unknown) {
    report.minimal = false;
    report.message = "budget exhausted; the core is not minimised";
  } else {
    core = restrict(selectors, first.failedAssumptions);
    if (!shrink(solver, core, budget)) {
      report.minimal = false;
      report.message = "budget exhausted; the core may not be minimal";
    }
  }
  for (Lit t : core) {
    const auto c = static_cast<std::size_t>(t - base - 1);
    report.clauses.push_back({static_cast<int>(c), inst.cnf.clauses[c], inst.provenance[c]});
  }
  report.total = static_cast<int>(count);
  return report;
}

DiagnosisReport approximate_solution(const TypedProblem &tp, const DomainAssignment &da,
                                     const sat::Budget &budget) {
  const int total = static_cast<int>(tp.constraints.size());
  {
    auto rx = relax(tp, da);
    if (rx.solver.solve(rx.selectors, budget).status == sat::Status::Sat)
      return nothing(da);
  }

  DiagnosisReport report;
  report.kind = DiagnosisKind::Approximate;
  report.da = da;
  report.total = total;

  auto finish = [&](const Relaxed &rx, const sat::SatResult &r) {
    auto m = decode(r.model, rx.g, tp);
    const auto truth = check_constraints(m, tp);
    report.violated.clear();
    for (int i = 0; i < total; ++i)
      if (!truth[static_cast<std::size_t>(i)])
        report.violated.push_back(i);
    report.satisfiedCount = total - static_cast<int>(report.violated.size());
    report.interp = std::move(m);
  };

  for (int k = 1; k <= total; ++k) {
    auto rx = relax(tp, da);
    std::vector<Lit> relaxedLits;
    for (Lit s : rx.selectors)
      relaxedLits.push_back(-s);
    const auto enc = sat::add_at_most_k(relaxedLits, k, rx.nextVar);
    rx.solver.reserveVars(rx.nextVar - 1 + enc.numAux);
    for (const auto &c : enc.clauses)
      rx.solver.addClause(c);
    const auto r = rx.solver.solve({}, budget);
    if (r.status == sat::Status::Sat) {
      finish(rx, r);
      return report;
    }
    if (r.status == sat::Status::Unknown)
      break;
  }

  // Budget exhausted: fall back to any interpretation of the axioms.
  auto rx = relax(tp, da);
  const auto r = rx.solver.solve({}, sat::Budget::seconds(1.0));
  report.minimal = false;
  report.message = "budget exhausted; the approximation may not be optimal";
  if (r.status == sat::Status::Sat)
    finish(rx, r);
  return report;
}

DiagnoseOutcome diagnose(std::string_view text, DiagnoseMode mode, const SolveOptions &opts) {
  DiagnoseOutcome out;
  try {
    auto prep = prepare(text);
    out.diagnostics = prep.diagnostics;
    if (!prep.typed) {
      out.solveKind = OutcomeKind::InputErrors;
      return out;
    }
    out.typed = prep.typed;
    SolveOptions sopts = opts;
    sopts.mode = Mode::Solve;
    sopts.maxModels = 1;
    const auto solved = solve_typed(prep.typed, sopts);
    out.solveKind = solved.kind;
    out.message = solved.message;
    if (solved.kind == OutcomeKind::Solutions) {
      out.report = nothing(solved.models.front().da);
      return out;
    }
    if (solved.kind != OutcomeKind::NoSolution || solved.searched.empty()) {
      if (solved.kind == OutcomeKind::InputErrors)
        out.diagnostics.insert(out.diagnostics.end(), solved.diagnostics.begin(),
                               solved.diagnostics.end());
      return out;
    }
    const auto &da = solved.searched.front();
    const auto budget = sat::Budget::seconds(opts.deadlineSecs);
    switch (mode) {
    case DiagnoseMode::Mus:
      out.report = high_level_mus(*prep.typed, da, budget);
      break;
    case DiagnoseMode::Approx:
      out.report = approximate_solution(*prep.typed, da, budget);
      break;
    case DiagnoseMode::Clauses: {
      GroundOptions gopts;
      gopts.atomCap = opts.atomCap;
      auto g = ground(*prep.typed, da, gopts);
      out.report = low_level_mus(g.cnf, budget);
      out.report->da = da;
      break;
    }
    }
  } catch (const std::exception &e) {
    out.solveKind = OutcomeKind::InternalError;
    out.message = e.what();
  }
  return out;
}

std::string render_report(const TypedProblem &tp, const DiagnosisReport &r) {
  std::ostringstream out;
  const Problem &p = tp.problem;
  auto constraintLine = [&](int i) {
    const auto &c = p.constraints[static_cast<std::size_t>(i)];
    return "  line " + std::to_string(c.span.begin.line) + ": " +
           std::string(p.constraintText(i)) + ".";
  };
  switch (r.kind) {
  case DiagnosisKind::NothingToDiagnose:
    out << "Nothing to diagnose: the problem has a model";
    if (!r.da.sizes.empty())
      out << " at sizes " << render_domain_assignment(p, r.da);
    out << ".\n";
    break;
  case DiagnosisKind::HighLevelMUS:
    out << "No solution at sizes " << render_domain_assignment(p, r.da)
        << ". These constraints cannot all hold together";
    out << (r.minimal ? "; removing any one of them removes the conflict:\n" : ":\n");
    for (int i : r.constraints)
      out << constraintLine(i) << '\n';
    break;
  case DiagnosisKind::LowLevelMUS: {
    out << "Minimal conflicting set of " << r.clauses.size() << " ground clauses";
    if (!r.da.sizes.empty())
      out << " at sizes " << render_domain_assignment(p, r.da);
    out << ":\n";
    for (const auto &c : r.clauses) {
      out << "  clause " << c.index << " (" << c.provenance.describe() << "):";
      for (Lit l : c.literals)
        out << ' ' << l;
      out << '\n';
    }
    break;
  }
  case DiagnosisKind::Approximate:
    out << "No solution at sizes " << render_domain_assignment(p, r.da) << ". Best approximation "
        << "satisfies " << r.satisfiedCount << " of " << r.total << " constraints"
        << (r.minimal ? "" : " (not proven optimal)") << ".\nViolated:\n";
    for (int i : r.violated)
      out << constraintLine(i) << '\n';
    if (r.interp)
      out << render_interpretation(p, *r.interp) << '\n';
    break;
  }
  if (!r.message.empty() && r.kind != DiagnosisKind::NothingToDiagnose)
    out << "Note: " << r.message << '\n';
  return out.str();
}

} // namespace lff

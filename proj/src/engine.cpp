#include "lff/engine.hpp"

#include "lff/evaluator.hpp"
#include "lff/sat.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

namespace lff {

std::string_view outcome_kind_name(OutcomeKind kind) {
  switch (kind) {
  case OutcomeKind::Ok:
    return "ok";
  case OutcomeKind::InputErrors:
    return "input-errors";
  case OutcomeKind::NoSolution:
    return "no-solution";
  case OutcomeKind::Solutions:
    return "solutions";
  case OutcomeKind::Timeout:
    return "timeout";
  case OutcomeKind::InternalError:
    return "internal-error";
  }
  return "internal-error";
}

Prepared prepare(std::string_view text) {
  Prepared out;
  auto parsed = parse_problem(text);
  if (!parsed.ok()) {
    out.diagnostics = std::move(parsed.diagnostics);
    return out;
  }
  auto checked = check(*parsed.problem);
  out.diagnostics = std::move(parsed.diagnostics);
  out.diagnostics.insert(out.diagnostics.end(), checked.diagnostics.begin(),
                         checked.diagnostics.end());
  if (checked.ok())
    out.typed = std::make_shared<const TypedProblem>(std::move(*checked.typed));
  return out;
}

namespace {

Diagnostic plainError(std::string message) {
  Diagnostic d;
  d.line = 1;
  d.column = 1;
  d.message = std::move(message);
  return d;
}

SolveOutcome search(std::shared_ptr<const TypedProblem> tp, const SolveOptions &opts,
                    std::vector<Diagnostic> warnings) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  SolveOutcome out;
  out.typed = tp;
  out.diagnostics = std::move(warnings);
  out.stats.bounds = opts.bounds;
  auto finish = [&](OutcomeKind kind) {
    out.kind = kind;
    out.stats.wallSeconds = std::chrono::duration<double>(Clock::now() - start).count();
    return out;
  };

  if (opts.maxModels < 1 || !(opts.deadlineSecs > 0)) {
    out.diagnostics.push_back(plainError("Invalid options: the model limit must be at least 1 "
                                         "and the deadline positive"));
    return finish(OutcomeKind::InputErrors);
  }
  const auto vectors = size_vectors(tp->problem, opts.bounds);
  if (vectors.empty()) {
    out.diagnostics.push_back(plainError("Empty size bounds: no domain sizes to search"));
    return finish(OutcomeKind::InputErrors);
  }

  const auto budget = sat::Budget::seconds(opts.deadlineSecs);
  GroundOptions gopts;
  gopts.atomCap = opts.atomCap;
  gopts.symmetryBreaking = opts.symmetryBreaking;

  bool allExhausted = true;
  for (const auto &da : vectors) {
    if (budget.expired()) {
      out.message = "deadline reached before every size vector was searched";
      return finish(OutcomeKind::Timeout);
    }
    Grounding g;
    try {
      g = ground(*tp, da, gopts);
    } catch (const ResourceLimit &e) {
      out.diagnostics.push_back(plainError(e.what()));
      return finish(OutcomeKind::InputErrors);
    }
    out.stats.grounds.push_back(
        {da, g.cnf.cnf.numVars, g.atoms.numAtoms, g.cnf.cnf.clauses.size()});

    sat::Solver solver;
    solver.addCnf(g.cnf.cnf);
    const auto projection = g.atoms.projection();
    bool exhaustedHere = false;
    while (static_cast<int>(out.models.size()) < opts.maxModels) {
      auto r = solver.solve({}, budget);
      ++out.stats.runs;
      out.stats.conflicts += r.conflicts;
      if (r.status == sat::Status::Unknown) {
        out.searched.push_back(da);
        out.message = "deadline reached during search at sizes " +
                      render_domain_assignment(tp->problem, da);
        return finish(OutcomeKind::Timeout);
      }
      if (r.status == sat::Status::Unsat) {
        exhaustedHere = true;
        break;
      }
      auto m = decode(r.model, g, *tp);
      const auto truth = check_constraints(m, *tp);
      for (std::size_t i = 0; i < truth.size(); ++i)
        if (!truth[i]) {
          out.message = "model at sizes " + render_domain_assignment(tp->problem, da) +
                        " violates constraint " + std::to_string(i + 1);
          return finish(OutcomeKind::InternalError);
        }
      if (auto issues = validate_interpretation(tp->problem, m); !issues.empty()) {
        out.message = "malformed model: " + issues.front();
        return finish(OutcomeKind::InternalError);
      }
      out.models.push_back({da, std::move(m)});
      std::vector<sat::Lit> block;
      for (int v : projection)
        block.push_back(r.value(v) ? -v : v);
      solver.addClause(block);
    }
    out.searched.push_back(da);
    allExhausted = allExhausted && exhaustedHere;
    if (static_cast<int>(out.models.size()) >= opts.maxModels)
      break;
  }

  const bool searchedAll = out.searched.size() == vectors.size();
  out.exhausted = allExhausted && searchedAll;
  if (out.models.empty()) {
    out.complete = out.exhausted;
    return finish(OutcomeKind::NoSolution);
  }
  out.unique = out.exhausted && out.models.size() == 1;
  return finish(OutcomeKind::Solutions);
}

} // namespace

SolveOutcome solve_typed(std::shared_ptr<const TypedProblem> tp, const SolveOptions &opts) {
  try {
    return search(std::move(tp), opts, {});
  } catch (const std::exception &e) {
    SolveOutcome out;
    out.kind = OutcomeKind::InternalError;
    out.message = e.what();
    return out;
  }
}

SolveOutcome run(std::string_view text, const SolveOptions &opts) {
  try {
    auto prep = prepare(text);
    if (!prep.typed) {
      SolveOutcome out;
      out.kind = OutcomeKind::InputErrors;
      out.diagnostics = std::move(prep.diagnostics);
      return out;
    }
    if (opts.mode == Mode::Check) {
      SolveOutcome out;
      out.kind = OutcomeKind::Ok;
      out.diagnostics = std::move(prep.diagnostics);
      out.typed = prep.typed;
      return out;
    }
    return search(prep.typed, opts, std::move(prep.diagnostics));
  } catch (const std::exception &e) {
    SolveOutcome out;
    out.kind = OutcomeKind::InternalError;
    out.message = e.what();
    return out;
  }
}

SolveOutcome run(std::string_view sorts, std::string_view vocabulary,
                 std::string_view constraints, const SolveOptions &opts) {
  return run(assemble_problem_text(sorts, vocabulary, constraints), opts);
}

std::string render_outcome(const SolveOutcome &o) {
  std::ostringstream out;
  for (const auto &d : o.diagnostics)
    out << format_diagnostic(d) << '\n';
  switch (o.kind) {
  case OutcomeKind::Ok:
    out << "No errors found.\n";
    break;
  case OutcomeKind::InputErrors:
    break;
  case OutcomeKind::NoSolution:
    out << "No solution found";
    if (!o.searched.empty())
      out << " (searched " << o.searched.size() << " size vector"
          << (o.searched.size() == 1 ? "" : "s") << ")";
    out << ".\n";
    break;
  case OutcomeKind::Timeout:
  case OutcomeKind::Solutions: {
    const Problem &p = o.typed->problem;
    const DomainAssignment *last = nullptr;
    for (std::size_t i = 0; i < o.models.size(); ++i) {
      const auto &fm = o.models[i];
      const bool hasOpen = std::any_of(p.sorts.begin(), p.sorts.end(),
                                       [](const SortDecl &s) { return s.isOpen(); });
      if (hasOpen && (!last || !(*last == fm.da)))
        out << "Sizes " << render_domain_assignment(p, fm.da) << '\n';
      last = &fm.da;
      out << "Model " << i + 1 << ":\n" << render_interpretation(p, fm.interp) << '\n';
    }
    if (o.kind == OutcomeKind::Timeout)
      out << "Timed out: " << o.message << ".\n";
    else if (o.unique)
      out << "Unique model within the size bounds.\n";
    else if (o.exhausted)
      out << o.models.size() << " models; all found within the size bounds.\n";
    else
      out << o.models.size() << " models shown; there may be more.\n";
    break;
  }
  case OutcomeKind::InternalError:
    out << "Internal error: " << o.message << '\n';
    break;
  }
  return out.str();
}

} // namespace lff

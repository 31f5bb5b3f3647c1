#pragma once

#include "lff/engine.hpp"
#include "lff/grounder.hpp"
#include "lff/sat.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lff {

enum class DiagnosisKind { HighLevelMUS, LowLevelMUS, Approximate, NothingToDiagnose };

std::string_view diagnosis_kind_name(DiagnosisKind kind);

struct CoreClause {
  int index = 0; // position in the ground clause list
  std::vector<sat::Lit> literals;
  Provenance provenance;
};

struct DiagnosisReport {
  DiagnosisKind kind = DiagnosisKind::NothingToDiagnose;
  DomainAssignment da;
  std::vector<int> constraints;   // HighLevelMUS: core constraint indices
  std::vector<CoreClause> clauses; // LowLevelMUS
  std::optional<Interpretation> interp; // Approximate
  std::vector<int> violated;      // Approximate
  int satisfiedCount = 0;
  int total = 0;
  bool minimal = true; // MUS verified minimal; for Approximate, proven optimal
  std::string message;
};

/// Deletion-based minimal unsatisfiable set of constraints at fixed sizes.
/// Axiom clauses are never relaxed.
DiagnosisReport high_level_mus(const TypedProblem &tp, const DomainAssignment &da,
                               const sat::Budget &budget = {});

/// Deletion-based minimal unsatisfiable subset of ground clauses.
DiagnosisReport low_level_mus(const CnfInstance &cnf, const sat::Budget &budget = {});

/// An interpretation violating as few constraints as possible at fixed sizes.
DiagnosisReport approximate_solution(const TypedProblem &tp, const DomainAssignment &da,
                                     const sat::Budget &budget = {});

enum class DiagnoseMode { Mus, Approx, Clauses };

struct DiagnoseOutcome {
  OutcomeKind solveKind = OutcomeKind::InternalError;
  std::vector<Diagnostic> diagnostics;
  std::optional<DiagnosisReport> report;
  std::string message;
  std::shared_ptr<const TypedProblem> typed;
};

/// Solves first; when there is no model anywhere within the bounds, runs the
/// requested diagnosis at the first size vector searched.
DiagnoseOutcome diagnose(std::string_view text, DiagnoseMode mode, const SolveOptions &opts = {});

std::string render_report(const TypedProblem &tp, const DiagnosisReport &r);

} // namespace lff

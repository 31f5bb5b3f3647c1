#pragma once

#include "lff/grounder.hpp"
#include "lff/parser.hpp"
#include "lff/typecheck.hpp"

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lff {

enum class Mode { Check, Solve };

struct SolveOptions {
  Mode mode = Mode::Solve;
  int maxModels = 2;
  SizeBounds bounds;
  double deadlineSecs = 10.0;
  bool symmetryBreaking = false;
  std::size_t atomCap = 2'000'000;
};

enum class OutcomeKind { Ok, InputErrors, NoSolution, Solutions, Timeout, InternalError };

std::string_view outcome_kind_name(OutcomeKind kind);

struct FoundModel {
  DomainAssignment da;
  Interpretation interp;
};

struct GroundSize {
  DomainAssignment da;
  int vars = 0;
  int atoms = 0;
  std::size_t clauses = 0;
};

struct SolveStats {
  int runs = 0; // solver calls
  std::uint64_t conflicts = 0;
  double wallSeconds = 0;
  std::vector<GroundSize> grounds;
  SizeBounds bounds;
};

struct SolveOutcome {
  OutcomeKind kind = OutcomeKind::InternalError;
  std::vector<Diagnostic> diagnostics; // errors, or warnings alongside a result
  std::vector<DomainAssignment> searched;
  bool complete = false;  // NoSolution: every size vector was decided
  std::vector<FoundModel> models;
  bool unique = false;    // exactly one model in the whole bounded space
  bool exhausted = false; // every size vector fully enumerated
  std::string message;    // InternalError / Timeout detail
  SolveStats stats;
  std::shared_ptr<const TypedProblem> typed;
};

struct Prepared {
  std::shared_ptr<const TypedProblem> typed; // null on input errors
  std::vector<Diagnostic> diagnostics;
};

/// Parse and type check.
Prepared prepare(std::string_view text);

SolveOutcome run(std::string_view text, const SolveOptions &opts = {});
SolveOutcome run(std::string_view sorts, std::string_view vocabulary,
                 std::string_view constraints, const SolveOptions &opts = {});
SolveOutcome solve_typed(std::shared_ptr<const TypedProblem> tp, const SolveOptions &opts);

/// Text report: diagnostics, or model tables grouped by size vector.
std::string render_outcome(const SolveOutcome &o);

} // namespace lff

#pragma once

#include "lff/corpus.hpp"
#include "lff/diagnose.hpp"
#include "lff/engine.hpp"

#include <json.hpp>

namespace lff {

using Json = nlohmann::json;

Json to_json(const Diagnostic &d);
Json to_json(const Problem &p, const DomainAssignment &da);
Json to_json(const TypedProblem &tp, const Interpretation &m);
Json to_json(const SolveOutcome &o);
Json to_json(const DiagnoseOutcome &o);
Json puzzle_summary(const PuzzleRecord &p);
Json to_json(const PuzzleRecord &p);

/// Reads `maxModels`, `deadlineSecs`, `symmetryBreaking` and
/// `bounds: {lo, hi, perSort: {sort: [lo, hi]}}`; absent fields keep their
/// defaults. Throws std::invalid_argument on wrongly typed fields.
SolveOptions options_from_json(const Json &j, SolveOptions base = {});

} // namespace lff

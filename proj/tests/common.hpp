#pragma once

#include "lff/engine.hpp"
#include "lff/evaluator.hpp"
#include "lff/grounder.hpp"
#include "lff/sat.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace testing_util {

inline const std::string kMary = R"(Sorts:
  person.
  animal.
  size enum: little, medium, big.
  colour enum: green, white, purple.
  place.
Vocabulary:
  predicate {
    had(person,animal).
    Went(person,place).
    went(animal,place).   % note: case-sensitive
    lamb(animal).
  }
  function {
    hue(animal): colour.
    stature(animal): size.
  }
  name Mary: person.
  name hue_of_snow: colour.
Constraints:
  SOME x (had(Mary,x) & stature(x) = little & lamb(x) &
          (hue_of_snow = white -> hue(x) = white) &
          ALL y (Went(Mary,y) -> went(x,y))).
)";

// Every model of the grounding at `da`, by projected enumeration, sorted.
inline std::vector<lff::Interpretation> sat_models(const lff::TypedProblem &tp,
                                                   const lff::DomainAssignment &da,
                                                   bool symmetryBreaking = false,
                                                   bool *exhausted = nullptr) {
  lff::GroundOptions o;
  o.symmetryBreaking = symmetryBreaking;
  const auto g = lff::ground(tp, da, o);
  const auto proj = g.atoms.projection();
  const auto e = lff::sat::enumerate_models(g.cnf.cnf, proj, 1u << 20);
  if (exhausted)
    *exhausted = e.exhausted;
  std::vector<lff::Interpretation> out;
  for (const auto &m : e.models)
    out.push_back(lff::decode(m, g, tp));
  std::sort(out.begin(), out.end());
  return out;
}

inline std::shared_ptr<const lff::TypedProblem> typed(const std::string &text) {
  return lff::prepare(text).typed;
}

} // namespace testing_util

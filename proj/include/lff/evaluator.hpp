#pragma once

#include "lff/grounder.hpp"
#include "lff/typecheck.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace lff {

/// Truth of a typed formula under an interpretation. `env` maps variable
/// slots to elements of their sorts.
bool eval(const TypedProblem &tp, const Interpretation &m, const TNode &f,
          std::vector<int> &env);

/// Truth of constraint `index` under the empty environment.
bool eval_constraint(const TypedProblem &tp, const Interpretation &m, int index);

/// One entry per constraint.
std::vector<bool> check_constraints(const Interpretation &m, const TypedProblem &tp);

/// Number of candidate interpretations at the given sizes; saturates at
/// UINT64_MAX.
std::uint64_t interpretation_space(const TypedProblem &tp, const DomainAssignment &da);

inline constexpr std::uint64_t kBruteForceLimit = 10'000'000;

/// Calls `visit` on every interpretation at the given sizes in a fixed
/// order. Throws ResourceLimit when the space exceeds kBruteForceLimit.
/// Stops early when `visit` returns false.
template <typename F>
void for_each_interpretation(const TypedProblem &tp, const DomainAssignment &da, F &&visit);

/// Every model at the given sizes, up to `cap`, sorted.
std::vector<Interpretation> brute_force_models(const TypedProblem &tp, const DomainAssignment &da,
                                               std::size_t cap = kBruteForceLimit);

/// Largest number of constraints any interpretation at the given sizes
/// satisfies.
int max_satisfiable(const TypedProblem &tp, const DomainAssignment &da);

// ---------------------------------------------------------------------------

namespace detail {
struct Odometer {
  std::vector<int> radix;
  std::vector<int> digit;
  bool next() {
    for (std::size_t i = digit.size(); i-- > 0;) {
      if (++digit[i] < radix[i])
        return true;
      digit[i] = 0;
    }
    return false;
  }
};

Odometer interpretation_odometer(const TypedProblem &tp, const DomainAssignment &da,
                                 Interpretation &shape);
void load_digits(const Odometer &o, Interpretation &m);
} // namespace detail

template <typename F>
void for_each_interpretation(const TypedProblem &tp, const DomainAssignment &da, F &&visit) {
  if (interpretation_space(tp, da) > kBruteForceLimit)
    throw ResourceLimit("Interpretation space too large for exhaustive search");
  Interpretation m;
  auto o = detail::interpretation_odometer(tp, da, m);
  do {
    detail::load_digits(o, m);
    if (!visit(static_cast<const Interpretation &>(m)))
      return;
  } while (o.next());
}

} // namespace lff

#pragma once

#include <chrono>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace lff::sat {

/// DIMACS-style literal: +v or -v for variable v >= 1.
using Lit = int;

inline int var_of(Lit l) { return l < 0 ? -l : l; }

struct Cnf {
  int numVars = 0;
  std::vector<std::vector<Lit>> clauses;

  int newVar() { return ++numVars; }
  void add(std::vector<Lit> clause) { clauses.push_back(std::move(clause)); }
};

using Clock = std::chrono::steady_clock;

/// Wall-clock deadline and conflict cap; whichever trips first ends the
/// search with Status::Unknown.
struct Budget {
  std::optional<Clock::time_point> deadline;
  std::optional<std::uint64_t> maxConflicts;

  static Budget unlimited() { return {}; }
  static Budget seconds(double s) {
    Budget b;
    b.deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                    std::chrono::duration<double>(s));
    return b;
  }
  bool expired() const { return deadline && Clock::now() >= *deadline; }
};

enum class Status { Sat, Unsat, Unknown };
enum class UnknownReason { None, Timeout, ConflictBudget };

struct SatResult {
  Status status = Status::Unknown;
  std::vector<bool> model;             // indexed by variable; entry 0 unused
  std::vector<Lit> failedAssumptions;  // UNSAT only; subset of the assumptions
  UnknownReason reason = UnknownReason::None;
  std::uint64_t conflicts = 0;
  std::uint64_t decisions = 0;
  std::uint64_t propagations = 0;

  bool value(int var) const { return model.at(static_cast<std::size_t>(var)); }
};

struct SolverOptions {
  double varDecay = 0.95;
  std::uint64_t restartBase = 64; // conflicts per Luby unit
};

/// Conflict-driven clause learning solver with two watched literals,
/// first-UIP learning, activity-based branching, phase saving and Luby
/// restarts. Clauses may be added between calls to solve(); learnt clauses
/// are kept since they are implied by the clause database alone.
class Solver {
public:
  explicit Solver(SolverOptions options = {});
  ~Solver();
  Solver(Solver &&) noexcept;
  Solver &operator=(Solver &&) noexcept;

  int newVar();
  void reserveVars(int n);
  int numVars() const;

  /// Returns false once the clause database is unsatisfiable at the root.
  bool addClause(std::span<const Lit> clause);
  bool addClause(std::initializer_list<Lit> clause) {
    return addClause(std::span<const Lit>(clause.begin(), clause.size()));
  }
  void addCnf(const Cnf &cnf);

  /// Decides satisfiability under the assumptions. On SAT the model is
  /// checked against every clause ever added before it is returned.
  SatResult solve(std::span<const Lit> assumptions = {}, const Budget &budget = {});

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One-shot convenience wrapper.
SatResult solve(const Cnf &cnf, std::span<const Lit> assumptions = {},
                const Budget &budget = {});

/// True iff every clause has a literal made true by `model`.
bool satisfies(const Cnf &cnf, const std::vector<bool> &model);

struct Enumeration {
  std::vector<std::vector<bool>> models; // full assignments
  bool exhausted = false; // the projected model space was fully enumerated
  bool unknown = false;   // the budget ran out mid-enumeration
  std::uint64_t conflicts = 0;
  int solverCalls = 0;
};

/// Enumerates up to `limit` models that differ pairwise on `projection`,
/// adding one blocking clause over the projection after each model.
Enumeration enumerate_models(const Cnf &cnf, std::span<const int> projection,
                             std::size_t limit, const Budget &budget = {});

struct CardinalityEncoding {
  std::vector<std::vector<Lit>> clauses;
  int firstAux = 0;
  int numAux = 0;
};

/// Sequential-counter encoding of "at most k of lits are true". Auxiliary
/// variables are numbered from `firstAux`.
CardinalityEncoding add_at_most_k(std::span<const Lit> lits, int k, int firstAux);

/// Reads DIMACS CNF; throws std::runtime_error on malformed input.
Cnf read_dimacs(std::istream &in);
void write_dimacs(std::ostream &out, const Cnf &cnf);

} // namespace lff::sat

#pragma once

#include "lff/sat.hpp"
#include "lff/typecheck.hpp"

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lff {

/// Per-sort domain sizes, indexed like Problem::sorts.
struct DomainAssignment {
  std::vector<int> sizes;

  friend bool operator==(const DomainAssignment &, const DomainAssignment &) = default;
};

/// `(person=1, animal=1, place=1)`; pinned sorts are omitted.
std::string render_domain_assignment(const Problem &p, const DomainAssignment &da);

/// Size bounds for open sorts. Pinned sorts always take their declared size.
struct SizeBounds {
  int lo = 1;
  int hi = 4;
  std::map<std::string, std::pair<int, int>> perSort;

  std::pair<int, int> of(const std::string &sort) const;
};

/// Every domain assignment inside the bounds: nondecreasing total open size,
/// then descending lexicographic order over the open sorts in declaration
/// order. Empty when some range is empty.
std::vector<DomainAssignment> size_vectors(const Problem &p, const SizeBounds &bounds);

enum class AtomKind { Predicate, FunctionCell, NameCell };

struct GroundAtom {
  AtomKind kind = AtomKind::Predicate;
  int symbol = 0;
  std::size_t tuple = 0; // row-major argument tuple index
  int value = 0;         // cell value for functions and names
};

/// Variables 1..numAtoms are ground atoms, allocated in declaration order:
/// predicates, then function cells, then name cells. Higher variables are
/// auxiliary.
struct AtomMap {
  int numAtoms = 0;
  std::vector<GroundAtom> atoms;        // atoms[v - 1]
  std::vector<int> predicateBase;       // first variable of each predicate
  std::vector<int> functionBase;        // first variable of each function
  std::vector<int> functionResultSize;
  std::vector<int> nameBase;
  std::vector<int> nameSize;

  int predicateVar(int pred, std::size_t tuple) const {
    return predicateBase[static_cast<std::size_t>(pred)] + static_cast<int>(tuple);
  }
  int functionVar(int func, std::size_t tuple, int value) const {
    const auto f = static_cast<std::size_t>(func);
    return functionBase[f] + static_cast<int>(tuple) * functionResultSize[f] + value;
  }
  int nameVar(int name, int value) const {
    return nameBase[static_cast<std::size_t>(name)] + value;
  }
  bool isAuxiliary(int var) const { return var > numAtoms; }
  const GroundAtom &atom(int var) const { return atoms.at(static_cast<std::size_t>(var - 1)); }
  /// Non-auxiliary variables, for projected enumeration.
  std::vector<int> projection() const;
  /// `had(person@1,animal@1)`, `hue(animal@1)=green`, `Mary=person@1`.
  std::string describe(const TypedProblem &tp, const std::vector<SortDomain> &domains,
                       int var) const;
};

struct Provenance {
  int constraint = -1; // -1 for axioms
  std::string axiom;   // totality(f,e..), functionality(f,e..), name-totality(n), ...

  bool isAxiom() const { return constraint < 0; }
  std::string describe() const;
};

struct CnfInstance {
  sat::Cnf cnf;
  std::vector<Provenance> provenance; // per clause
};

struct Grounding {
  DomainAssignment da;
  std::vector<SortDomain> domains;
  AtomMap atoms;
  CnfInstance cnf;
  /// Set when a constraint grounds to false outright.
  std::vector<int> falseConstraints;
};

struct GroundOptions {
  std::size_t atomCap = 2'000'000;
  bool symmetryBreaking = false;
};

/// Raised when the estimated ground size exceeds GroundOptions::atomCap.
class ResourceLimit : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Expands quantifiers over the domains and compiles every constraint to CNF
/// with exactly-one axioms for function cells and names.
Grounding ground(const TypedProblem &tp, const DomainAssignment &da,
                 const GroundOptions &options = {});

/// Reads an interpretation off an assignment. Throws std::logic_error when an
/// exactly-one axiom is violated.
Interpretation decode(const std::vector<bool> &assignment, const Grounding &g,
                      const TypedProblem &tp);

/// DIMACS with `c clause <i> from constraint <k>` / `c clause <i> axiom <tag>`
/// comment lines ahead of each clause.
void write_dimacs(std::ostream &out, const CnfInstance &cnf);

} // namespace lff

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace lff {

struct SourcePos {
  int line = 1;   // 1-based
  int column = 1; // 1-based
  std::size_t offset = 0;

  friend bool operator==(const SourcePos &, const SourcePos &) = default;
};

struct SourceSpan {
  SourcePos begin;
  SourcePos end; // one past the last character

  friend bool operator==(const SourceSpan &, const SourceSpan &) = default;
};

// ---------------------------------------------------------------------------
// Expressions
//
// Terms and formulae share one node type. The parser accepts a formula in a
// term position (and vice versa) so that the type checker, not the parser,
// reports "argument 2 is ... which is of type bool".
// ---------------------------------------------------------------------------

enum class ExprKind {
  // terms
  Var,
  Name,
  EnumLit,
  IntLit,
  Apply, // predicate or function application; resolved by the type checker
  Add,
  Sub,
  Mul,
  // formulae
  Eq,
  Neq,
  Lt,
  Le,
  Gt,
  Ge,
  Not,
  And,
  Or,
  Implies,
  Iff,
  Forall,
  Exists,
  True,
  False,
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  ExprKind kind = ExprKind::True;
  std::string id;                 // symbol, variable, or bound variable
  std::int64_t value = 0;         // IntLit
  std::optional<std::string> sortAnnotation; // Forall/Exists `x: sort`
  std::vector<ExprPtr> args;      // operands / arguments / quantifier body
  SourcePos pos;

  static ExprPtr make(ExprKind kind, std::string id = {},
                      std::vector<ExprPtr> args = {}, SourcePos pos = {});
  static ExprPtr intLit(std::int64_t v, SourcePos pos = {});
  static ExprPtr quantifier(ExprKind kind, std::string var,
                            std::optional<std::string> sort, ExprPtr body,
                            SourcePos pos = {});

  bool isQuantifier() const {
    return kind == ExprKind::Forall || kind == ExprKind::Exists;
  }
  bool isComparison() const;
  bool isConnective() const;
  bool isArithmetic() const {
    return kind == ExprKind::Add || kind == ExprKind::Sub ||
           kind == ExprKind::Mul;
  }
};

/// Structural equality, ignoring source positions.
bool structurallyEqual(const Expr &a, const Expr &b);

/// Canonical ASCII rendering with minimal parentheses.
std::string render_formula(const Expr &e);

/// Identifiers of variables with at least one unbound occurrence.
std::set<std::string> free_variables(const Expr &e);

/// Operator spelling used by renderers and diagnostics ("&", "->", ...).
std::string_view operator_symbol(ExprKind kind);

// ---------------------------------------------------------------------------
// Problem model
// ---------------------------------------------------------------------------

struct OpenSort {};
struct EnumSort {
  std::vector<std::string> elements;
};
struct IntRangeSort {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
};

struct SortDecl {
  std::string name;
  std::variant<OpenSort, EnumSort, IntRangeSort> kind;
  SourcePos pos;

  bool isOpen() const { return std::holds_alternative<OpenSort>(kind); }
  bool isEnum() const { return std::holds_alternative<EnumSort>(kind); }
  bool isIntRange() const { return std::holds_alternative<IntRangeSort>(kind); }
  /// Declared size for enum and integer sorts; nullopt for open sorts.
  std::optional<int> pinnedSize() const;
};

struct PredicateDecl {
  std::string name;
  std::vector<std::string> argSorts; // empty for propositional atoms
  SourcePos pos;
};

struct FunctionDecl {
  std::string name;
  std::vector<std::string> argSorts;
  std::string resultSort;
  SourcePos pos;
};

struct NameDecl {
  std::string name;
  std::string sort;
  SourcePos pos;
};

struct Vocabulary {
  std::vector<PredicateDecl> predicates;
  std::vector<FunctionDecl> functions;
  std::vector<NameDecl> names;
};

struct Constraint {
  ExprPtr formula;
  SourceSpan span;
  int index = 0;
};

struct Problem {
  std::vector<SortDecl> sorts;
  Vocabulary vocab;
  std::vector<Constraint> constraints;
  std::string source; // full text the problem was parsed from

  std::optional<int> sortIndex(std::string_view name) const;
  /// Source text of a constraint, sliced by its span.
  std::string_view constraintText(int index) const;
};

// ---------------------------------------------------------------------------
// Interpretations
// ---------------------------------------------------------------------------

/// Label of the k-th (0-based) element of an open sort: `person@1`, ...
std::string open_element_label(std::string_view sort, int k);

struct SortDomain {
  int size = 0;
  std::vector<std::string> labels;

  friend bool operator==(const SortDomain &, const SortDomain &) = default;
};

/// A finite model. Elements are sort-local indices, so domains of distinct
/// sorts are disjoint by construction. Function tables and predicate
/// extensions are flattened row-major over argument tuples (last argument
/// varies fastest).
struct Interpretation {
  std::vector<SortDomain> domains;             // per sort
  std::vector<int> nameValues;                 // per name
  std::vector<std::vector<int>> functionTables; // per function
  std::vector<std::vector<bool>> predicateExtensions; // per predicate

  friend bool operator==(const Interpretation &, const Interpretation &) = default;
  friend auto operator<=>(const Interpretation &a, const Interpretation &b) {
    if (auto c = a.nameValues <=> b.nameValues; c != 0)
      return c;
    if (auto c = a.functionTables <=> b.functionTables; c != 0)
      return c;
    return a.predicateExtensions <=> b.predicateExtensions;
  }
};

/// Per-sort domain sizes, indexed like Problem::sorts.
std::vector<SortDomain> make_domains(const Problem &p,
                                     const std::vector<int> &sizes);

/// Number of argument tuples for a signature under the given domains.
std::size_t tuple_count(const Problem &p, const std::vector<std::string> &argSorts,
                        const std::vector<SortDomain> &domains);

/// Checks the well-formedness of an interpretation against a problem's
/// signature. Returns one message per violation; empty means valid.
std::vector<std::string> validate_interpretation(const Problem &p,
                                                 const Interpretation &m);

/// Per-symbol tables: `Mary = person@1`, `hue(animal@1) = green`,
/// `had = {(person@1, animal@1)}`.
std::string render_interpretation(const Problem &p, const Interpretation &m);

} // namespace lff

#pragma once

#include "lff/ast.hpp"
#include "lff/parser.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace lff {

/// Pseudo-sorts used alongside declared sort indices.
inline constexpr int kBoolType = -1;
inline constexpr int kIntType = -2; // integer literals and arithmetic results
inline constexpr int kErrorType = -3;

/// Resolved operators of a type-checked formula.
enum class TOp {
  // formulae
  True,
  False,
  Pred,
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
  // terms
  Var,
  Name,
  Elem, // constant element of `sort`: enum literal or in-range integer literal
  Int,
  Func,
  Add,
  Sub,
  Mul,
};

struct TNode;
using TNodePtr = std::shared_ptr<const TNode>;

/// A typed, resolved formula or term.
///
/// `symbol` holds the predicate/function/name index for Pred/Func/Name, the
/// element index for Elem, and the variable slot for Var/Forall/Exists.
/// `sort` is the term's sort (or kIntType), and kBoolType for formulae.
struct TNode {
  TOp op = TOp::True;
  int symbol = -1;
  int sort = kBoolType;
  int boundSort = -1; // Forall/Exists
  std::int64_t value = 0; // Int
  std::vector<TNodePtr> args;
  const Expr *source = nullptr;
};

struct VariableBinding {
  std::string name;
  int sort = 0;
  int slot = 0;
};

struct TypedConstraint {
  TNodePtr formula;
  std::vector<VariableBinding> binders; // indexed by slot
};

struct TypedProblem {
  Problem problem;
  std::vector<TypedConstraint> constraints;

  int sortCount() const { return static_cast<int>(problem.sorts.size()); }
  int sortOf(const std::string &name) const { return *problem.sortIndex(name); }
  bool isIntRange(int sort) const;
  /// Integer value of element 0 of an integer sort; 0 for other sorts.
  std::int64_t intBase(int sort) const;
  std::string typeName(int type) const;
  std::vector<int> predicateArgSorts(int pred) const;
  std::vector<int> functionArgSorts(int func) const;
  int functionResultSort(int func) const;
  int nameSort(int name) const;
};

struct CheckResult {
  std::optional<TypedProblem> typed;
  std::vector<Diagnostic> diagnostics; // errors, or warnings on success

  bool ok() const { return typed.has_value(); }
};

/// Resolves identifiers, infers variable sorts, and verifies well-typedness.
CheckResult check(const Problem &problem);

struct SortInference {
  std::optional<int> sort;
  std::optional<Diagnostic> error;
};

/// Infers the sort of the variable bound by `quantifier` from the positions
/// it occupies in its body. An explicit annotation wins.
SortInference infer_variable_sorts(const Problem &problem, const Expr &quantifier);

/// Independent re-verification of a typed problem: arity and argument sorts
/// against the declarations. Returns findings; empty when sound.
std::vector<std::string> audit(const TypedProblem &tp);

} // namespace lff

#include "lff/typecheck.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace lff {

bool TypedProblem::isIntRange(int sort) const {
  return sort >= 0 && problem.sorts[static_cast<std::size_t>(sort)].isIntRange();
}

std::int64_t TypedProblem::intBase(int sort) const {
  if (!isIntRange(sort))
    return 0;
  return std::get<IntRangeSort>(problem.sorts[static_cast<std::size_t>(sort)].kind).lo;
}

std::string TypedProblem::typeName(int type) const {
  if (type == kBoolType)
    return "bool";
  if (type == kIntType)
    return "integer";
  if (type >= 0)
    return problem.sorts[static_cast<std::size_t>(type)].name;
  return "unknown";
}

std::vector<int> TypedProblem::predicateArgSorts(int pred) const {
  std::vector<int> out;
  for (const auto &s : problem.vocab.predicates[static_cast<std::size_t>(pred)].argSorts)
    out.push_back(sortOf(s));
  return out;
}

std::vector<int> TypedProblem::functionArgSorts(int func) const {
  std::vector<int> out;
  for (const auto &s : problem.vocab.functions[static_cast<std::size_t>(func)].argSorts)
    out.push_back(sortOf(s));
  return out;
}

int TypedProblem::functionResultSort(int func) const {
  return sortOf(problem.vocab.functions[static_cast<std::size_t>(func)].resultSort);
}

int TypedProblem::nameSort(int name) const {
  return sortOf(problem.vocab.names[static_cast<std::size_t>(name)].sort);
}

namespace {

enum class SymKind { Sort, Pred, Func, Name, Elem };

struct Symbol {
  SymKind kind;
  int index = 0; // sort/pred/func/name index, or element index
  int sort = -1; // Name and Elem: their sort
};

const std::vector<std::string> kTypeHints = {
    "check for misplaced parentheses",
    "check for wrong names (symbols are case-sensitive)",
};

std::string lineOf(std::string_view text, int line) {
  int current = 1;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size() && current < line; ++i)
    if (text[i] == '\n') {
      ++current;
      start = i + 1;
    }
  auto end = text.find('\n', start);
  return std::string(
      text.substr(start, end == std::string_view::npos ? std::string_view::npos
                                                       : end - start));
}

std::string indent(const Expr &e) { return "    " + render_formula(e); }

class Checker {
public:
  explicit Checker(const Problem &p) : p_(p) {
    for (std::size_t s = 0; s < p.sorts.size(); ++s) {
      syms_[p.sorts[s].name] = {SymKind::Sort, static_cast<int>(s)};
      if (const auto *en = std::get_if<EnumSort>(&p.sorts[s].kind))
        for (std::size_t k = 0; k < en->elements.size(); ++k)
          syms_[en->elements[k]] = {SymKind::Elem, static_cast<int>(k),
                                    static_cast<int>(s)};
    }
    for (std::size_t i = 0; i < p.vocab.predicates.size(); ++i)
      syms_[p.vocab.predicates[i].name] = {SymKind::Pred, static_cast<int>(i)};
    for (std::size_t i = 0; i < p.vocab.functions.size(); ++i)
      syms_[p.vocab.functions[i].name] = {SymKind::Func, static_cast<int>(i)};
    for (std::size_t i = 0; i < p.vocab.names.size(); ++i)
      syms_[p.vocab.names[i].name] = {SymKind::Name, static_cast<int>(i),
                                      *p.sortIndex(p.vocab.names[i].sort)};
  }

  std::vector<Diagnostic> diags;
  std::set<std::string> used;

  // --- sort inference -----------------------------------------------------

  struct BinderInfo {
    const Expr *quantifier = nullptr;
    std::optional<int> annotated;
    std::vector<std::pair<int, const Expr *>> direct; // sort, witnessing formula
    const Expr *intUse = nullptr;
    std::vector<const Expr *> links; // binders compared by equality
    std::optional<int> resolved;
    bool failed = false;
  };

  // Infers the sorts of every binder under `root`; results in binders_.
  void inferAll(const Expr &root) {
    binders_.clear();
    order_.clear();
    std::vector<std::pair<std::string, const Expr *>> scope;
    collect(root, scope);
    resolve(root);
  }

  const BinderInfo *binder(const Expr *q) const {
    auto it = binders_.find(q);
    return it == binders_.end() ? nullptr : &it->second;
  }

  // --- typing -------------------------------------------------------------

  std::optional<TypedConstraint> typeConstraint(const Constraint &c) {
    inferAll(*c.formula);
    TypedConstraint tc;
    std::vector<Scoped> scope;
    const auto before = errorCount();
    auto node = build(*c.formula, scope, tc);
    if (node->sort != kBoolType && node->sort != kErrorType) {
      auto d = error(c.formula->pos, "Term used as a formula");
      d.detail = {"Detailed diagnostics: the constraint", indent(*c.formula),
                  "is of type " + typeName(node->sort) +
                      ", but a constraint must be of type bool."};
      d.hints = {"a constraint must be a statement, e.g. an equation or a "
                 "predicate applied to arguments"};
      diags.push_back(std::move(d));
    }
    if (errorCount() != before)
      return std::nullopt;
    tc.formula = std::move(node);
    return tc;
  }

  std::string typeName(int type) const {
    if (type == kBoolType)
      return "bool";
    if (type == kIntType)
      return "integer";
    if (type >= 0)
      return p_.sorts[static_cast<std::size_t>(type)].name;
    return "unknown";
  }

private:
  struct Scoped {
    std::string name;
    int slot;
    int sort;
  };

  std::size_t errorCount() const {
    return static_cast<std::size_t>(std::count_if(
        diags.begin(), diags.end(), [](const Diagnostic &d) { return d.isError(); }));
  }

  Diagnostic error(SourcePos pos, std::string message) const {
    Diagnostic d;
    d.line = pos.line;
    d.column = pos.column;
    d.offendingText = lineOf(p_.source, pos.line);
    d.message = std::move(message);
    return d;
  }

  const Symbol *lookup(const std::string &id) const {
    auto it = syms_.find(id);
    return it == syms_.end() ? nullptr : &it->second;
  }

  bool isIntRange(int sort) const {
    return sort >= 0 && p_.sorts[static_cast<std::size_t>(sort)].isIntRange();
  }
  bool isIntish(int type) const { return type == kIntType || isIntRange(type); }

  static const Expr *boundBinder(const Expr &e,
                                 const std::vector<std::pair<std::string, const Expr *>> &scope) {
    if (e.kind != ExprKind::Var)
      return nullptr;
    for (auto it = scope.rbegin(); it != scope.rend(); ++it)
      if (it->first == e.id)
        return it->second;
    return nullptr;
  }

  // Sort of a term that can be read off without inference; nullopt if
  // unknown. kIntType for integer expressions.
  std::optional<int> staticSort(const Expr &e) const {
    switch (e.kind) {
    case ExprKind::Name:
    case ExprKind::EnumLit:
      if (const auto *s = lookup(e.id))
        return s->sort;
      return std::nullopt;
    case ExprKind::IntLit:
    case ExprKind::Add:
    case ExprKind::Sub:
    case ExprKind::Mul:
      return kIntType;
    case ExprKind::Apply:
      if (const auto *s = lookup(e.id); s && s->kind == SymKind::Func)
        return *p_.sortIndex(p_.vocab.functions[static_cast<std::size_t>(s->index)].resultSort);
      return std::nullopt;
    default:
      return std::nullopt;
    }
  }

  void collect(const Expr &e, std::vector<std::pair<std::string, const Expr *>> &scope) {
    if (e.isQuantifier()) {
      BinderInfo info;
      info.quantifier = &e;
      if (e.sortAnnotation) {
        if (auto s = p_.sortIndex(*e.sortAnnotation))
          info.annotated = *s;
      }
      binders_[&e] = info;
      order_.push_back(&e);
      scope.emplace_back(e.id, &e);
      collect(*e.args[0], scope);
      scope.pop_back();
      return;
    }
    if (e.kind == ExprKind::Apply) {
      if (const auto *s = lookup(e.id)) {
        const std::vector<std::string> *argSorts = nullptr;
        if (s->kind == SymKind::Pred)
          argSorts = &p_.vocab.predicates[static_cast<std::size_t>(s->index)].argSorts;
        else if (s->kind == SymKind::Func)
          argSorts = &p_.vocab.functions[static_cast<std::size_t>(s->index)].argSorts;
        if (argSorts && argSorts->size() == e.args.size())
          for (std::size_t i = 0; i < e.args.size(); ++i)
            if (const Expr *b = boundBinder(*e.args[i], scope))
              binders_[b].direct.emplace_back(*p_.sortIndex((*argSorts)[i]), &e);
      }
    } else if (e.kind == ExprKind::Eq || e.kind == ExprKind::Neq) {
      for (int side = 0; side < 2; ++side) {
        const Expr *b = boundBinder(*e.args[static_cast<std::size_t>(side)], scope);
        if (!b)
          continue;
        const Expr &other = *e.args[static_cast<std::size_t>(1 - side)];
        if (const Expr *ob = boundBinder(other, scope)) {
          binders_[b].links.push_back(ob);
        } else if (auto s = staticSort(other)) {
          if (*s == kIntType) {
            if (!binders_[b].intUse)
              binders_[b].intUse = &e;
          } else {
            binders_[b].direct.emplace_back(*s, &e);
          }
        }
      }
    } else if (e.isComparison() || e.isArithmetic()) {
      for (const auto &a : e.args)
        if (const Expr *b = boundBinder(*a, scope); b && !binders_[b].intUse)
          binders_[b].intUse = &e;
    }
    for (const auto &a : e.args)
      collect(*a, scope);
  }

  void conflict(BinderInfo &info, const Expr &root, const std::string &sortA,
                const Expr &whereA, const std::string &sortB, const Expr &whereB) {
    const Expr &q = *info.quantifier;
    auto d = error(q.pos, "Cannot infer the sort of variable " + q.id);
    d.detail = {"Detailed diagnostics: in the formula",
                indent(root),
                "the variable " + q.id + " is used as " + sortA + " in",
                indent(whereA),
                "and as " + sortB + " in",
                indent(whereB)};
    d.hints = {"a variable ranges over exactly one sort",
               "check for wrong names or arguments in the wrong order"};
    diags.push_back(std::move(d));
    info.failed = true;
  }

  void resolve(const Expr &root) {
    for (const Expr *q : order_) {
      auto &info = binders_[q];
      if (q->sortAnnotation && !info.annotated) {
        auto d = error(q->pos, "Undeclared sort " + *q->sortAnnotation);
        d.detail = {"Detailed diagnostics: in the formula", indent(*q),
                    "the variable " + q->id + " is annotated with the sort " +
                        *q->sortAnnotation + ", which is not declared."};
        d.hints = {"check for wrong names (sorts are case-sensitive)"};
        diags.push_back(std::move(d));
        info.failed = true;
        continue;
      }
      if (info.annotated) {
        info.resolved = info.annotated;
        continue;
      }
      for (const auto &[s, where] : info.direct)
        if (s != info.direct.front().first) {
          conflict(info, root, typeName(info.direct.front().first),
                   *info.direct.front().second, typeName(s), *where);
          break;
        }
      if (info.failed || info.direct.empty())
        continue;
      const int s = info.direct.front().first;
      if (info.intUse && !isIntRange(s)) {
        conflict(info, root, typeName(s), *info.direct.front().second, "integer",
                 *info.intUse);
        continue;
      }
      info.resolved = s;
    }

    // Propagate through equalities between variables.
    for (bool changed = true; changed;) {
      changed = false;
      for (const Expr *q : order_) {
        auto &info = binders_[q];
        if (info.resolved || info.failed)
          continue;
        for (const Expr *other : info.links) {
          const auto &o = binders_[other];
          if (!o.resolved)
            continue;
          if (info.intUse && !isIntRange(*o.resolved)) {
            conflict(info, root, typeName(*o.resolved), *o.quantifier, "integer",
                     *info.intUse);
          } else {
            info.resolved = o.resolved;
          }
          changed = true;
          break;
        }
      }
    }

    std::vector<int> intSorts;
    for (std::size_t s = 0; s < p_.sorts.size(); ++s)
      if (p_.sorts[s].isIntRange())
        intSorts.push_back(static_cast<int>(s));

    for (const Expr *q : order_) {
      auto &info = binders_[q];
      if (info.resolved || info.failed)
        continue;
      if (info.intUse && intSorts.size() == 1) {
        info.resolved = intSorts.front();
        continue;
      }
      auto d = error(q->pos, "Cannot infer the sort of variable " + q->id);
      d.detail = {"Detailed diagnostics: in the formula", indent(root)};
      if (info.intUse)
        d.detail.push_back("the variable " + q->id +
                           " is used as an integer, but there is not exactly one "
                           "integer sort to choose from.");
      else
        d.detail.push_back("no occurrence of the variable " + q->id +
                           " determines its sort.");
      d.hints = {"annotate the quantifier with a sort, e.g. " +
                 std::string(operator_symbol(q->kind)) + " " + q->id + ": <sort> ..."};
      diags.push_back(std::move(d));
      info.failed = true;
    }
  }

  // --- typed tree construction ------------------------------------------------

  static TNodePtr node(TOp op, int sort, const Expr &src, std::vector<TNodePtr> args = {},
                       int symbol = -1) {
    auto n = std::make_shared<TNode>();
    n->op = op;
    n->sort = sort;
    n->source = &src;
    n->args = std::move(args);
    n->symbol = symbol;
    return n;
  }

  static TNodePtr errorNode(const Expr &src) { return node(TOp::True, kErrorType, src); }

  // Emits the standard mismatch report for argument k (1-based) of `parent`.
  void mismatch(const Expr &parent, const std::string &op, std::size_t k,
                const std::string &expected, const Expr &arg, int actual) {
    auto d = error(parent.pos, "Type mismatch with argument of " + op);
    const std::string n = std::to_string(k);
    d.detail = {"Detailed diagnostics: in the formula",
                indent(parent),
                "the main operator \"" + op + "\" expects argument " + n + " to be " +
                    expected,
                "but argument " + n + " is",
                indent(arg),
                "which is of type " + typeName(actual) + "."};
    d.hints = kTypeHints;
    diags.push_back(std::move(d));
  }

  static std::string ofType(const std::string &t) { return "of type " + t; }

  // Checks that `arg` fits a declared sort position, converting in-range
  // integer literals into elements of an integer sort.
  TNodePtr fitSort(const Expr &parent, const std::string &op, std::size_t k, int sort,
                   const Expr &argExpr, TNodePtr arg) {
    if (arg->sort == kErrorType || arg->sort == sort)
      return arg;
    if (arg->op == TOp::Int && isIntRange(sort)) {
      const auto &ir = std::get<IntRangeSort>(p_.sorts[static_cast<std::size_t>(sort)].kind);
      if (arg->value >= ir.lo && arg->value <= ir.hi) {
        auto e = node(TOp::Elem, sort, argExpr, {}, static_cast<int>(arg->value - ir.lo));
        return e;
      }
      auto d = error(parent.pos, "Integer out of range in argument of " + op);
      d.detail = {"Detailed diagnostics: in the formula", indent(parent),
                  "the main operator \"" + op + "\" expects argument " +
                      std::to_string(k) + " to be of type " + typeName(sort),
                  "but the integer " + std::to_string(arg->value) +
                      " lies outside " + std::to_string(ir.lo) + " .. " +
                      std::to_string(ir.hi) + "."};
      d.hints = kTypeHints;
      diags.push_back(std::move(d));
      return errorNode(argExpr);
    }
    mismatch(parent, op, k, ofType(typeName(sort)), argExpr, arg->sort);
    return errorNode(argExpr);
  }

  TNodePtr requireBool(const Expr &parent, const std::string &op, std::size_t k,
                       const Expr &argExpr, TNodePtr arg) {
    if (arg->sort == kBoolType || arg->sort == kErrorType)
      return arg;
    mismatch(parent, op, k, "of type bool", argExpr, arg->sort);
    return errorNode(argExpr);
  }

  TNodePtr requireInt(const Expr &parent, const std::string &op, std::size_t k,
                      const Expr &argExpr, TNodePtr arg) {
    if (isIntish(arg->sort) || arg->sort == kErrorType)
      return arg;
    mismatch(parent, op, k, "of type integer", argExpr, arg->sort);
    return errorNode(argExpr);
  }

  TNodePtr build(const Expr &e, std::vector<Scoped> &scope, TypedConstraint &tc) {
    switch (e.kind) {
    case ExprKind::True:
      return node(TOp::True, kBoolType, e);
    case ExprKind::False:
      return node(TOp::False, kBoolType, e);
    case ExprKind::IntLit: {
      auto n = std::make_shared<TNode>();
      n->op = TOp::Int;
      n->sort = kIntType;
      n->value = e.value;
      n->source = &e;
      return n;
    }
    case ExprKind::Var: {
      for (auto it = scope.rbegin(); it != scope.rend(); ++it)
        if (it->name == e.id)
          return node(TOp::Var, it->sort, e, {}, it->slot);
      return undeclared(e, "Unbound variable or undeclared name " + e.id,
                        "\"" + e.id + "\" is neither bound by a quantifier nor declared "
                                      "in the vocabulary.");
    }
    case ExprKind::Name:
    case ExprKind::EnumLit: {
      const auto *s = lookup(e.id);
      if (!s)
        return undeclared(e, "Undeclared symbol " + e.id,
                          "the symbol \"" + e.id + "\" is not declared.");
      if (s->kind == SymKind::Name) {
        used.insert(e.id);
        return node(TOp::Name, s->sort, e, {}, s->index);
      }
      return node(TOp::Elem, s->sort, e, {}, s->index);
    }
    case ExprKind::Apply:
      return buildApply(e, scope, tc);
    case ExprKind::Add:
    case ExprKind::Sub:
    case ExprKind::Mul: {
      const std::string op(operator_symbol(e.kind));
      auto l = requireInt(e, op, 1, *e.args[0], build(*e.args[0], scope, tc));
      auto r = requireInt(e, op, 2, *e.args[1], build(*e.args[1], scope, tc));
      const TOp top = e.kind == ExprKind::Add   ? TOp::Add
                      : e.kind == ExprKind::Sub ? TOp::Sub
                                                : TOp::Mul;
      return node(top, kIntType, e, {l, r});
    }
    case ExprKind::Eq:
    case ExprKind::Neq:
      return buildEquality(e, scope, tc);
    case ExprKind::Lt:
    case ExprKind::Le:
    case ExprKind::Gt:
    case ExprKind::Ge: {
      const std::string op(operator_symbol(e.kind));
      auto l = requireInt(e, op, 1, *e.args[0], build(*e.args[0], scope, tc));
      auto r = requireInt(e, op, 2, *e.args[1], build(*e.args[1], scope, tc));
      const TOp top = e.kind == ExprKind::Lt   ? TOp::Lt
                      : e.kind == ExprKind::Le ? TOp::Le
                      : e.kind == ExprKind::Gt ? TOp::Gt
                                               : TOp::Ge;
      return node(top, kBoolType, e, {l, r});
    }
    case ExprKind::Not: {
      auto a = requireBool(e, "~", 1, *e.args[0], build(*e.args[0], scope, tc));
      return node(TOp::Not, kBoolType, e, {a});
    }
    case ExprKind::And:
    case ExprKind::Or:
    case ExprKind::Implies:
    case ExprKind::Iff: {
      const std::string op(operator_symbol(e.kind));
      auto l = requireBool(e, op, 1, *e.args[0], build(*e.args[0], scope, tc));
      auto r = requireBool(e, op, 2, *e.args[1], build(*e.args[1], scope, tc));
      const TOp top = e.kind == ExprKind::And   ? TOp::And
                      : e.kind == ExprKind::Or  ? TOp::Or
                      : e.kind == ExprKind::Implies ? TOp::Implies
                                                    : TOp::Iff;
      return node(top, kBoolType, e, {l, r});
    }
    case ExprKind::Forall:
    case ExprKind::Exists: {
      const auto *info = binder(&e);
      const int sort = info && info->resolved ? *info->resolved : kErrorType;
      const int slot = static_cast<int>(tc.binders.size());
      tc.binders.push_back({e.id, sort, slot});
      scope.push_back({e.id, slot, sort});
      auto body = requireBool(e, std::string(operator_symbol(e.kind)), 1, *e.args[0],
                              build(*e.args[0], scope, tc));
      scope.pop_back();
      auto n = node(e.kind == ExprKind::Forall ? TOp::Forall : TOp::Exists, kBoolType, e,
                    {body}, slot);
      std::const_pointer_cast<TNode>(n)->boundSort = sort;
      return n;
    }
    }
    return errorNode(e);
  }

  TNodePtr undeclared(const Expr &e, std::string summary, std::string detail) {
    auto d = error(e.pos, std::move(summary));
    d.detail = {"Detailed diagnostics: in the formula", indent(e), std::move(detail)};
    d.hints = {"check for wrong names (symbols are case-sensitive)",
               "declare the symbol in the Vocabulary section, or bind the variable "
               "with ALL or SOME"};
    diags.push_back(std::move(d));
    return errorNode(e);
  }

  TNodePtr buildApply(const Expr &e, std::vector<Scoped> &scope, TypedConstraint &tc) {
    const auto *s = lookup(e.id);
    std::vector<TNodePtr> built;
    for (const auto &a : e.args)
      built.push_back(build(*a, scope, tc));
    if (!s || (s->kind != SymKind::Pred && s->kind != SymKind::Func)) {
      std::string what = "the symbol \"" + e.id + "\" is not declared as a predicate "
                                                  "or function.";
      if (s && s->kind == SymKind::Sort)
        what = "\"" + e.id + "\" is a sort, not a predicate or function.";
      else if (s)
        what = "\"" + e.id + "\" is a constant and takes no arguments.";
      return undeclared(e, "Undeclared symbol " + e.id, what);
    }
    used.insert(e.id);
    const bool isPred = s->kind == SymKind::Pred;
    const auto &argSorts =
        isPred ? p_.vocab.predicates[static_cast<std::size_t>(s->index)].argSorts
               : p_.vocab.functions[static_cast<std::size_t>(s->index)].argSorts;
    if (argSorts.size() != e.args.size()) {
      auto d = error(e.pos, "Wrong number of arguments for " + e.id);
      d.detail = {"Detailed diagnostics: in the formula", indent(e),
                  "the main operator \"" + e.id + "\" expects " +
                      std::to_string(argSorts.size()) + " argument" +
                      (argSorts.size() == 1 ? "" : "s") + " but is given " +
                      std::to_string(e.args.size()) + "."};
      d.hints = kTypeHints;
      diags.push_back(std::move(d));
      return errorNode(e);
    }
    for (std::size_t i = 0; i < built.size(); ++i)
      built[i] = fitSort(e, e.id, i + 1, *p_.sortIndex(argSorts[i]), *e.args[i],
                         std::move(built[i]));
    if (isPred)
      return node(TOp::Pred, kBoolType, e, std::move(built), s->index);
    return node(TOp::Func,
                *p_.sortIndex(p_.vocab.functions[static_cast<std::size_t>(s->index)].resultSort),
                e, std::move(built), s->index);
  }

  TNodePtr buildEquality(const Expr &e, std::vector<Scoped> &scope, TypedConstraint &tc) {
    const std::string op(operator_symbol(e.kind));
    auto l = build(*e.args[0], scope, tc);
    auto r = build(*e.args[1], scope, tc);
    const TOp top = e.kind == ExprKind::Eq ? TOp::Eq : TOp::Neq;
    if (l->sort == kErrorType || r->sort == kErrorType)
      return node(top, kBoolType, e, {l, r});
    if (l->sort == kBoolType) {
      mismatch(e, op, 1, "a term", *e.args[0], l->sort);
      return errorNode(e);
    }
    if (r->sort == kBoolType) {
      mismatch(e, op, 2, ofType(typeName(l->sort)), *e.args[1], r->sort);
      return errorNode(e);
    }
    const bool compatible =
        l->sort == r->sort || (l->sort == kIntType && isIntish(r->sort)) ||
        (r->sort == kIntType && isIntish(l->sort));
    if (!compatible) {
      mismatch(e, op, 2, ofType(typeName(l->sort)), *e.args[1], r->sort);
      return errorNode(e);
    }
    return node(top, kBoolType, e, {l, r});
  }

  const Problem &p_;
  std::map<std::string, Symbol> syms_;
  std::map<const Expr *, BinderInfo> binders_;
  std::vector<const Expr *> order_;
};

void warnUnused(const Problem &p, const std::set<std::string> &used,
                std::vector<Diagnostic> &diags) {
  auto warn = [&](const std::string &name, SourcePos pos, const std::string &what) {
    if (used.count(name))
      return;
    Diagnostic d;
    d.severity = Severity::Warning;
    d.line = pos.line;
    d.column = pos.column;
    d.offendingText = lineOf(p.source, pos.line);
    d.message = what + " " + name + " is declared but never used";
    diags.push_back(std::move(d));
  };
  for (const auto &pr : p.vocab.predicates)
    warn(pr.name, pr.pos, "predicate");
  for (const auto &f : p.vocab.functions)
    warn(f.name, f.pos, "function");
  for (const auto &n : p.vocab.names)
    warn(n.name, n.pos, "name");
}

} // namespace

CheckResult check(const Problem &problem) {
  Checker checker(problem);
  std::vector<TypedConstraint> typed;
  bool ok = true;
  for (const auto &c : problem.constraints) {
    auto tc = checker.typeConstraint(c);
    if (tc)
      typed.push_back(std::move(*tc));
    else
      ok = false;
  }
  CheckResult result;
  result.diagnostics = std::move(checker.diags);
  if (!ok || has_errors(result.diagnostics))
    return result;

  if (problem.constraints.empty()) {
    Diagnostic d;
    d.severity = Severity::Warning;
    d.line = 1;
    d.message = "no constraints";
    d.hints = {"write the constraints of the problem under 'Constraints:'"};
    result.diagnostics.push_back(std::move(d));
  } else {
    warnUnused(problem, checker.used, result.diagnostics);
  }
  TypedProblem tp;
  tp.problem = problem;
  tp.constraints = std::move(typed);
  result.typed = std::move(tp);
  return result;
}

SortInference infer_variable_sorts(const Problem &problem, const Expr &quantifier) {
  Checker checker(problem);
  checker.inferAll(quantifier);
  SortInference out;
  if (const auto *info = checker.binder(&quantifier); info && info->resolved)
    out.sort = info->resolved;
  for (auto &d : checker.diags)
    if (d.isError() && !out.error) {
      // Report only the error about this binder, if any.
      if (d.message.find(" " + quantifier.id) != std::string::npos)
        out.error = d;
    }
  if (!out.sort && !out.error && !checker.diags.empty())
    out.error = checker.diags.front();
  return out;
}

namespace {

void auditNode(const TypedProblem &tp, const TypedConstraint &tc, const TNode &n,
               std::vector<std::string> &out) {
  auto expectSort = [&](const TNode &arg, int sort, const std::string &where) {
    if (arg.sort != sort)
      out.push_back(where + ": argument has type " + tp.typeName(arg.sort) +
                    ", expected " + tp.typeName(sort));
  };
  auto intish = [&](int s) { return s == kIntType || tp.isIntRange(s); };
  switch (n.op) {
  case TOp::Pred: {
    const auto sorts = tp.predicateArgSorts(n.symbol);
    if (sorts.size() != n.args.size())
      out.push_back("arity mismatch for predicate " +
                    tp.problem.vocab.predicates[static_cast<std::size_t>(n.symbol)].name);
    else
      for (std::size_t i = 0; i < sorts.size(); ++i)
        expectSort(*n.args[i], sorts[i],
                   tp.problem.vocab.predicates[static_cast<std::size_t>(n.symbol)].name);
    if (n.sort != kBoolType)
      out.push_back("predicate application not typed bool");
    break;
  }
  case TOp::Func: {
    const auto sorts = tp.functionArgSorts(n.symbol);
    const auto &name = tp.problem.vocab.functions[static_cast<std::size_t>(n.symbol)].name;
    if (sorts.size() != n.args.size())
      out.push_back("arity mismatch for function " + name);
    else
      for (std::size_t i = 0; i < sorts.size(); ++i)
        expectSort(*n.args[i], sorts[i], name);
    if (n.sort != tp.functionResultSort(n.symbol))
      out.push_back("function " + name + " has the wrong result sort");
    break;
  }
  case TOp::Name:
    if (n.sort != tp.nameSort(n.symbol))
      out.push_back("name has the wrong sort");
    break;
  case TOp::Var:
    if (n.symbol < 0 || n.symbol >= static_cast<int>(tc.binders.size()) ||
        tc.binders[static_cast<std::size_t>(n.symbol)].sort != n.sort)
      out.push_back("variable occurrence disagrees with its binder");
    break;
  case TOp::Elem:
    if (n.sort < 0 || n.symbol < 0 ||
        n.symbol >= *tp.problem.sorts[static_cast<std::size_t>(n.sort)].pinnedSize())
      out.push_back("element constant out of range");
    break;
  case TOp::Eq:
  case TOp::Neq: {
    const int a = n.args[0]->sort, b = n.args[1]->sort;
    if (!(a == b || (a == kIntType && intish(b)) || (b == kIntType && intish(a))) ||
        a == kBoolType)
      out.push_back("equality between incompatible types " + tp.typeName(a) + " and " +
                    tp.typeName(b));
    break;
  }
  case TOp::Lt:
  case TOp::Le:
  case TOp::Gt:
  case TOp::Ge:
  case TOp::Add:
  case TOp::Sub:
  case TOp::Mul:
    for (const auto &a : n.args)
      if (!intish(a->sort))
        out.push_back("integer operator applied to " + tp.typeName(a->sort));
    break;
  case TOp::Not:
  case TOp::And:
  case TOp::Or:
  case TOp::Implies:
  case TOp::Iff:
    for (const auto &a : n.args)
      if (a->sort != kBoolType)
        out.push_back("connective applied to " + tp.typeName(a->sort));
    break;
  case TOp::Forall:
  case TOp::Exists:
    if (n.boundSort < 0 || n.boundSort >= tp.sortCount())
      out.push_back("quantifier over an unknown sort");
    if (n.args[0]->sort != kBoolType)
      out.push_back("quantifier body is not a formula");
    break;
  default:
    break;
  }
  for (const auto &a : n.args)
    auditNode(tp, tc, *a, out);
}

} // namespace

std::vector<std::string> audit(const TypedProblem &tp) {
  std::vector<std::string> out;
  for (const auto &tc : tp.constraints) {
    if (tc.formula->sort != kBoolType)
      out.push_back("constraint is not a formula");
    auditNode(tp, tc, *tc.formula, out);
  }
  return out;
}

} // namespace lff

#include "lff/ast.hpp"

#include <algorithm>
#include <sstream>

namespace lff {

ExprPtr Expr::make(ExprKind kind, std::string id, std::vector<ExprPtr> args,
                   SourcePos pos) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->id = std::move(id);
  e->args = std::move(args);
  e->pos = pos;
  return e;
}

ExprPtr Expr::intLit(std::int64_t v, SourcePos pos) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::IntLit;
  e->value = v;
  e->pos = pos;
  return e;
}

ExprPtr Expr::quantifier(ExprKind kind, std::string var,
                         std::optional<std::string> sort, ExprPtr body,
                         SourcePos pos) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->id = std::move(var);
  e->sortAnnotation = std::move(sort);
  e->args.push_back(std::move(body));
  e->pos = pos;
  return e;
}

bool Expr::isComparison() const {
  switch (kind) {
  case ExprKind::Eq:
  case ExprKind::Neq:
  case ExprKind::Lt:
  case ExprKind::Le:
  case ExprKind::Gt:
  case ExprKind::Ge:
    return true;
  default:
    return false;
  }
}

bool Expr::isConnective() const {
  switch (kind) {
  case ExprKind::Not:
  case ExprKind::And:
  case ExprKind::Or:
  case ExprKind::Implies:
  case ExprKind::Iff:
    return true;
  default:
    return false;
  }
}

bool structurallyEqual(const Expr &a, const Expr &b) {
  if (a.kind != b.kind || a.id != b.id || a.value != b.value ||
      a.sortAnnotation != b.sortAnnotation || a.args.size() != b.args.size())
    return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!structurallyEqual(*a.args[i], *b.args[i]))
      return false;
  return true;
}

std::string_view operator_symbol(ExprKind kind) {
  switch (kind) {
  case ExprKind::Add: return "+";
  case ExprKind::Sub: return "-";
  case ExprKind::Mul: return "*";
  case ExprKind::Eq: return "=";
  case ExprKind::Neq: return "/=";
  case ExprKind::Lt: return "<";
  case ExprKind::Le: return "<=";
  case ExprKind::Gt: return ">";
  case ExprKind::Ge: return ">=";
  case ExprKind::Not: return "~";
  case ExprKind::And: return "&";
  case ExprKind::Or: return "|";
  case ExprKind::Implies: return "->";
  case ExprKind::Iff: return "<->";
  case ExprKind::Forall: return "ALL";
  case ExprKind::Exists: return "SOME";
  case ExprKind::True: return "true";
  case ExprKind::False: return "false";
  default: return "";
  }
}

namespace {

// Binding strength, loosest first. Matches the parser's grammar levels.
int precedence(const Expr &e) {
  switch (e.kind) {
  case ExprKind::Iff: return 1;
  case ExprKind::Implies: return 2;
  case ExprKind::Or: return 3;
  case ExprKind::And: return 4;
  case ExprKind::Not:
  case ExprKind::Forall:
  case ExprKind::Exists: return 5;
  case ExprKind::Eq:
  case ExprKind::Neq:
  case ExprKind::Lt:
  case ExprKind::Le:
  case ExprKind::Gt:
  case ExprKind::Ge: return 6;
  case ExprKind::Add:
  case ExprKind::Sub: return 7;
  case ExprKind::Mul: return 8;
  default: return 9;
  }
}

void render(const Expr &e, int context, std::string &out) {
  const int prec = precedence(e);
  const bool parens = prec < context;
  if (parens)
    out += '(';
  switch (e.kind) {
  case ExprKind::Var:
  case ExprKind::Name:
  case ExprKind::EnumLit:
    out += e.id;
    break;
  case ExprKind::IntLit:
    out += std::to_string(e.value);
    break;
  case ExprKind::Apply:
    out += e.id;
    if (!e.args.empty()) {
      out += '(';
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i)
          out += ',';
        render(*e.args[i], 0, out);
      }
      out += ')';
    }
    break;
  case ExprKind::True:
  case ExprKind::False:
    out += operator_symbol(e.kind);
    break;
  case ExprKind::Not:
    out += '~';
    render(*e.args[0], prec, out);
    break;
  case ExprKind::Forall:
  case ExprKind::Exists:
    out += operator_symbol(e.kind);
    out += ' ';
    out += e.id;
    if (e.sortAnnotation) {
      out += ": ";
      out += *e.sortAnnotation;
    }
    out += ' ';
    render(*e.args[0], prec, out);
    break;
  case ExprKind::Implies:
    // right associative
    render(*e.args[0], prec + 1, out);
    out += " -> ";
    render(*e.args[1], prec, out);
    break;
  case ExprKind::Eq:
  case ExprKind::Neq:
  case ExprKind::Lt:
  case ExprKind::Le:
  case ExprKind::Gt:
  case ExprKind::Ge:
    render(*e.args[0], prec + 1, out);
    out += ' ';
    out += operator_symbol(e.kind);
    out += ' ';
    render(*e.args[1], prec + 1, out);
    break;
  default: // left-associative binary operators
    render(*e.args[0], prec, out);
    out += ' ';
    out += operator_symbol(e.kind);
    out += ' ';
    render(*e.args[1], prec + 1, out);
    break;
  }
  if (parens)
    out += ')';
}

void collectFree(const Expr &e, std::vector<std::string> &bound,
                 std::set<std::string> &out) {
  if (e.kind == ExprKind::Var) {
    if (std::find(bound.begin(), bound.end(), e.id) == bound.end())
      out.insert(e.id);
    return;
  }
  if (e.isQuantifier()) {
    bound.push_back(e.id);
    collectFree(*e.args[0], bound, out);
    bound.pop_back();
    return;
  }
  for (const auto &a : e.args)
    collectFree(*a, bound, out);
}

} // namespace

std::string render_formula(const Expr &e) {
  std::string out;
  render(e, 0, out);
  return out;
}

std::set<std::string> free_variables(const Expr &e) {
  std::vector<std::string> bound;
  std::set<std::string> out;
  collectFree(e, bound, out);
  return out;
}

std::optional<int> SortDecl::pinnedSize() const {
  if (const auto *en = std::get_if<EnumSort>(&kind))
    return static_cast<int>(en->elements.size());
  if (const auto *ir = std::get_if<IntRangeSort>(&kind))
    return static_cast<int>(ir->hi - ir->lo + 1);
  return std::nullopt;
}

std::optional<int> Problem::sortIndex(std::string_view name) const {
  for (std::size_t i = 0; i < sorts.size(); ++i)
    if (sorts[i].name == name)
      return static_cast<int>(i);
  return std::nullopt;
}

std::string_view Problem::constraintText(int index) const {
  const auto &span = constraints.at(static_cast<std::size_t>(index)).span;
  if (span.end.offset > source.size() || span.begin.offset > span.end.offset)
    return {};
  return std::string_view(source).substr(span.begin.offset,
                                         span.end.offset - span.begin.offset);
}

std::string open_element_label(std::string_view sort, int k) {
  return std::string(sort) + "@" + std::to_string(k + 1);
}

std::vector<SortDomain> make_domains(const Problem &p,
                                     const std::vector<int> &sizes) {
  std::vector<SortDomain> out;
  out.reserve(p.sorts.size());
  for (std::size_t s = 0; s < p.sorts.size(); ++s) {
    const auto &decl = p.sorts[s];
    SortDomain d;
    if (const auto *en = std::get_if<EnumSort>(&decl.kind)) {
      d.labels = en->elements;
    } else if (const auto *ir = std::get_if<IntRangeSort>(&decl.kind)) {
      for (auto v = ir->lo; v <= ir->hi; ++v)
        d.labels.push_back(std::to_string(v));
    } else {
      for (int k = 0; k < sizes.at(s); ++k)
        d.labels.push_back(open_element_label(decl.name, k));
    }
    d.size = static_cast<int>(d.labels.size());
    out.push_back(std::move(d));
  }
  return out;
}

std::size_t tuple_count(const Problem &p, const std::vector<std::string> &argSorts,
                        const std::vector<SortDomain> &domains) {
  std::size_t n = 1;
  for (const auto &s : argSorts)
    n *= static_cast<std::size_t>(domains.at(*p.sortIndex(s)).size);
  return n;
}

std::vector<std::string> validate_interpretation(const Problem &p,
                                                 const Interpretation &m) {
  std::vector<std::string> issues;
  if (m.domains.size() != p.sorts.size()) {
    issues.push_back("domain count differs from sort count");
    return issues;
  }
  for (std::size_t s = 0; s < p.sorts.size(); ++s) {
    const auto &d = m.domains[s];
    const auto &decl = p.sorts[s];
    if (d.size < 1)
      issues.push_back("sort " + decl.name + " has an empty domain");
    if (static_cast<int>(d.labels.size()) != d.size)
      issues.push_back("sort " + decl.name + " label count differs from size");
    if (auto pinned = decl.pinnedSize(); pinned && *pinned != d.size)
      issues.push_back("sort " + decl.name + " must have size " +
                       std::to_string(*pinned));
    const auto expected = make_domains(p, std::vector<int>(p.sorts.size(), d.size));
    if (!decl.isOpen() && expected[s].labels != d.labels)
      issues.push_back("sort " + decl.name + " labels differ from declaration");
  }
  if (!issues.empty())
    return issues;

  if (m.nameValues.size() != p.vocab.names.size())
    issues.push_back("name valuation count differs from declared names");
  else
    for (std::size_t i = 0; i < p.vocab.names.size(); ++i) {
      const int size = m.domains[*p.sortIndex(p.vocab.names[i].sort)].size;
      if (m.nameValues[i] < 0 || m.nameValues[i] >= size)
        issues.push_back("name " + p.vocab.names[i].name + " has no value in its sort");
    }

  if (m.functionTables.size() != p.vocab.functions.size())
    issues.push_back("function table count differs from declared functions");
  else
    for (std::size_t i = 0; i < p.vocab.functions.size(); ++i) {
      const auto &f = p.vocab.functions[i];
      const auto &table = m.functionTables[i];
      if (table.size() != tuple_count(p, f.argSorts, m.domains)) {
        issues.push_back("function " + f.name + " table is not total");
        continue;
      }
      const int size = m.domains[*p.sortIndex(f.resultSort)].size;
      for (int v : table)
        if (v < 0 || v >= size) {
          issues.push_back("function " + f.name + " has a value outside " +
                           f.resultSort);
          break;
        }
    }

  if (m.predicateExtensions.size() != p.vocab.predicates.size())
    issues.push_back("predicate extension count differs from declared predicates");
  else
    for (std::size_t i = 0; i < p.vocab.predicates.size(); ++i) {
      const auto &pr = p.vocab.predicates[i];
      if (m.predicateExtensions[i].size() != tuple_count(p, pr.argSorts, m.domains))
        issues.push_back("predicate " + pr.name + " extension has the wrong shape");
    }
  return issues;
}

namespace {

// Decodes a flat row-major index into element labels.
std::vector<std::string> tupleLabels(const Problem &p,
                                     const std::vector<std::string> &argSorts,
                                     const Interpretation &m, std::size_t flat) {
  std::vector<std::string> labels(argSorts.size());
  for (std::size_t i = argSorts.size(); i-- > 0;) {
    const auto &d = m.domains[*p.sortIndex(argSorts[i])];
    labels[i] = d.labels[flat % static_cast<std::size_t>(d.size)];
    flat /= static_cast<std::size_t>(d.size);
  }
  return labels;
}

std::string joinTuple(const std::vector<std::string> &labels) {
  std::string s;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i)
      s += ',';
    s += labels[i];
  }
  return s;
}

} // namespace

std::string render_interpretation(const Problem &p, const Interpretation &m) {
  std::ostringstream os;
  for (std::size_t s = 0; s < p.sorts.size(); ++s)
    if (p.sorts[s].isOpen())
      os << p.sorts[s].name << " = {" << joinTuple(m.domains[s].labels) << "}\n";
  for (std::size_t i = 0; i < p.vocab.names.size(); ++i) {
    const auto &n = p.vocab.names[i];
    os << n.name << " = "
       << m.domains[*p.sortIndex(n.sort)].labels[static_cast<std::size_t>(m.nameValues[i])]
       << '\n';
  }
  for (std::size_t i = 0; i < p.vocab.functions.size(); ++i) {
    const auto &f = p.vocab.functions[i];
    const auto &result = m.domains[*p.sortIndex(f.resultSort)];
    for (std::size_t row = 0; row < m.functionTables[i].size(); ++row)
      os << f.name << '(' << joinTuple(tupleLabels(p, f.argSorts, m, row))
         << ") = " << result.labels[static_cast<std::size_t>(m.functionTables[i][row])]
         << '\n';
  }
  for (std::size_t i = 0; i < p.vocab.predicates.size(); ++i) {
    const auto &pr = p.vocab.predicates[i];
    const auto &ext = m.predicateExtensions[i];
    if (pr.argSorts.empty()) {
      os << pr.name << " = " << (ext.at(0) ? "true" : "false") << '\n';
      continue;
    }
    os << pr.name << " = {";
    bool first = true;
    for (std::size_t row = 0; row < ext.size(); ++row) {
      if (!ext[row])
        continue;
      if (!first)
        os << ", ";
      first = false;
      const auto labels = tupleLabels(p, pr.argSorts, m, row);
      if (labels.size() == 1)
        os << labels[0];
      else
        os << '(' << joinTuple(labels) << ')';
    }
    os << "}\n";
  }
  return os.str();
}

} // namespace lff

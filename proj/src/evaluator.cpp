#include "lff/evaluator.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace lff {

namespace {

std::int64_t integerOf(const TypedProblem &tp, const TNode &t, std::int64_t v) {
  return t.sort == kIntType ? v : tp.intBase(t.sort) + v;
}

std::size_t rowIndex(const std::vector<SortDomain> &domains, const std::vector<int> &sorts,
                     const std::vector<std::int64_t> &elems) {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < sorts.size(); ++i)
    idx = idx * static_cast<std::size_t>(domains[static_cast<std::size_t>(sorts[i])].size) +
          static_cast<std::size_t>(elems[i]);
  return idx;
}

std::int64_t term(const TypedProblem &tp, const Interpretation &m, const TNode &t,
                  std::vector<int> &env) {
  switch (t.op) {
  case TOp::Var:
    return env.at(static_cast<std::size_t>(t.symbol));
  case TOp::Elem:
    return t.symbol;
  case TOp::Int:
    return t.value;
  case TOp::Name:
    return m.nameValues.at(static_cast<std::size_t>(t.symbol));
  case TOp::Func: {
    std::vector<std::int64_t> args;
    for (const auto &a : t.args)
      args.push_back(term(tp, m, *a, env));
    const auto idx = rowIndex(m.domains, tp.functionArgSorts(t.symbol), args);
    return m.functionTables.at(static_cast<std::size_t>(t.symbol)).at(idx);
  }
  case TOp::Add:
  case TOp::Sub:
  case TOp::Mul: {
    const auto a = integerOf(tp, *t.args[0], term(tp, m, *t.args[0], env));
    const auto b = integerOf(tp, *t.args[1], term(tp, m, *t.args[1], env));
    return t.op == TOp::Add ? a + b : t.op == TOp::Sub ? a - b : a * b;
  }
  default:
    throw std::logic_error("eval: formula used as a term");
  }
}

} // namespace

bool eval(const TypedProblem &tp, const Interpretation &m, const TNode &f,
          std::vector<int> &env) {
  switch (f.op) {
  case TOp::True:
    return true;
  case TOp::False:
    return false;
  case TOp::Pred: {
    std::vector<std::int64_t> args;
    for (const auto &a : f.args)
      args.push_back(term(tp, m, *a, env));
    const auto idx = rowIndex(m.domains, tp.predicateArgSorts(f.symbol), args);
    return m.predicateExtensions.at(static_cast<std::size_t>(f.symbol)).at(idx);
  }
  case TOp::Eq:
  case TOp::Neq:
  case TOp::Lt:
  case TOp::Le:
  case TOp::Gt:
  case TOp::Ge: {
    const TNode &l = *f.args[0], &r = *f.args[1];
    std::int64_t a = term(tp, m, l, env), b = term(tp, m, r, env);
    if (l.sort != r.sort || l.sort == kIntType) {
      a = integerOf(tp, l, a);
      b = integerOf(tp, r, b);
    }
    switch (f.op) {
    case TOp::Eq:
      return a == b;
    case TOp::Neq:
      return a != b;
    case TOp::Lt:
      return a < b;
    case TOp::Le:
      return a <= b;
    case TOp::Gt:
      return a > b;
    default:
      return a >= b;
    }
  }
  case TOp::Not:
    return !eval(tp, m, *f.args[0], env);
  case TOp::And:
    return eval(tp, m, *f.args[0], env) && eval(tp, m, *f.args[1], env);
  case TOp::Or:
    return eval(tp, m, *f.args[0], env) || eval(tp, m, *f.args[1], env);
  case TOp::Implies:
    return !eval(tp, m, *f.args[0], env) || eval(tp, m, *f.args[1], env);
  case TOp::Iff:
    return eval(tp, m, *f.args[0], env) == eval(tp, m, *f.args[1], env);
  case TOp::Forall:
  case TOp::Exists: {
    const bool all = f.op == TOp::Forall;
    const auto slot = static_cast<std::size_t>(f.symbol);
    if (env.size() <= slot)
      env.resize(slot + 1, 0);
    const int size = m.domains.at(static_cast<std::size_t>(f.boundSort)).size;
    for (int e = 0; e < size; ++e) {
      env[slot] = e;
      if (eval(tp, m, *f.args[0], env) != all)
        return !all;
    }
    return all;
  }
  default:
    throw std::logic_error("eval: term used as a formula");
  }
}

bool eval_constraint(const TypedProblem &tp, const Interpretation &m, int index) {
  const auto &c = tp.constraints.at(static_cast<std::size_t>(index));
  std::vector<int> env(c.binders.size(), 0);
  return eval(tp, m, *c.formula, env);
}

std::vector<bool> check_constraints(const Interpretation &m, const TypedProblem &tp) {
  std::vector<bool> out;
  for (std::size_t i = 0; i < tp.constraints.size(); ++i)
    out.push_back(eval_constraint(tp, m, static_cast<int>(i)));
  return out;
}

namespace detail {

Odometer interpretation_odometer(const TypedProblem &tp, const DomainAssignment &da,
                                 Interpretation &shape) {
  const auto &p = tp.problem;
  shape = Interpretation{};
  shape.domains = make_domains(p, da.sizes);
  Odometer o;
  for (std::size_t n = 0; n < p.vocab.names.size(); ++n) {
    o.radix.push_back(shape.domains[static_cast<std::size_t>(tp.nameSort(static_cast<int>(n)))].size);
    shape.nameValues.push_back(0);
  }
  for (std::size_t f = 0; f < p.vocab.functions.size(); ++f) {
    const auto rows = tuple_count(p, p.vocab.functions[f].argSorts, shape.domains);
    const int size =
        shape.domains[static_cast<std::size_t>(tp.functionResultSort(static_cast<int>(f)))].size;
    shape.functionTables.emplace_back(rows, 0);
    for (std::size_t r = 0; r < rows; ++r)
      o.radix.push_back(size);
  }
  for (std::size_t q = 0; q < p.vocab.predicates.size(); ++q) {
    const auto rows = tuple_count(p, p.vocab.predicates[q].argSorts, shape.domains);
    shape.predicateExtensions.emplace_back(rows, false);
    for (std::size_t r = 0; r < rows; ++r)
      o.radix.push_back(2);
  }
  o.digit.assign(o.radix.size(), 0);
  return o;
}

void load_digits(const Odometer &o, Interpretation &m) {
  std::size_t i = 0;
  for (auto &v : m.nameValues)
    v = o.digit[i++];
  for (auto &table : m.functionTables)
    for (auto &v : table)
      v = o.digit[i++];
  for (auto &ext : m.predicateExtensions)
    for (std::size_t r = 0; r < ext.size(); ++r)
      ext[r] = o.digit[i++] != 0;
}

} // namespace detail

std::uint64_t interpretation_space(const TypedProblem &tp, const DomainAssignment &da) {
  Interpretation shape;
  const auto o = detail::interpretation_odometer(tp, da, shape);
  std::uint64_t total = 1;
  for (int r : o.radix) {
    const auto ur = static_cast<std::uint64_t>(r);
    if (ur == 0)
      return 0;
    if (total > std::numeric_limits<std::uint64_t>::max() / ur)
      return std::numeric_limits<std::uint64_t>::max();
    total *= ur;
  }
  return total;
}

std::vector<Interpretation> brute_force_models(const TypedProblem &tp, const DomainAssignment &da,
                                               std::size_t cap) {
  std::vector<Interpretation> models;
  for_each_interpretation(tp, da, [&](const Interpretation &m) {
    for (std::size_t i = 0; i < tp.constraints.size(); ++i)
      if (!eval_constraint(tp, m, static_cast<int>(i)))
        return true;
    models.push_back(m);
    return models.size() < cap;
  });
  std::sort(models.begin(), models.end());
  return models;
}

int max_satisfiable(const TypedProblem &tp, const DomainAssignment &da) {
  int best = 0;
  const int total = static_cast<int>(tp.constraints.size());
  for_each_interpretation(tp, da, [&](const Interpretation &m) {
    int n = 0;
    for (int i = 0; i < total; ++i)
      n += eval_constraint(tp, m, i) ? 1 : 0;
    best = std::max(best, n);
    return best < total;
  });
  return best;
}

} // namespace lff

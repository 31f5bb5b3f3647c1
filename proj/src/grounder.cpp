#include "lff/grounder.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <sstream>

namespace lff {

using sat::Lit;

std::string render_domain_assignment(const Problem &p, const DomainAssignment &da) {
  std::string out = "(";
  bool first = true;
  for (std::size_t s = 0; s < p.sorts.size(); ++s) {
    if (!p.sorts[s].isOpen())
      continue;
    if (!first)
      out += ", ";
    first = false;
    out += p.sorts[s].name + "=" + std::to_string(da.sizes.at(s));
  }
  return out + ")";
}

std::pair<int, int> SizeBounds::of(const std::string &sort) const {
  auto it = perSort.find(sort);
  return it == perSort.end() ? std::pair{lo, hi} : it->second;
}

std::vector<DomainAssignment> size_vectors(const Problem &p, const SizeBounds &bounds) {
  std::vector<std::size_t> open;
  DomainAssignment base;
  base.sizes.assign(p.sorts.size(), 0);
  std::vector<std::pair<int, int>> ranges;
  for (std::size_t s = 0; s < p.sorts.size(); ++s) {
    if (auto pinned = p.sorts[s].pinnedSize()) {
      base.sizes[s] = *pinned;
      continue;
    }
    auto [lo, hi] = bounds.of(p.sorts[s].name);
    lo = std::max(lo, 1);
    if (lo > hi)
      return {};
    open.push_back(s);
    ranges.emplace_back(lo, hi);
  }

  std::vector<DomainAssignment> out;
  std::vector<int> cur;
  for (auto &r : ranges)
    cur.push_back(r.first);
  for (;;) {
    DomainAssignment da = base;
    for (std::size_t i = 0; i < open.size(); ++i)
      da.sizes[open[i]] = cur[i];
    out.push_back(std::move(da));
    std::size_t i = 0;
    while (i < cur.size() && cur[i] == ranges[i].second) {
      cur[i] = ranges[i].first;
      ++i;
    }
    if (i == cur.size())
      break;
    ++cur[i];
  }

  auto key = [&](const DomainAssignment &da) {
    std::vector<int> v;
    int total = 0;
    for (auto s : open) {
      v.push_back(da.sizes[s]);
      total += da.sizes[s];
    }
    return std::pair{total, v};
  };
  std::stable_sort(out.begin(), out.end(), [&](const auto &a, const auto &b) {
    auto ka = key(a), kb = key(b);
    if (ka.first != kb.first)
      return ka.first < kb.first;
    return ka.second > kb.second;
  });
  return out;
}

std::vector<int> AtomMap::projection() const {
  std::vector<int> vars(static_cast<std::size_t>(numAtoms));
  for (int v = 1; v <= numAtoms; ++v)
    vars[static_cast<std::size_t>(v - 1)] = v;
  return vars;
}

namespace {

std::vector<std::size_t> unflatten(std::size_t tuple, const std::vector<int> &sizes) {
  std::vector<std::size_t> out(sizes.size());
  for (std::size_t i = sizes.size(); i-- > 0;) {
    const auto d = static_cast<std::size_t>(sizes[i]);
    out[i] = tuple % d;
    tuple /= d;
  }
  return out;
}

std::string tupleLabel(const std::vector<int> &argSorts, std::size_t tuple,
                       const std::vector<SortDomain> &domains) {
  std::vector<int> sizes;
  for (int s : argSorts)
    sizes.push_back(domains[static_cast<std::size_t>(s)].size);
  const auto idx = unflatten(tuple, sizes);
  std::string out;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i)
      out += ',';
    out += domains[static_cast<std::size_t>(argSorts[i])].labels[idx[i]];
  }
  return out;
}

std::string applied(const std::string &name, const std::string &args) {
  return args.empty() ? name : name + "(" + args + ")";
}

} // namespace

std::string AtomMap::describe(const TypedProblem &tp, const std::vector<SortDomain> &domains,
                              int var) const {
  if (isAuxiliary(var))
    return "aux" + std::to_string(var);
  const auto &a = atom(var);
  const auto &vocab = tp.problem.vocab;
  switch (a.kind) {
  case AtomKind::Predicate:
    return applied(vocab.predicates[static_cast<std::size_t>(a.symbol)].name,
                   tupleLabel(tp.predicateArgSorts(a.symbol), a.tuple, domains));
  case AtomKind::FunctionCell: {
    const int rs = tp.functionResultSort(a.symbol);
    return applied(vocab.functions[static_cast<std::size_t>(a.symbol)].name,
                   tupleLabel(tp.functionArgSorts(a.symbol), a.tuple, domains)) +
           "=" + domains[static_cast<std::size_t>(rs)].labels[static_cast<std::size_t>(a.value)];
  }
  case AtomKind::NameCell: {
    const int s = tp.nameSort(a.symbol);
    return vocab.names[static_cast<std::size_t>(a.symbol)].name + "=" +
           domains[static_cast<std::size_t>(s)].labels[static_cast<std::size_t>(a.value)];
  }
  }
  return {};
}

std::string Provenance::describe() const {
  return isAxiom() ? "axiom " + axiom : "from constraint " + std::to_string(constraint);
}

namespace {

// Negation normal form DAG with structural sharing.
enum class NK { True, False, Lit, And, Or };

struct PNode {
  NK kind = NK::True;
  Lit lit = 0;
  std::vector<int> kids;
};

class Dag {
public:
  static constexpr int kTrue = 0;
  static constexpr int kFalse = 1;

  Dag() {
    nodes_.push_back({NK::True, 0, {}});
    nodes_.push_back({NK::False, 0, {}});
  }

  const PNode &at(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
  std::size_t size() const { return nodes_.size(); }

  int lit(Lit l) { return intern(NK::Lit, l, {}); }
  static int constant(bool b) { return b ? kTrue : kFalse; }

  int junction(NK kind, const std::vector<int> &in) {
    const int unit = kind == NK::And ? kTrue : kFalse;
    const int zero = kind == NK::And ? kFalse : kTrue;
    std::vector<int> kids;
    for (int k : in) {
      if (k == unit)
        continue;
      if (k == zero)
        return zero;
      if (at(k).kind == kind) {
        const auto &sub = at(k).kids;
        kids.insert(kids.end(), sub.begin(), sub.end());
      } else {
        kids.push_back(k);
      }
    }
    std::sort(kids.begin(), kids.end());
    kids.erase(std::unique(kids.begin(), kids.end()), kids.end());
    std::vector<Lit> lits;
    for (int k : kids)
      if (at(k).kind == NK::Lit)
        lits.push_back(at(k).lit);
    std::sort(lits.begin(), lits.end());
    for (Lit l : lits)
      if (l > 0 && std::binary_search(lits.begin(), lits.end(), -l))
        return zero;
    if (kids.empty())
      return unit;
    if (kids.size() == 1)
      return kids[0];
    return intern(kind, 0, std::move(kids));
  }

  int conj(const std::vector<int> &kids) { return junction(NK::And, kids); }
  int disj(const std::vector<int> &kids) { return junction(NK::Or, kids); }

private:
  int intern(NK kind, Lit l, std::vector<int> kids) {
    auto key = std::make_tuple(static_cast<int>(kind), l, kids);
    auto it = index_.find(key);
    if (it != index_.end())
      return it->second;
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back({kind, l, std::move(kids)});
    index_.emplace(std::move(key), id);
    return id;
  }

  std::vector<PNode> nodes_;
  std::map<std::tuple<int, Lit, std::vector<int>>, int> index_;
};

// One possible value of a term together with the (positive) cell atoms that
// must hold for the term to take it.
struct Case {
  std::vector<Lit> conds;
  std::int64_t value = 0;
};
using Cases = std::vector<Case>;

class Grounder {
public:
  Grounder(const TypedProblem &tp, const DomainAssignment &da, const GroundOptions &opts)
      : tp_(tp), opts_(opts) {
    g_.da = da;
    g_.domains = make_domains(tp.problem, da.sizes);
  }

  Grounding run() {
    allocateAtoms();
    estimate();
    addAxioms();
    for (std::size_t k = 0; k < tp_.constraints.size(); ++k)
      groundConstraint(static_cast<int>(k));
    g_.cnf.cnf.numVars = nextVar_ - 1;
    return std::move(g_);
  }

private:
  int domSize(int sort) const { return g_.domains[static_cast<std::size_t>(sort)].size; }

  std::size_t tupleCount(const std::vector<int> &sorts) const {
    std::size_t n = 1;
    for (int s : sorts)
      n *= static_cast<std::size_t>(domSize(s));
    return n;
  }

  void allocateAtoms() {
    auto &am = g_.atoms;
    const auto &vocab = tp_.problem.vocab;
    std::size_t total = 0;
    for (std::size_t p = 0; p < vocab.predicates.size(); ++p)
      total += tupleCount(tp_.predicateArgSorts(static_cast<int>(p)));
    for (std::size_t f = 0; f < vocab.functions.size(); ++f)
      total += tupleCount(tp_.functionArgSorts(static_cast<int>(f))) *
               static_cast<std::size_t>(domSize(tp_.functionResultSort(static_cast<int>(f))));
    for (std::size_t n = 0; n < vocab.names.size(); ++n)
      total += static_cast<std::size_t>(domSize(tp_.nameSort(static_cast<int>(n))));
    if (total > opts_.atomCap)
      throw ResourceLimit("Problem too large: " + std::to_string(total) +
                          " ground atoms exceed the limit of " +
                          std::to_string(opts_.atomCap));

    int cell = 0;
    for (std::size_t p = 0; p < vocab.predicates.size(); ++p) {
      am.predicateBase.push_back(nextVar_);
      const auto n = tupleCount(tp_.predicateArgSorts(static_cast<int>(p)));
      for (std::size_t t = 0; t < n; ++t) {
        am.atoms.push_back({AtomKind::Predicate, static_cast<int>(p), t, 0});
        cellOf_.push_back(-1);
        ++nextVar_;
      }
    }
    for (std::size_t f = 0; f < vocab.functions.size(); ++f) {
      am.functionBase.push_back(nextVar_);
      const int rs = domSize(tp_.functionResultSort(static_cast<int>(f)));
      am.functionResultSize.push_back(rs);
      const auto n = tupleCount(tp_.functionArgSorts(static_cast<int>(f)));
      for (std::size_t t = 0; t < n; ++t, ++cell)
        for (int v = 0; v < rs; ++v) {
          am.atoms.push_back({AtomKind::FunctionCell, static_cast<int>(f), t, v});
          cellOf_.push_back(cell);
          ++nextVar_;
        }
    }
    for (std::size_t n = 0; n < vocab.names.size(); ++n, ++cell) {
      am.nameBase.push_back(nextVar_);
      const int size = domSize(tp_.nameSort(static_cast<int>(n)));
      am.nameSize.push_back(size);
      for (int v = 0; v < size; ++v) {
        am.atoms.push_back({AtomKind::NameCell, static_cast<int>(n), 0, v});
        cellOf_.push_back(cell);
        ++nextVar_;
      }
    }
    am.numAtoms = nextVar_ - 1;
  }

  // Rough count of ground instances; guards against quantifier blow-up
  // before any work is done.
  double instances(const TNode &n) const {
    switch (n.op) {
    case TOp::Forall:
    case TOp::Exists:
      return domSize(n.boundSort) * instances(*n.args[0]);
    default: {
      double sum = 1;
      for (const auto &a : n.args)
        sum += instances(*a);
      if (n.op == TOp::Func || n.op == TOp::Name)
        sum *= domSize(n.sort);
      return sum;
    }
    }
  }

  void estimate() const {
    double total = g_.atoms.numAtoms;
    for (const auto &c : tp_.constraints)
      total += instances(*c.formula);
    if (total > static_cast<double>(opts_.atomCap))
      throw ResourceLimit("Problem too large: about " +
                          std::to_string(static_cast<long long>(total)) +
                          " ground instances exceed the limit of " +
                          std::to_string(opts_.atomCap));
  }

  void emit(std::vector<Lit> clause, Provenance prov) {
    std::sort(clause.begin(), clause.end());
    clause.erase(std::unique(clause.begin(), clause.end()), clause.end());
    for (std::size_t i = 0; i + 1 < clause.size(); ++i)
      for (std::size_t j = i + 1; j < clause.size(); ++j)
        if (clause[i] == -clause[j])
          return;
    g_.cnf.cnf.clauses.push_back(std::move(clause));
    g_.cnf.provenance.push_back(std::move(prov));
  }

  static Provenance axiom(std::string tag) { return {-1, std::move(tag)}; }

  void exactlyOne(const std::vector<Lit> &lits, const std::string &alo,
                  const std::string &amo) {
    emit(lits, axiom(alo));
    for (std::size_t i = 0; i < lits.size(); ++i)
      for (std::size_t j = i + 1; j < lits.size(); ++j)
        emit({-lits[i], -lits[j]}, axiom(amo));
  }

  void addAxioms() {
    const auto &am = g_.atoms;
    const auto &vocab = tp_.problem.vocab;
    for (std::size_t f = 0; f < vocab.functions.size(); ++f) {
      const int fi = static_cast<int>(f);
      const auto argSorts = tp_.functionArgSorts(fi);
      const auto n = tupleCount(argSorts);
      for (std::size_t t = 0; t < n; ++t) {
        std::vector<Lit> lits;
        for (int v = 0; v < am.functionResultSize[f]; ++v)
          lits.push_back(am.functionVar(fi, t, v));
        const std::string cell =
            vocab.functions[f].name + (argSorts.empty() ? "" : "," + tupleLabel(argSorts, t, g_.domains));
        exactlyOne(lits, "totality(" + cell + ")", "functionality(" + cell + ")");
      }
    }
    for (std::size_t n = 0; n < vocab.names.size(); ++n) {
      std::vector<Lit> lits;
      for (int v = 0; v < am.nameSize[n]; ++v)
        lits.push_back(am.nameVar(static_cast<int>(n), v));
      exactlyOne(lits, "name-totality(" + vocab.names[n].name + ")",
                 "name-functionality(" + vocab.names[n].name + ")");
    }
    if (opts_.symmetryBreaking)
      addSymmetryBreaking();
  }

  // Names of an open sort take values in order of first occurrence: a name
  // may use value v > 0 only if an earlier name of its sort uses v - 1.
  void addSymmetryBreaking() {
    const auto &am = g_.atoms;
    const auto &vocab = tp_.problem.vocab;
    for (int s = 0; s < tp_.sortCount(); ++s) {
      if (!tp_.problem.sorts[static_cast<std::size_t>(s)].isOpen())
        continue;
      std::vector<int> names;
      for (std::size_t n = 0; n < vocab.names.size(); ++n)
        if (tp_.nameSort(static_cast<int>(n)) == s)
          names.push_back(static_cast<int>(n));
      for (std::size_t k = 0; k < names.size(); ++k)
        for (int v = 1; v < domSize(s); ++v) {
          std::vector<Lit> clause{-am.nameVar(names[k], v)};
          for (std::size_t j = 0; j < k; ++j)
            clause.push_back(am.nameVar(names[j], v - 1));
          emit(std::move(clause),
               axiom("symmetry(" + vocab.names[static_cast<std::size_t>(names[k])].name + ")"));
        }
    }
  }

  // ---- terms --------------------------------------------------------------

  std::int64_t asInt(const TNode &n, std::int64_t v) const {
    return n.sort == kIntType ? v : tp_.intBase(n.sort) + v;
  }

  // Merges two condition sets; false when they demand different values of
  // the same cell.
  bool merge(std::vector<Lit> &into, const std::vector<Lit> &add) const {
    for (Lit l : add) {
      if (std::find(into.begin(), into.end(), l) != into.end())
        continue;
      const int c = cellOf_[static_cast<std::size_t>(l - 1)];
      for (Lit m : into)
        if (cellOf_[static_cast<std::size_t>(m - 1)] == c)
          return false;
      into.push_back(l);
    }
    return true;
  }

  // Every consistent combination of argument cases.
  template <typename F> void combos(const std::vector<Cases> &parts, F &&visit) const {
    std::vector<std::size_t> idx(parts.size(), 0);
    for (const auto &p : parts)
      if (p.empty())
        return;
    std::vector<std::int64_t> values(parts.size());
    for (;;) {
      std::vector<Lit> conds;
      bool ok = true;
      for (std::size_t i = 0; i < parts.size() && ok; ++i) {
        const auto &c = parts[i][idx[i]];
        ok = merge(conds, c.conds);
        values[i] = c.value;
      }
      if (ok)
        visit(conds, values);
      std::size_t i = parts.size();
      while (i > 0) {
        --i;
        if (++idx[i] < parts[i].size())
          break;
        idx[i] = 0;
        if (i == 0)
          return;
      }
      if (parts.empty())
        return;
    }
  }

  std::vector<Cases> argCases(const TNode &n) {
    std::vector<Cases> parts;
    for (const auto &a : n.args)
      parts.push_back(term(*a));
    return parts;
  }

  std::size_t tupleOf(const std::vector<int> &sorts, const std::vector<std::int64_t> &values) const {
    std::size_t t = 0;
    for (std::size_t i = 0; i < sorts.size(); ++i)
      t = t * static_cast<std::size_t>(domSize(sorts[i])) + static_cast<std::size_t>(values[i]);
    return t;
  }

  Cases term(const TNode &n) {
    switch (n.op) {
    case TOp::Var:
      return {{{}, env_[static_cast<std::size_t>(n.symbol)]}};
    case TOp::Elem:
      return {{{}, n.symbol}};
    case TOp::Int:
      return {{{}, n.value}};
    case TOp::Name: {
      const int size = domSize(n.sort);
      if (size == 1)
        return {{{}, 0}};
      Cases out;
      for (int v = 0; v < size; ++v)
        out.push_back({{g_.atoms.nameVar(n.symbol, v)}, v});
      return out;
    }
    case TOp::Func: {
      const auto sorts = tp_.functionArgSorts(n.symbol);
      const int size = domSize(n.sort);
      Cases out;
      combos(argCases(n), [&](const std::vector<Lit> &conds, const std::vector<std::int64_t> &vals) {
        const auto t = tupleOf(sorts, vals);
        for (int v = 0; v < size; ++v) {
          Case c{conds, v};
          if (size > 1 && !merge(c.conds, {g_.atoms.functionVar(n.symbol, t, v)}))
            continue;
          out.push_back(std::move(c));
        }
      });
      return out;
    }
    case TOp::Add:
    case TOp::Sub:
    case TOp::Mul: {
      Cases out;
      const TNode &l = *n.args[0], &r = *n.args[1];
      combos(argCases(n), [&](const std::vector<Lit> &conds, const std::vector<std::int64_t> &vals) {
        const auto a = asInt(l, vals[0]), b = asInt(r, vals[1]);
        const auto v = n.op == TOp::Add ? a + b : n.op == TOp::Sub ? a - b : a * b;
        out.push_back({conds, v});
      });
      return out;
    }
    default:
      throw std::logic_error("grounder: formula in term position");
    }
  }

  // ---- formulae -----------------------------------------------------------

  bool compare(const TNode &n, std::int64_t a, std::int64_t b) const {
    const TNode &l = *n.args[0], &r = *n.args[1];
    const bool sameSort = l.sort == r.sort && l.sort != kIntType;
    if (!sameSort) {
      a = asInt(l, a);
      b = asInt(r, b);
    }
    switch (n.op) {
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
    case TOp::Ge:
      return a >= b;
    default:
      throw std::logic_error("grounder: not a comparison");
    }
  }

  // AND over argument combinations of (conditions -> atom), the atom taken
  // positively or negatively.
  template <typename A> int atomic(const TNode &n, bool pos, bool constantAtom, A &&atomFor) {
    std::vector<int> parts;
    std::vector<int> orOfMatches;
    bool singleCond = constantAtom && pos;
    combos(argCases(n), [&](const std::vector<Lit> &conds, const std::vector<std::int64_t> &vals) {
      const int a = atomFor(vals);
      const int signedAtom = pos ? a : negate(a);
      if (conds.size() != 1)
        singleCond = false;
      else if (a == Dag::kTrue)
        orOfMatches.push_back(dag_.lit(conds[0]));
      std::vector<int> alt{signedAtom};
      for (Lit c : conds)
        alt.push_back(dag_.lit(-c));
      parts.push_back(dag_.disj(alt));
    });
    if (singleCond)
      return dag_.disj(orOfMatches);
    return dag_.conj(parts);
  }

  int negate(int id) {
    if (id == Dag::kTrue)
      return Dag::kFalse;
    if (id == Dag::kFalse)
      return Dag::kTrue;
    return dag_.lit(-dag_.at(id).lit);
  }

  int formula(const TNode &n, bool pos) {
    if (dag_.size() > opts_.atomCap)
      throw ResourceLimit("Problem too large: the ground formula exceeds " +
                          std::to_string(opts_.atomCap) + " nodes");
    switch (n.op) {
    case TOp::True:
      return Dag::constant(pos);
    case TOp::False:
      return Dag::constant(!pos);
    case TOp::Pred: {
      const auto sorts = tp_.predicateArgSorts(n.symbol);
      return atomic(n, pos, false, [&](const std::vector<std::int64_t> &vals) {
        return dag_.lit(g_.atoms.predicateVar(n.symbol, tupleOf(sorts, vals)));
      });
    }
    case TOp::Eq:
    case TOp::Neq:
    case TOp::Lt:
    case TOp::Le:
    case TOp::Gt:
    case TOp::Ge:
      return atomic(n, pos, true, [&](const std::vector<std::int64_t> &vals) {
        return Dag::constant(compare(n, vals[0], vals[1]));
      });
    case TOp::Not:
      return formula(*n.args[0], !pos);
    case TOp::And:
    case TOp::Or: {
      const bool conj = (n.op == TOp::And) == pos;
      std::vector<int> kids{formula(*n.args[0], pos), formula(*n.args[1], pos)};
      return conj ? dag_.conj(kids) : dag_.disj(kids);
    }
    case TOp::Implies:
      if (pos)
        return dag_.disj({formula(*n.args[0], false), formula(*n.args[1], true)});
      return dag_.conj({formula(*n.args[0], true), formula(*n.args[1], false)});
    case TOp::Iff: {
      const int ap = formula(*n.args[0], true), an = formula(*n.args[0], false);
      const int bp = formula(*n.args[1], true), bn = formula(*n.args[1], false);
      if (pos)
        return dag_.conj({dag_.disj({an, bp}), dag_.disj({ap, bn})});
      return dag_.disj({dag_.conj({ap, bn}), dag_.conj({an, bp})});
    }
    case TOp::Forall:
    case TOp::Exists: {
      const bool conj = (n.op == TOp::Forall) == pos;
      const auto slot = static_cast<std::size_t>(n.symbol);
      std::vector<int> kids;
      for (int e = 0; e < domSize(n.boundSort); ++e) {
        env_[slot] = e;
        kids.push_back(formula(*n.args[0], pos));
        if (kids.back() == (conj ? Dag::kFalse : Dag::kTrue))
          break;
      }
      return conj ? dag_.conj(kids) : dag_.disj(kids);
    }
    default:
      throw std::logic_error("grounder: term in formula position");
    }
  }

  // ---- clausification -----------------------------------------------------

  // Auxiliary a with a -> node, introduced only for the polarity in which the
  // node occurs (inside a clause, hence positively).
  Lit auxFor(int id) {
    auto it = aux_.find(id);
    if (it != aux_.end())
      return it->second;
    const Lit a = nextVar_++;
    aux_.emplace(id, a);
    for (int k : dag_.at(id).kids) {
      auto clause = clauseOf(k);
      clause.push_back(-a);
      emit(std::move(clause), {constraint_, {}});
    }
    return a;
  }

  std::vector<Lit> clauseOf(int id) {
    const auto &node = dag_.at(id);
    switch (node.kind) {
    case NK::Lit:
      return {node.lit};
    case NK::And:
      return {auxFor(id)};
    case NK::Or: {
      std::vector<Lit> out;
      for (int k : node.kids) {
        auto sub = clauseOf(k);
        out.insert(out.end(), sub.begin(), sub.end());
      }
      return out;
    }
    default:
      throw std::logic_error("grounder: constant inside a junction");
    }
  }

  void groundConstraint(int k) {
    const auto &tc = tp_.constraints[static_cast<std::size_t>(k)];
    constraint_ = k;
    aux_.clear();
    env_.assign(tc.binders.size(), 0);
    const int root = formula(*tc.formula, true);
    if (root == Dag::kTrue)
      return;
    if (root == Dag::kFalse) {
      g_.falseConstraints.push_back(k);
      emit({}, {k, {}});
      return;
    }
    const auto &node = dag_.at(root);
    if (node.kind == NK::And) {
      for (int kid : node.kids)
        emit(clauseOf(kid), {k, {}});
    } else {
      emit(clauseOf(root), {k, {}});
    }
  }

  const TypedProblem &tp_;
  GroundOptions opts_;
  Grounding g_;
  Dag dag_;
  int nextVar_ = 1;
  std::vector<int> cellOf_; // per atom variable; -1 for predicate atoms
  std::vector<std::int64_t> env_;
  std::map<int, Lit> aux_;
  int constraint_ = -1;
};

} // namespace

Grounding ground(const TypedProblem &tp, const DomainAssignment &da, const GroundOptions &options) {
  if (da.sizes.size() != tp.problem.sorts.size())
    throw std::invalid_argument("domain assignment does not cover every sort");
  return Grounder(tp, da, options).run();
}

Interpretation decode(const std::vector<bool> &assignment, const Grounding &g,
                      const TypedProblem &tp) {
  const auto &am = g.atoms;
  const auto &vocab = tp.problem.vocab;
  auto truth = [&](int var) {
    return static_cast<std::size_t>(var) < assignment.size() &&
           assignment[static_cast<std::size_t>(var)];
  };
  auto pick = [&](auto varOf, int size, const std::string &what) {
    int found = -1;
    for (int v = 0; v < size; ++v)
      if (truth(varOf(v))) {
        if (found >= 0)
          throw std::logic_error("decode: " + what + " has two values");
        found = v;
      }
    if (found < 0)
      throw std::logic_error("decode: " + what + " has no value");
    return found;
  };

  Interpretation m;
  m.domains = g.domains;
  for (std::size_t n = 0; n < vocab.names.size(); ++n) {
    const int ni = static_cast<int>(n);
    m.nameValues.push_back(pick([&](int v) { return am.nameVar(ni, v); }, am.nameSize[n],
                                "name " + vocab.names[n].name));
  }
  for (std::size_t f = 0; f < vocab.functions.size(); ++f) {
    const int fi = static_cast<int>(f);
    const auto count = tuple_count(tp.problem, vocab.functions[f].argSorts, g.domains);
    std::vector<int> table;
    for (std::size_t t = 0; t < count; ++t)
      table.push_back(pick([&](int v) { return am.functionVar(fi, t, v); },
                           am.functionResultSize[f], "function " + vocab.functions[f].name));
    m.functionTables.push_back(std::move(table));
  }
  for (std::size_t p = 0; p < vocab.predicates.size(); ++p) {
    const auto count = tuple_count(tp.problem, vocab.predicates[p].argSorts, g.domains);
    std::vector<bool> ext;
    for (std::size_t t = 0; t < count; ++t)
      ext.push_back(truth(am.predicateVar(static_cast<int>(p), t)));
    m.predicateExtensions.push_back(std::move(ext));
  }
  return m;
}

void write_dimacs(std::ostream &out, const CnfInstance &inst) {
  out << "p cnf " << inst.cnf.numVars << ' ' << inst.cnf.clauses.size() << '\n';
  for (std::size_t i = 0; i < inst.cnf.clauses.size(); ++i) {
    out << "c clause " << i << ' ' << inst.provenance[i].describe() << '\n';
    for (Lit l : inst.cnf.clauses[i])
      out << l << ' ';
    out << "0\n";
  }
}

} // namespace lff

#include "lff/sat.hpp"

#include <algorithm>
#include <cassert>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace lff::sat {

namespace {

// Internal literal code: 2 * var + sign, var 0-based.
using ILit = int;
constexpr int kNoReason = -1;

enum LBool : std::int8_t { kTrue = 0, kFalse = 1, kUndef = 2 };

inline ILit toInternal(Lit l) { return 2 * (var_of(l) - 1) + (l < 0 ? 1 : 0); }
inline Lit toExternal(ILit l) { return (l & 1) ? -((l >> 1) + 1) : (l >> 1) + 1; }
inline int ivar(ILit l) { return l >> 1; }
inline ILit neg(ILit l) { return l ^ 1; }

// Luby sequence: 1 1 2 1 1 2 4 1 1 2 ...
double luby(std::uint64_t i) {
  std::uint64_t size = 1, seq = 0;
  while (size < i + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  double x = 1;
  while (size - 1 != i) {
    size = (size - 1) >> 1;
    --seq;
    i = i % size;
  }
  for (std::uint64_t k = 0; k < seq; ++k)
    x *= 2;
  return x;
}

// Binary max-heap of variables keyed by activity.
class VarHeap {
public:
  explicit VarHeap(const std::vector<double> &act) : act_(act) {}

  bool contains(int v) const {
    return v < static_cast<int>(pos_.size()) && pos_[static_cast<std::size_t>(v)] >= 0;
  }
  bool empty() const { return heap_.empty(); }

  void grow(int n) {
    if (static_cast<int>(pos_.size()) < n)
      pos_.resize(static_cast<std::size_t>(n), -1);
  }

  void insert(int v) {
    grow(v + 1);
    if (contains(v))
      return;
    pos_[static_cast<std::size_t>(v)] = static_cast<int>(heap_.size());
    heap_.push_back(v);
    up(heap_.size() - 1);
  }

  void increased(int v) {
    if (contains(v))
      up(static_cast<std::size_t>(pos_[static_cast<std::size_t>(v)]));
  }

  int pop() {
    const int top = heap_.front();
    heap_.front() = heap_.back();
    pos_[static_cast<std::size_t>(heap_.front())] = 0;
    heap_.pop_back();
    pos_[static_cast<std::size_t>(top)] = -1;
    if (!heap_.empty())
      down(0);
    return top;
  }

private:
  bool less(int a, int b) const {
    // Higher activity first; ties broken by lower index for determinism.
    const double x = act_[static_cast<std::size_t>(a)], y = act_[static_cast<std::size_t>(b)];
    return x > y || (x == y && a < b);
  }

  void place(std::size_t i, int v) {
    heap_[i] = v;
    pos_[static_cast<std::size_t>(v)] = static_cast<int>(i);
  }

  void up(std::size_t i) {
    const int v = heap_[i];
    while (i > 0) {
      const std::size_t parent = (i - 1) / 2;
      if (!less(v, heap_[parent]))
        break;
      place(i, heap_[parent]);
      i = parent;
    }
    place(i, v);
  }

  void down(std::size_t i) {
    const int v = heap_[i];
    for (;;) {
      std::size_t child = 2 * i + 1;
      if (child >= heap_.size())
        break;
      if (child + 1 < heap_.size() && less(heap_[child + 1], heap_[child]))
        ++child;
      if (!less(heap_[child], v))
        break;
      place(i, heap_[child]);
      i = child;
    }
    place(i, v);
  }

  const std::vector<double> &act_;
  std::vector<int> heap_;
  std::vector<int> pos_;
};

struct Watcher {
  int cref;
  ILit blocker;
};

} // namespace

struct Solver::Impl {
  explicit Impl(SolverOptions o) : opts(o), heap(activity) {}

  SolverOptions opts;
  int nVars = 0;
  bool ok = true;

  std::vector<std::vector<ILit>> clauses; // problem and learnt clauses
  std::vector<std::vector<Lit>> original; // as added, for model checking
  std::vector<std::vector<Watcher>> watches; // indexed by literal

  std::vector<std::int8_t> assigns;
  std::vector<int> level;
  std::vector<int> reason;
  std::vector<char> polarity; // saved phase: 1 = negative
  std::vector<char> seen;
  std::vector<double> activity;
  double varInc = 1.0;
  VarHeap heap;

  std::vector<ILit> trail;
  std::vector<int> trailLim;
  std::size_t qhead = 0;

  std::uint64_t conflicts = 0, decisions = 0, propagations = 0;

  int decisionLevel() const { return static_cast<int>(trailLim.size()); }

  LBool value(ILit l) const {
    const auto a = assigns[static_cast<std::size_t>(ivar(l))];
    if (a == kUndef)
      return kUndef;
    return static_cast<LBool>(a ^ (l & 1));
  }

  void ensureVars(int n) {
    if (n <= nVars)
      return;
    const auto un = static_cast<std::size_t>(n);
    assigns.resize(un, kUndef);
    level.resize(un, 0);
    reason.resize(un, kNoReason);
    polarity.resize(un, 1);
    seen.resize(un, 0);
    activity.resize(un, 0.0);
    watches.resize(2 * un);
    heap.grow(n);
    for (int v = nVars; v < n; ++v)
      heap.insert(v);
    nVars = n;
  }

  void enqueue(ILit l, int from) {
    const auto v = static_cast<std::size_t>(ivar(l));
    assigns[v] = static_cast<std::int8_t>(l & 1);
    level[v] = decisionLevel();
    reason[v] = from;
    trail.push_back(l);
  }

  void attach(int cref) {
    const auto &c = clauses[static_cast<std::size_t>(cref)];
    watches[static_cast<std::size_t>(neg(c[0]))].push_back({cref, c[1]});
    watches[static_cast<std::size_t>(neg(c[1]))].push_back({cref, c[0]});
  }

  void cancelUntil(int lvl) {
    if (decisionLevel() <= lvl)
      return;
    for (std::size_t i = trail.size(); i-- > static_cast<std::size_t>(trailLim[static_cast<std::size_t>(lvl)]);) {
      const int v = ivar(trail[i]);
      assigns[static_cast<std::size_t>(v)] = kUndef;
      reason[static_cast<std::size_t>(v)] = kNoReason;
      polarity[static_cast<std::size_t>(v)] = static_cast<char>(trail[i] & 1);
      heap.insert(v);
    }
    trail.resize(static_cast<std::size_t>(trailLim[static_cast<std::size_t>(lvl)]));
    trailLim.resize(static_cast<std::size_t>(lvl));
    qhead = trail.size();
  }

  bool addClause(std::span<const Lit> lits) {
    std::vector<Lit> copy(lits.begin(), lits.end());
    for (Lit l : copy) {
      if (l == 0)
        throw std::invalid_argument("literal 0 is not a valid literal");
      ensureVars(var_of(l));
    }
    original.push_back(copy);
    if (!ok)
      return false;
    cancelUntil(0);

    std::vector<ILit> c;
    for (Lit l : copy)
      c.push_back(toInternal(l));
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    std::vector<ILit> kept;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (i + 1 < c.size() && c[i + 1] == neg(c[i]))
        return true; // tautology
      const LBool v = value(c[i]);
      if (v == kTrue && level[static_cast<std::size_t>(ivar(c[i]))] == 0)
        return true;
      if (v == kFalse && level[static_cast<std::size_t>(ivar(c[i]))] == 0)
        continue;
      kept.push_back(c[i]);
    }
    if (kept.empty()) {
      ok = false;
      return false;
    }
    if (kept.size() == 1) {
      enqueue(kept[0], kNoReason);
      if (propagate() != kNoReason)
        ok = false;
      return ok;
    }
    clauses.push_back(std::move(kept));
    attach(static_cast<int>(clauses.size()) - 1);
    return true;
  }

  int propagate() {
    int confl = kNoReason;
    while (qhead < trail.size()) {
      const ILit p = trail[qhead++];
      const ILit falseLit = neg(p);
      auto &ws = watches[static_cast<std::size_t>(p)];
      ++propagations;
      std::size_t i = 0, j = 0;
      while (i < ws.size()) {
        const Watcher w = ws[i];
        if (value(w.blocker) == kTrue) {
          ws[j++] = ws[i++];
          continue;
        }
        auto &c = clauses[static_cast<std::size_t>(w.cref)];
        if (c[0] == falseLit)
          std::swap(c[0], c[1]);
        ++i;
        const ILit first = c[0];
        if (first != w.blocker && value(first) == kTrue) {
          ws[j++] = {w.cref, first};
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < c.size(); ++k)
          if (value(c[k]) != kFalse) {
            std::swap(c[1], c[k]);
            watches[static_cast<std::size_t>(neg(c[1]))].push_back({w.cref, first});
            moved = true;
            break;
          }
        if (moved)
          continue;
        ws[j++] = {w.cref, first};
        if (value(first) == kFalse) {
          confl = w.cref;
          qhead = trail.size();
          while (i < ws.size())
            ws[j++] = ws[i++];
        } else {
          enqueue(first, w.cref);
        }
      }
      ws.resize(j);
      if (confl != kNoReason)
        break;
    }
    return confl;
  }

  void bumpVar(int v) {
    auto &a = activity[static_cast<std::size_t>(v)];
    a += varInc;
    if (a > 1e100) {
      for (auto &x : activity)
        x *= 1e-100;
      varInc *= 1e-100;
    }
    heap.increased(v);
  }

  // A literal of the learnt clause is redundant if its reason clause is
  // subsumed by the other literals already in the clause.
  bool redundant(ILit l) const {
    const int r = reason[static_cast<std::size_t>(ivar(l))];
    if (r == kNoReason)
      return false;
    for (ILit q : clauses[static_cast<std::size_t>(r)]) {
      const auto v = static_cast<std::size_t>(ivar(q));
      if (ivar(q) != ivar(l) && !seen[v] && level[v] > 0)
        return false;
    }
    return true;
  }

  void analyze(int confl, std::vector<ILit> &learnt, int &btLevel) {
    int pathC = 0;
    ILit p = -1;
    learnt.assign(1, -1);
    std::size_t index = trail.size();
    do {
      const auto &c = clauses[static_cast<std::size_t>(confl)];
      for (std::size_t k = (p == -1 ? 0 : 1); k < c.size(); ++k) {
        const ILit q = c[k];
        const auto v = static_cast<std::size_t>(ivar(q));
        if (!seen[v] && level[v] > 0) {
          bumpVar(ivar(q));
          seen[v] = 1;
          if (level[v] >= decisionLevel())
            ++pathC;
          else
            learnt.push_back(q);
        }
      }
      while (!seen[static_cast<std::size_t>(ivar(trail[--index]))]) {
      }
      p = trail[index];
      confl = reason[static_cast<std::size_t>(ivar(p))];
      seen[static_cast<std::size_t>(ivar(p))] = 0;
      --pathC;
    } while (pathC > 0);
    learnt[0] = neg(p);

    std::vector<ILit> toClear(learnt.begin() + 1, learnt.end());
    std::size_t j = 1;
    for (std::size_t i = 1; i < learnt.size(); ++i)
      if (!redundant(learnt[i]))
        learnt[j++] = learnt[i];
    learnt.resize(j);
    for (ILit l : toClear)
      seen[static_cast<std::size_t>(ivar(l))] = 0;

    btLevel = 0;
    if (learnt.size() > 1) {
      std::size_t maxI = 1;
      for (std::size_t i = 2; i < learnt.size(); ++i)
        if (level[static_cast<std::size_t>(ivar(learnt[i]))] >
            level[static_cast<std::size_t>(ivar(learnt[maxI]))])
          maxI = i;
      std::swap(learnt[1], learnt[maxI]);
      btLevel = level[static_cast<std::size_t>(ivar(learnt[1]))];
    }
  }

  // Collects the assumptions responsible for `p` being false.
  std::vector<Lit> analyzeFinal(ILit p) {
    std::vector<Lit> failed{toExternal(neg(p))};
    if (decisionLevel() == 0)
      return failed;
    seen[static_cast<std::size_t>(ivar(p))] = 1;
    for (std::size_t i = trail.size(); i-- > static_cast<std::size_t>(trailLim[0]);) {
      const auto x = static_cast<std::size_t>(ivar(trail[i]));
      if (!seen[x])
        continue;
      if (reason[x] == kNoReason) {
        failed.push_back(toExternal(trail[i]));
      } else {
        const auto &c = clauses[static_cast<std::size_t>(reason[x])];
        for (std::size_t k = 1; k < c.size(); ++k)
          if (level[static_cast<std::size_t>(ivar(c[k]))] > 0)
            seen[static_cast<std::size_t>(ivar(c[k]))] = 1;
      }
      seen[x] = 0;
    }
    seen[static_cast<std::size_t>(ivar(p))] = 0;
    std::sort(failed.begin(), failed.end());
    failed.erase(std::unique(failed.begin(), failed.end()), failed.end());
    return failed;
  }

  ILit pickBranch() {
    while (!heap.empty()) {
      const int v = heap.pop();
      if (assigns[static_cast<std::size_t>(v)] == kUndef)
        return 2 * v + polarity[static_cast<std::size_t>(v)];
    }
    return -1;
  }

  SatResult solve(std::span<const Lit> assumptionsExt, const Budget &budget) {
    SatResult result;
    const std::uint64_t startConflicts = conflicts;
    auto finish = [&](Status s) {
      result.status = s;
      result.conflicts = conflicts - startConflicts;
      result.decisions = decisions;
      result.propagations = propagations;
      cancelUntil(0);
      return result;
    };

    for (Lit l : assumptionsExt)
      ensureVars(var_of(l));
    if (!ok)
      return finish(Status::Unsat);
    cancelUntil(0);
    if (propagate() != kNoReason) {
      ok = false;
      return finish(Status::Unsat);
    }

    std::vector<ILit> assumptions;
    for (Lit l : assumptionsExt)
      assumptions.push_back(toInternal(l));

    std::uint64_t restarts = 0;
    std::uint64_t conflictsThisRestart = 0;
    std::uint64_t restartLimit =
        static_cast<std::uint64_t>(luby(restarts) * static_cast<double>(opts.restartBase));
    std::uint64_t pollCounter = 0;
    std::vector<ILit> learnt;

    for (;;) {
      const int confl = propagate();
      if (confl != kNoReason) {
        ++conflicts;
        ++conflictsThisRestart;
        if (decisionLevel() == 0) {
          ok = false;
          return finish(Status::Unsat);
        }
        int btLevel = 0;
        analyze(confl, learnt, btLevel);
        cancelUntil(btLevel);
        if (learnt.size() == 1) {
          enqueue(learnt[0], kNoReason);
        } else {
          clauses.push_back(learnt);
          const int cref = static_cast<int>(clauses.size()) - 1;
          attach(cref);
          enqueue(learnt[0], cref);
        }
        varInc /= opts.varDecay;
        continue;
      }

      if (budget.maxConflicts && conflicts - startConflicts >= *budget.maxConflicts) {
        result.reason = UnknownReason::ConflictBudget;
        return finish(Status::Unknown);
      }
      if ((++pollCounter & 63) == 0 && budget.expired()) {
        result.reason = UnknownReason::Timeout;
        return finish(Status::Unknown);
      }
      if (conflictsThisRestart >= restartLimit) {
        ++restarts;
        conflictsThisRestart = 0;
        restartLimit = static_cast<std::uint64_t>(luby(restarts) *
                                                  static_cast<double>(opts.restartBase));
        cancelUntil(0);
        continue;
      }

      ILit next = -1;
      while (decisionLevel() < static_cast<int>(assumptions.size())) {
        const ILit a = assumptions[static_cast<std::size_t>(decisionLevel())];
        if (value(a) == kTrue) {
          trailLim.push_back(static_cast<int>(trail.size()));
        } else if (value(a) == kFalse) {
          result.failedAssumptions = analyzeFinal(neg(a));
          return finish(Status::Unsat);
        } else {
          next = a;
          break;
        }
      }
      if (next == -1) {
        next = pickBranch();
        if (next == -1) {
          result.model.assign(static_cast<std::size_t>(nVars) + 1, false);
          for (int v = 0; v < nVars; ++v)
            result.model[static_cast<std::size_t>(v) + 1] =
                assigns[static_cast<std::size_t>(v)] == kTrue;
          verifyModel(result.model);
          return finish(Status::Sat);
        }
        ++decisions;
      }
      trailLim.push_back(static_cast<int>(trail.size()));
      enqueue(next, kNoReason);
    }
  }

  void verifyModel(const std::vector<bool> &model) const {
    for (const auto &c : original) {
      const bool sat = std::any_of(c.begin(), c.end(), [&](Lit l) {
        return model[static_cast<std::size_t>(var_of(l))] == (l > 0);
      });
      if (!sat)
        throw std::logic_error("sat: model fails an input clause");
    }
  }
};

Solver::Solver(SolverOptions options) : impl_(std::make_unique<Impl>(options)) {}
Solver::~Solver() = default;
Solver::Solver(Solver &&) noexcept = default;
Solver &Solver::operator=(Solver &&) noexcept = default;

int Solver::newVar() {
  impl_->ensureVars(impl_->nVars + 1);
  return impl_->nVars;
}

void Solver::reserveVars(int n) { impl_->ensureVars(n); }
int Solver::numVars() const { return impl_->nVars; }

bool Solver::addClause(std::span<const Lit> clause) { return impl_->addClause(clause); }

void Solver::addCnf(const Cnf &cnf) {
  impl_->ensureVars(cnf.numVars);
  for (const auto &c : cnf.clauses)
    impl_->addClause(c);
}

SatResult Solver::solve(std::span<const Lit> assumptions, const Budget &budget) {
  auto r = impl_->solve(assumptions, budget);
  if (r.status == Status::Sat)
    r.model.resize(static_cast<std::size_t>(impl_->nVars) + 1, false);
  return r;
}

SatResult solve(const Cnf &cnf, std::span<const Lit> assumptions, const Budget &budget) {
  Solver s;
  s.addCnf(cnf);
  return s.solve(assumptions, budget);
}

bool satisfies(const Cnf &cnf, const std::vector<bool> &model) {
  return std::all_of(cnf.clauses.begin(), cnf.clauses.end(), [&](const auto &c) {
    return std::any_of(c.begin(), c.end(), [&](Lit l) {
      const auto v = static_cast<std::size_t>(var_of(l));
      return v < model.size() && model[v] == (l > 0);
    });
  });
}

Enumeration enumerate_models(const Cnf &cnf, std::span<const int> projection,
                             std::size_t limit, const Budget &budget) {
  Enumeration out;
  Solver s;
  s.addCnf(cnf);
  for (int v : projection)
    s.reserveVars(v);
  while (out.models.size() < limit) {
    auto r = s.solve({}, budget);
    ++out.solverCalls;
    out.conflicts += r.conflicts;
    if (r.status == Status::Unsat) {
      out.exhausted = true;
      break;
    }
    if (r.status == Status::Unknown) {
      out.unknown = true;
      break;
    }
    std::vector<Lit> block;
    block.reserve(projection.size());
    for (int v : projection)
      block.push_back(r.value(v) ? -v : v);
    out.models.push_back(std::move(r.model));
    s.addClause(block);
  }
  return out;
}

CardinalityEncoding add_at_most_k(std::span<const Lit> lits, int k, int firstAux) {
  CardinalityEncoding enc;
  enc.firstAux = firstAux;
  const int n = static_cast<int>(lits.size());
  if (k < 0)
    throw std::invalid_argument("at-most-k needs k >= 0");
  if (k >= n)
    return enc;
  if (k == 0) {
    for (Lit l : lits)
      enc.clauses.push_back({-l});
    return enc;
  }
  // s(i, j): among the first i+1 literals at least j+1 are true.
  auto s = [&](int i, int j) { return firstAux + i * k + j; };
  enc.numAux = (n - 1) * k;
  auto x = [&](int i) { return lits[static_cast<std::size_t>(i)]; };

  enc.clauses.push_back({-x(0), s(0, 0)});
  for (int j = 1; j < k; ++j)
    enc.clauses.push_back({-s(0, j)});
  for (int i = 1; i < n - 1; ++i) {
    enc.clauses.push_back({-x(i), s(i, 0)});
    enc.clauses.push_back({-s(i - 1, 0), s(i, 0)});
    for (int j = 1; j < k; ++j) {
      enc.clauses.push_back({-x(i), -s(i - 1, j - 1), s(i, j)});
      enc.clauses.push_back({-s(i - 1, j), s(i, j)});
    }
    enc.clauses.push_back({-x(i), -s(i - 1, k - 1)});
  }
  enc.clauses.push_back({-x(n - 1), -s(n - 2, k - 1)});
  return enc;
}

Cnf read_dimacs(std::istream &in) {
  Cnf cnf;
  std::string line;
  bool header = false;
  std::size_t declaredClauses = 0;
  std::vector<Lit> current;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first) || first == "c" || first[0] == 'c' || first == "%")
      continue;
    if (first == "p") {
      std::string fmt;
      if (!(ls >> fmt >> cnf.numVars >> declaredClauses) || fmt != "cnf")
        throw std::runtime_error("dimacs: malformed header: " + line);
      header = true;
      continue;
    }
    if (!header)
      throw std::runtime_error("dimacs: clause before 'p cnf' header");
    std::istringstream all(line);
    long long v = 0;
    while (all >> v) {
      if (v == 0) {
        cnf.clauses.push_back(std::move(current));
        current.clear();
        continue;
      }
      if (std::llabs(v) > cnf.numVars)
        throw std::runtime_error("dimacs: literal " + std::to_string(v) +
                                 " exceeds the declared variable count");
      current.push_back(static_cast<Lit>(v));
    }
    if (!all.eof())
      throw std::runtime_error("dimacs: unexpected token in: " + line);
  }
  if (!current.empty())
    cnf.clauses.push_back(std::move(current));
  if (!header)
    throw std::runtime_error("dimacs: missing 'p cnf' header");
  if (cnf.clauses.size() != declaredClauses)
    throw std::runtime_error("dimacs: header declares " + std::to_string(declaredClauses) +
                             " clauses but " + std::to_string(cnf.clauses.size()) +
                             " were read");
  return cnf;
}

void write_dimacs(std::ostream &out, const Cnf &cnf) {
  out << "p cnf " << cnf.numVars << ' ' << cnf.clauses.size() << '\n';
  for (const auto &c : cnf.clauses) {
    for (Lit l : c)
      out << l << ' ';
    out << "0\n";
  }
}

} // namespace lff::sat

#include "lff/serialize.hpp"

#include <stdexcept>

namespace lff {

Json to_json(const Diagnostic &d) {
  Json j;
  j["severity"] = d.isError() ? "error" : "warning";
  j["line"] = d.line;
  j["column"] = d.column;
  j["offendingText"] = d.offendingText;
  j["message"] = d.message;
  j["detail"] = d.detail;
  j["partialTree"] = d.partialTree ? Json(*d.partialTree) : Json(nullptr);
  j["hints"] = d.hints;
  j["text"] = format_diagnostic(d);
  return j;
}

Json to_json(const Problem &p, const DomainAssignment &da) {
  Json j = Json::object();
  for (std::size_t s = 0; s < p.sorts.size() && s < da.sizes.size(); ++s)
    j[p.sorts[s].name] = da.sizes[s];
  return j;
}

namespace {

std::vector<std::string> tupleLabels(const Problem &p, const std::vector<std::string> &sorts,
                                     const std::vector<SortDomain> &domains, std::size_t row) {
  std::vector<std::string> out(sorts.size());
  for (std::size_t i = sorts.size(); i-- > 0;) {
    const auto &d = domains[static_cast<std::size_t>(*p.sortIndex(sorts[i]))];
    out[i] = d.labels[row % static_cast<std::size_t>(d.size)];
    row /= static_cast<std::size_t>(d.size);
  }
  return out;
}

Json spanJson(const Problem &p, int index) {
  const auto &c = p.constraints.at(static_cast<std::size_t>(index));
  return {{"index", index},
          {"line", c.span.begin.line},
          {"column", c.span.begin.column},
          {"endLine", c.span.end.line},
          {"endColumn", c.span.end.column},
          {"text", std::string(p.constraintText(index))}};
}

Json diagnosticsJson(const std::vector<Diagnostic> &ds) {
  Json a = Json::array();
  for (const auto &d : ds)
    a.push_back(to_json(d));
  return a;
}

} // namespace

Json to_json(const TypedProblem &tp, const Interpretation &m) {
  const Problem &p = tp.problem;
  Json j;
  Json names = Json::object(), funcs = Json::object(), preds = Json::object();
  for (std::size_t n = 0; n < p.vocab.names.size(); ++n) {
    const auto &d = m.domains[static_cast<std::size_t>(*p.sortIndex(p.vocab.names[n].sort))];
    names[p.vocab.names[n].name] = d.labels[static_cast<std::size_t>(m.nameValues[n])];
  }
  for (std::size_t f = 0; f < p.vocab.functions.size(); ++f) {
    const auto &decl = p.vocab.functions[f];
    const auto &rd = m.domains[static_cast<std::size_t>(*p.sortIndex(decl.resultSort))];
    Json rows = Json::array();
    for (std::size_t r = 0; r < m.functionTables[f].size(); ++r)
      rows.push_back({{"args", tupleLabels(p, decl.argSorts, m.domains, r)},
                      {"value", rd.labels[static_cast<std::size_t>(m.functionTables[f][r])]}});
    funcs[decl.name] = rows;
  }
  for (std::size_t q = 0; q < p.vocab.predicates.size(); ++q) {
    const auto &decl = p.vocab.predicates[q];
    Json rows = Json::array();
    for (std::size_t r = 0; r < m.predicateExtensions[q].size(); ++r)
      if (m.predicateExtensions[q][r])
        rows.push_back(tupleLabels(p, decl.argSorts, m.domains, r));
    preds[decl.name] = rows;
  }
  Json sizes = Json::object();
  for (std::size_t s = 0; s < p.sorts.size(); ++s)
    sizes[p.sorts[s].name] = m.domains[s].size;
  j["sizes"] = sizes;
  j["names"] = names;
  j["functions"] = funcs;
  j["predicates"] = preds;
  j["text"] = render_interpretation(p, m);
  return j;
}

Json to_json(const SolveOutcome &o) {
  Json j;
  j["kind"] = std::string(outcome_kind_name(o.kind));
  j["ok"] = o.kind == OutcomeKind::Ok || o.kind == OutcomeKind::Solutions ||
            o.kind == OutcomeKind::NoSolution;
  j["diagnostics"] = diagnosticsJson(o.diagnostics);
  Json models = Json::array(), searched = Json::array(), grounds = Json::array();
  if (o.typed) {
    for (const auto &fm : o.models)
      models.push_back(to_json(*o.typed, fm.interp));
    for (const auto &da : o.searched)
      searched.push_back(to_json(o.typed->problem, da));
    for (const auto &g : o.stats.grounds)
      grounds.push_back({{"sizes", to_json(o.typed->problem, g.da)},
                         {"vars", g.vars},
                         {"atoms", g.atoms},
                         {"clauses", g.clauses}});
  }
  j["models"] = models;
  j["searched"] = searched;
  j["unique"] = o.unique;
  j["exhausted"] = o.exhausted;
  j["complete"] = o.complete;
  j["message"] = o.message;
  Json perSort = Json::object();
  for (const auto &[s, r] : o.stats.bounds.perSort)
    perSort[s] = {r.first, r.second};
  j["stats"] = {{"runs", o.stats.runs},
                {"conflicts", o.stats.conflicts},
                {"wallSeconds", o.stats.wallSeconds},
                {"grounds", grounds},
                {"bounds",
                 {{"lo", o.stats.bounds.lo}, {"hi", o.stats.bounds.hi}, {"perSort", perSort}}}};
  j["text"] = render_outcome(o);
  return j;
}

Json to_json(const DiagnoseOutcome &o) {
  Json j;
  j["diagnostics"] = diagnosticsJson(o.diagnostics);
  j["message"] = o.message;
  if (!o.report) {
    j["kind"] = o.solveKind == OutcomeKind::InputErrors ? "input-errors"
                : o.solveKind == OutcomeKind::Timeout   ? "timeout"
                                                        : "internal-error";
    return j;
  }
  const auto &r = *o.report;
  const Problem &p = o.typed->problem;
  j["kind"] = std::string(diagnosis_kind_name(r.kind));
  j["sizes"] = to_json(p, r.da);
  Json core = Json::array(), violated = Json::array(), clauses = Json::array();
  for (int i : r.constraints)
    core.push_back(spanJson(p, i));
  for (int i : r.violated)
    violated.push_back(spanJson(p, i));
  for (const auto &c : r.clauses) {
    Json prov = c.provenance.isAxiom() ? Json{{"axiom", c.provenance.axiom}}
                                       : Json{{"constraint", c.provenance.constraint}};
    clauses.push_back({{"index", c.index}, {"literals", c.literals}, {"provenance", prov}});
  }
  j["constraints"] = core;
  j["violated"] = violated;
  j["clauses"] = clauses;
  j["satisfiedCount"] = r.satisfiedCount;
  j["total"] = r.total;
  j["minimal"] = r.minimal;
  j["model"] = r.interp ? to_json(*o.typed, *r.interp) : Json(nullptr);
  j["text"] = render_report(*o.typed, r);
  if (!r.message.empty())
    j["message"] = r.message;
  return j;
}

Json puzzle_summary(const PuzzleRecord &p) {
  return {{"id", p.id},
          {"title", p.title},
          {"level", std::string(level_name(p.level))},
          {"invented", p.invented}};
}

namespace {

// The text of one section of a problem file, without its header line.
std::string section(const std::string &text, const std::string &header,
                    const std::string &next) {
  auto b = text.find(header);
  if (b == std::string::npos)
    return {};
  b = text.find('\n', b);
  if (b == std::string::npos)
    return {};
  ++b;
  auto e = next.empty() ? std::string::npos : text.find(next, b);
  return text.substr(b, e == std::string::npos ? std::string::npos : e - b);
}

} // namespace

Json to_json(const PuzzleRecord &p) {
  Json j = puzzle_summary(p);
  j["statement"] = p.statement;
  j["expectedModels"] = p.expectedModels;
  j["skeleton"] = {{"sorts", section(p.encoding, "Sorts:", "Vocabulary:")},
                   {"vocabulary", section(p.encoding, "Vocabulary:", "Constraints:")},
                   {"constraints", ""}};
  return j;
}

SolveOptions options_from_json(const Json &j, SolveOptions base) {
  if (j.is_null())
    return base;
  if (!j.is_object())
    throw std::invalid_argument("options must be an object");
  auto number = [&](const Json &v, const char *what) {
    if (!v.is_number())
      throw std::invalid_argument(std::string(what) + " must be a number");
    return v;
  };
  if (j.contains("maxModels"))
    base.maxModels = number(j["maxModels"], "maxModels").get<int>();
  if (j.contains("deadlineSecs"))
    base.deadlineSecs = number(j["deadlineSecs"], "deadlineSecs").get<double>();
  if (j.contains("symmetryBreaking")) {
    if (!j["symmetryBreaking"].is_boolean())
      throw std::invalid_argument("symmetryBreaking must be a boolean");
    base.symmetryBreaking = j["symmetryBreaking"].get<bool>();
  }
  if (j.contains("bounds")) {
    const auto &b = j["bounds"];
    if (!b.is_object())
      throw std::invalid_argument("bounds must be an object");
    if (b.contains("lo"))
      base.bounds.lo = number(b["lo"], "bounds.lo").get<int>();
    if (b.contains("hi"))
      base.bounds.hi = number(b["hi"], "bounds.hi").get<int>();
    if (b.contains("perSort")) {
      if (!b["perSort"].is_object())
        throw std::invalid_argument("bounds.perSort must be an object");
      for (const auto &[sort, r] : b["perSort"].items()) {
        if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number())
          throw std::invalid_argument("bounds.perSort entries must be [lo, hi]");
        base.bounds.perSort[sort] = {r[0].get<int>(), r[1].get<int>()};
      }
    }
  }
  return base;
}

} // namespace lff

// Acceptance run: one PASS/FAIL line per criterion.

#include "common.hpp"
#include "lff/corpus.hpp"
#include "lff/diagnose.hpp"
#include "lff/service.hpp"
#include "lff/usage.hpp"
#include "oracles.hpp"

#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <numeric>
#include <sstream>

#include <unistd.h>

using namespace lff;
using Json = nlohmann::json;
namespace fs = std::filesystem;
using testing_util::kMary;
using testing_util::typed;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Fail {
  std::string why;
};

void require(bool cond, const std::string &why) {
  if (!cond)
    throw Fail{why};
}

SolveOptions singletons(int maxModels) {
  SolveOptions o;
  o.bounds.hi = 1;
  o.maxModels = maxModels;
  return o;
}

// ---------------------------------------------------------------------------

void p1() {
  const auto start = Clock::now();
  const auto prep = prepare(kMary);
  require(prep.typed != nullptr, "Mary does not type-check");

  const auto o = run(kMary, singletons(1000));
  require(o.kind == OutcomeKind::Solutions, "Mary has no model at sizes 1..1");
  require(o.models.size() >= 2 && !o.unique, "expected several models");
  require(o.exhausted, "singleton search not exhausted");
  // function 0 is hue, name 1 is hue_of_snow; green = 0, white = 1, purple = 2
  bool anecdote = false;
  for (const auto &m : o.models)
    anecdote |= m.interp.functionTables[0][0] == 0 && m.interp.nameValues[1] == 2;
  require(anecdote, "no model with a green lamb and purple snow");

  // frozen hand count, see the evaluator unit test
  require(o.models.size() == 21, "model count " + std::to_string(o.models.size()) + " != 21");
  require(brute_force_models(*o.typed, o.searched[0]).size() == 21,
          "brute force count differs from 21");

  const auto white = run(kMary + "  hue_of_snow = white.\n", singletons(1000));
  require(white.kind == OutcomeKind::Solutions, "white snow variant has no model");
  for (const auto &m : white.models)
    require(m.interp.functionTables[0][0] == 1, "a non-white lamb survives white snow");
  require(since(start) < 1.0, "took " + std::to_string(since(start)) + " s");
}

void p2() {
  const auto oracleTables = oracle::logic_games_solutions();
  require(oracleTables.size() == 1, "oracle finds " + std::to_string(oracleTables.size()) +
                                        " solutions");
  const auto text = slurp(default_corpus_dir() / "logic-games" / "problem.lff");
  const auto start = Clock::now();
  const auto o = run(text);
  const double secs = since(start);
  require(o.kind == OutcomeKind::Solutions, "no solution");
  require(o.models.size() == 1 && o.unique && o.exhausted, "not a unique, exhausted model");
  require(secs < 5.0, "took " + std::to_string(secs) + " s");
  const auto &table = o.models[0].interp.functionTables[0];
  for (int x = 0; x < 5; ++x)
    for (int y = 0; y < 5; ++y)
      require(table[static_cast<std::size_t>(x * 5 + y)] == oracleTables[0][x][y],
              "result table differs from the oracle");
}

void p3() {
  const std::string head = kMary.substr(0, kMary.find("Constraints:\n") + 13);
  const auto out = prepare(head + "  had(Mary, SOME x lamb(x)).\n");
  require(!out.typed, "ill-typed input accepted");
  std::string text;
  for (const auto &d : out.diagnostics)
    if (d.severity == Severity::Error) {
      text = format_diagnostic(d);
      break;
    }
  const std::string golden = "Type mismatch with argument of had\n"
                             "\n"
                             "Detailed diagnostics: in the formula\n"
                             "    had(Mary,SOME x lamb(x))\n"
                             "the main operator \"had\" expects argument 2 to be of type animal\n"
                             "but argument 2 is\n"
                             "    SOME x lamb(x)\n"
                             "which is of type bool.\n";
  require(text.rfind("Input error on line ", 0) == 0, "missing error header");
  require(text.find(":   had(Mary, SOME x lamb(x)).\n" + golden) != std::string::npos,
          "message block differs:\n" + text);

  const auto o = run("Sorts:\n s.\nVocabulary:\n predicate p.\nConstraints:\n p.\n ~p.\n");
  require(o.kind == OutcomeKind::NoSolution && o.complete, "contradiction not a complete NoSolution");
  require(render_outcome(o).find("No solution found") != std::string::npos,
          "missing \"No solution found\"");
}

void p4() {
  std::mt19937 rng(20240501);
  for (int round = 0; round < 500; ++round) {
    const int n = std::uniform_int_distribution<int>(1, 12)(rng);
    const int m = std::uniform_int_distribution<int>(1, 60)(rng);
    sat::Cnf cnf;
    cnf.numVars = n;
    cnf.clauses = oracle::random_cnf(rng, n, m);
    const auto truth = oracle::truth_table(n, cnf.clauses);
    require((sat::solve(cnf).status == sat::Status::Sat) == truth.sat,
            "status differs in round " + std::to_string(round));
    std::vector<int> proj;
    for (int v = 1, k = std::uniform_int_distribution<int>(1, n)(rng); v <= k; ++v)
      proj.push_back(v);
    const auto e = sat::enumerate_models(cnf, proj, 1u << 13);
    require(e.exhausted && e.models.size() == oracle::projected_count(n, cnf.clauses, proj),
            "projected count differs in round " + std::to_string(round));
  }
  for (int n = 1; n <= 6; ++n) {
    int vars = 0;
    sat::Cnf cnf;
    cnf.clauses = oracle::pigeonhole(n + 1, n, vars);
    cnf.numVars = vars;
    const auto start = Clock::now();
    const auto r = sat::solve(cnf, {}, sat::Budget::seconds(2));
    require(r.status == sat::Status::Unsat && since(start) < 2.0,
            "pigeonhole " + std::to_string(n + 1) + "/" + std::to_string(n));
  }
}

void p5() {
  oracle::ProblemGen gen(424242);
  int compared = 0;
  for (int attempt = 0; attempt < 2000 && compared < 250; ++attempt) {
    const auto rp = gen.next();
    const auto tp = typed(rp.text);
    require(tp != nullptr, "generated problem rejected:\n" + rp.text);
    const DomainAssignment da{rp.sizes};
    if (interpretation_space(*tp, da) > 20'000)
      continue;
    bool exhausted = false;
    const auto got = testing_util::sat_models(*tp, da, false, &exhausted);
    require(exhausted && got == brute_force_models(*tp, da), "model sets differ:\n" + rp.text);
    ++compared;
  }
  require(compared >= 200, "only " + std::to_string(compared) + " problems compared");
}

bool subsetSat(const TypedProblem &tp, const DomainAssignment &da, const std::vector<int> &subset) {
  bool found = false;
  for_each_interpretation(tp, da, [&](const Interpretation &m) {
    found = std::all_of(subset.begin(), subset.end(),
                        [&](int i) { return eval_constraint(tp, m, i); });
    return !found;
  });
  return found;
}

void p6() {
  oracle::ProblemGen gen(8086);
  int checked = 0;
  for (int attempt = 0; attempt < 20000 && checked < 120; ++attempt) {
    const auto rp = gen.next(8);
    const auto tp = typed(rp.text);
    require(tp != nullptr, "generated problem rejected");
    const DomainAssignment da{rp.sizes};
    if (interpretation_space(*tp, da) > 20'000)
      continue;
    std::vector<int> all(tp->constraints.size());
    std::iota(all.begin(), all.end(), 0);
    if (subsetSat(*tp, da, all))
      continue;
    const auto mus = high_level_mus(*tp, da);
    require(mus.kind == DiagnosisKind::HighLevelMUS, "no core reported:\n" + rp.text);
    require(!subsetSat(*tp, da, mus.constraints), "core is satisfiable:\n" + rp.text);
    for (std::size_t i = 0; i < mus.constraints.size(); ++i) {
      auto smaller = mus.constraints;
      smaller.erase(smaller.begin() + static_cast<long>(i));
      require(subsetSat(*tp, da, smaller), "core is not minimal:\n" + rp.text);
    }
    int best = 0;
    for_each_interpretation(*tp, da, [&](const Interpretation &m) {
      int k = 0;
      for (int i : all)
        k += eval_constraint(*tp, m, i);
      best = std::max(best, k);
      return true;
    });
    const auto approx = approximate_solution(*tp, da);
    require(approx.satisfiedCount == best, "approximation not optimal:\n" + rp.text);
    ++checked;
  }
  require(checked >= 100, "only " + std::to_string(checked) + " instances");
}

void p7() {
  const auto dir = fs::temp_directory_path() / ("lff-acceptance-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  ServiceConfig cfg;
  cfg.port = 0;
  cfg.logPath = dir / "usage.jsonl";
  cfg.dataDir = dir / "data";
  cfg.poolSize = 4;
  Service svc(cfg);
  const int port = svc.start();
  auto client = [&] {
    httplib::Client c("127.0.0.1", port);
    c.set_read_timeout(30, 0);
    return c;
  };

  // save and reload
  const Json submission{{"sorts", "  person.\r\n\tplace.  \n"},
                        {"vocabulary", "  name Mary: person. % caf\xc3\xa9\n"},
                        {"constraints", "  \"x\" \\ y\n\n"}};
  Json body = submission;
  body["name"] = "draft";
  auto created = client().Post("/api/saves", body.dump(), "application/json");
  require(created && created->status == 201, "save not created");
  const auto cookie = created->get_header_value("Set-Cookie");
  const httplib::Headers h{{"Cookie", cookie.substr(0, cookie.find(';'))}};
  const auto id = Json::parse(created->body)["id"].get<std::string>();
  auto got = client().Get("/api/saves/" + id, h);
  require(got && got->status == 200, "save not reloaded");
  const auto back = Json::parse(got->body)["submission"];
  for (const char *k : {"sorts", "vocabulary", "constraints"})
    require(back[k].get<std::string>() == submission[k].get<std::string>(),
            std::string("box ") + k + " changed in the round trip");

  // every accepted run is one log line, counted on its UTC day
  int runs = 0;
  for (const char *path : {"/api/check", "/api/solve", "/api/diagnose", "/api/check"}) {
    auto r = client().Post(path, h, Json{{"text", kMary}}.dump(), "application/json");
    require(r && r->status == 200, std::string("request to ") + path + " failed");
    ++runs;
  }
  const auto events = read_usage_log(cfg.logPath);
  int logged = 0;
  for (const auto &[day, n] : counts_by_day(events))
    logged += n;
  require(logged == runs, "log counts " + std::to_string(logged) + " runs, sent " +
                              std::to_string(runs));

  // synthetic log with known per-day totals
  const auto synth = dir / "synthetic.jsonl";
  std::map<std::string, int> expected;
  {
    UsageLog log(synth);
    std::mt19937 rng(3);
    for (int day = 1; day <= 20; ++day) {
      const int n = std::uniform_int_distribution<int>(0, 25)(rng);
      char date[16];
      std::snprintf(date, sizeof date, "2026-02-%02d", day);
      for (int k = 0; k < n; ++k) {
        char ts[40];
        std::snprintf(ts, sizeof ts, "%sT%02d:%02d:%02d.000Z", date, k % 24, k % 60, k % 60);
        log.append({ts, "s" + std::to_string(k % 4), "solve", "", "solutions", 1});
      }
      if (n)
        expected[date] = n;
    }
  }
  require(counts_by_day(read_usage_log(synth)) == expected, "synthetic per-day counts differ");

  // concurrent solves up to the pool size, each bounded by its deadline
  const double deadline = 1.0;
  const Json hard{{"text", "Sorts:\n p.\n h.\nVocabulary:\n function f(p): h.\nConstraints:\n"
                           " ALL x, y (x /= y -> f(x) /= f(y)).\n"},
                  {"options",
                   {{"deadlineSecs", deadline},
                    {"bounds", {{"perSort", {{"p", {11, 11}}, {"h", {10, 10}}}}}}}}};
  std::vector<std::future<std::pair<int, double>>> jobs;
  for (int i = 0; i < cfg.poolSize; ++i)
    jobs.push_back(std::async(std::launch::async, [&] {
      const auto start = Clock::now();
      auto r = client().Post("/api/solve", hard.dump(), "application/json");
      return std::pair{r ? r->status : -1, since(start)};
    }));
  for (auto &j : jobs) {
    const auto [status, secs] = j.get();
    require(status == 200, "concurrent solve failed with status " + std::to_string(status));
    require(secs <= deadline + 1.0, "concurrent solve took " + std::to_string(secs) + " s");
  }
  svc.stop();
  fs::remove_all(dir);
}

void p8() {
  const auto all = load_corpus(default_corpus_dir());
  require(!all.empty(), "empty corpus");
  for (const auto &r : verify_all(all, 5.0)) {
    require(r.pass, r.id + ": " + r.detail);
    require(r.seconds < 5.0, r.id + " took " + std::to_string(r.seconds) + " s");
  }
}

} // namespace

int main() {
  const std::vector<std::pair<const char *, std::function<void()>>> criteria{
      {"P1", p1}, {"P2", p2}, {"P3", p3}, {"P4", p4},
      {"P5", p5}, {"P6", p6}, {"P7", p7}, {"P8", p8}};
  int failed = 0;
  for (const auto &[name, fn] : criteria) {
    std::string why;
    try {
      fn();
    } catch (const Fail &f) {
      why = f.why;
    } catch (const std::exception &e) {
      why = std::string("exception: ") + e.what();
    }
    if (why.empty()) {
      std::cout << name << " PASS" << std::endl;
    } else {
      std::cout << name << " FAIL " << why << std::endl;
      ++failed;
    }
  }
  return failed ? 1 : 0;
}

#include "lff/corpus.hpp"
#include "lff/diagnose.hpp"
#include "lff/engine.hpp"
#include "lff/grounder.hpp"
#include "lff/service.hpp"
#include "lff/usage.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace lff;

namespace {

enum Exit { kOk = 0, kNoSolution = 1, kInputError = 2, kTimeout = 3, kInternal = 4 };

std::optional<std::string> readText(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "lff: cannot read " << path << '\n';
    return std::nullopt;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int exitFor(OutcomeKind k) {
  switch (k) {
  case OutcomeKind::Ok:
  case OutcomeKind::Solutions:
    return kOk;
  case OutcomeKind::NoSolution:
    return kNoSolution;
  case OutcomeKind::InputErrors:
    return kInputError;
  case OutcomeKind::Timeout:
    return kTimeout;
  case OutcomeKind::InternalError:
    return kInternal;
  }
  return kInternal;
}

void printDiagnostics(const std::vector<Diagnostic> &ds) {
  for (const auto &d : ds)
    std::cerr << format_diagnostic(d) << '\n';
}

int doCheck(const std::string &file) {
  auto text = readText(file);
  if (!text)
    return kInputError;
  SolveOptions o;
  o.mode = Mode::Check;
  const auto out = run(*text, o);
  printDiagnostics(out.diagnostics);
  if (out.kind == OutcomeKind::Ok)
    std::cout << "No errors found.\n";
  else if (out.kind == OutcomeKind::InternalError)
    std::cerr << "Internal error: " << out.message << '\n';
  return exitFor(out.kind);
}

// The grounding handed to --dimacs: the sizes of the first model found, or
// the first size vector searched when there is none.
bool writeDimacs(const SolveOutcome &out, const SolveOptions &o, const std::string &path) {
  if (!out.typed)
    return false;
  std::optional<DomainAssignment> da;
  if (!out.models.empty())
    da = out.models.front().da;
  else if (!out.searched.empty())
    da = out.searched.front();
  else if (auto v = size_vectors(out.typed->problem, o.bounds); !v.empty())
    da = v.front();
  if (!da)
    return false;
  GroundOptions g;
  g.atomCap = o.atomCap;
  g.symmetryBreaking = o.symmetryBreaking;
  const auto grounding = ground(*out.typed, *da, g);
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    std::cerr << "lff: cannot write " << path << '\n';
    return false;
  }
  f << "c sizes " << render_domain_assignment(out.typed->problem, *da) << '\n';
  write_dimacs(f, grounding.cnf);
  return true;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Finite model finder for many-sorted first-order logic problems"};
  app.require_subcommand(1);

  std::string file;
  int maxModels = 2, maxSize = 4;
  double timeout = 10;
  std::string dimacsOut, mode = "mus", boundsText;
  bool symmetry = false;

  auto *check = app.add_subcommand("check", "Parse and type-check a problem file");
  check->add_option("FILE", file, "problem file")->required();

  auto *solve = app.add_subcommand("solve", "Search for models of a problem file");
  solve->add_option("FILE", file, "problem file")->required();
  solve->add_option("--max-models", maxModels, "stop after this many models")
      ->check(CLI::PositiveNumber);
  solve->add_option("--max-size", maxSize, "largest size tried for open sorts")
      ->check(CLI::PositiveNumber);
  solve->add_option("--bounds", boundsText, "size bounds, `lo..hi` or `sort=lo..hi, ...`")
      ->excludes("--max-size");
  solve->add_option("--timeout", timeout, "deadline in seconds")->check(CLI::PositiveNumber);
  solve->add_option("--dimacs", dimacsOut, "write the ground CNF here");
  solve->add_flag("--symmetry-breaking", symmetry, "order the values of names of open sorts");

  auto *diag = app.add_subcommand("diagnose", "Explain why a problem has no model");
  diag->add_option("FILE", file, "problem file")->required();
  diag->add_option("--mode", mode, "mus, approx or clauses")
      ->check(CLI::IsMember({"mus", "approx", "clauses"}));
  diag->add_option("--max-size", maxSize, "largest size tried for open sorts")
      ->check(CLI::PositiveNumber);
  diag->add_option("--bounds", boundsText, "size bounds, `lo..hi` or `sort=lo..hi, ...`")
      ->excludes("--max-size");
  diag->add_option("--timeout", timeout, "deadline in seconds")->check(CLI::PositiveNumber);

  auto cfg = ServiceConfig::from_env();
  auto *serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--port", cfg.port, "port, 0 for any free one");
  serve->add_option("--host", cfg.host, "address to bind");
  serve->add_option("--pool", cfg.poolSize, "solver workers (default: CPU count)");

  auto *corpus = app.add_subcommand("corpus", "Puzzle library");
  corpus->require_subcommand(1);
  std::string corpusDir;
  double corpusDeadline = 5;
  std::string levelFilter;
  auto *verify = corpus->add_subcommand("verify", "Solve every reference encoding");
  verify->add_option("--dir", corpusDir, "corpus directory");
  verify->add_option("--deadline", corpusDeadline, "seconds per puzzle");
  auto *list = corpus->add_subcommand("list", "List puzzles");
  list->add_option("--dir", corpusDir, "corpus directory");
  list->add_option("--level", levelFilter, "Beginner, Intermediate, Advanced, Expert or Logician");

  std::string logFile, session;
  bool byDay = false;
  auto *stats = app.add_subcommand("stats", "Aggregate a usage log as CSV");
  stats->add_option("LOGFILE", logFile, "usage log (JSON lines)")->required();
  auto *byDayFlag = stats->add_flag("--by-day", byDay, "runs per UTC day");
  auto *intervals =
      stats->add_option("--intervals", session, "gaps between runs of one session");
  byDayFlag->excludes(intervals);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kInputError;
  }

  SizeBounds bounds;
  bounds.hi = maxSize;
  if (!boundsText.empty()) {
    auto b = parse_bounds(boundsText);
    if (!b) {
      std::cerr << "lff: malformed bounds " << boundsText << '\n';
      return kInputError;
    }
    bounds = *b;
  }

  try {
    if (*check)
      return doCheck(file);

    if (*solve) {
      auto text = readText(file);
      if (!text)
        return kInputError;
      SolveOptions o;
      o.maxModels = maxModels;
      o.bounds = bounds;
      o.deadlineSecs = timeout;
      o.symmetryBreaking = symmetry;
      const auto out = run(*text, o);
      printDiagnostics(out.diagnostics);
      if (out.kind != OutcomeKind::InputErrors) {
        SolveOutcome shown = out;
        shown.diagnostics.clear();
        std::cout << render_outcome(shown);
      }
      if (!dimacsOut.empty() && out.kind != OutcomeKind::InputErrors &&
          !writeDimacs(out, o, dimacsOut))
        return kInputError;
      return exitFor(out.kind);
    }

    if (*diag) {
      auto text = readText(file);
      if (!text)
        return kInputError;
      SolveOptions o;
      o.bounds = bounds;
      o.deadlineSecs = timeout;
      const auto m = mode == "approx"    ? DiagnoseMode::Approx
                     : mode == "clauses" ? DiagnoseMode::Clauses
                                         : DiagnoseMode::Mus;
      const auto out = diagnose(*text, m, o);
      printDiagnostics(out.diagnostics);
      if (!out.report) {
        if (!out.message.empty())
          std::cerr << out.message << '\n';
        return exitFor(out.solveKind);
      }
      std::cout << render_report(*out.typed, *out.report);
      return out.report->kind == DiagnosisKind::NothingToDiagnose ? kOk : kNoSolution;
    }

    if (*serve) {
      Service svc(cfg);
      static Service *running = &svc;
      std::signal(SIGINT, [](int) { running->stop(); });
      std::signal(SIGTERM, [](int) { running->stop(); });
      std::cerr << "listening on " << cfg.host << ':' << cfg.port << '\n';
      svc.run();
      return kOk;
    }

    if (*corpus) {
      const auto dir = corpusDir.empty() ? default_corpus_dir() : std::filesystem::path(corpusDir);
      const auto all = load_corpus(dir);
      if (*list) {
        std::optional<Level> level;
        if (!levelFilter.empty() && !(level = parse_level(levelFilter))) {
          std::cerr << "lff: unknown level " << levelFilter << '\n';
          return kInputError;
        }
        for (const auto &p : list_puzzles(all, level))
          std::cout << level_name(p.level) << '\t' << p.id << '\t' << p.title << '\n';
        return kOk;
      }
      int failed = 0;
      for (const auto &r : verify_all(all, corpusDeadline)) {
        char secs[32];
        std::snprintf(secs, sizeof secs, "%.3f", r.seconds);
        std::cout << (r.pass ? "PASS " : "FAIL ") << r.id << " models=" << r.models
                  << " time=" << secs << "s";
        if (!r.detail.empty())
          std::cout << " (" << r.detail << ")";
        std::cout << '\n';
        failed += !r.pass;
      }
      std::cout << all.size() - static_cast<std::size_t>(failed) << '/' << all.size()
                << " puzzles verified\n";
      return failed || all.empty() ? 1 : kOk;
    }

    if (*stats) {
      if (!readText(logFile))
        return kInputError;
      const auto events = read_usage_log(logFile);
      std::cout << (session.empty() ? by_day_csv(events) : intervals_csv(events, session));
      return kOk;
    }
  } catch (const std::exception &e) {
    std::cerr << "lff: " << e.what() << '\n';
    return kInputError;
  }
  return kOk;
}

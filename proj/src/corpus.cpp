#include "lff/corpus.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#ifndef LFF_CORPUS_DIR
#define LFF_CORPUS_DIR "corpus"
#endif

namespace lff {

namespace fs = std::filesystem;

std::string_view level_name(Level level) {
  switch (level) {
  case Level::Beginner:
    return "Beginner";
  case Level::Intermediate:
    return "Intermediate";
  case Level::Advanced:
    return "Advanced";
  case Level::Expert:
    return "Expert";
  case Level::Logician:
    return "Logician";
  }
  return "Beginner";
}

std::optional<Level> parse_level(std::string_view text) {
  for (Level l : {Level::Beginner, Level::Intermediate, Level::Advanced, Level::Expert,
                  Level::Logician})
    if (level_name(l) == text)
      return l;
  return std::nullopt;
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<std::pair<int, int>> parseRange(std::string_view s) {
  const auto dots = s.find("..");
  if (dots == std::string_view::npos)
    return std::nullopt;
  try {
    std::size_t used = 0;
    const std::string lo = trim(s.substr(0, dots)), hi = trim(s.substr(dots + 2));
    const int a = std::stoi(lo, &used);
    if (used != lo.size())
      return std::nullopt;
    const int b = std::stoi(hi, &used);
    if (used != hi.size())
      return std::nullopt;
    return std::pair{a, b};
  } catch (const std::exception &) {
    return std::nullopt;
  }
}

std::string readFile(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

std::optional<SizeBounds> parse_bounds(std::string_view text) {
  SizeBounds b;
  std::string item;
  std::istringstream in{std::string(text)};
  bool any = false;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty())
      return std::nullopt;
    const auto eq = item.find('=');
    auto range = parseRange(eq == std::string::npos ? item : item.substr(eq + 1));
    if (!range)
      return std::nullopt;
    if (eq == std::string::npos) {
      b.lo = range->first;
      b.hi = range->second;
    } else {
      b.perSort[trim(item.substr(0, eq))] = *range;
    }
    any = true;
  }
  if (!any)
    return std::nullopt;
  return b;
}

PuzzleRecord load_puzzle(const fs::path &dir) {
  PuzzleRecord p;
  std::map<std::string, std::string> meta;
  std::istringstream in(readFile(dir / "meta"));
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty())
      continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos)
      throw std::runtime_error(dir.string() + "/meta: expected `key: value`, got: " + line);
    meta[trim(line.substr(0, colon))] = trim(line.substr(colon + 1));
  }
  auto need = [&](const std::string &key) {
    auto it = meta.find(key);
    if (it == meta.end())
      throw std::runtime_error(dir.string() + "/meta: missing " + key);
    return it->second;
  };
  p.id = need("id");
  p.title = need("title");
  auto level = parse_level(need("level"));
  if (!level)
    throw std::runtime_error(dir.string() + "/meta: unknown level " + meta["level"]);
  p.level = *level;
  try {
    p.expectedModels = std::stoi(need("expected_models"));
  } catch (const std::invalid_argument &) {
    throw std::runtime_error(dir.string() + "/meta: expected_models is not a number");
  }
  if (meta.count("bounds")) {
    auto b = parse_bounds(meta["bounds"]);
    if (!b)
      throw std::runtime_error(dir.string() + "/meta: malformed bounds " + meta["bounds"]);
    p.bounds = *b;
  }
  p.invented = meta.count("invented") && meta["invented"] == "yes";
  p.statement = readFile(dir / "statement.txt");
  p.encoding = readFile(dir / "problem.lff");
  if (fs::exists(dir / "solution.txt"))
    p.solution = readFile(dir / "solution.txt");
  return p;
}

std::vector<PuzzleRecord> load_corpus(const fs::path &root) {
  std::vector<PuzzleRecord> out;
  for (const auto &entry : fs::directory_iterator(root))
    if (entry.is_directory() && fs::exists(entry.path() / "meta"))
      out.push_back(load_puzzle(entry.path()));
  return list_puzzles(out);
}

fs::path default_corpus_dir() {
  if (const char *env = std::getenv("LFF_CORPUS_DIR"); env && *env)
    return env;
  return LFF_CORPUS_DIR;
}

std::vector<PuzzleRecord> list_puzzles(const std::vector<PuzzleRecord> &all,
                                       std::optional<Level> level) {
  std::vector<PuzzleRecord> out;
  for (const auto &p : all)
    if (!level || p.level == *level)
      out.push_back(p);
  std::sort(out.begin(), out.end(), [](const auto &a, const auto &b) {
    return std::pair{a.level, a.id} < std::pair{b.level, b.id};
  });
  return out;
}

VerifyResult verify_puzzle(const PuzzleRecord &p, double deadlineSecs) {
  VerifyResult r;
  r.id = p.id;
  SolveOptions opts;
  opts.bounds = p.bounds;
  opts.deadlineSecs = deadlineSecs;
  opts.maxModels = p.expectedModels + 1;
  const auto out = run(p.encoding, opts);
  r.seconds = out.stats.wallSeconds;
  r.models = static_cast<int>(out.models.size());
  switch (out.kind) {
  case OutcomeKind::Solutions:
  case OutcomeKind::NoSolution:
    break;
  case OutcomeKind::Timeout:
    r.detail = "timed out after " + std::to_string(deadlineSecs) + " s";
    return r;
  case OutcomeKind::InputErrors:
    r.detail = "reference encoding has input errors";
    if (!out.diagnostics.empty())
      r.detail += ": " + out.diagnostics.front().message + " (line " +
                  std::to_string(out.diagnostics.front().line) + ")";
    return r;
  default:
    r.detail = "internal error: " + out.message;
    return r;
  }
  if (r.models != p.expectedModels || !out.exhausted) {
    r.detail = "expected " + std::to_string(p.expectedModels) + " models, found " +
               std::to_string(r.models) + (out.exhausted ? "" : " or more");
    return r;
  }
  if (p.solution) {
    if (out.models.size() != 1) {
      r.detail = "a frozen solution needs a unique model";
      return r;
    }
    const auto rendered = render_interpretation(out.typed->problem, out.models[0].interp);
    if (trim(rendered) != trim(*p.solution)) {
      r.detail = "model differs from the frozen solution";
      return r;
    }
  }
  r.pass = true;
  return r;
}

std::vector<VerifyResult> verify_all(const std::vector<PuzzleRecord> &all, double deadlineSecs) {
  std::vector<VerifyResult> out;
  for (const auto &p : all)
    out.push_back(verify_puzzle(p, deadlineSecs));
  return out;
}

} // namespace lff

#pragma once

#include "lff/engine.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace lff {

enum class Level { Beginner, Intermediate, Advanced, Expert, Logician };

std::string_view level_name(Level level);
std::optional<Level> parse_level(std::string_view text);

struct PuzzleRecord {
  std::string id;
  std::string title;
  Level level = Level::Beginner;
  std::string statement;
  std::string encoding;
  int expectedModels = 0;
  SizeBounds bounds;
  std::optional<std::string> solution; // rendered model, for unique puzzles
  bool invented = false;
};

/// Parses `lo..hi` or `sort=lo..hi, sort=lo..hi`; nullopt if malformed.
std::optional<SizeBounds> parse_bounds(std::string_view text);

/// Reads one puzzle directory (statement.txt, problem.lff, meta and an
/// optional solution.txt). Throws std::runtime_error on missing files or
/// malformed metadata.
PuzzleRecord load_puzzle(const std::filesystem::path &dir);

/// Every puzzle directory below `root`, ordered by level then id.
std::vector<PuzzleRecord> load_corpus(const std::filesystem::path &root);

/// Directory of the shipped corpus: $LFF_CORPUS_DIR, else the build-time
/// default.
std::filesystem::path default_corpus_dir();

std::vector<PuzzleRecord> list_puzzles(const std::vector<PuzzleRecord> &all,
                                       std::optional<Level> level = std::nullopt);

struct VerifyResult {
  std::string id;
  bool pass = false;
  int models = 0;
  double seconds = 0;
  std::string detail;
};

/// Solves the reference encoding and compares with the expected outcome.
VerifyResult verify_puzzle(const PuzzleRecord &p, double deadlineSecs = 5.0);
std::vector<VerifyResult> verify_all(const std::vector<PuzzleRecord> &all,
                                     double deadlineSecs = 5.0);

} // namespace lff

#pragma once

#include "lff/ast.hpp"

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace lff {

enum class TokenKind {
  Ident,
  Int,
  Period,
  Comma,
  Colon,
  LParen,
  RParen,
  LBrace,
  RBrace,
  Eq,
  Neq,
  Lt,
  Le,
  Gt,
  Ge,
  Plus,
  Minus,
  Star,
  Not,
  And,
  Or,
  Implies,
  Iff,
  DotDot,
  Forall,
  Exists,
  True,
  False,
};

std::string_view token_kind_name(TokenKind kind);

struct Token {
  TokenKind kind;
  std::string text; // identifier spelling or literal digits
  SourcePos pos;
  std::size_t endOffset = 0;

  friend bool operator==(const Token &, const Token &) = default;
};

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  int line = 1;
  int column = 1;
  std::string offendingText; // the source line
  std::string message;       // one-line summary
  std::vector<std::string> detail; // "Detailed diagnostics" block, pre-indented
  std::optional<std::string> partialTree;
  std::vector<std::string> hints;

  bool isError() const { return severity == Severity::Error; }
};

/// Full human-readable rendering, in the solver's feedback style:
///
///   Input error on line 32:   had(Mary, SOME x lamb(x)).
///   Type mismatch with argument of had
///
///   Detailed diagnostics: in the formula
///   ...
std::string format_diagnostic(const Diagnostic &d);

bool has_errors(const std::vector<Diagnostic> &diags);

struct TokenizeResult {
  std::vector<Token> tokens;
  std::optional<Diagnostic> error;
};

/// Splits text into tokens. `%` starts a comment running to end of line.
/// Unicode connectives are normalised to their ASCII token kinds.
TokenizeResult tokenize(std::string_view text);

/// A parse tree as far as the parser got. Incomplete nodes are those whose
/// construction was interrupted by a syntax error.
struct ParseTree {
  std::string label;
  std::vector<ParseTree> children;
  bool complete = true;

  friend bool operator==(const ParseTree &, const ParseTree &) = default;
};

/// One node per line, two spaces of indentation per level. Incomplete nodes
/// carry a trailing " ..." marker.
std::string render_parse_tree(const ParseTree &tree);

/// Identifiers that are not variables when they appear bare in a formula.
struct SymbolContext {
  std::set<std::string> names;
  std::set<std::string> enumElements;
  std::set<std::string> propositions; // zero-argument predicates

  static SymbolContext from(const Problem &p);
};

struct FormulaParse {
  ExprPtr formula; // null on failure
  ParseTree tree;
  std::vector<Diagnostic> diagnostics;
};

/// Parses a single formula, optionally followed by a terminating period.
/// Bare identifiers are classified with `ctx`; unknown ones become variables.
FormulaParse parse_formula(std::string_view text, const SymbolContext &ctx = {});

struct ParseResult {
  std::optional<Problem> problem;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return problem.has_value(); }
};

/// Parses a complete problem text with `Sorts:`, `Vocabulary:` and
/// `Constraints:` sections. Recovers at each `.` so that every independent
/// syntax error in the text is reported.
ParseResult parse_problem(std::string_view text);

/// Joins the three input boxes under their section headers.
std::string assemble_problem_text(std::string_view sorts,
                                  std::string_view vocabulary,
                                  std::string_view constraints);

/// Renders a problem back to the file grammar.
std::string render_problem(const Problem &p);

} // namespace lff

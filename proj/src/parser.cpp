#include "lff/parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <memory>
#include <sstream>

namespace lff {

std::string_view token_kind_name(TokenKind kind) {
  switch (kind) {
  case TokenKind::Ident: return "identifier";
  case TokenKind::Int: return "integer";
  case TokenKind::Period: return "'.'";
  case TokenKind::Comma: return "','";
  case TokenKind::Colon: return "':'";
  case TokenKind::LParen: return "'('";
  case TokenKind::RParen: return "')'";
  case TokenKind::LBrace: return "'{'";
  case TokenKind::RBrace: return "'}'";
  case TokenKind::Eq: return "'='";
  case TokenKind::Neq: return "'/='";
  case TokenKind::Lt: return "'<'";
  case TokenKind::Le: return "'<='";
  case TokenKind::Gt: return "'>'";
  case TokenKind::Ge: return "'>='";
  case TokenKind::Plus: return "'+'";
  case TokenKind::Minus: return "'-'";
  case TokenKind::Star: return "'*'";
  case TokenKind::Not: return "'~'";
  case TokenKind::And: return "'&'";
  case TokenKind::Or: return "'|'";
  case TokenKind::Implies: return "'->'";
  case TokenKind::Iff: return "'<->'";
  case TokenKind::DotDot: return "'..'";
  case TokenKind::Forall: return "'ALL'";
  case TokenKind::Exists: return "'SOME'";
  case TokenKind::True: return "'true'";
  case TokenKind::False: return "'false'";
  }
  return "token";
}

namespace {

std::string lineOf(std::string_view text, int line) {
  int current = 1;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size() && current < line; ++i)
    if (text[i] == '\n') {
      ++current;
      start = i + 1;
    }
  if (current != line)
    return {};
  auto end = text.find('\n', start);
  std::string s(text.substr(start, end == std::string_view::npos
                                       ? std::string_view::npos
                                       : end - start));
  if (!s.empty() && s.back() == '\r')
    s.pop_back();
  return s;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos)
    return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

Diagnostic makeError(std::string_view text, SourcePos pos, std::string message) {
  Diagnostic d;
  d.severity = Severity::Error;
  d.line = pos.line;
  d.column = pos.column;
  d.offendingText = lineOf(text, pos.line);
  d.message = std::move(message);
  return d;
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

struct UnicodeOp {
  std::string_view bytes;
  TokenKind kind;
};

constexpr UnicodeOp kUnicodeOps[] = {
    {"∀", TokenKind::Forall},  {"∃", TokenKind::Exists},
    {"∧", TokenKind::And},     {"∨", TokenKind::Or},
    {"→", TokenKind::Implies}, {"↔", TokenKind::Iff},
    {"¬", TokenKind::Not},     {"≠", TokenKind::Neq},
    {"≤", TokenKind::Le},      {"≥", TokenKind::Ge},
};

class Lexer {
public:
  explicit Lexer(std::string_view text) : text_(text) {}

  void run() {
    while (i_ < text_.size()) {
      const char c = text_[i_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        step();
        continue;
      }
      if (c == '%') {
        while (i_ < text_.size() && text_[i_] != '\n')
          step();
        continue;
      }
      const SourcePos start = here();
      if (std::isalpha(static_cast<unsigned char>(c))) {
        std::size_t j = i_;
        while (j < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[j])) || text_[j] == '_'))
          ++j;
        std::string word(text_.substr(i_, j - i_));
        TokenKind kind = TokenKind::Ident;
        if (word == "ALL")
          kind = TokenKind::Forall;
        else if (word == "SOME")
          kind = TokenKind::Exists;
        else if (word == "true")
          kind = TokenKind::True;
        else if (word == "false")
          kind = TokenKind::False;
        emit(kind, std::move(word), start, j - i_);
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t j = i_;
        while (j < text_.size() && std::isdigit(static_cast<unsigned char>(text_[j])))
          ++j;
        emit(TokenKind::Int, std::string(text_.substr(i_, j - i_)), start, j - i_);
        continue;
      }
      if (lexUnicode(start) || lexPunct(start))
        continue;

      // Illegal character: report it and skip the whole UTF-8 sequence.
      std::size_t len = 1;
      while (i_ + len < text_.size() &&
             (static_cast<unsigned char>(text_[i_ + len]) & 0xC0) == 0x80)
        ++len;
      auto d = makeError(text_, start,
                         "Illegal character '" + std::string(text_.substr(i_, len)) +
                             "'");
      d.hints.push_back("identifiers consist of letters, digits and '_', "
                        "starting with a letter");
      errors.push_back(std::move(d));
      for (std::size_t k = 0; k < len; ++k)
        step();
    }
  }

  std::vector<Token> tokens;
  std::vector<Diagnostic> errors;

private:
  SourcePos here() const { return SourcePos{line_, col_, i_}; }

  void step() {
    const auto byte = static_cast<unsigned char>(text_[i_]);
    if (byte == '\n') {
      ++line_;
      col_ = 1;
    } else if ((byte & 0xC0) != 0x80) {
      ++col_;
    }
    ++i_;
  }

  void emit(TokenKind kind, std::string text, SourcePos start, std::size_t len) {
    for (std::size_t k = 0; k < len; ++k)
      step();
    tokens.push_back(Token{kind, std::move(text), start, i_});
  }

  bool lexUnicode(SourcePos start) {
    for (const auto &op : kUnicodeOps)
      if (text_.substr(i_, op.bytes.size()) == op.bytes) {
        emit(op.kind, std::string(op.bytes), start, op.bytes.size());
        return true;
      }
    return false;
  }

  bool lexPunct(SourcePos start) {
    auto rest = text_.substr(i_);
    auto starts = [&](std::string_view p) { return rest.substr(0, p.size()) == p; };
    struct P {
      std::string_view text;
      TokenKind kind;
    };
    // Longest match first.
    static constexpr P table[] = {
        {"<->", TokenKind::Iff}, {"->", TokenKind::Implies}, {"<=", TokenKind::Le},
        {">=", TokenKind::Ge},   {"/=", TokenKind::Neq},     {"!=", TokenKind::Neq},
        {"..", TokenKind::DotDot}, {".", TokenKind::Period}, {",", TokenKind::Comma},
        {":", TokenKind::Colon}, {"(", TokenKind::LParen},   {")", TokenKind::RParen},
        {"{", TokenKind::LBrace}, {"}", TokenKind::RBrace},  {"=", TokenKind::Eq},
        {"<", TokenKind::Lt},    {">", TokenKind::Gt},       {"+", TokenKind::Plus},
        {"-", TokenKind::Minus}, {"*", TokenKind::Star},     {"~", TokenKind::Not},
        {"&", TokenKind::And},   {"|", TokenKind::Or},
    };
    for (const auto &p : table)
      if (starts(p.text)) {
        emit(p.kind, std::string(p.text), start, p.text.size());
        return true;
      }
    return false;
  }

  std::string_view text_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct ParseError {
  SourcePos pos;
  std::string message;
  std::vector<std::string> hints;
};

// Mutable tree used while parsing; frozen into ParseTree afterwards.
struct TreeNode {
  std::string label;
  std::vector<std::unique_ptr<TreeNode>> kids;
  bool open = true;

  TreeNode &add(std::string l) {
    kids.push_back(std::make_unique<TreeNode>());
    kids.back()->label = std::move(l);
    return *kids.back();
  }

  // Moves the last child under a new operator node and returns it.
  TreeNode &wrapLast(std::string l) {
    auto node = std::make_unique<TreeNode>();
    node->label = std::move(l);
    if (!kids.empty()) {
      node->kids.push_back(std::move(kids.back()));
      kids.pop_back();
    }
    kids.push_back(std::move(node));
    return *kids.back();
  }

  ParseTree freeze() const {
    ParseTree t;
    t.label = label;
    t.complete = !open;
    for (const auto &k : kids)
      t.children.push_back(k->freeze());
    return t;
  }
};

class TokenStream {
public:
  TokenStream(std::string_view text, const std::vector<Token> &toks, std::size_t begin,
              std::size_t end)
      : text_(text), toks_(toks), i_(begin), end_(end) {}

  bool atEnd() const { return i_ >= end_; }
  const Token *peek(std::size_t ahead = 0) const {
    return i_ + ahead < end_ ? &toks_[i_ + ahead] : nullptr;
  }
  bool check(TokenKind k) const { return peek() && peek()->kind == k; }
  bool checkWord(std::string_view w) const {
    return check(TokenKind::Ident) && peek()->text == w;
  }
  const Token &advance() { return toks_[i_++]; }
  std::size_t index() const { return i_; }

  SourcePos position() const {
    if (auto *t = peek())
      return t->pos;
    return endPos();
  }

  SourcePos endPos() const {
    if (end_ == 0 || toks_.empty())
      return SourcePos{1, 1, 0};
    const Token &last = toks_[std::min(end_, toks_.size()) - 1];
    SourcePos p = last.pos;
    p.column += static_cast<int>(last.endOffset - last.pos.offset);
    p.offset = last.endOffset;
    return p;
  }

  std::string describeNext() const {
    if (auto *t = peek()) {
      if (t->kind == TokenKind::Ident || t->kind == TokenKind::Int)
        return "'" + t->text + "'";
      return std::string(token_kind_name(t->kind));
    }
    return "end of section";
  }

  [[noreturn]] void fail(std::string message, std::vector<std::string> hints = {}) const {
    throw ParseError{position(), std::move(message), std::move(hints)};
  }

  const Token &expect(TokenKind k, std::string_view what = {}) {
    if (!check(k))
      fail("expected " +
           (what.empty() ? std::string(token_kind_name(k)) : std::string(what)) +
           " but found " + describeNext());
    return advance();
  }

  const Token &expectIdent(std::string_view what) {
    return expect(TokenKind::Ident, what);
  }

  // Skips past the next period (or to the end). Returns false at the end.
  void recover() {
    while (!atEnd()) {
      if (advance().kind == TokenKind::Period)
        return;
    }
  }

  std::string_view text() const { return text_; }

private:
  std::string_view text_;
  const std::vector<Token> &toks_;
  std::size_t i_;
  std::size_t end_;
};

class FormulaParser {
public:
  FormulaParser(TokenStream &ts, const SymbolContext &ctx) : ts_(ts), ctx_(ctx) {}

  ExprPtr parse(TreeNode &root) { return parseIff(root); }

private:
  ExprPtr parseIff(TreeNode &parent) {
    auto left = parseImplies(parent);
    while (ts_.check(TokenKind::Iff)) {
      auto pos = ts_.advance().pos;
      auto &node = parent.wrapLast("<->");
      auto right = parseImplies(node);
      node.open = false;
      left = Expr::make(ExprKind::Iff, {}, {left, right}, pos);
    }
    return left;
  }

  ExprPtr parseImplies(TreeNode &parent) {
    auto left = parseOr(parent);
    if (ts_.check(TokenKind::Implies)) {
      auto pos = ts_.advance().pos;
      auto &node = parent.wrapLast("->");
      auto right = parseImplies(node);
      node.open = false;
      return Expr::make(ExprKind::Implies, {}, {left, right}, pos);
    }
    return left;
  }

  ExprPtr parseOr(TreeNode &parent) {
    auto left = parseAnd(parent);
    while (ts_.check(TokenKind::Or)) {
      auto pos = ts_.advance().pos;
      auto &node = parent.wrapLast("|");
      auto right = parseAnd(node);
      node.open = false;
      left = Expr::make(ExprKind::Or, {}, {left, right}, pos);
    }
    return left;
  }

  ExprPtr parseAnd(TreeNode &parent) {
    auto left = parseUnary(parent);
    while (ts_.check(TokenKind::And)) {
      auto pos = ts_.advance().pos;
      auto &node = parent.wrapLast("&");
      auto right = parseUnary(node);
      node.open = false;
      left = Expr::make(ExprKind::And, {}, {left, right}, pos);
    }
    return left;
  }

  ExprPtr parseUnary(TreeNode &parent) {
    if (ts_.check(TokenKind::Not)) {
      auto pos = ts_.advance().pos;
      auto &node = parent.add("~");
      auto body = parseUnary(node);
      node.open = false;
      return Expr::make(ExprKind::Not, {}, {body}, pos);
    }
    if (ts_.check(TokenKind::Forall) || ts_.check(TokenKind::Exists))
      return parseQuantifier(parent);
    return parseComparison(parent);
  }

  ExprPtr parseQuantifier(TreeNode &parent) {
    const Token &q = ts_.advance();
    const auto kind = q.kind == TokenKind::Forall ? ExprKind::Forall : ExprKind::Exists;
    const std::string word(operator_symbol(kind));

    struct Binder {
      std::string var;
      std::optional<std::string> sort;
      SourcePos pos;
    };
    std::vector<Binder> binders;
    TreeNode *node = &parent;
    for (;;) {
      const Token &v = ts_.expectIdent("a variable after " + word);
      Binder b{v.text, std::nullopt, v.pos};
      std::string label = word + " " + v.text;
      if (ts_.check(TokenKind::Colon)) {
        ts_.advance();
        b.sort = ts_.expectIdent("a sort name").text;
        label += ": " + *b.sort;
      }
      node = &node->add(label);
      binders.push_back(std::move(b));
      bound_.push_back(binders.back().var);
      if (!ts_.check(TokenKind::Comma))
        break;
      ts_.advance();
    }
    auto body = parseUnary(*node);
    for (std::size_t k = 0; k < binders.size(); ++k)
      bound_.pop_back();
    closeChain(parent, binders.size());
    for (auto it = binders.rbegin(); it != binders.rend(); ++it)
      body = Expr::quantifier(kind, it->var, it->sort, body,
                              it == binders.rend() - 1 ? q.pos : it->pos);
    return body;
  }

  // Marks the chain of `depth` nested quantifier nodes ending at parent's
  // last child as complete.
  static void closeChain(TreeNode &parent, std::size_t depth) {
    TreeNode *n = parent.kids.back().get();
    for (std::size_t k = 0; k < depth; ++k) {
      n->open = false;
      if (k + 1 < depth)
        n = n->kids.front().get();
    }
  }

  ExprPtr parseComparison(TreeNode &parent) {
    auto left = parseAdditive(parent);
    if (auto kind = comparisonKind()) {
      auto pos = ts_.advance().pos;
      auto &node = parent.wrapLast(std::string(operator_symbol(*kind)));
      auto right = parseAdditive(node);
      node.open = false;
      if (comparisonKind())
        ts_.fail("comparison operators cannot be chained",
                 {"use '&' to combine comparisons, e.g. a = b & b = c"});
      return Expr::make(*kind, {}, {left, right}, pos);
    }
    return left;
  }

  std::optional<ExprKind> comparisonKind() const {
    if (!ts_.peek())
      return std::nullopt;
    switch (ts_.peek()->kind) {
    case TokenKind::Eq: return ExprKind::Eq;
    case TokenKind::Neq: return ExprKind::Neq;
    case TokenKind::Lt: return ExprKind::Lt;
    case TokenKind::Le: return ExprKind::Le;
    case TokenKind::Gt: return ExprKind::Gt;
    case TokenKind::Ge: return ExprKind::Ge;
    default: return std::nullopt;
    }
  }

  ExprPtr parseAdditive(TreeNode &parent) {
    auto left = parseMultiplicative(parent);
    while (ts_.check(TokenKind::Plus) || ts_.check(TokenKind::Minus)) {
      const Token &op = ts_.advance();
      const auto kind = op.kind == TokenKind::Plus ? ExprKind::Add : ExprKind::Sub;
      auto &node = parent.wrapLast(std::string(operator_symbol(kind)));
      auto right = parseMultiplicative(node);
      node.open = false;
      left = Expr::make(kind, {}, {left, right}, op.pos);
    }
    return left;
  }

  ExprPtr parseMultiplicative(TreeNode &parent) {
    auto left = parseAtom(parent);
    while (ts_.check(TokenKind::Star)) {
      auto pos = ts_.advance().pos;
      auto &node = parent.wrapLast("*");
      auto right = parseAtom(node);
      node.open = false;
      left = Expr::make(ExprKind::Mul, {}, {left, right}, pos);
    }
    return left;
  }

  ExprPtr parseAtom(TreeNode &parent) {
    const Token *t = ts_.peek();
    if (!t)
      ts_.fail("unexpected end of formula",
               {"check for a missing operand or an unbalanced parenthesis"});
    switch (t->kind) {
    case TokenKind::Minus: {
      if (!ts_.peek(1) || ts_.peek(1)->kind != TokenKind::Int)
        ts_.fail("'-' is only allowed directly before an integer literal");
      auto pos = ts_.advance().pos;
      const Token &n = ts_.advance();
      parent.add("-" + n.text).open = false;
      return Expr::intLit(-toInt(n), pos);
    }
    case TokenKind::Int: {
      const Token &n = ts_.advance();
      parent.add(n.text).open = false;
      return Expr::intLit(toInt(n), n.pos);
    }
    case TokenKind::True:
    case TokenKind::False: {
      const Token &c = ts_.advance();
      parent.add(c.text).open = false;
      return Expr::make(c.kind == TokenKind::True ? ExprKind::True : ExprKind::False,
                        {}, {}, c.pos);
    }
    case TokenKind::LParen: {
      ts_.advance();
      auto inner = parseIff(parent);
      if (!ts_.check(TokenKind::RParen))
        ts_.fail("expected ')' but found " + ts_.describeNext(),
                 {"check for misplaced parentheses"});
      ts_.advance();
      return inner;
    }
    case TokenKind::Ident:
      return parseIdent(parent);
    default:
      ts_.fail("expected a formula or term but found " + ts_.describeNext(),
               {"check for a missing operand or a misplaced operator"});
    }
  }

  ExprPtr parseIdent(TreeNode &parent) {
    const Token &id = ts_.advance();
    if (ts_.check(TokenKind::LParen)) {
      ts_.advance();
      auto &node = parent.add(id.text);
      std::vector<ExprPtr> args;
      if (ts_.check(TokenKind::RParen))
        ts_.fail("empty argument list for " + id.text,
                 {"symbols without arguments are written without parentheses"});
      for (;;) {
        args.push_back(parseIff(node));
        if (ts_.check(TokenKind::Comma)) {
          ts_.advance();
          continue;
        }
        if (ts_.check(TokenKind::RParen)) {
          ts_.advance();
          break;
        }
        ts_.fail("expected ',' or ')' in the argument list of " + id.text +
                     " but found " + ts_.describeNext(),
                 {"check for misplaced parentheses"});
      }
      node.open = false;
      return Expr::make(ExprKind::Apply, id.text, std::move(args), id.pos);
    }
    parent.add(id.text).open = false;
    if (std::find(bound_.begin(), bound_.end(), id.text) != bound_.end())
      return Expr::make(ExprKind::Var, id.text, {}, id.pos);
    if (ctx_.names.count(id.text))
      return Expr::make(ExprKind::Name, id.text, {}, id.pos);
    if (ctx_.enumElements.count(id.text))
      return Expr::make(ExprKind::EnumLit, id.text, {}, id.pos);
    if (ctx_.propositions.count(id.text))
      return Expr::make(ExprKind::Apply, id.text, {}, id.pos);
    return Expr::make(ExprKind::Var, id.text, {}, id.pos);
  }

  std::int64_t toInt(const Token &t) const {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc())
      throw ParseError{t.pos, "integer literal out of range: " + t.text, {}};
    return v;
  }

  TokenStream &ts_;
  const SymbolContext &ctx_;
  std::vector<std::string> bound_;
};

Diagnostic fromParseError(std::string_view text, const ParseError &e) {
  auto d = makeError(text, e.pos, "Syntax error: " + e.message);
  d.hints = e.hints;
  return d;
}

// Parses one formula from the stream; on failure records a diagnostic with
// the partial tree and returns null.
ExprPtr parseOneFormula(TokenStream &ts, const SymbolContext &ctx,
                        std::vector<Diagnostic> &diags, ParseTree *treeOut) {
  TreeNode root;
  FormulaParser fp(ts, ctx);
  try {
    auto f = fp.parse(root);
    if (treeOut && !root.kids.empty())
      *treeOut = root.kids.front()->freeze();
    return f;
  } catch (const ParseError &e) {
    auto d = fromParseError(ts.text(), e);
    ParseTree partial;
    if (!root.kids.empty())
      partial = root.kids.front()->freeze();
    else
      partial.label = "(nothing parsed)";
    d.partialTree = render_parse_tree(partial);
    if (treeOut)
      *treeOut = std::move(partial);
    diags.push_back(std::move(d));
    return nullptr;
  }
}

void renderTree(const ParseTree &t, int depth, std::string &out) {
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
  out += t.label;
  if (!t.complete)
    out += " ...";
  out += '\n';
  for (const auto &c : t.children)
    renderTree(c, depth + 1, out);
}

// ---------------------------------------------------------------------------
// Problem parser
// ---------------------------------------------------------------------------

class ProblemParser {
public:
  explicit ProblemParser(std::string_view text) : text_(text) {}

  ParseResult run() {
    Lexer lex(text_);
    lex.run();
    toks_ = std::move(lex.tokens);
    diags_ = std::move(lex.errors);

    const std::size_t n = toks_.size();
    auto sortsAt = findHeader("Sorts", 0);
    auto vocabAt = findHeader("Vocabulary", sortsAt ? *sortsAt + 2 : 0);
    auto consAt = findHeader("Constraints", vocabAt   ? *vocabAt + 2
                                            : sortsAt ? *sortsAt + 2
                                                      : 0);
    if (!sortsAt)
      missingHeader("Sorts", 0);
    else if (*sortsAt != 0)
      diags_.push_back(makeError(text_, toks_[0].pos,
                                 "Syntax error: text before the 'Sorts:' header"));
    if (!vocabAt)
      missingHeader("Vocabulary", consAt ? *consAt : n);
    if (!consAt)
      missingHeader("Constraints", n);

    auto bodyStart = [](std::optional<std::size_t> h) { return *h + 2; };
    const std::size_t vocabEnd = consAt ? *consAt : n;
    const std::size_t sortsEnd = vocabAt ? *vocabAt : vocabEnd;
    if (sortsAt)
      parseSorts(bodyStart(sortsAt), sortsEnd);
    if (vocabAt)
      parseVocabulary(bodyStart(vocabAt), vocabEnd);
    const bool declsOk = validateDeclarations();
    if (consAt)
      parseConstraints(bodyStart(consAt), n);

    ParseResult result;
    if (!has_errors(diags_) && declsOk && sortsAt && vocabAt && consAt) {
      problem_.source = std::string(text_);
      result.problem = std::move(problem_);
    }
    result.diagnostics = std::move(diags_);
    return result;
  }

private:
  std::optional<std::size_t> findHeader(std::string_view word, std::size_t from) const {
    for (std::size_t i = from; i + 1 < toks_.size(); ++i) {
      const auto &t = toks_[i];
      if (t.kind == TokenKind::Ident && t.text == word &&
          toks_[i + 1].kind == TokenKind::Colon &&
          (i == 0 || toks_[i - 1].pos.line < t.pos.line))
        return i;
    }
    return std::nullopt;
  }

  void missingHeader(std::string_view word, std::size_t at) {
    SourcePos pos = at < toks_.size() ? toks_[at].pos : endOfText();
    auto d = makeError(text_, pos,
                       "Syntax error: missing section header '" + std::string(word) + ":'");
    d.hints.push_back("a problem has three sections headed 'Sorts:', "
                      "'Vocabulary:' and 'Constraints:', in that order");
    diags_.push_back(std::move(d));
  }

  SourcePos endOfText() const {
    SourcePos p{1, 1, text_.size()};
    for (char c : text_) {
      if (c == '\n') {
        ++p.line;
        p.column = 1;
      } else if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) {
        ++p.column;
      }
    }
    return p;
  }

  void record(TokenStream &ts, const ParseError &e) {
    diags_.push_back(fromParseError(text_, e));
    ts.recover();
  }

  void parseSorts(std::size_t begin, std::size_t end) {
    TokenStream ts(text_, toks_, begin, end);
    while (!ts.atEnd()) {
      try {
        const Token &name = ts.expectIdent("a sort name");
        SortDecl decl{name.text, OpenSort{}, name.pos};
        if (ts.check(TokenKind::Period)) {
          ts.advance();
        } else if (ts.checkWord("enum")) {
          ts.advance();
          ts.expect(TokenKind::Colon);
          EnumSort en;
          en.elements.push_back(ts.expectIdent("an enum element").text);
          while (ts.check(TokenKind::Comma)) {
            ts.advance();
            en.elements.push_back(ts.expectIdent("an enum element").text);
          }
          ts.expect(TokenKind::Period, "'.' to end the sort declaration");
          decl.kind = std::move(en);
        } else if (ts.checkWord("int")) {
          ts.advance();
          ts.expect(TokenKind::Colon);
          IntRangeSort ir;
          ir.lo = signedInt(ts);
          ts.expect(TokenKind::DotDot);
          ir.hi = signedInt(ts);
          ts.expect(TokenKind::Period, "'.' to end the sort declaration");
          decl.kind = ir;
        } else {
          ts.fail("expected '.', 'enum:' or 'int:' after sort " + name.text +
                      " but found " + ts.describeNext(),
                  {"each declaration ends with '.'"});
        }
        problem_.sorts.push_back(std::move(decl));
      } catch (const ParseError &e) {
        record(ts, e);
      }
    }
  }

  static std::int64_t signedInt(TokenStream &ts) {
    bool neg = false;
    if (ts.check(TokenKind::Minus)) {
      ts.advance();
      neg = true;
    }
    const Token &t = ts.expect(TokenKind::Int, "an integer");
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc())
      throw ParseError{t.pos, "integer literal out of range: " + t.text, {}};
    return neg ? -v : v;
  }

  std::vector<std::string> sortList(TokenStream &ts) {
    std::vector<std::string> sorts;
    ts.expect(TokenKind::LParen);
    sorts.push_back(ts.expectIdent("a sort name").text);
    while (ts.check(TokenKind::Comma)) {
      ts.advance();
      sorts.push_back(ts.expectIdent("a sort name").text);
    }
    ts.expect(TokenKind::RParen, "',' or ')'");
    return sorts;
  }

  void predicateDecl(TokenStream &ts) {
    const Token &name = ts.expectIdent("a predicate name");
    PredicateDecl p{name.text, {}, name.pos};
    if (ts.check(TokenKind::LParen))
      p.argSorts = sortList(ts);
    ts.expect(TokenKind::Period, "'.' to end the predicate declaration");
    problem_.vocab.predicates.push_back(std::move(p));
  }

  void functionDecl(TokenStream &ts) {
    const Token &name = ts.expectIdent("a function name");
    FunctionDecl f{name.text, {}, {}, name.pos};
    if (!ts.check(TokenKind::LParen))
      ts.fail("function " + name.text + " needs an argument list",
              {"declare constants with 'name " + name.text + ": <sort>.'"});
    f.argSorts = sortList(ts);
    ts.expect(TokenKind::Colon, "':' and the result sort");
    f.resultSort = ts.expectIdent("a result sort").text;
    ts.expect(TokenKind::Period, "'.' to end the function declaration");
    problem_.vocab.functions.push_back(std::move(f));
  }

  void nameDecl(TokenStream &ts) {
    std::vector<const Token *> names{&ts.expectIdent("a name")};
    while (ts.check(TokenKind::Comma)) {
      ts.advance();
      names.push_back(&ts.expectIdent("a name"));
    }
    ts.expect(TokenKind::Colon, "':' and the sort of the name");
    const std::string sort = ts.expectIdent("a sort name").text;
    ts.expect(TokenKind::Period, "'.' to end the name declaration");
    for (const Token *t : names)
      problem_.vocab.names.push_back(NameDecl{t->text, sort, t->pos});
  }

  void block(TokenStream &ts, void (ProblemParser::*decl)(TokenStream &)) {
    if (!ts.check(TokenKind::LBrace)) {
      (this->*decl)(ts);
      return;
    }
    ts.advance();
    while (!ts.atEnd() && !ts.check(TokenKind::RBrace)) {
      try {
        (this->*decl)(ts);
      } catch (const ParseError &e) {
        record(ts, e);
      }
    }
    ts.expect(TokenKind::RBrace, "'}' to close the block");
  }

  void parseVocabulary(std::size_t begin, std::size_t end) {
    TokenStream ts(text_, toks_, begin, end);
    while (!ts.atEnd()) {
      try {
        if (ts.checkWord("predicate")) {
          ts.advance();
          block(ts, &ProblemParser::predicateDecl);
        } else if (ts.checkWord("function")) {
          ts.advance();
          block(ts, &ProblemParser::functionDecl);
        } else if (ts.checkWord("name")) {
          ts.advance();
          block(ts, &ProblemParser::nameDecl);
        } else {
          ts.fail("expected 'predicate', 'function' or 'name' but found " +
                  ts.describeNext());
        }
      } catch (const ParseError &e) {
        record(ts, e);
      }
    }
  }

  void declError(SourcePos pos, std::string msg) {
    diags_.push_back(makeError(text_, pos, "Declaration error: " + std::move(msg)));
  }

  bool validateDeclarations() {
    const auto before = diags_.size();
    std::map<std::string, std::string> seen; // identifier -> what it is
    auto claim = [&](const std::string &id, const std::string &what, SourcePos pos) {
      auto [it, inserted] = seen.emplace(id, what);
      if (!inserted)
        declError(pos, id + " is declared as " + what + " but is already " + it->second);
    };
    for (const auto &s : problem_.sorts)
      claim(s.name, "a sort", s.pos);
    for (const auto &s : problem_.sorts) {
      if (const auto *en = std::get_if<EnumSort>(&s.kind))
        for (const auto &e : en->elements)
          claim(e, "an element of " + s.name, s.pos);
      if (const auto *ir = std::get_if<IntRangeSort>(&s.kind); ir && ir->lo > ir->hi)
        declError(s.pos, "integer sort " + s.name + " has an empty range");
    }
    auto known = [&](const std::string &sort, SourcePos pos) {
      if (!std::any_of(problem_.sorts.begin(), problem_.sorts.end(),
                       [&](const SortDecl &d) { return d.name == sort; }))
        declError(pos, "undeclared sort " + sort);
    };
    for (const auto &p : problem_.vocab.predicates) {
      claim(p.name, "a predicate", p.pos);
      for (const auto &s : p.argSorts)
        known(s, p.pos);
    }
    for (const auto &f : problem_.vocab.functions) {
      claim(f.name, "a function", f.pos);
      for (const auto &s : f.argSorts)
        known(s, f.pos);
      known(f.resultSort, f.pos);
    }
    for (const auto &n : problem_.vocab.names) {
      claim(n.name, "a name", n.pos);
      known(n.sort, n.pos);
    }
    return diags_.size() == before;
  }

  void parseConstraints(std::size_t begin, std::size_t end) {
    const SymbolContext ctx = SymbolContext::from(problem_);
    TokenStream ts(text_, toks_, begin, end);
    while (!ts.atEnd()) {
      const std::size_t startIdx = ts.index();
      const std::size_t before = diags_.size();
      auto f = parseOneFormula(ts, ctx, diags_, nullptr);
      if (!f) {
        ts.recover();
        continue;
      }
      if (!ts.check(TokenKind::Period)) {
        auto d = makeError(text_, ts.position(),
                           "Syntax error: expected '.' at the end of the constraint "
                           "but found " + ts.describeNext());
        d.hints.push_back("each constraint ends with '.'");
        d.hints.push_back("check for misplaced parentheses");
        diags_.push_back(std::move(d));
        ts.recover();
        continue;
      }
      const Token &last = toks_[ts.index() - 1];
      ts.advance();
      if (diags_.size() != before)
        continue;
      Constraint c;
      c.formula = std::move(f);
      c.span.begin = toks_[startIdx].pos;
      c.span.end = last.pos;
      c.span.end.column += static_cast<int>(last.endOffset - last.pos.offset);
      c.span.end.offset = last.endOffset;
      c.index = static_cast<int>(problem_.constraints.size());
      problem_.constraints.push_back(std::move(c));
    }
  }

  std::string_view text_;
  std::vector<Token> toks_;
  std::vector<Diagnostic> diags_;
  Problem problem_;
};

} // namespace

std::string format_diagnostic(const Diagnostic &d) {
  std::ostringstream os;
  os << (d.isError() ? "Input error" : "Warning") << " on line " << d.line << ":   "
     << trim(d.offendingText) << '\n'
     << d.message << '\n';
  if (!d.detail.empty()) {
    os << '\n';
    for (const auto &l : d.detail)
      os << l << '\n';
  }
  if (!d.hints.empty()) {
    os << "\nPossible causes:\n";
    for (const auto &h : d.hints)
      os << "  - " << h << '\n';
  }
  if (d.partialTree) {
    os << "\nParse tree so far:\n";
    std::istringstream tree(*d.partialTree);
    for (std::string line; std::getline(tree, line);)
      os << "  " << line << '\n';
  }
  return os.str();
}

bool has_errors(const std::vector<Diagnostic> &diags) {
  return std::any_of(diags.begin(), diags.end(),
                     [](const Diagnostic &d) { return d.isError(); });
}

TokenizeResult tokenize(std::string_view text) {
  Lexer lex(text);
  lex.run();
  TokenizeResult r;
  if (!lex.errors.empty())
    r.error = std::move(lex.errors.front());
  else
    r.tokens = std::move(lex.tokens);
  return r;
}

std::string render_parse_tree(const ParseTree &tree) {
  std::string out;
  renderTree(tree, 0, out);
  return out;
}

SymbolContext SymbolContext::from(const Problem &p) {
  SymbolContext ctx;
  for (const auto &n : p.vocab.names)
    ctx.names.insert(n.name);
  for (const auto &s : p.sorts)
    if (const auto *en = std::get_if<EnumSort>(&s.kind))
      ctx.enumElements.insert(en->elements.begin(), en->elements.end());
  for (const auto &pr : p.vocab.predicates)
    if (pr.argSorts.empty())
      ctx.propositions.insert(pr.name);
  return ctx;
}

FormulaParse parse_formula(std::string_view text, const SymbolContext &ctx) {
  FormulaParse out;
  Lexer lex(text);
  lex.run();
  if (!lex.errors.empty()) {
    out.diagnostics = std::move(lex.errors);
    return out;
  }
  TokenStream ts(text, lex.tokens, 0, lex.tokens.size());
  auto f = parseOneFormula(ts, ctx, out.diagnostics, &out.tree);
  if (!f)
    return out;
  if (ts.check(TokenKind::Period))
    ts.advance();
  if (!ts.atEnd()) {
    out.diagnostics.push_back(makeError(
        text, ts.position(), "Syntax error: unexpected " + ts.describeNext() +
                                 " after the end of the formula"));
    return out;
  }
  out.formula = std::move(f);
  return out;
}

ParseResult parse_problem(std::string_view text) { return ProblemParser(text).run(); }

std::string assemble_problem_text(std::string_view sorts, std::string_view vocabulary,
                                  std::string_view constraints) {
  std::string s;
  s.reserve(sorts.size() + vocabulary.size() + constraints.size() + 48);
  s += "Sorts:\n";
  s += sorts;
  s += "\nVocabulary:\n";
  s += vocabulary;
  s += "\nConstraints:\n";
  s += constraints;
  s += '\n';
  return s;
}

std::string render_problem(const Problem &p) {
  std::ostringstream os;
  auto list = [](const std::vector<std::string> &xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i)
      s += (i ? "," : "") + xs[i];
    return s;
  };
  os << "Sorts:\n";
  for (const auto &s : p.sorts) {
    os << "  " << s.name;
    if (const auto *en = std::get_if<EnumSort>(&s.kind)) {
      os << " enum: ";
      for (std::size_t i = 0; i < en->elements.size(); ++i)
        os << (i ? ", " : "") << en->elements[i];
    } else if (const auto *ir = std::get_if<IntRangeSort>(&s.kind)) {
      os << " int: " << ir->lo << " .. " << ir->hi;
    }
    os << ".\n";
  }
  os << "Vocabulary:\n";
  if (!p.vocab.predicates.empty()) {
    os << "  predicate {\n";
    for (const auto &pr : p.vocab.predicates) {
      os << "    " << pr.name;
      if (!pr.argSorts.empty())
        os << '(' << list(pr.argSorts) << ')';
      os << ".\n";
    }
    os << "  }\n";
  }
  if (!p.vocab.functions.empty()) {
    os << "  function {\n";
    for (const auto &f : p.vocab.functions)
      os << "    " << f.name << '(' << list(f.argSorts) << "): " << f.resultSort << ".\n";
    os << "  }\n";
  }
  for (const auto &n : p.vocab.names)
    os << "  name " << n.name << ": " << n.sort << ".\n";
  os << "Constraints:\n";
  for (const auto &c : p.constraints)
    os << "  " << render_formula(*c.formula) << ".\n";
  return os.str();
}

} // namespace lff

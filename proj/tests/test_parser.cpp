#include "lff/corpus.hpp"
#include "lff/engine.hpp"
#include "lff/parser.hpp"
#include "lff/typecheck.hpp"

#include <gtest/gtest.h>

using namespace lff;

namespace {

const std::string kMaryHead = R"(Sorts:
  person.
  animal.
  size enum: little, medium, big.
  colour enum: green, white, purple.
  place.
Vocabulary:
  predicate {
    had(person,animal).
    Went(person,place).
    went(animal,place).   % note: case-sensitive
    lamb(animal).
  }
  function {
    hue(animal): colour.
    stature(animal): size.
  }
  name Mary: person.
  name hue_of_snow: colour.
Constraints:
)";

const std::string kMaryConstraint = R"(  SOME x (had(Mary,x) & stature(x) = little & lamb(x) &
          (hue_of_snow = white -> hue(x) = white) &
          ALL y (Went(Mary,y) -> went(x,y))).
)";

std::vector<TokenKind> kinds(std::string_view text) {
  std::vector<TokenKind> out;
  for (const auto &t : tokenize(text).tokens)
    out.push_back(t.kind);
  return out;
}

std::vector<Diagnostic> errorsOf(const std::vector<Diagnostic> &ds) {
  std::vector<Diagnostic> out;
  for (const auto &d : ds)
    if (d.isError())
      out.push_back(d);
  return out;
}

} // namespace

TEST(Tokenize, CommentRunsToEndOfLine) {
  const auto r = tokenize("lamb(x). % note: case-sensitive");
  ASSERT_FALSE(r.error);
  EXPECT_EQ(kinds("lamb(x). % note: case-sensitive"),
            (std::vector<TokenKind>{TokenKind::Ident, TokenKind::LParen, TokenKind::Ident,
                                    TokenKind::RParen, TokenKind::Period}));
  EXPECT_EQ(r.tokens[0].text, "lamb");
  EXPECT_EQ(r.tokens[2].text, "x");
}

TEST(Tokenize, EmptyInput) {
  const auto r = tokenize("");
  EXPECT_FALSE(r.error);
  EXPECT_TRUE(r.tokens.empty());
}

TEST(Tokenize, UnderscoreIdentifierAndEquals) {
  const auto r = tokenize("hue_of_snow = white");
  ASSERT_EQ(r.tokens.size(), 3u);
  EXPECT_EQ(r.tokens[0].kind, TokenKind::Ident);
  EXPECT_EQ(r.tokens[0].text, "hue_of_snow");
  EXPECT_EQ(r.tokens[1].kind, TokenKind::Eq);
  EXPECT_EQ(r.tokens[2].text, "white");
}

TEST(Tokenize, OperatorsAndPositions) {
  EXPECT_EQ(kinds("~ & | -> <-> /= <= >= < > + - * .. ALL SOME"),
            (std::vector<TokenKind>{TokenKind::Not, TokenKind::And, TokenKind::Or,
                                    TokenKind::Implies, TokenKind::Iff, TokenKind::Neq,
                                    TokenKind::Le, TokenKind::Ge, TokenKind::Lt, TokenKind::Gt,
                                    TokenKind::Plus, TokenKind::Minus, TokenKind::Star,
                                    TokenKind::DotDot, TokenKind::Forall, TokenKind::Exists}));
  const auto r = tokenize("a\n  bc");
  ASSERT_EQ(r.tokens.size(), 2u);
  EXPECT_EQ(r.tokens[1].pos.line, 2);
  EXPECT_EQ(r.tokens[1].pos.column, 3);
}

TEST(Tokenize, CaseSensitive) {
  const auto r = tokenize("Went went");
  ASSERT_EQ(r.tokens.size(), 2u);
  EXPECT_NE(r.tokens[0].text, r.tokens[1].text);
}

TEST(Tokenize, IllegalCharacterIsLocated) {
  const auto r = tokenize("a\nb $ c");
  ASSERT_TRUE(r.error);
  EXPECT_EQ(r.error->line, 2);
  EXPECT_EQ(r.error->column, 3);
  EXPECT_EQ(r.error->offendingText, "b $ c");
}

TEST(ParseProblem, MaryShape) {
  const auto r = parse_problem(kMaryHead + kMaryConstraint);
  ASSERT_TRUE(r.ok());
  const Problem &p = *r.problem;
  EXPECT_EQ(p.sorts.size(), 5u);
  EXPECT_EQ(p.vocab.predicates.size(), 4u);
  EXPECT_EQ(p.vocab.functions.size(), 2u);
  ASSERT_EQ(p.vocab.names.size(), 2u);
  EXPECT_EQ(p.vocab.names[0].name, "Mary");
  EXPECT_EQ(p.vocab.names[1].name, "hue_of_snow");
  EXPECT_EQ(p.constraints.size(), 1u);
  EXPECT_TRUE(p.sorts[0].isOpen());
  EXPECT_FALSE(p.sorts[2].isOpen());
}

TEST(ParseProblem, MinimalProblem) {
  const auto r = parse_problem("Sorts:\n s.\nVocabulary:\nConstraints:\n");
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.problem->sorts.size(), 1u);
  EXPECT_TRUE(r.problem->sorts[0].isOpen());
  EXPECT_TRUE(r.problem->vocab.predicates.empty());
  EXPECT_TRUE(r.problem->constraints.empty());
}

TEST(ParseProblem, MissingSectionHeader) {
  const auto r = parse_problem("Sorts:\n s.\nConstraints:\n");
  EXPECT_FALSE(r.ok());
  EXPECT_TRUE(has_errors(r.diagnostics));
}

TEST(ParseProblem, UnterminatedArgumentListHasPartialTree) {
  const auto r = parse_problem(kMaryHead + "  had(Mary\n");
  ASSERT_FALSE(r.ok());
  ASSERT_EQ(r.diagnostics.size(), 1u);
  const auto &d = r.diagnostics[0];
  EXPECT_EQ(d.line, 21);
  ASSERT_TRUE(d.partialTree);
  EXPECT_EQ(*d.partialTree, "had ...\n  Mary\n");
  EXPECT_EQ(format_diagnostic(d), "Input error on line 21:   had(Mary\n"
                                  "Syntax error: expected ',' or ')' in the argument list of "
                                  "had but found end of section\n"
                                  "\n"
                                  "Possible causes:\n"
                                  "  - check for misplaced parentheses\n"
                                  "\n"
                                  "Parse tree so far:\n"
                                  "  had ...\n"
                                  "    Mary\n");
}

TEST(ParseProblem, RecoveryReportsEveryBrokenConstraint) {
  const auto r = parse_problem(kMaryHead + "  had(Mary,.\n  lamb(x) & .\n  ALL y .\n");
  EXPECT_FALSE(r.ok());
  EXPECT_GE(errorsOf(r.diagnostics).size(), 3u);
  int prev = 0;
  for (const auto &d : r.diagnostics) {
    EXPECT_GE(d.line, prev);
    prev = d.line;
  }
}

TEST(ParseProblem, Deterministic) {
  const std::string bad = kMaryHead + "  had(Mary,.\n  lamb(x) & .\n";
  const auto a = parse_problem(bad), b = parse_problem(bad);
  ASSERT_EQ(a.diagnostics.size(), b.diagnostics.size());
  for (std::size_t i = 0; i < a.diagnostics.size(); ++i)
    EXPECT_EQ(format_diagnostic(a.diagnostics[i]), format_diagnostic(b.diagnostics[i]));
}

TEST(ParseTree, Shapes) {
  EXPECT_EQ(render_parse_tree(parse_formula("lamb(x)").tree), "lamb\n  x\n");
  EXPECT_EQ(render_parse_tree(parse_formula("p & q").tree), "&\n  p\n  q\n");
  EXPECT_EQ(render_parse_tree(parse_formula("had(Mary, SOME x lamb(x))").tree),
            "had\n  Mary\n  SOME x\n    lamb\n      x\n");
}

TEST(Precedence, ConnectivesBindAsDocumented) {
  auto shape = [](const char *f) { return render_parse_tree(parse_formula(f).tree); };
  EXPECT_EQ(shape("p | q & r"), shape("p | (q & r)"));
  EXPECT_EQ(shape("p -> q -> r"), shape("p -> (q -> r)"));
  EXPECT_EQ(shape("p <-> q -> r"), shape("p <-> (q -> r)"));
  EXPECT_EQ(shape("~p & q"), shape("(~p) & q"));
  EXPECT_NE(shape("p -> q -> r"), shape("(p -> q) -> r"));
}

TEST(Spans, ConstraintTextReparsesToSameFormula) {
  for (const auto &puzzle : load_corpus(default_corpus_dir())) {
    const auto r = parse_problem(puzzle.encoding);
    ASSERT_TRUE(r.ok()) << puzzle.id;
    const auto ctx = SymbolContext::from(*r.problem);
    for (const auto &c : r.problem->constraints) {
      const auto slice = r.problem->constraintText(c.index);
      const auto again = parse_formula(slice, ctx);
      ASSERT_TRUE(again.formula) << puzzle.id << ": " << slice;
      EXPECT_TRUE(structurallyEqual(*again.formula, *c.formula)) << puzzle.id << ": " << slice;
    }
  }
}

TEST(RoundTrip, PrintParseIsAFixedPoint) {
  std::vector<std::string> texts{kMaryHead + kMaryConstraint};
  for (const auto &puzzle : load_corpus(default_corpus_dir()))
    texts.push_back(puzzle.encoding);
  for (const auto &text : texts) {
    const auto first = parse_problem(text);
    ASSERT_TRUE(first.ok());
    const std::string printed = render_problem(*first.problem);
    const auto second = parse_problem(printed);
    ASSERT_TRUE(second.ok()) << printed;
    EXPECT_EQ(render_problem(*second.problem), printed);
    ASSERT_EQ(second.problem->constraints.size(), first.problem->constraints.size());
    for (std::size_t i = 0; i < first.problem->constraints.size(); ++i)
      EXPECT_TRUE(structurallyEqual(*first.problem->constraints[i].formula,
                                    *second.problem->constraints[i].formula));
  }
}

TEST(AssembleText, BoxesShareTheFileGrammar) {
  const auto text = assemble_problem_text(" s.", " predicate p(s).", " ALL x p(x).");
  const auto r = parse_problem(text);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.problem->constraints.size(), 1u);
}

// ---------------------------------------------------------------------------

TEST(TypeCheck, GoldenTypeMismatch) {
  const auto out = prepare(kMaryHead + "  had(Mary, SOME x lamb(x)).\n");
  ASSERT_FALSE(out.typed);
  const auto errs = errorsOf(out.diagnostics);
  ASSERT_EQ(errs.size(), 1u);
  const std::string text = format_diagnostic(errs[0]);
  EXPECT_EQ(text, "Input error on line 21:   had(Mary, SOME x lamb(x)).\n"
                  "Type mismatch with argument of had\n"
                  "\n"
                  "Detailed diagnostics: in the formula\n"
                  "    had(Mary,SOME x lamb(x))\n"
                  "the main operator \"had\" expects argument 2 to be of type animal\n"
                  "but argument 2 is\n"
                  "    SOME x lamb(x)\n"
                  "which is of type bool.\n"
                  "\n"
                  "Possible causes:\n"
                  "  - check for misplaced parentheses\n"
                  "  - check for wrong names (symbols are case-sensitive)\n");
}

TEST(TypeCheck, MaryInfersVariableSorts) {
  const auto r = check(*parse_problem(kMaryHead + kMaryConstraint).problem);
  ASSERT_TRUE(r.ok());
  const auto &binders = r.typed->constraints[0].binders;
  ASSERT_EQ(binders.size(), 2u);
  EXPECT_EQ(binders[0].name, "x");
  EXPECT_EQ(r.typed->problem.sorts[static_cast<std::size_t>(binders[0].sort)].name, "animal");
  EXPECT_EQ(binders[1].name, "y");
  EXPECT_EQ(r.typed->problem.sorts[static_cast<std::size_t>(binders[1].sort)].name, "place");
  EXPECT_TRUE(audit(*r.typed).empty());
}

TEST(TypeCheck, ArgumentSortMismatch) {
  const auto out = prepare(kMaryHead + "  stature(Mary) = little.\n");
  const auto errs = errorsOf(out.diagnostics);
  ASSERT_EQ(errs.size(), 1u);
  EXPECT_EQ(errs[0].message, "Type mismatch with argument of stature");
  const std::string text = format_diagnostic(errs[0]);
  EXPECT_NE(text.find("expects argument 1 to be of type animal"), std::string::npos);
  EXPECT_NE(text.find("which is of type person."), std::string::npos);
}

TEST(TypeCheck, InferenceFromOccurrence) {
  const auto r = parse_problem(kMaryHead + "  SOME x had(Mary,x).\n");
  ASSERT_TRUE(r.ok());
  const auto inf = infer_variable_sorts(*r.problem, *r.problem->constraints[0].formula);
  ASSERT_TRUE(inf.sort);
  EXPECT_EQ(r.problem->sorts[static_cast<std::size_t>(*inf.sort)].name, "animal");
}

TEST(TypeCheck, UnconstrainedVariable) {
  const auto out = prepare(kMaryHead + "  SOME x (x = x).\n");
  const auto errs = errorsOf(out.diagnostics);
  ASSERT_EQ(errs.size(), 1u);
  EXPECT_EQ(errs[0].message, "Cannot infer the sort of variable x");
}

TEST(TypeCheck, ConflictingVariableSorts) {
  const auto out = prepare(kMaryHead + "  SOME x (lamb(x) & Went(x, Mary)).\n");
  const auto errs = errorsOf(out.diagnostics);
  ASSERT_GE(errs.size(), 1u);
  EXPECT_EQ(errs[0].message, "Cannot infer the sort of variable x");
  const std::string text = format_diagnostic(errs[0]);
  EXPECT_NE(text.find("used as animal"), std::string::npos);
  EXPECT_NE(text.find("as person"), std::string::npos);
}

TEST(TypeCheck, ExplicitAnnotationIsVerified) {
  auto ok = prepare(kMaryHead + "  SOME x: animal lamb(x).\n");
  EXPECT_TRUE(ok.typed);
  auto bad = prepare(kMaryHead + "  SOME x: person lamb(x).\n");
  EXPECT_FALSE(bad.typed);
}

TEST(TypeCheck, OneDiagnosticPerIndependentError) {
  const auto out = prepare(kMaryHead + "  lamb(Mary).\n  had(Mary, Mary).\n  hue(Mary) = green.\n"
                                       "  nosuch(Mary).\n  Went(Mary).\n");
  EXPECT_GE(errorsOf(out.diagnostics).size(), 5u);
}

TEST(TypeCheck, UndeclaredAndArity) {
  auto a = prepare(kMaryHead + "  lambs(Mary).\n");
  ASSERT_FALSE(a.typed);
  auto b = prepare(kMaryHead + "  had(Mary).\n");
  ASSERT_FALSE(b.typed);
  auto c = prepare(kMaryHead + "  hue(Mary, Mary) = green.\n");
  ASSERT_FALSE(c.typed);
}

TEST(TypeCheck, EqualityAcrossSorts) {
  const auto out = prepare(kMaryHead + "  hue_of_snow = little.\n");
  EXPECT_FALSE(out.typed);
}

TEST(TypeCheck, FormulaAsTermAndTermAsFormula) {
  EXPECT_FALSE(prepare(kMaryHead + "  hue(lamb(Mary)) = green.\n").typed);
  EXPECT_FALSE(prepare(kMaryHead + "  hue_of_snow & lamb(Mary).\n").typed);
}

TEST(TypeCheck, UnusedSymbolsWarn) {
  const auto out = prepare(kMaryHead + "  lamb(hue_of_snow) | ~lamb(hue_of_snow).\n");
  EXPECT_FALSE(out.typed);
  const auto ok = prepare(kMaryHead + "  ALL x (lamb(x) -> hue(x) = white).\n");
  ASSERT_TRUE(ok.typed);
  bool warnedHad = false;
  for (const auto &d : ok.diagnostics)
    if (!d.isError() && d.message.find("had") != std::string::npos)
      warnedHad = true;
  EXPECT_TRUE(warnedHad);
}

TEST(TypeCheck, EmptyConstraintsWarn) {
  const auto out = prepare(assemble_problem_text("", "predicate p.", ""));
  ASSERT_TRUE(out.typed);
  bool found = false;
  for (const auto &d : out.diagnostics)
    found |= !d.isError() && d.message == "no constraints";
  EXPECT_TRUE(found);
}

TEST(TypeCheck, IndependentOfDeclarationOrder) {
  const std::string a = "Sorts:\n s.\n t enum: u, v.\nVocabulary:\n predicate p(s).\n"
                        " function f(s): t.\n name c: s.\nConstraints:\n ALL x (p(x) -> f(x) = u).\n"
                        " p(c).\n";
  const std::string b = "Sorts:\n t enum: u, v.\n s.\nVocabulary:\n name c: s.\n"
                        " function f(s): t.\n predicate p(s).\nConstraints:\n ALL x (p(x) -> f(x) = u).\n"
                        " p(c).\n";
  const auto ra = prepare(a), rb = prepare(b);
  ASSERT_TRUE(ra.typed);
  ASSERT_TRUE(rb.typed);
  EXPECT_TRUE(audit(*ra.typed).empty());
  EXPECT_TRUE(audit(*rb.typed).empty());
  SolveOptions o;
  o.maxModels = 100;
  o.bounds.hi = 2;
  EXPECT_EQ(run(a, o).models.size(), run(b, o).models.size());
}

TEST(TypeCheck, CorpusAuditsClean) {
  for (const auto &puzzle : load_corpus(default_corpus_dir())) {
    const auto out = prepare(puzzle.encoding);
    ASSERT_TRUE(out.typed) << puzzle.id;
    EXPECT_TRUE(audit(*out.typed).empty()) << puzzle.id;
  }
}

#include <gtest/gtest.h>

#include <random>

#include "fieldcalc/parser.hpp"
#include "fieldcalc/stdlib.hpp"
#include "gen.hpp"

namespace fc = fieldcalc;

namespace {

bool same(const fc::ExprPtr& a, const fc::ExprPtr& b) { return fc::syntactic_equal(a, b); }

fc::ExprPtr app(const std::string& b, std::vector<fc::ExprPtr> args) {
  return fc::make_apply(fc::make_builtin(b), std::move(args));
}

}  // namespace

TEST(Parser, DistanceToBuildsExpectedTree) {
  auto p = fc::parse_unit({"d.hfc",
                           "def distance-to(source){rep(infinity){(d)=>mux(source,0,"
                           "min-hood+(+[f,f](nbr{d},nbr-range())))}}"});
  ASSERT_EQ(p.decls.size(), 1u);
  EXPECT_EQ(p.decls[0].name, "distance-to");
  EXPECT_EQ(p.decls[0].params, std::vector<fc::Name>{"source"});
  auto d = fc::make_var("d");
  auto body = app("mux", {fc::make_var("source"), fc::make_num(0),
                          app("min-hood+", {app("+[f,f]", {fc::make_nbr(d), app("nbr-range", {})})})});
  auto want = fc::make_rep(fc::make_num(std::numeric_limits<double>::infinity()), "d", body);
  EXPECT_TRUE(same(p.decls[0].body, want)) << fc::to_string(p.decls[0].body);
  EXPECT_EQ(p.main, nullptr);
}

TEST(Parser, NumeralProgram) {
  auto p = fc::parse_program({"n.hfc", "42"});
  EXPECT_TRUE(p.decls.empty());
  EXPECT_TRUE(same(p.main, fc::make_num(42)));
}

TEST(Parser, UnclosedBraceIsOneDiagnostic) {
  try {
    fc::parse_program({"bad.hfc", "nbr{"});
    FAIL() << "expected a parse error";
  } catch (const fc::ParseError& e) {
    ASSERT_EQ(e.diagnostics().size(), 1u);
    EXPECT_EQ(e.diagnostics()[0].path, "bad.hfc");
    EXPECT_EQ(e.diagnostics()[0].span.line, 1);
  }
}

TEST(Parser, DiagnosticFormat) {
  fc::Diagnostic d{"a.hfc", {3, 7, 1}, "error", "unexpected ')'", ""};
  EXPECT_EQ(d.format(), "a.hfc:3:7: error: unexpected ')'");
}

TEST(Parser, MissingMainIsReported) {
  EXPECT_THROW(fc::parse_program({"a.hfc", "def f(x) { x }"}), fc::ParseError);
}

TEST(Parser, RecoversAtNextDefinition) {
  try {
    fc::parse_unit({"a.hfc", "def f(x) { x + } def g(y) { y * } 1"});
    FAIL();
  } catch (const fc::ParseError& e) {
    EXPECT_EQ(e.diagnostics().size(), 2u);
  }
}

TEST(Parser, InfixPrecedenceAndAssociativity) {
  EXPECT_TRUE(same(fc::parse_expr("1 + 2 * 3"), fc::parse_expr("+(1, *(2, 3))")));
  EXPECT_TRUE(same(fc::parse_expr("1 - 2 - 3"), fc::parse_expr("-(-(1, 2), 3)")));
  EXPECT_TRUE(same(fc::parse_expr("1 + 2 < 4 and True"),
                   fc::parse_expr("and(<(+(1, 2), 4), True)")));
  EXPECT_TRUE(same(fc::parse_expr("1 = 1 = True"), fc::parse_expr("=(=(1, 1), True)")));
}

TEST(Parser, DecoratedOperators) {
  EXPECT_TRUE(same(fc::parse_expr("nbr{1} +[f,f] nbr{2}"),
                   fc::parse_expr("+[f,f](nbr{1}, nbr{2})")));
  auto e = fc::parse_expr("mux[f,f,l](nbr{True}, nbr{1}, 0)");
  const auto* a = e->as<fc::expr::Apply>();
  ASSERT_NE(a, nullptr);
  EXPECT_EQ(a->fn->as<fc::expr::Builtin>()->name, "mux[f,f,l]");
}

TEST(Parser, HyphenatedAndPlusNames) {
  auto e = fc::parse_expr("min-hood+(nbr-range())");
  EXPECT_EQ(e->as<fc::expr::Apply>()->fn->as<fc::expr::Builtin>()->name, "min-hood+");
  EXPECT_TRUE(same(fc::parse_expr("min-hood(nbr{1})+2"),
                   fc::parse_expr("+(min-hood(nbr{1}), 2)")));
}

TEST(Parser, NegativeNumeralsAndSpecials) {
  EXPECT_TRUE(same(fc::parse_expr("-1"), fc::make_num(-1)));
  EXPECT_TRUE(same(fc::parse_expr("-infinity"),
                   fc::make_num(-std::numeric_limits<double>::infinity())));
  EXPECT_TRUE(same(fc::parse_expr("2 - 1"), fc::parse_expr("-(2, 1)")));
  EXPECT_EQ(fc::parse_expr("NaN")->as<fc::expr::Data>()->ctor, "NaN");
}

TEST(Parser, CommentsAreIgnored) {
  auto p = fc::parse_program({"c.hfc", "// a comment\n1 // trailing\n"});
  EXPECT_TRUE(same(p.main, fc::make_num(1)));
}

TEST(Parser, UnknownNameIsError) {
  EXPECT_THROW(fc::parse_expr("frobnicate(1)"), fc::ParseError);
}

TEST(Parser, DefNamesResolve) {
  auto p = fc::parse_program({"f.hfc", "def f(x) { x } f(1)"});
  EXPECT_TRUE(p.main->as<fc::expr::Apply>()->fn->is<fc::expr::DefName>());
}

TEST(Parser, ApplicationOfIfExpression) {
  auto p = fc::parse_unit(
      {"d.hfc", "def h(g, n) { if (True) { g } else { n } () }"});
  const auto* a = p.decls[0].body->as<fc::expr::Apply>();
  ASSERT_NE(a, nullptr);
  EXPECT_TRUE(a->args.empty());
  EXPECT_TRUE(a->fn->is<fc::expr::Apply>());
}

TEST(PrettyPrint, CounterRoundTrips) {
  auto p = fc::parse_program({"c.hfc", "rep(0) { (x) => +(x, 1) }"});
  auto q = fc::parse_program({"c2.hfc", fc::pretty_print(p)});
  EXPECT_TRUE(same(p.main, q.main));
}

TEST(PrettyPrint, CorpusRoundTrips) {
  auto corpus = fc::load_corpus();
  for (const auto& e : corpus) {
    auto u = fc::parse_units(fc::corpus_sources(corpus, e.name));
    fc::Program p{u.decls, u.main};
    std::string text = fc::pretty_print(p);
    auto v = fc::parse_unit({"rt.hfc", text});
    ASSERT_EQ(v.decls.size(), u.decls.size()) << e.name;
    for (std::size_t i = 0; i < u.decls.size(); ++i) {
      EXPECT_EQ(v.decls[i].name, u.decls[i].name);
      EXPECT_EQ(v.decls[i].params, u.decls[i].params);
      EXPECT_TRUE(same(v.decls[i].body, u.decls[i].body)) << e.name << "\n" << text;
    }
    EXPECT_EQ(static_cast<bool>(v.main), static_cast<bool>(u.main));
    if (u.main) EXPECT_TRUE(same(v.main, u.main)) << text;
  }
}

TEST(PrettyPrint, GeneratedExpressionsRoundTrip) {
  std::mt19937_64 rng(7);
  const fc::testing::GenType targets[] = {fc::testing::GenType::Num, fc::testing::GenType::Bool,
                                          fc::testing::GenType::FieldNum,
                                          fc::testing::GenType::Thunk};
  for (int i = 0; i < 300; ++i) {
    auto src = fc::testing::gen_source(rng, targets[i % 4]);
    fc::ExprPtr e;
    try {
      e = fc::parse_expr(src);
    } catch (const fc::ParseError& err) {
      FAIL() << "generator produced unparsable text: " << src << "\n" << err.what();
    }
    auto back = fc::parse_expr(fc::pretty_print(e));
    EXPECT_TRUE(same(e, back)) << src << "\n" << fc::pretty_print(e);
  }
}

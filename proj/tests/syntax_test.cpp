#include <gtest/gtest.h>

#include "support.hpp"

using namespace soften;
using testing_support::load;
using testing_support::parse;

namespace {

void expect_same_items(const Diagram& a, const Diagram& b) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(canonical_item_string(a.items()[i]), canonical_item_string(b.items()[i]));
  }
}

TEST(Parse, Proofs) {
  Diagram d = parse_diagram("theory Proofs = prop : type. ded : prop -> type.");
  const Theory& t = d.theory("Proofs");
  ASSERT_NE(t.find_local("ded"), nullptr);
  EXPECT_TRUE(alpha_equal(t.find_local("ded")->type, pi("p", constant("prop"), type_sort())));
}

TEST(Parse, PreludeItems) {
  Diagram d = testing_support::prelude();
  for (const char* name : {"Proofs", "HTyped", "STyped", "TE", "TP"}) EXPECT_NE(d.find(name), nullptr) << name;
  const Morphism& te = d.morphism("TE");
  EXPECT_TRUE(te.partial);
  EXPECT_EQ(te.domain, "HTyped");
  EXPECT_EQ(te.codomain, "STyped");
}

TEST(Parse, EmptyInput) {
  EXPECT_TRUE(parse_diagram("").empty());
  EXPECT_TRUE(parse_diagram("  // nothing here\n").empty());
}

TEST(Parse, BinderGroups) {
  EXPECT_TRUE(alpha_equal(parse("{a, b: tp} term"), parse("{a: tp} {b: tp} term")));
  EXPECT_TRUE(alpha_equal(parse("[x, y: term] x"), parse("[x: term] [y: term] x")));
}

TEST(Parse, ArrowIsRightAssociative) {
  EXPECT_TRUE(alpha_equal(parse("tp -> tp -> tp"), parse("tp -> (tp -> tp)")));
  EXPECT_FALSE(alpha_equal(parse("tp -> tp -> tp"), parse("(tp -> tp) -> tp")));
}

TEST(Parse, ApplicationIsLeftAssociative) {
  EXPECT_TRUE(identical(parse("f a b", {"f", "a", "b"}), parse("(f a) b", {"f", "a", "b"})));
}

TEST(Parse, BoundNamesBecomeIndices) {
  Expr e = parse("[x: tp] [y: tp] x");
  ASSERT_EQ(e->second->second->tag, Tag::variable);
  EXPECT_EQ(e->second->second->index, 1u);
}

TEST(Parse, KeepAnnotation) {
  Diagram d = testing_support::with_prelude("theory T = include HTyped.\n  #keep 1\n  f : {a: tp} tp.");
  const Declaration* f = d.theory("T").find_local("f");
  ASSERT_EQ(f->annotations.size(), 1u);
  EXPECT_EQ(std::get<KeepParam>(f->annotations[0]).index, 1u);
}

TEST(Parse, PartialRelation) {
  Diagram d = load("core.lf");
  parse_into(d, "partial logrel R on TE = ded := [p: prop] ded p.", "<test>");
  EXPECT_TRUE(d.relation("R").partial);
  EXPECT_EQ(d.relation("R").over, "TE");
}

TEST(SyntaxErrors, LineAndColumn) {
  try {
    parse_diagram("theory T =\n  c : tp\n  d : tp.", "bad.lf");
    FAIL() << "expected a syntax error";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.location().file, "bad.lf");
    EXPECT_EQ(e.location().line, 3);
    EXPECT_EQ(e.location().column, 5);
    EXPECT_EQ(std::string(e.what()).rfind("bad.lf:3:5:", 0), 0u) << e.what();
  }
}

TEST(Parse, UnboundNamesAreConstants) {
  Expr e = parse("x y");
  EXPECT_EQ(e->first->tag, Tag::constant);
  EXPECT_EQ(e->second->name, "y");
}

TEST(SyntaxErrors, UnterminatedBinder) { EXPECT_THROW(parse("[x: tp x"), SyntaxError); }

TEST(SyntaxErrors, KeepWithoutDeclaration) {
  EXPECT_THROW(parse_diagram("theory T =\n  #keep 1\n"), SyntaxError);
}

TEST(SyntaxErrors, BadKeyword) { EXPECT_THROW(parse_diagram("thoery T = ."), SyntaxError); }

TEST(Print, ArrowSugar) {
  EXPECT_EQ(print_expr(parse("{a: tp} term -> term")), "{a: tp} term -> term");
  EXPECT_EQ(print_expr(parse("(tp -> tp) -> tp")), "(tp -> tp) -> tp");
}

TEST(Print, NamedUnusedBinderStaysNamed) { EXPECT_EQ(print_expr(parse("{a: tp} term")), "{a: tp} term"); }

TEST(Print, ApplicationsAndLambdas) {
  EXPECT_EQ(print_expr(parse("[x: term] f (g x) x", {"f", "g"}), {"f", "g"}), "[x: term] f (g x) x");
}

TEST(Print, ShadowedNamesAreFreshened) {
  std::string out = print_expr(lambda("x", constant("tp"), lambda("x", constant("tp"), var(1))));
  Expr back = parse(out);
  EXPECT_TRUE(alpha_equal(back, lambda("x", constant("tp"), lambda("x", constant("tp"), var(1))))) << out;
}

TEST(Print, KeepIsPrintedBeforeItsDeclaration) {
  Diagram d = load("core.lf");
  std::string out = print_item(*d.find("HEqual"));
  auto keep = out.find("#keep 1");
  auto eq = out.find("eq :");
  ASSERT_NE(keep, std::string::npos) << out;
  ASSERT_NE(eq, std::string::npos) << out;
  EXPECT_LT(keep, eq);
  EXPECT_EQ(out.find('\n', keep) + 1, out.rfind("\n", eq) + 1);
}

TEST(RoundTrip, Corpora) {
  for (const char* file : {"core.lf", "graph.lf"}) {
    Diagram d = load(file);
    Diagram back = parse_diagram(print_diagram(d), "printed");
    expect_same_items(d, back);
  }
}

TEST(RoundTrip, SoftenedOutput) {
  Diagram d = load("graph.lf");
  SoftenResult r = soften_diagram(d);
  Diagram all = d;
  all.append(r.output);
  all.append(r.witnesses);
  expect_same_items(all, parse_diagram(print_diagram(all), "printed"));
}

TEST(RoundTrip, PrintingIsStable) {
  Diagram d = load("core.lf");
  std::string once = print_diagram(d);
  EXPECT_EQ(print_diagram(parse_diagram(once)), once);
}

TEST(Canonical, AlphaEquivalentExpressionsPrintTheSame) {
  EXPECT_EQ(canonical_string(parse("[x: tp] x")), canonical_string(parse("[y: tp] y")));
  EXPECT_EQ(canonical_string(parse("{a: tp} term")), canonical_string(parse("tp -> term")));
  EXPECT_NE(canonical_string(parse("[x: tp] x")), canonical_string(parse("[x: term] x")));
}

TEST(Diff, Reflexive) {
  Diagram d = load("core.lf");
  EXPECT_TRUE(diff_diagrams(d, d, Modulo::alpha).equal());
}

TEST(Diff, RenamedBindersAreEqual) {
  Diagram a = testing_support::with_prelude("theory T = include HTyped. f : {a: tp} tm a -> tm a.");
  Diagram b = testing_support::with_prelude("theory T = include HTyped. f : {b: tp} tm b -> tm b.");
  EXPECT_TRUE(diff_diagrams(a, b, Modulo::alpha).equal());
}

TEST(Diff, BetaOnlyModuloBeta) {
  Diagram a = testing_support::with_prelude("theory T = include HTyped. t0 : tp. c : tm t0.");
  Diagram b = testing_support::with_prelude("theory T = include HTyped. t0 : tp. c : tm (([x: tp] x) t0).");
  EXPECT_FALSE(diff_diagrams(a, b, Modulo::alpha).equal());
  DiffReport beta = diff_diagrams(a, b, Modulo::alpha_beta);
  EXPECT_TRUE(beta.equal());
  bool modulo = std::any_of(beta.entries.begin(), beta.entries.end(),
                            [](const DiffEntry& e) { return e.verdict == Verdict::equal_modulo; });
  EXPECT_TRUE(modulo);
}

TEST(Diff, Symmetric) {
  Diagram a = testing_support::with_prelude("theory T = include HTyped. t0 : tp. c : tm t0.");
  Diagram b = testing_support::with_prelude("theory T = include HTyped. t0 : tp. c : tp.");
  DiffReport ab = diff_diagrams(a, b, Modulo::alpha_beta);
  DiffReport ba = diff_diagrams(b, a, Modulo::alpha_beta);
  EXPECT_EQ(ab.equal(), ba.equal());
  ASSERT_EQ(ab.mismatches().size(), ba.mismatches().size());
  ASSERT_EQ(ab.mismatches().size(), 1u);
  EXPECT_EQ(ab.mismatches()[0].part, "c");
  EXPECT_EQ(ab.mismatches()[0].left, ba.mismatches()[0].right);
}

TEST(Diff, MissingItemIsAMismatch) {
  Diagram a = testing_support::with_prelude("theory T = include HTyped.");
  Diagram b = testing_support::prelude();
  EXPECT_FALSE(diff_diagrams(a, b, Modulo::alpha).equal());
  EXPECT_FALSE(diff_diagrams(b, a, Modulo::alpha).equal());
}

TEST(Diff, OrderOfDeclarationsMatters) {
  Diagram a = testing_support::with_prelude("theory T = include HTyped. t0 : tp. t1 : tp.");
  Diagram b = testing_support::with_prelude("theory T = include HTyped. t1 : tp. t0 : tp.");
  EXPECT_FALSE(diff_diagrams(a, b, Modulo::alpha).equal());
}

}  // namespace

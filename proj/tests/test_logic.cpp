// Terms, unification, canonical clauses, substitutions, formulas.

#include <gtest/gtest.h>

#include "support.hpp"

using namespace scanw;
using namespace scanw::testing;

namespace {
Term v(const char* n) { return Term::var(n); }
Term c(const char* n) { return Term::app(n); }
Term f(const Term& t) { return Term::app("f", {t}); }
}  // namespace

TEST(Mgu, BindsVariableToConstant) {
  auto s = mgu({v("u")}, {c("a")});
  ASSERT_TRUE(s);
  EXPECT_EQ(s->size(), 1u);
  EXPECT_EQ(s->at("u"), c("a"));
}

TEST(Mgu, ClashAfterBinding) { EXPECT_FALSE(mgu({f(v("u")), v("u")}, {f(c("a")), c("b")})); }

TEST(Mgu, OccursCheck) { EXPECT_FALSE(mgu({v("u")}, {f(v("u"))})); }

TEST(Mgu, DropsIdentityBindings) {
  auto s = mgu({v("u")}, {v("u")});
  ASSERT_TRUE(s);
  EXPECT_TRUE(s->empty());
}

TEST(Mgu, IsIdempotentOnChains) {
  auto s = mgu({v("x"), v("y")}, {v("y"), f(c("a"))});
  ASSERT_TRUE(s);
  for (const auto& [var, t] : *s) EXPECT_EQ(apply_subst(t, *s), t);
  EXPECT_EQ(apply_subst(v("x"), *s), f(c("a")));
}

TEST(MguProperty, SoundAndMostGeneral) {
  Gen g(7);
  int unified = 0;
  for (int iter = 0; iter < 3000; ++iter) {
    std::vector<Term> a{g.term(2)}, b{g.term(2)};
    auto s = mgu(a, b);
    // Brute-force unifiers: map variables of both sides to small ground terms.
    std::vector<std::string> vars{"x", "y", "z"};
    std::vector<Term> ground{c("a"), c("b"), f(c("a")), f(c("b")), f(f(c("a")))};
    bool any = false;
    for (size_t i = 0; i < ground.size(); ++i)
      for (size_t j = 0; j < ground.size(); ++j)
        for (size_t k = 0; k < ground.size(); ++k) {
          Subst tau{{"x", ground[i]}, {"y", ground[j]}, {"z", ground[k]}};
          if (apply_subst(a[0], tau) != apply_subst(b[0], tau)) continue;
          any = true;
          ASSERT_TRUE(s) << to_string(a[0]) << " vs " << to_string(b[0]);
          // tau must factor through s: tau = s·rho with rho found by matching.
          Subst rho;
          for (const auto& var : vars) {
            Term img = apply_subst(v(var.c_str()), *s);
            ASSERT_TRUE(match_term(img, apply_subst(v(var.c_str()), tau), rho));
          }
        }
    if (s) {
      ++unified;
      EXPECT_EQ(apply_subst(a[0], *s), apply_subst(b[0], *s));
      for (const auto& [var, t] : *s) EXPECT_FALSE(t.is_var && t.name == var);
    }
    (void)any;
  }
  EXPECT_GT(unified, 100);
}

TEST(ApplySubst, Examples) {
  EXPECT_EQ(C("X(a)"), apply_subst(C("X(?u)"), Subst{{"u0", c("a")}}));
  EXPECT_EQ(C("a != a | B(a,?v)"), apply_subst(C("?u != a | B(?u,?v)"), Subst{{"u0", c("a")}}));
  EXPECT_EQ(C("B(?u,?v)"), apply_subst(C("B(?u,?v)"), Subst{}));
}

TEST(RenameApart, Examples) {
  Lits r = rename_apart(raw("B(?u,?v)"), {"u"});
  std::set<std::string> vs;
  collect_vars(r, vs);
  EXPECT_FALSE(vs.count("u"));
  EXPECT_EQ(Clause(r), C("B(?u,?v)"));
  EXPECT_EQ(rename_apart(raw("B(a,b)"), {"u"}), raw("B(a,b)"));
  Lits r2 = rename_apart(raw("X(?u) | X(?v)"), {"u", "v"});
  ASSERT_EQ(r2.size(), 2u);
  EXPECT_NE(r2[0].args[0], r2[1].args[0]);
  std::set<std::string> vs2;
  collect_vars(r2, vs2);
  EXPECT_FALSE(vs2.count("u") || vs2.count("v"));
}

TEST(Canonical, VariantsCoincide) {
  EXPECT_EQ(C("B(?u,?v) | ~X(?u) | X(?v)"), C("X(?y) | B(?x,?y) | ~X(?x)"));
  EXPECT_EQ(C("?u = a | B(?u)"), C("B(?w) | a = ?w"));
  EXPECT_NE(C("B(?u,?v)"), C("B(?u,?u)"));
  EXPECT_EQ(C("A(a) | A(a)").size(), 1u);
  EXPECT_EQ(Clause().key(), "[]");
}

TEST(CanonicalProperty, IdempotentAndRenamingInvariant) {
  Gen g(11);
  for (int iter = 0; iter < 2000; ++iter) {
    Lits ls = g.lits(4, 2);
    Clause c1(ls);
    EXPECT_EQ(Clause(c1.lits()).key(), c1.key());
    // Random injective renaming and literal shuffle.
    Subst ren{{"x", v("p")}, {"y", v("q")}, {"z", v("r")}};
    if (g.coin()) ren = Subst{{"x", v("q")}, {"y", v("r")}, {"z", v("p")}};
    Lits shuffled = apply_subst(ls, ren);
    std::shuffle(shuffled.begin(), shuffled.end(), g.rng);
    EXPECT_EQ(Clause(shuffled).key(), c1.key()) << to_string(c1);
  }
}

TEST(Canonical, PointedDesignationSurvives) {
  PointedClause p = P("B(?u,?v) | _~X(?u) | X(?v)");
  EXPECT_FALSE(p.lit().pos);
  EXPECT_EQ(p.lit().head, "X");
  PointedClause q = P("_X(?v) | B(?u,?v) | ~X(?u)");
  EXPECT_TRUE(q.lit().pos);
}

TEST(Sizes, LiteralSizeCountsNonLogicalSymbols) {
  EXPECT_EQ(literal_size(raw("B(a,?v)")[0]), 3);
  EXPECT_EQ(literal_size(raw("?u != a")[0]), 2);
  EXPECT_EQ(clause_size(C("B(?u,?v) | ~X(?u) | X(?v)")), 7);
}

// ------------------------------------------------------------------ formulas

namespace {
Signature sig_main() {
  Signature s;
  s.declare("X", SymKind::PredVar, 1);
  s.declare("B", SymKind::Predicate, 2);
  s.declare("a", SymKind::Function, 0);
  s.declare("c", SymKind::Function, 0);
  return s;
}
F fm(const std::string& text) {
  Signature s = sig_main();
  return parse_formula(text, s, true);
}
}  // namespace

TEST(PredSubst, BetaReducesAndSimplifies) {
  NameGen ng;
  PredSubst pi{{"X", PredExpr{{"u"}, fm("forall u. ~(u != a)")->kids[0]}}};
  F r = apply_pred_subst(fm("~X(c)"), pi, ng);
  EXPECT_EQ(to_string(r), "~~c != a");
  EXPECT_EQ(to_string(simplify(r)), "c != a");
  PredSubst pi2{{"X", PredExpr{{"u"}, f_eq(v("u"), c("a"))}}};
  EXPECT_EQ(to_string(apply_pred_subst(fm("X(a)"), pi2, ng)), "a = a");
  EXPECT_TRUE(alpha_equal(apply_pred_subst(fm("X(a) /\\ B(a,c)"), PredSubst{}, ng), fm("X(a) /\\ B(a,c)")));
}

TEST(PredSubst, AvoidsCapture) {
  NameGen ng;
  // X := λu. B(u,w) with w free; substituting under ∀w must rename the binder.
  PredSubst pi{{"X", PredExpr{{"u"}, f_atom(Head::Pred, "B", {v("u"), v("w")})}}};
  F phi = f_forall("w", f_atom(Head::PredVar, "X", {v("w")}));
  F r = apply_pred_subst(phi, pi, ng);
  ASSERT_EQ(r->kind, Formula::Kind::Forall);
  EXPECT_NE(r->name, "w");
  EXPECT_TRUE(free_vars(r).count("w"));
}

TEST(PredSubst, ArityMismatchThrows) {
  NameGen ng;
  PredSubst pi{{"X", PredExpr{{"u", "w"}, f_true()}}};
  EXPECT_THROW(apply_pred_subst(fm("X(a)"), pi, ng), Error);
}

TEST(PredSubst, ClauseIsPromotedToClosedFormula) {
  NameGen ng;
  PredSubst pi{{"X", PredExpr{{"u"}, f_eq(v("u"), c("a"))}}};
  F r = simplify(apply_pred_subst(C("B(?u,?v) | ~X(?u) | X(?v)"), pi, ng));
  EXPECT_TRUE(free_vars(r).empty());
  EXPECT_EQ(to_string(r), "forall u1. B(a,u1) \\/ u1 = a");
}

TEST(Polarity, Examples) {
  EXPECT_EQ(polarity_of("X", C("~X(?u)")), (std::set<int>{-1}));
  EXPECT_EQ(polarity_of("X", C("B(?u,?v) | ~X(?u) | X(?v)")), (std::set<int>{-1, 1}));
  EXPECT_TRUE(polarity_of("X", C("B(a,?v)")).empty());
  EXPECT_EQ(polarity_of("X", fm("X(a) -> B(a,a)")), (std::set<int>{-1}));
  EXPECT_EQ(polarity_of("X", fm("X(a) <-> B(a,a)")), (std::set<int>{-1, 1}));
}

TEST(Simplify, Examples) {
  EXPECT_EQ(to_string(simplify(fm("forall u. ~(u != a)")->kids[0])), "u = a");
  F cv = f_atom(Head::Pred, "B", {v("v"), v("w")});
  EXPECT_TRUE(alpha_equal(simplify(f_and(f_true(), cv)), cv));
  EXPECT_EQ(to_string(simplify(fm("forall u. forall w. (u != w \\/ B(a,w))")->kids[0])), "B(a,u)");
  EXPECT_EQ(simplify(fm("a = a"))->kind, Formula::Kind::True);
  EXPECT_EQ(simplify(fm("a != a"))->kind, Formula::Kind::False);
  EXPECT_EQ(simplify(fm("forall u. B(a,c)"))->kind, Formula::Kind::Atom);
  EXPECT_EQ(simplify(fm("exists u. (u = a /\\ B(u,c))"))->kind, Formula::Kind::Atom);
  EXPECT_EQ(to_string(simplify(fm("~(B(a,c) /\\ ~B(c,a))"))), "~B(a,c) \\/ B(c,a)");
}

TEST(Simplify, GfpRules) {
  Signature s = sig_main();
  F id = parse_formula("gfp Y u. Y(u) @ (a)", s, true);
  EXPECT_EQ(simplify(id)->kind, Formula::Kind::True);
  F noy = parse_formula("gfp Y u. B(u,c) @ (a)", s, true);
  EXPECT_EQ(to_string(simplify(noy)), "B(a,c)");
  F keep = parse_formula("gfp Y u. X(u) /\\ (forall v. B(u,v) \\/ Y(v)) @ (a)", s, true);
  EXPECT_EQ(simplify(keep)->kind, Formula::Kind::Gfp);
}

TEST(Formula, PrintParseRoundTrip) {
  for (const char* text : {"u = a /\\ (forall v. B(u,v))", "~X(u) \\/ (exists w. B(w,u))", "X(a) -> B(a,c) -> X(c)",
                           "(gfp Y u. X(u) /\\ (forall v. B(u,v) \\/ Y(v)) @ (a))", "true", "a != c <-> ~B(a,a)"}) {
    Signature s = sig_main();
    F f1 = parse_formula(text, s, true, {"u"});
    F f2 = parse_formula(to_string(f1), s, true, {"u"});
    EXPECT_TRUE(alpha_equal(f1, f2)) << text << " => " << to_string(f1);
  }
}

TEST(Formula, AlphaEquivalence) {
  EXPECT_TRUE(alpha_equal(fm("forall x. B(x,a)"), fm("forall y. B(y,a)")));
  EXPECT_FALSE(alpha_equal(fm("forall x. B(x,a)"), fm("forall y. B(a,y)")));
  EXPECT_TRUE(alpha_equal(PredExpr{{"u"}, fm("forall q. B(q,q)")}, PredExpr{{"w"}, fm("forall r. B(r,r)")}));
}

TEST(Formula, Size) {
  // λu. u = a : lambda(1) + param(1) + '='(1) + u(1) + a(1)
  EXPECT_EQ(pred_expr_size(PredExpr{{"u"}, f_eq(v("u"), c("a"))}), 5);
}

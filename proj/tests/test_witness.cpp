#include <gtest/gtest.h>

#include "scanw/witness.hpp"
#include "oracles.hpp"
#include "semantic.hpp"
#include "support.hpp"

using namespace scanw;
using namespace scanw::testing;

namespace {

const std::string kData = SCANW_DATA_DIR;

Derivation replay_pair(const std::string& problem, const std::string& trace, Problem* out = nullptr) {
  Problem p = load_problem(kData + "/corpus/" + problem);
  if (out) *out = p;
  return replay(p.clauses, p.x_names(), parse_trace(read_file(kData + "/traces/" + trace)));
}

const Term c0 = Term::app("c");
Term var(const std::string& v) { return Term::var(v); }
Term cst(const std::string& c) { return Term::app(c); }

F X(const Term& t) { return f_atom(Head::PredVar, "X", {t}); }
F Y(const Term& t) { return f_atom(Head::PredVar, "Y", {t}); }
F B(const Term& s, const Term& t) { return f_atom(Head::Pred, "B", {s, t}); }

/// ∀u (W(u) ↔ rhs(u)) for a unary predicate expression.
F equivalence_goal(const PredExpr& w, const F& rhs) {
  NameGen names;
  names.reserve("u");
  return f_forall("u", f_iff(instantiate(w, {var("u")}, names), rhs));
}

}  // namespace

// ------------------------------------------------------------------ lres

TEST(Lres, PositiveFact) {
  auto r = lres(P("_X(a)"), {c0}, 50);
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(*r, S({"~X(c)", "a != c"}));
}

TEST(Lres, OneSidedClauseGivesDualAndConstrainedRest) {
  auto r = lres(P("_~X(f(?u)) | B(?u,?v)"), {c0}, 50);
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(*r, S({"X(c)", "c != f(?u) | B(?u,?v)"}));
}

TEST(Lres, ChainClauseExceedsBudget) {
  EXPECT_FALSE(lres(P("B(?u,?v) | _~X(?u) | X(?v)"), {c0}, 20).has_value());
}

TEST(Lres, ArityMismatchThrows) { EXPECT_THROW(lres(P("_X(a)"), {}, 10), Error); }

// ------------------------------------------------------------------- b_k

TEST(Bk, IteratesOfChainClause) {
  PointedClause p = P("B(?v1,?v2) | _~X(?v1) | X(?v2)");
  EXPECT_EQ(b_k(p, 0, {c0}), ClauseSet({Clause()}));
  EXPECT_EQ(b_k(p, 1, {c0}), S({"X(c)", "B(c,?v)"}));
  EXPECT_EQ(b_k(p, 2, {c0}), S({"X(c)", "B(c,?v) | X(?v)", "B(c,?v) | B(?v,?w)"}));
}

TEST(Bk, ClauseFormAgreesWithAlphaIteration) {
  PointedClause p = P("B(?v1,?v2) | _~X(?v1) | X(?v2)");
  for (int k = 0; k <= 3; ++k) {
    NameGen names = names_for({p.clause});
    PredExpr from_clauses = clauses_to_pred(b_k(p, k, {c0}), {c0});
    PredExpr from_alpha = bk_expr(p, k, names);
    EXPECT_TRUE(equivalent_in_models(from_clauses, from_alpha)) << "k=" << k << ": " << to_string(from_clauses) << " vs "
                                                               << to_string(from_alpha);
  }
}

TEST(BkProperty, MonotoneInFiniteModels) {
  PointedClause p = P("B(?v1,?v2) | _~X(?v1) | X(?v2)");
  NameGen names = names_for({p.clause});
  for (int k = 0; k <= 3; ++k)
    EXPECT_TRUE(implies_in_models(bk_expr(p, k, names), bk_expr(p, k + 1, names))) << "k=" << k;
}

TEST(BkProperty, MonotoneOnCorpusPointedClauses) {
  for (const char* text : {"_~X(?v) | X(f(?v)) | B(?v)", "_X(a)", "~X(?v1,?v2) | X(?v2,?v1) | _A(?v1,?v2)",
                           "_~X(?v1,?v2) | X(?v2,?v1) | A(?v1,?v2)", "_~X(?u) | ~E(?u,?v) | X(?v)"}) {
    PointedClause p = P(text);
    if (p.lit().kind != Head::PredVar) continue;
    NameGen names = names_for({p.clause});
    int top = p.lit().args.size() > 1 ? 2 : 3;
    for (int k = 0; k <= 2; ++k)
      EXPECT_TRUE(implies_in_models(bk_expr(p, k, names), bk_expr(p, k + 1, names), top)) << text << " k=" << k;
  }
}

TEST(Bk, BudgetThrows) {
  PointedClause p = P("B(?v1,?v2) | _~X(?v1) | X(?v2) | X(f(?v2))");
  EXPECT_THROW(b_k(p, 6, {c0}, 50), Error);
}

// ----------------------------------------------------------------- alpha

TEST(Alpha, FactHasNoY) {
  NameGen names;
  PredExpr a = make_alpha(P("_X(a)"), "Y", names);
  PredExpr expected{{"u"}, f_and(f_not(X(var("u"))), f_not(f_eq(var("u"), cst("a"))))};
  EXPECT_TRUE(free_predvars(a.body).count("Y") == 0);
  EXPECT_TRUE(equivalent_in_models(a, expected)) << to_string(a);
}

TEST(Alpha, ChainClause) {
  NameGen names;
  PredExpr a = make_alpha(P("B(?u,?v) | _~X(?u) | X(?v)"), "Y", names);
  PredExpr expected{{"u"}, f_and(X(var("u")), f_forall("v", f_or(B(var("u"), var("v")), Y(var("v")))))};
  EXPECT_TRUE(equivalent_in_models(a, expected)) << to_string(a);
  EXPECT_EQ(free_predvars(a.body), (std::set<std::string>{"X", "Y"}));
}

TEST(Alpha, OneSidedHasNoY) {
  NameGen names;
  PredExpr a = make_alpha(P("_~X(f(?u)) | B(?u,?v)"), "Y", names);
  EXPECT_EQ(free_predvars(a.body).count("Y"), 0u) << to_string(a);
}

TEST(Alpha, CyclicClauseMatchesHandExpansion) {
  NameGen names;
  PredExpr a = make_alpha(P("_~X(?v) | X(f(?v))"), "Y", names);
  // λu. X(u) ∧ ∀v(u ≄ v ∨ Y(f(v)))
  PredExpr hand{{"u"}, f_and(X(var("u")), f_forall("v", f_or(f_not(f_eq(var("u"), var("v"))), Y(Term::app("f", {var("v")})))))};
  EXPECT_TRUE(equivalent_in_models(a, hand)) << to_string(a);
}

TEST(FixpointProperty, GfpIsAFixpointOfAlpha) {
  for (const char* text : {"_~X(?v) | X(f(?v))", "B(?u,?v) | _~X(?u) | X(?v)", "_~X(?v) | X(f(?v)) | B(?v)",
                           "_X(?v) | ~X(f(?v))"}) {
    PointedClause p = P(text);
    NameGen names = names_for({p.clause});
    PredExpr g = fixpoint_expr(p, names);
    std::string y = names.fresh("Y");
    PredExpr a = make_alpha(p, y, names);
    PredExpr unfolded = simplify(apply_pred_subst(a, PredSubst{{y, g}}, names), names);
    EXPECT_TRUE(equivalent_in_models(g, unfolded)) << text << ": " << to_string(g) << " vs " << to_string(unfolded);
  }
}

// ---------------------------------------------------------- find_acyclic

TEST(FindAcyclic, MainExampleChainClause) {
  AcyclicResult r = find_acyclic(P("B(?u,?v) | _~X(?u) | X(?v)"), S({"B(a,?v)", "X(a)", "~X(c)"}));
  ASSERT_EQ(r.status, AcyclicResult::Status::Found);
  EXPECT_EQ(r.k, 1);
  ASSERT_EQ(r.s.size(), 1u);
  EXPECT_EQ(r.s[0].first.clause, C("X(a)"));
  EXPECT_EQ(r.s[0].second, C("B(a,?v)"));
}

TEST(FindAcyclic, SwapExamplePrefersAcyclicSubsumption) {
  AcyclicResult r =
      find_acyclic(P("_~X(?v1,?v2) | X(?v2,?v1) | A(?v1,?v2)"), S({"X(a,b)", "X(b,a)", "A(b,a)"}));
  ASSERT_EQ(r.status, AcyclicResult::Status::Found);
  EXPECT_EQ(r.k, 2);
  std::map<std::string, std::string> s;
  for (const auto& [q, t] : r.s) s[to_string(q.clause)] = to_string(t);
  EXPECT_EQ(s[to_string(C("X(a,b)"))], to_string(C("X(b,a)")));
  EXPECT_EQ(s[to_string(C("X(b,a)"))], to_string(C("A(b,a)")));
}

TEST(FindAcyclic, CounterexampleIsProvenCyclic) {
  AcyclicResult r = find_acyclic(P("_~X(?v) | X(f(?v))"), S({"X(f(f(?v)))"}));
  EXPECT_EQ(r.status, AcyclicResult::Status::ProvenCyclic);
}

TEST(FindAcyclic, NoResolvableClausesGivesEmptyGraph) {
  AcyclicResult r = find_acyclic(P("_X(a)"), S({"B(a,?v)"}));
  ASSERT_EQ(r.status, AcyclicResult::Status::Found);
  EXPECT_EQ(r.k, 0);
  EXPECT_TRUE(r.s.empty());
}

TEST(FindAcyclic, NotPurifiedThrows) {
  EXPECT_THROW(find_acyclic(P("_X(a)"), S({"~X(?u) | B(?u)"})), Error);
}

TEST(FindAcyclic, CandidateCapReportsBudget) {
  AcyclicLimits lim;
  lim.max_nodes = 1;
  AcyclicResult r =
      find_acyclic(P("_~X(?v1,?v2) | X(?v2,?v1) | A(?v1,?v2)"), S({"X(a,b)", "X(b,a)", "A(b,a)"}), lim);
  EXPECT_EQ(r.status, AcyclicResult::Status::BudgetExhausted);
}

// -------------------------------------------------- one-sided properties

TEST(OneSidedProperty, AcyclicAndBkEqualsLres) {
  Gen g(20261018);
  int accepted = 0, with_resolvents = 0;
  for (int attempt = 0; attempt < 20000 && accepted < 250; ++attempt) {
    PointedClause p = random_one_sided(g);
    ASSERT_TRUE(is_one_sided(p)) << to_string(p);
    auto n = purified_set(g, p);
    if (!n) continue;
    ++accepted;
    AcyclicResult r = find_acyclic(p, *n);
    EXPECT_EQ(r.status, AcyclicResult::Status::Found) << to_string(p);
    with_resolvents += !r.s.empty();
    std::vector<Term> cs = {Term::app("c0")};
    auto l = lres(p, cs, 1000);
    ASSERT_TRUE(l.has_value()) << to_string(p);
    EXPECT_EQ(b_k(p, 1, cs).sorted(), l->sorted()) << to_string(p);
  }
  EXPECT_GE(accepted, 200);
  EXPECT_GT(with_resolvents, 20);
}

// ------------------------------------------------------------ tau_step

TEST(TauStep, InferenceStepsAreIdentity) {
  Derivation d = replay_pair("01_main.soqe", "d1.trace");
  NameGen names = names_for(d.initial, d.xs);
  EXPECT_TRUE(tau_step(d, 0, {}, names).empty());
}

TEST(TauStep, ExtPurDelNegativeIsBottom) {
  Derivation d = replay_pair("01_main.soqe", "d1.trace");
  NameGen names = names_for(d.initial, d.xs);
  PredSubst t = tau_step(d, 2, {}, names);
  ASSERT_EQ(t.count("X"), 1u);
  EXPECT_EQ(t.at("X").body->kind, Formula::Kind::False);
}

TEST(TauStep, PurDelOfPositiveFactFirstOrder) {
  Derivation d = replay_pair("01_main.soqe", "d1.trace");
  NameGen names = names_for(d.initial, d.xs);
  WitnessOptions o;
  o.mode = WitnessMode::FirstOrder;
  std::vector<PurDelRecord> recs;
  PredSubst t = tau_step(d, 1, o, names, &recs);
  PredExpr expected{{"u"}, f_or(X(var("u")), f_eq(var("u"), cst("a")))};
  EXPECT_TRUE(equivalent_in_models(t.at("X"), expected)) << to_string(t.at("X"));
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0].k, 1);
}

// -------------------------------------------------------------- compose

TEST(Compose, FirstMainDerivationIsUEqualsA) {
  Derivation d = replay_pair("01_main.soqe", "d1.trace");
  Witness w = compose(d, {});
  ASSERT_EQ(w.subst.count("X"), 1u);
  EXPECT_TRUE(w.first_order());
  ProverResult r = prove({C("B(a,?v)"), C("a != c")}, equivalence_goal(w.subst.at("X"), f_eq(var("u"), cst("a"))));
  EXPECT_EQ(r.status, ProverResult::Status::Proved) << to_string(w.subst) << " " << r.note;
}

TEST(Compose, SecondMainDerivationWithMinimalAnnotation) {
  Derivation d = replay_pair("01_main.soqe", "d2.trace");
  WitnessOptions o;
  o.mode = WitnessMode::FirstOrder;
  o.annotation = {{0, 1}, {2, 1}};
  Witness w = compose(d, o);
  EXPECT_TRUE(w.first_order());
  F rhs = f_and(f_eq(var("u"), cst("a")), f_forall("v", B(var("u"), var("v"))));
  ProverResult r = prove({}, equivalence_goal(w.subst.at("X"), rhs));
  EXPECT_EQ(r.status, ProverResult::Status::Proved) << to_string(w.subst) << " " << r.note;
  // find_acyclic chooses the same minimal annotation.
  Witness a = compose(d, {});
  ASSERT_EQ(a.records.size(), 2u);
  for (const auto& rec : a.records) EXPECT_EQ(rec.k, 1);
  EXPECT_TRUE(equivalent_in_models(a.subst.at("X"), w.subst.at("X")));
}

TEST(Compose, CyclicDerivationFallsBackToFixpoint) {
  Derivation d = replay_pair("03_cyclic.soqe", "cyclic.trace");
  Witness w = compose(d, {});
  EXPECT_FALSE(w.first_order()) << to_string(w.subst);
  ASSERT_FALSE(w.records.empty());
  EXPECT_EQ(w.records[0].mode, "fixpoint");
  WitnessOptions fo;
  fo.mode = WitnessMode::FirstOrder;
  EXPECT_THROW(compose(d, fo), Error);
  WitnessOptions res;
  res.mode = WitnessMode::Resolution;
  EXPECT_THROW(compose(d, res), Error);
}

TEST(Compose, ResolutionModeOnTwoFacts) {
  Derivation d = replay_pair("01_main.soqe", "d1.trace");
  WitnessOptions o;
  o.mode = WitnessMode::Resolution;
  Witness w = compose(d, o);
  EXPECT_TRUE(equivalent_in_models(w.subst.at("X"), PredExpr{{"u"}, f_eq(var("u"), cst("a"))}));
}

TEST(Compose, NoPurificationStepsGiveIdentity) {
  Problem p = load_problem(kData + "/corpus/01_main.soqe");
  Derivation d = replay(p.clauses, p.x_names(), {});
  EXPECT_TRUE(compose(d, {}).subst.empty());
}

TEST(Compose, FreshConstantsNeverLeak) {
  for (auto [prob, trace] : std::vector<std::pair<std::string, std::string>>{
           {"01_main.soqe", "d1.trace"}, {"01_main.soqe", "d2.trace"}, {"03_cyclic.soqe", "cyclic.trace"}}) {
    Derivation d = replay_pair(prob, trace);
    for (auto mode : {WitnessMode::Auto, WitnessMode::Fixpoint}) {
      WitnessOptions o;
      o.mode = mode;
      Witness w = compose(d, o);
      std::map<std::string, std::pair<SymKind, int>> syms;
      for (const auto& [x, e] : w.subst) symbols_of(e.body, syms);
      for (const auto& [s, info] : syms) EXPECT_NE(s.rfind("c1", 0), 0u) << s;
      for (const auto& [x, e] : w.subst) EXPECT_TRUE(free_predvars(e.body).empty()) << to_string(e);
    }
  }
}

TEST(WitnessMode, ParseAndPrint) {
  for (auto m : {WitnessMode::Auto, WitnessMode::FirstOrder, WitnessMode::Fixpoint, WitnessMode::Resolution})
    EXPECT_EQ(parse_witness_mode(to_string(m)), m);
  EXPECT_THROW(parse_witness_mode("magic"), Error);
}

#include <gtest/gtest.h>

#include "scanw/verify.hpp"
#include "scanw/witness.hpp"
#include "semantic.hpp"
#include "soundness.hpp"
#include "support.hpp"

using namespace scanw;
using namespace scanw::testing;

namespace {

const std::string kData = SCANW_DATA_DIR;

F fm(const std::string& text) {
  Signature sig;
  sig.declare("X", SymKind::PredVar, 1);
  return parse_formula(text, sig, true);
}

Problem corpus(const std::string& name) { return load_problem(kData + "/corpus/" + name); }

Derivation replay_pair(const Problem& p, const std::string& trace) {
  return replay(p.clauses, p.x_names(), parse_trace(read_file(kData + "/traces/" + trace)));
}

/// The 4-element model of the tautological-resolvent example.
FiniteModel tautology_example_model() {
  FiniteModel m;
  m.n = 4;  // m1..m4 are 0..3
  m.set_constant("a", 0);
  m.set_constant("b", 1);
  m.set_constant("c", 2);
  m.set_function("f", 1, {3, 1, 2, 2});
  m.set_relation("B", 1, {{1}});
  return m;
}

}  // namespace

// ---------------------------------------------------------------- models

TEST(Relation, TupleIndexingIsMixedRadix) {
  EXPECT_EQ(tuple_index({1, 2}, 3), 5u);
  EXPECT_EQ(tuple_count(3, 2), 9u);
  EXPECT_EQ(tuple_count(2, 0), 1u);
  Relation r = Relation::empty(3, 2);
  r.bits[5] = true;
  EXPECT_TRUE(r.holds({1, 2}, 3));
  EXPECT_FALSE(r.holds({2, 1}, 3));
  EXPECT_THROW(r.holds({1}, 3), Error);
}

TEST(FiniteModel, RejectsPartialTables) {
  FiniteModel m;
  m.n = 2;
  EXPECT_THROW(m.set_function("f", 1, {0}), Error);
  EXPECT_THROW(m.set_function("f", 1, {0, 2}), Error);
}

TEST(Eval, TautologicalResolventCountermodel) {
  FiniteModel m = tautology_example_model();
  Env env;
  env.preds["X"] = Relation::empty(4, 1);
  env.preds["X"].bits[0] = env.preds["X"].bits[1] = true;  // R = {m1, m2}
  std::vector<Clause> n = {C("X(a) | ~X(f(a))"), C("X(b)"), C("~X(c)"), C("B(b)")};
  EXPECT_TRUE(eval_clauses(m, env, n));
  // C2' as displayed: X(f(f(a))) ∨ B(f(a)) ∨ B(a).
  EXPECT_FALSE(eval_clauses(m, env, {C("X(f(f(a))) | B(f(a)) | B(a)")}));
  EXPECT_FALSE(eval(m, env, fm("X(f(f(a))) \\/ B(f(a)) \\/ B(a)")));
  // The resolvent C2 after variable elimination keeps ~X(f(a)) and is true.
  EXPECT_TRUE(eval_clauses(m, env, {C("X(f(f(a))) | B(f(a)) | B(a) | ~X(f(a))")}));
}

TEST(Eval, GfpOfIdentityIsFull) {
  FiniteModel m;
  m.n = 3;
  m.set_constant("a", 2);
  EXPECT_TRUE(eval(m, f_gfp("Y", {"w"}, f_atom(Head::PredVar, "Y", {Term::var("w")}), {Term::app("a")})));
}

TEST(Eval, GfpFollowsFunctionCycles) {
  // gfp Y w. A(w) ∧ Y(f(w)): all elements whose f-orbit stays inside A.
  FiniteModel m;
  m.n = 3;
  m.set_function("f", 1, {1, 0, 0});
  m.set_relation("A", 1, {{0}, {1}});
  F body = f_and(f_atom(Head::Pred, "A", {Term::var("w")}),
                 f_atom(Head::PredVar, "Y", {Term::app("f", {Term::var("w")})}));
  PredExpr g{{"u"}, f_gfp("Y", {"w"}, body, {Term::var("u")})};
  Relation r = extension(m, Env{}, g);
  EXPECT_EQ(r.bits, (std::vector<bool>{true, true, false}));
}

TEST(Eval, ConstantsAndErrors) {
  FiniteModel m;
  m.n = 2;
  m.set_constant("a", 0);
  EXPECT_FALSE(eval(m, f_false()));
  EXPECT_TRUE(eval(m, f_true()));
  EXPECT_THROW(eval(m, fm("B(a)")), Error);
  EXPECT_THROW(eval(m, f_atom(Head::Pred, "A", {Term::var("free")})), Error);
}

TEST(EvalProperty, RespectsSubstitution) {
  Gen g(11);
  int checked = 0;
  for (int i = 0; i < 300; ++i) {
    Lits ls = g.lits(3, 2, true, false, {"x", "y"});
    std::vector<F> disj;
    for (const auto& l : ls) disj.push_back(f_lit(l));
    F phi = f_or(std::move(disj));
    Term t = g.term(1, {"y"});
    Subst s{{"x", t}};
    NameGen names;
    F inst = subst_formula(phi, s, names);
    ModelSignature sig;
    sig.add_clauses({Clause(ls)});
    sig.add_formula(inst);
    sig.add_formula(f_eq(t, t));
    EnumerationLimits lim;
    lim.max_size = 2;
    enumerate_models(sig, lim, [&](const FiniteModel& m) {
      for (int y = 0; y < m.n; ++y) {
        Env env;
        env.vars["y"] = y;
        Env env2 = env;
        env2.vars["x"] = eval_term(m, env, t);
        for (int x = 0; x < m.n; ++x) {
          env.vars["x"] = x;  // shadowed by the substitution
          EXPECT_EQ(eval(m, env, inst), eval(m, env2, phi));
        }
      }
      ++checked;
      return true;
    });
  }
  EXPECT_GT(checked, 300);
}

TEST(EvalProperty, SimplifyPreservesTruth) {
  Gen g(12);
  for (int i = 0; i < 150; ++i) {
    // Random quantified formula over literals, closed by quantifiers.
    Lits ls = g.lits(3, 1, true, true, {"x", "y"});
    std::vector<F> parts;
    for (const auto& l : ls) parts.push_back(g.coin() ? f_lit(l) : f_not(f_lit(l)));
    F body = g.coin() ? f_or(parts) : f_and(parts);
    if (g.coin()) body = f_imp(body, f_lit(ls[0]));
    F phi = g.coin() ? f_forall(std::vector<std::string>{"x", "y"}, body)
                     : f_exists("x", f_forall("y", f_or(body, f_eq(Term::var("x"), Term::var("y")))));
    F simp = simplify(phi);
    ModelSignature sig;
    sig.add_formula(phi);
    EnumerationLimits lim;
    enumerate_models(sig, lim, [&](const FiniteModel& m) {
      bool a = eval(m, phi), b = eval(m, simp);
      EXPECT_EQ(a, b) << to_string(phi) << " vs " << to_string(simp);
      return a == b;
    });
  }
}

// -------------------------------------------------------------- soqe_holds

TEST(SoqeHolds, TwoFacts) {
  std::vector<Clause> n = {C("X(a)"), C("~X(c)")};
  std::vector<std::pair<std::string, int>> xs = {{"X", 1}};
  FiniteModel one;
  one.n = 1;
  one.set_constant("a", 0);
  one.set_constant("c", 0);
  EXPECT_FALSE(soqe_holds(one, n, xs));
  FiniteModel two;
  two.n = 2;
  two.set_constant("a", 0);
  two.set_constant("c", 1);
  EXPECT_TRUE(soqe_holds(two, n, xs));
}

TEST(SoqeHolds, WithoutPredicateVariablesIsPlainEvaluation) {
  FiniteModel m;
  m.n = 2;
  m.set_constant("a", 0);
  m.set_relation("B", 1, {{0}});
  EXPECT_TRUE(soqe_holds(m, {C("B(a)")}, {{"X", 1}}));
  EXPECT_FALSE(soqe_holds(m, {C("~B(a)")}, {{"X", 1}}));
}

TEST(SoqeHolds, GuardsLargeEnumerations) {
  FiniteModel m;
  m.n = 3;
  m.set_constant("a", 0);
  EXPECT_THROW(soqe_holds(m, {C("X(a)")}, {{"X", 3}}), Error);
}

// ------------------------------------------------------- model enumeration

TEST(EnumerateModels, CountsAllInterpretations) {
  ModelSignature sig;
  sig.add_clauses({C("A(f(a))")});
  EXPECT_EQ(model_count(sig, 2), 2u * 4u * 4u);
  EnumerationLimits lim;
  lim.max_size = 2;
  std::set<std::string> seen;
  EnumerationStats st = enumerate_models(sig, lim, [&](const FiniteModel& m) {
    seen.insert(m.to_string());
    return true;
  });
  EXPECT_EQ(st.models, 1u * 1u * 2u + 32u);
  EXPECT_EQ(seen.size(), st.models);
  EXPECT_FALSE(st.sampled);
}

TEST(EnumerateModels, FunctionCapLimitsDomainSize) {
  ModelSignature sig;
  sig.add_clauses({C("A(f(g(h(a))))")});
  EXPECT_EQ(effective_max_size(sig, 3), 2);
  ModelSignature small;
  small.add_clauses({C("A(f(a))")});
  EXPECT_EQ(effective_max_size(small, 3), 3);
}

TEST(EnumerateModels, SamplingIsSeeded) {
  ModelSignature sig;
  sig.add_clauses({C("B(?x,?y) | B(f(?x),?y) | A(g(?x,?y))")});
  EnumerationLimits lim;
  lim.max_models = 100;
  lim.sample = 30;
  std::vector<std::string> a, b;
  auto st = enumerate_models(sig, lim, [&](const FiniteModel& m) {
    a.push_back(m.to_string());
    return true;
  });
  enumerate_models(sig, lim, [&](const FiniteModel& m) {
    b.push_back(m.to_string());
    return true;
  });
  EXPECT_TRUE(st.sampled);
  EXPECT_EQ(a, b);
}

// --------------------------------------------------------- clausification

TEST(Clausify, Examples) {
  auto cs = clausify(fm("forall u. (X(u) -> B(u))"));
  ASSERT_EQ(cs.size(), 1u);
  EXPECT_EQ(cs[0], C("~X(?u) | B(?u)"));
  NameGen names;
  auto sk = clausify(fm("~(forall v. B(a,v))"), names);
  ASSERT_EQ(sk.size(), 1u);
  ASSERT_EQ(sk[0].size(), 1u);
  EXPECT_FALSE(sk[0][0].pos);
  EXPECT_EQ(sk[0][0].args[1].name.rfind("sk", 0), 0u);
  EXPECT_TRUE(sk[0][0].args[1].args.empty());
  EXPECT_TRUE(clausify(f_true()).empty());
  auto bot = clausify(f_false());
  ASSERT_EQ(bot.size(), 1u);
  EXPECT_TRUE(bot[0].empty());
  EXPECT_THROW(clausify(f_gfp("Y", {"w"}, f_true(), {Term::app("a")})), Error);
}

TEST(Clausify, SkolemFunctionsDependOnUniversals) {
  auto cs = clausify(fm("forall u. exists v. B(u,v)"));
  ASSERT_EQ(cs.size(), 1u);
  const Term& t = cs[0][0].args[1];
  ASSERT_EQ(t.args.size(), 1u);
  EXPECT_TRUE(t.args[0].is_var);
}

TEST(ClausifyProperty, EquivalentOnSkolemFreeFormulas) {
  Gen g(13);
  for (int i = 0; i < 200; ++i) {
    Lits ls = g.lits(4, 1, true, true, {"x", "y"});
    std::vector<F> parts;
    for (const auto& l : ls) parts.push_back(f_lit(l));
    F body = parts[0];
    for (size_t k = 1; k < parts.size(); ++k) {
      switch (g.pick(4)) {
        case 0: body = f_and(body, parts[k]); break;
        case 1: body = f_or(body, parts[k]); break;
        case 2: body = f_imp(body, parts[k]); break;
        default: body = f_iff(body, parts[k]); break;
      }
    }
    F phi = f_forall(std::vector<std::string>{"x", "y"}, body);
    auto cs = clausify(phi);
    ModelSignature sig;
    sig.add_formula(phi);
    sig.add_clauses(cs);
    EnumerationLimits lim;
    lim.max_size = 2;
    enumerate_models(sig, lim, [&](const FiniteModel& m) {
      bool a = eval(m, phi), b = eval_clauses(m, Env{}, cs);
      EXPECT_EQ(a, b) << to_string(phi);
      return a == b;
    });
  }
}

// ----------------------------------------------------------------- prover

TEST(Prover, SmokeRefutations) {
  for (const auto& cs : std::vector<std::vector<Clause>>{
           {C("A"), C("~A")}, {C("A(a)"), C("~A(?u)")}, {C("a = b"), C("A(a)"), C("~A(b)")}}) {
    ProverResult r = refute(cs);
    ASSERT_EQ(r.status, ProverResult::Status::Proved);
    EXPECT_LE(r.inferences, 100);
    Derivation d = replay(r.initial, {}, r.trace);
    EXPECT_TRUE(d.conclusion().contains(Clause()));
  }
}

TEST(Prover, MainExampleWitnessInstance) {
  Problem p = corpus("01_main.soqe");
  Derivation d = replay_pair(p, "d1.trace");
  Witness w = compose(d, {});
  NameGen names;
  for (const auto& c : p.clauses) {
    ProverResult r = prove({C("B(a,?v)"), C("a != c")}, apply_pred_subst(c, w.subst, names));
    EXPECT_EQ(r.status, ProverResult::Status::Proved) << to_string(c);
  }
}

TEST(Prover, EqualityRewrite) {
  ProverResult r = prove({C("a = b"), C("A(a)")}, fm("A(b)"));
  EXPECT_EQ(r.status, ProverResult::Status::Proved);
  bool parmod = false;
  for (const auto& s : r.trace) parmod = parmod || s.kind == Step::Kind::ParMod;
  EXPECT_TRUE(parmod);
}

TEST(Prover, InvalidGoalIsNotProved) {
  ProverResult r = prove({}, fm("a != c"));
  EXPECT_NE(r.status, ProverResult::Status::Proved);
  if (r.status == ProverResult::Status::Disproved) {
    ASSERT_TRUE(r.countermodel.has_value());
    EXPECT_EQ(r.countermodel->n, 1);
  }
}

TEST(ProverProperty, RefutationsReplayAndAgreeWithModels) {
  Gen g(14);
  int proved = 0, other = 0;
  for (int i = 0; i < 150; ++i) {
    std::vector<Clause> cs;
    int n = 2 + g.pick(3);
    for (int k = 0; k < n; ++k) cs.push_back(Clause(g.lits(2, 1, true, false, {"x", "y"})));
    ProverLimits lim;
    lim.timeout = std::chrono::milliseconds(500);
    lim.max_inferences = 2000;
    ProverResult r = refute(cs, lim);
    // Ground truth on small models: a model of the set forbids a refutation.
    ModelSignature sig;
    sig.add_clauses(cs);
    EnumerationLimits el;
    el.max_size = 2;
    bool has_model = false;
    enumerate_models(sig, el, [&](const FiniteModel& m) {
      has_model = eval_clauses(m, Env{}, cs);
      return !has_model;
    });
    if (r.status == ProverResult::Status::Proved) {
      ++proved;
      EXPECT_FALSE(has_model);
      Derivation d = replay(r.initial, {}, r.trace);
      EXPECT_TRUE(d.conclusion().contains(Clause()));
    } else {
      ++other;
      if (r.status == ProverResult::Status::Disproved) EXPECT_TRUE(eval_clauses(*r.countermodel, Env{}, r.initial));
    }
  }
  EXPECT_GT(proved, 10);
  EXPECT_GT(other, 10);
}

// ---------------------------------------------------------- soundness suite

TEST(SoundnessProperty, DerivationStepsPreserveModels) {
  SoundnessSummary s = run_soundness_suite(7, 500);
  EXPECT_EQ(s.violations, 0) << s.first_violation;
  EXPECT_EQ(s.steps, 500);
  for (const char* rule : {"Res", "Fac", "ConstrElim", "ParMod", "VarElim"}) EXPECT_GT(s.per_rule[rule], 20) << rule;
}

TEST(SoundnessProperty, OracleDetectsUnsoundSteps) {
  EXPECT_FALSE(entails_in_models({C("A(a)")}, C("A(?x)")));
  EXPECT_FALSE(entails_in_models({C("A(a) | A(b)")}, C("A(a)")));
  EXPECT_TRUE(entails_in_models({C("A(?x)")}, C("A(f(a))")));
}

// ------------------------------------------------------- witness checking

TEST(CheckWitness, SecondMainDerivationPassesBothChecks) {
  Problem p = corpus("01_main.soqe");
  Derivation d = replay_pair(p, "d2.trace");
  Witness w = compose(d, {});
  WitnessReport rep = check_witness(p.clauses, p.xs, d.conclusion().clauses(), w.subst);
  EXPECT_EQ(rep.verdict, WitnessReport::Verdict::Pass) << rep.to_string();
  ASSERT_EQ(rep.goals.size(), p.clauses.size());
  for (const auto& g : rep.goals) EXPECT_EQ(g.status, ProverResult::Status::Proved);
  EXPECT_TRUE(rep.models_checked);
  EXPECT_FALSE(rep.mismatch.has_value());
}

TEST(CheckWitness, BottomIsNotAWitnessForTheCyclicExample) {
  Problem p = corpus("03_cyclic.soqe");
  PredSubst bot = parse_witness("X := lambda u. false", p);
  WitnessReport rep = check_witness(p.clauses, p.xs, {}, bot);
  EXPECT_EQ(rep.verdict, WitnessReport::Verdict::Fail) << rep.to_string();
  ASSERT_TRUE(rep.mismatch.has_value());
}

TEST(CheckWitness, FixpointWitnessOfCyclicExampleAgreesOnModels) {
  Problem p = corpus("03_cyclic.soqe");
  Derivation d = replay_pair(p, "cyclic.trace");
  Witness w = compose(d, {});
  WitnessReport rep = check_witness(p.clauses, p.xs, d.conclusion().clauses(), w.subst);
  EXPECT_EQ(rep.verdict, WitnessReport::Verdict::Pass) << rep.to_string();
  EXPECT_TRUE(rep.goals.empty());
  EXPECT_EQ(rep.model_stats.max_size, 3);
  EXPECT_FALSE(rep.model_stats.sampled);
}

TEST(CheckWitness, IdentityOnPredicateFreeSet) {
  std::vector<Clause> n = {C("B(a,?v)"), C("a != c")};
  WitnessReport rep = check_witness(n, {{"X", 1}}, n, {});
  EXPECT_EQ(rep.verdict, WitnessReport::Verdict::Pass) << rep.to_string();
}

TEST(CheckWitness, ArityMismatchThrows) {
  Problem p = corpus("01_main.soqe");
  PredSubst bad{{"X", PredExpr{{"u", "w"}, f_true()}}};
  EXPECT_THROW(check_witness(p.clauses, p.xs, {}, bad), Error);
  PredSubst unknown{{"Z", PredExpr{{"u"}, f_true()}}};
  EXPECT_THROW(check_witness(p.clauses, p.xs, {}, unknown), Error);
}

TEST(CheckWitness, SoqeAgreesWithVerifiedWitnessesOnCorpus) {
  for (auto [prob, trace] : std::vector<std::pair<std::string, std::string>>{
           {"01_main.soqe", "d1.trace"}, {"01_main.soqe", "d2.trace"}, {"03_cyclic.soqe", "cyclic.trace"}}) {
    Problem p = corpus(prob);
    Derivation d = replay_pair(p, trace);
    Witness w = compose(d, {});
    CheckOptions o;
    o.use_prover = false;
    o.models.max_size = 2;
    EXPECT_EQ(check_witness(p.clauses, p.xs, d.conclusion().clauses(), w.subst, o).verdict, WitnessReport::Verdict::Pass)
        << prob << " " << trace;
  }
}

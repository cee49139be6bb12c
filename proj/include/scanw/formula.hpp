#pragma once

// Formulas with greatest fixpoints, predicate expressions (lambda
// abstractions) and predicate substitutions.

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "scanw/logic.hpp"

namespace scanw {

struct Formula;
using F = std::shared_ptr<const Formula>;

/// Immutable formula node. Atoms are always positive; negation is a node.
/// A predicate-variable application X(t) is an atom with Head::PredVar.
/// Gfp nodes represent (gfp_{Y,u} body)(t): `name` is Y, `bound` is u,
/// kids[0] is the body and `args` is t.
struct Formula {
  enum class Kind { True, False, Atom, Not, And, Or, Imp, Iff, Forall, Exists, Gfp };
  Kind kind = Kind::True;
  Head head_kind = Head::Pred;
  std::string name;  // predicate / predicate variable (atoms), bound variable (quantifiers), Y (gfp)
  std::vector<Term> args;
  std::vector<F> kids;
  std::vector<std::string> bound;  // gfp only
};

F f_true();
F f_false();
F f_atom(Head kind, const std::string& head, std::vector<Term> args);
F f_eq(const Term& s, const Term& t);
F f_lit(const Literal& l);
F f_not(F a);
F f_and(std::vector<F> kids);
F f_or(std::vector<F> kids);
F f_and(F a, F b);
F f_or(F a, F b);
F f_imp(F a, F b);
F f_iff(F a, F b);
F f_forall(const std::string& v, F body);
F f_exists(const std::string& v, F body);
F f_forall(const std::vector<std::string>& vs, F body);
F f_exists(const std::vector<std::string>& vs, F body);
F f_gfp(const std::string& y, std::vector<std::string> bound, F body, std::vector<Term> args);

/// Universal closure of the disjunction of the clause's literals.
F clause_formula(const Clause& c);
/// Conjunction of clause formulas.
F clauses_formula(const std::vector<Clause>& cs);
F clauses_formula(const ClauseSet& cs);

/// λu. body. Free first-order variables of the body should be among the
/// parameters.
struct PredExpr {
  std::vector<std::string> params;
  F body;
};

/// Finite map from predicate variables to predicate expressions.
using PredSubst = std::map<std::string, PredExpr>;

std::set<std::string> free_vars(const F& f);
std::set<std::string> free_predvars(const F& f);
/// All variable names used anywhere (free or bound), for fresh-name choice.
void all_var_names(const F& f, std::set<std::string>& out);
/// All predicate and function symbol names occurring in the formula.
void symbols_of(const F& f, std::map<std::string, std::pair<SymKind, int>>& out);

/// Capture-avoiding first-order substitution.
F subst_formula(const F& f, const Subst& s, NameGen& names);
/// Instantiates a predicate expression at the given argument terms.
F instantiate(const PredExpr& e, const std::vector<Term>& args, NameGen& names);

/// Simultaneously replaces every application X(t) with X in the domain of
/// `pi` by the beta-reduced body, renaming binders as needed. Throws
/// Error(Arity) on arity mismatch.
F apply_pred_subst(const F& f, const PredSubst& pi, NameGen& names);
F apply_pred_subst(const Clause& c, const PredSubst& pi, NameGen& names);
F apply_pred_subst(const ClauseSet& n, const PredSubst& pi, NameGen& names);
PredExpr apply_pred_subst(const PredExpr& e, const PredSubst& pi, NameGen& names);

/// Polarities of `x` in `f`: a subset of {+1, -1}.
std::set<int> polarity_of(const std::string& x, const F& f);
std::set<int> polarity_of(const std::string& x, const Clause& c);

/// Equivalence-preserving cleanup: double negation, trivial (dis)equations,
/// truth-constant absorption, negation pushed inwards, vacuous quantifiers,
/// miniscoping, and elimination of bound variables fixed by a
/// (dis)equation.
F simplify(const F& f, NameGen& names);
F simplify(const F& f);
PredExpr simplify(const PredExpr& e, NameGen& names);

/// Alpha-equivalence invariant rendering (bound names replaced by indices).
std::string alpha_key(const F& f);
bool alpha_equal(const F& a, const F& b);
bool alpha_equal(const PredExpr& a, const PredExpr& b);

/// Rendering in the witness text format.
std::string to_string(const F& f);
std::string to_string(const PredExpr& e);
std::string to_string(const PredSubst& s);

/// Size by counting every connective, quantifier (with its variable), lambda,
/// gfp, and predicate / function / constant / variable occurrence once.
int formula_size(const F& f);
int pred_expr_size(const PredExpr& e);

}  // namespace scanw

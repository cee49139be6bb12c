#pragma once

// Witness extraction: local resolution closures, the alpha operator and its
// greatest fixpoint, the bounded iterates B^k, purification-subsumption
// graphs, and right-to-left composition of per-step substitutions.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scanw/calculus.hpp"
#include "scanw/formula.hpp"
#include "scanw/saturation.hpp"

namespace scanw {

/// Fresh constants c1..ck avoiding every name reserved in `names`.
std::vector<Term> fresh_constants(size_t k, NameGen& names);

/// NameGen reserving all symbol and variable names of the clauses plus `extra`.
NameGen names_for(const std::vector<Clause>& clauses, const std::vector<std::string>& extra = {});

/// Local resolution closure of P from L(c)^⊥, reduced by constraint
/// normalization and subsumption. nullopt when more than `budget`
/// resolution inferences are needed or a kept clause would exceed
/// `max_lits` literals (the closure is then treated as infinite).
std::optional<ClauseSet> lres(const PointedClause& p, const std::vector<Term>& consts, int budget,
                              size_t max_lits = 24);

/// The iterate B_P^k over the constants (B^0 = {⊥}), reduced like lres.
/// Throws Error(Budget) when an iterate exceeds `max_clauses` clauses.
ClauseSet b_k(const PointedClause& p, int k, const std::vector<Term>& consts, size_t max_clauses = 20000);

/// Standard parameter names: "u" for arity 1, u1..uk otherwise.
std::vector<std::string> param_names(size_t arity, const std::string& base = "u");

/// λū. ⋀_{R ∈ s} ∀(vars of R). R[c ← ū].
PredExpr clauses_to_pred(const ClauseSet& s, const std::vector<Term>& consts);

/// α_{P,Y}: λū. L(ū)^⊥ ∧ ∀v̄(ū ≄ t̄(v̄) ∨ C(v̄) ∨ ⋁ Y(t̄_i(v̄))), simplified.
PredExpr make_alpha(const PointedClause& p, const std::string& y, NameGen& names,
                    const std::vector<std::string>& params = {});
/// gfp_Y α_{P,Y} as a predicate expression (just α when Y does not occur).
PredExpr fixpoint_expr(const PointedClause& p, NameGen& names);
/// B_P^k as a formula: α iterated k times from λū.⊥.
PredExpr bk_expr(const PointedClause& p, int k, NameGen& names);

struct AcyclicLimits {
  size_t max_candidates = 64;   // candidate subsumers per resolvable pointed clause
  size_t max_nodes = 100000;    // search nodes over partial assignments
};

/// A purification subsumption s: R_P(N) → N, its graph and longest path.
struct AcyclicResult {
  enum class Status { Found, ProvenCyclic, BudgetExhausted };
  Status status = Status::ProvenCyclic;
  std::vector<std::pair<PointedClause, Clause>> s;  // Found only
  int k = 0;                                        // longest path length (Found only)
  size_t nodes = 0;
};
std::string to_string(AcyclicResult::Status s);

/// Searches for a purification subsumption with an acyclic graph of minimal
/// longest-path length. Throws Error(Invalid) when P is not purified in N.
AcyclicResult find_acyclic(const PointedClause& p, const ClauseSet& n, const AcyclicLimits& limits = {});

enum class WitnessMode { Auto, FirstOrder, Fixpoint, Resolution };
WitnessMode parse_witness_mode(const std::string& s);
std::string to_string(WitnessMode m);

struct WitnessOptions {
  WitnessMode mode = WitnessMode::Auto;
  int lres_budget = 200;
  std::map<size_t, int> annotation;  // PurDel step index (0-based) -> k; overrides find_acyclic
  AcyclicLimits acyclic;
};

/// How one PurDel step was turned into a substitution.
struct PurDelRecord {
  size_t step = 0;
  std::string mode;  // "first-order", "fixpoint" or "resolution"
  int k = -1;        // first-order only
  std::string note;
};

struct Witness {
  PredSubst subst;
  std::vector<PurDelRecord> records;
  bool first_order() const;
  int size() const;
};

/// Arity of each predicate variable of `xs`, read off the clauses (0 when
/// it does not occur).
std::map<std::string, int> predvar_arities(const std::vector<Clause>& clauses, const std::vector<std::string>& xs);

/// τ for step i of the derivation (identity for inferences and deletions
/// other than ExtPurDel/PurDel). Appends a record for PurDel steps.
PredSubst tau_step(const Derivation& d, size_t i, const WitnessOptions& opts, NameGen& names,
                   std::vector<PurDelRecord>* records = nullptr);

/// σ(D) composed right to left with simplification after each fold;
/// predicate variables left free in the result are closed with λū.⊤.
/// Throws Error(Budget) in resolution mode when a closure does not
/// stabilize, Error(Invalid) in first-order mode without an annotation when
/// a PurDel is not acyclically purified.
Witness compose(const Derivation& d, const WitnessOptions& opts = {});

}  // namespace scanw

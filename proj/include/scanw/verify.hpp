#pragma once

// Semantic oracle and witness checking: finite models with greatest-fixpoint
// evaluation, second-order enumeration, model enumeration, clausification,
// a given-clause refutation prover and the witness check report.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scanw/formula.hpp"
#include "scanw/logic.hpp"
#include "scanw/saturation.hpp"

namespace scanw {

// ---------------------------------------------------------------- models

/// A k-ary relation over {0..n-1}, stored as a bit per tuple (tuple index in
/// mixed radix, first argument most significant).
struct Relation {
  int arity = 0;
  std::vector<bool> bits;

  static Relation empty(int n, int arity);
  static Relation full(int n, int arity);
  bool holds(const std::vector<int>& tuple, int n) const;
  bool operator==(const Relation& o) const { return arity == o.arity && bits == o.bits; }
};

/// Index of a tuple over an n-element domain.
size_t tuple_index(const std::vector<int>& tuple, int n);
/// Number of k-tuples, or SIZE_MAX on overflow.
size_t tuple_count(int n, int arity);

/// Finite structure with domain {0..n-1}; equality is identity.
struct FiniteModel {
  int n = 1;
  std::map<std::string, std::pair<int, std::vector<int>>> functions;  // arity, table (constants: arity 0)
  std::map<std::string, Relation> relations;

  void set_function(const std::string& f, int arity, std::vector<int> table);
  void set_constant(const std::string& c, int value) { set_function(c, 0, {value}); }
  void set_relation(const std::string& p, Relation r) { relations[p] = std::move(r); }
  /// Sets a relation from the listed tuples.
  void set_relation(const std::string& p, int arity, const std::vector<std::vector<int>>& tuples);
  std::string to_string() const;
};

/// Free first-order variables and predicate variables.
struct Env {
  std::map<std::string, int> vars;
  std::map<std::string, Relation> preds;
};

/// Value of a term. Throws Error(Invalid) on unbound symbols.
int eval_term(const FiniteModel& m, const Env& env, const Term& t);
/// Tarskian evaluation; predicate-variable atoms are looked up in env.preds,
/// then in m.relations. Gfp applications are evaluated by downward iteration
/// from the full relation.
bool eval(const FiniteModel& m, const Env& env, const F& f);
bool eval(const FiniteModel& m, const F& f);
/// The relation denoted by λū.body.
Relation extension(const FiniteModel& m, const Env& env, const PredExpr& e);
/// Clauses compiled against a model's symbol tables. Valid while the model
/// object keeps its size and symbols; table contents may change (as during
/// enumerate_models, which updates one model in place). Predicate-variable
/// literals read the relations in `preds`, whose addresses must stay valid.
class ClauseChecker {
 public:
  ClauseChecker(const FiniteModel& m, const std::vector<Clause>& cs, const std::map<std::string, const Relation*>& preds = {});
  /// Every clause holds under every variable assignment.
  bool holds() const;
  bool holds(size_t clause) const;
  size_t size() const { return clauses_.size(); }

 private:
  struct CTerm {
    int var = -1;
    const std::vector<int>* table = nullptr;
    std::vector<CTerm> args;
  };
  struct CLit {
    bool pos = true;
    bool eq = false;
    const std::vector<bool>* bits = nullptr;
    std::vector<CTerm> args;
  };
  struct CClause {
    int vars = 0;
    std::vector<CLit> lits;
  };
  int term(const CTerm& t, const int* vals) const;
  CTerm compile(const Term& t, std::map<std::string, int>& vars) const;

  const FiniteModel& m_;
  std::vector<CClause> clauses_;
};

/// Universal closure of every clause (predicate variables via env.preds).
bool eval_clauses(const FiniteModel& m, const Env& env, const std::vector<Clause>& cs);

/// Some assignment of relations to xs (name, arity) satisfies every clause.
/// Throws Error(Budget) when n^arity > 9 for some variable.
bool soqe_holds(const FiniteModel& m, const std::vector<Clause>& n, const std::vector<std::pair<std::string, int>>& xs);

/// Symbols to interpret in enumerated models.
struct ModelSignature {
  std::vector<std::pair<std::string, int>> functions;  // constants have arity 0
  std::vector<std::pair<std::string, int>> predicates;

  void add_clauses(const std::vector<Clause>& cs, const std::vector<std::string>& skip = {});
  void add_formula(const F& f, const std::vector<std::string>& skip = {});
};

struct EnumerationLimits {
  int max_size = 3;
  /// Per domain size: above this many models, `sample` random ones are drawn.
  uint64_t max_models = 200000;
  uint64_t sample = 20000;
  uint64_t seed = 1;
};

struct EnumerationStats {
  uint64_t models = 0;   // models visited
  bool sampled = false;  // some size was sampled rather than enumerated
  int max_size = 0;      // largest domain size visited
};

/// Number of models of the signature over an n-element domain (saturating).
uint64_t model_count(const ModelSignature& sig, int n);
/// The domain sizes enumerated under the function-table cap: size 3 only for
/// signatures with at most 2 proper function symbols of arity at most 2.
int effective_max_size(const ModelSignature& sig, int requested);
/// Calls `visit` on every model (or a seeded sample) of size 1..max_size;
/// stops early when `visit` returns false.
EnumerationStats enumerate_models(const ModelSignature& sig, const EnumerationLimits& limits,
                                  const std::function<bool(const FiniteModel&)>& visit);

// --------------------------------------------------------- clausification

/// NNF, miniscoping, Skolemization with fresh "sk" symbols, CNF. Free
/// variables are read universally. Throws Error(Invalid) on gfp.
std::vector<Clause> clausify(const F& f, NameGen& names);
std::vector<Clause> clausify(const F& f);

// ----------------------------------------------------------------- prover

struct ProverLimits {
  int max_inferences = 20000;
  int max_clause_lits = 12;
  std::chrono::milliseconds timeout{5000};
  /// Look for a countermodel (size ≤ 3) when saturation fails.
  bool countermodels = true;
};

struct ProverResult {
  enum class Status { Proved, Disproved, Unknown };
  Status status = Status::Unknown;
  std::vector<Clause> initial;  // premises, then the clauses of the negated goal
  std::vector<Step> trace;      // refutation (ancestors of the empty clause) in order
  std::optional<FiniteModel> countermodel;
  std::string note;
  int inferences = 0;
};

std::string to_string(ProverResult::Status s);

/// Refutes premises ∪ clausify(¬goal) with unrestricted Res, Fac,
/// ConstrElim, ParMod and eager VarElim, smallest clause first, with
/// subsumption and tautology deletion. Every inference goes through
/// apply_step, so a Proved trace replays from `initial`.
ProverResult prove(const std::vector<Clause>& premises, const F& goal, const ProverLimits& limits = {});
/// Refutation of a clause set (no goal).
ProverResult refute(const std::vector<Clause>& clauses, const ProverLimits& limits = {});

// ------------------------------------------------------- witness checking

struct CheckOptions {
  ProverLimits prover;
  EnumerationLimits models;
  bool use_prover = true;
  bool use_models = true;
};

struct WitnessReport {
  enum class Verdict { Pass, Fail, Unknown };
  struct Goal {
    Clause clause;  // clause of N
    ProverResult::Status status;
    std::string note;
  };
  std::vector<Goal> goals;          // prover part (empty when skipped)
  std::string prover_note;          // why the prover part was skipped
  bool models_checked = false;
  EnumerationStats model_stats;
  std::optional<FiniteModel> mismatch;  // model where ∃X̄ N and Nσ differ
  std::string mismatch_note;
  Verdict verdict = Verdict::Unknown;

  std::string to_string() const;
};

std::string to_string(WitnessReport::Verdict v);

/// (i) conclusion ⊢ Cσ for every clause C of N when σ is gfp-free;
/// (ii) ∃X̄ N ⇔ Nσ on finite models. Pass iff nothing fails and at least
/// one check completes. Throws Error(Arity) when σ does not fit N.
WitnessReport check_witness(const std::vector<Clause>& n, const std::vector<std::pair<std::string, int>>& xs,
                            const std::vector<Clause>& conclusion, const PredSubst& w, const CheckOptions& opts = {});

}  // namespace scanw

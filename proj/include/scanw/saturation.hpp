#pragma once

// Derivations: steps, replay with side-condition checks, trace text, the
// preprocessing/purification loop and the backtracking search.

#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scanw/calculus.hpp"
#include "scanw/logic.hpp"
#include "scanw/subsumption.hpp"

namespace scanw {

/// A literal of a numbered clause (1-based in trace text, 0-based here).
struct LitRef {
  int id = 0;
  int lit = 0;
};

struct Step {
  enum class Kind { Res, Fac, ConstrElim, ParMod, RedDel, VarElim, ExtPurDel, PurDel };
  Kind kind = Kind::Res;

  LitRef a;                // Res: P-side literal; Fac: first literal; ParMod: equation literal; PurDel: pointed literal
  LitRef b;                // Res: Q-side literal; Fac: second literal
  std::vector<int> sel;    // ConstrElim: selected literals of clause `a.id`
  int eq_dir = 0;          // ParMod: 0 default orientation, +1 left-to-right, -1 right-to-left
  int target = 0;          // ParMod: target clause id
  Position pos;            // ParMod: position in the target
  int clause = 0;          // RedDel / VarElim: affected clause
  int by = 0;              // RedDel: subsuming clause id, 0 for tautology
  int result = 0;          // new clause id (inferences, VarElim)
  std::string x;           // ExtPurDel
  int polarity = 0;        // ExtPurDel: +1 / -1

  // Filled in by apply_step.
  Clause conclusion;                 // inferences and VarElim
  PointedClause pointed;             // PurDel
  std::vector<Clause> deleted;       // RedDel, ExtPurDel, VarElim (old clause)
  std::vector<int> deleted_ids;
  std::vector<PurificationEntry> certificate;  // PurDel
  bool theory = false;               // produced by the theory (ParMod) phase

  bool is_inference() const { return kind == Kind::Res || kind == Kind::Fac || kind == Kind::ConstrElim || kind == Kind::ParMod; }
};

/// Numbered live clause set.
class State {
 public:
  State() = default;
  /// Ids 1..n in order.
  explicit State(const std::vector<Clause>& initial);

  bool has(int id) const { return live_.count(resolve(id)) != 0; }
  const Clause& get(int id) const;
  /// Adds a clause under `id`. If an equal clause is live, `id` becomes an
  /// alias of it and the live set is unchanged; returns false in that case.
  bool add(int id, const Clause& c);
  void erase(int id);
  int resolve(int id) const;
  int next_id() const { return next_id_; }
  int fresh_id() { return next_id_++; }
  ClauseSet clause_set() const;
  const std::map<int, Clause>& live() const { return live_; }
  /// Id of a live clause equal to c, or 0.
  int find(const Clause& c) const;

 private:
  std::map<int, Clause> live_;
  std::map<std::string, int> by_key_;
  std::map<int, int> alias_;
  int next_id_ = 1;
};

/// Applies one step to the state after checking its side condition; fills in
/// the step's derived fields. Throws Error(Invalid) with a reason.
void apply_step(State& st, Step& step, const std::vector<std::string>& xs);

struct Derivation {
  std::vector<Clause> initial;        // ids 1..n
  std::vector<std::string> xs;
  std::vector<Step> steps;
  std::vector<ClauseSet> sets;        // N_0 .. N_m
  std::map<int, Clause> final_ids;    // live clauses of N_m by id

  const ClauseSet& conclusion() const { return sets.back(); }
  /// No clause of the conclusion mentions a variable of xs.
  bool eliminating() const;
  /// Indices of PurDel steps.
  std::vector<size_t> purdel_indices() const;
  std::string trace() const;
};

/// Replays the steps from the initial clauses; throws Error(Invalid) with the
/// 1-based step index on a failed side condition.
Derivation replay(const std::vector<Clause>& initial, const std::vector<std::string>& xs, std::vector<Step> steps);

/// Trace text: one step per line, `#` comments.
std::vector<Step> parse_trace(const std::string& text);
std::string step_to_string(const Step& s);

bool mentions_any(const Clause& c, const std::vector<std::string>& xs);

struct SearchLimits {
  int max_steps = 50;                            // derivation length (theory steps excluded)
  std::chrono::milliseconds timeout{10000};
  int purify_budget = 40;                        // resolvents added per purification
  int max_branches = 2000;                       // purification attempts over the whole search
  int max_rounds = 6;                            // purification rounds per derivation
  int theory_budget = 3000;                      // ParMod inferences in the theory phase
  size_t max_clause_lits = 12;                   // purification diverges beyond this clause length
};

/// Records cooperative-cancellation state for a search.
struct Deadline {
  std::chrono::steady_clock::time_point end;
  explicit Deadline(std::chrono::milliseconds ms) : end(std::chrono::steady_clock::now() + ms) {}
  bool expired() const { return std::chrono::steady_clock::now() >= end; }
};

/// Preprocessing to a fixpoint: VarElim, tautology deletion, backward
/// subsumption deletion, ExtPurDel, non-redundant X̄ constraint factors.
/// Appends the applied steps and returns them applied to `st`.
void preprocess(State& st, const std::vector<std::string>& xs, std::vector<Step>& out, const Deadline* dl = nullptr);

/// Purification of the pointed clause (id, lit): adds non-⊴_{L⊥}^ve-subsumed
/// resolvents (with eager VarElim and backward subsumption, no tautology
/// deletion) until P is purified, then PurDel. Returns false (state
/// unspecified) when the budget is exhausted, a resolvent exceeds
/// `max_lits` literals, or the deadline passes.
bool purify(State& st, LitRef p, const std::vector<std::string>& xs, int budget, std::vector<Step>& out,
            const Deadline* dl = nullptr, size_t max_lits = 12);

/// Bounded ParMod saturation of the X̄-free clauses (run only when they
/// contain positive equations). Steps are flagged `theory`.
void theory_saturate(State& st, const std::vector<std::string>& xs, int budget, std::vector<Step>& out,
                     const Deadline* dl = nullptr);

struct SearchStats {
  int branches = 0;
  bool timed_out = false;
  bool exhausted = false;
};

/// Enumerates X̄-eliminating derivations (shortest purification sequences
/// first), each validated by replay, and passes them to `yield` until it
/// returns false or the limits are reached.
SearchStats search(const std::vector<Clause>& n, const std::vector<std::string>& xs, const SearchLimits& limits,
                   const std::function<bool(const Derivation&)>& yield);

/// First derivation found, if any.
std::optional<Derivation> find_derivation(const std::vector<Clause>& n, const std::vector<std::string>& xs,
                                          const SearchLimits& limits = {});

/// Removes theory-phase steps that no later step depends on and re-validates
/// by replay.
Derivation trim(const Derivation& d);

/// Number of steps counted against the step limit (theory steps excluded).
int counted_steps(const Derivation& d);

}  // namespace scanw

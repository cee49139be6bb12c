#pragma once

// Inference rules (constraint resolution, constraint factoring, constraint
// elimination, paramodulation), variable elimination, bounded resolution
// closures and the purification test.

#include <optional>
#include <string>
#include <vector>

#include "scanw/logic.hpp"
#include "scanw/subsumption.hpp"

namespace scanw {

/// True iff the designated literals are dual: same non-equality head and
/// arity, opposite polarity.
bool resolvable(const PointedClause& p, const PointedClause& q);

/// Res: t̄ ≄ t̄' ∨ C ∨ C' for P = L(t̄) ∨ C and Q = L(t̄')⊥ ∨ C', with Q renamed
/// apart from P. Throws Error(Invalid) when the pair is not resolvable.
Clause constraint_resolve(const PointedClause& p, const PointedClause& q);
/// The same, on raw literal lists (no canonicalization), for callers that
/// need to follow individual literals.
Lits constraint_resolve_raw(const PointedClause& p, const PointedClause& q);

/// Fac: keeps literal i, drops literal j and adds the argument-wise
/// disequations. Throws Error(Invalid) unless i ≠ j have the same head and
/// polarity.
Clause constraint_factor(const Clause& c, size_t i, size_t j);

/// ConstrElim on the selected constraint literals: applies the mgu of the
/// two sides to the rest of the clause. Returns nullopt when the sides are
/// not unifiable; throws Error(Invalid) when a selected literal is not a
/// constraint.
std::optional<Clause> constraint_eliminate(const Clause& c, const std::vector<size_t>& selection);
/// ConstrElim with a greedily chosen selection: constraints are added in
/// order while the block stays unifiable. Nullopt when no constraint can be
/// eliminated.
std::optional<Clause> constraint_eliminate_greedy(const Clause& c);

struct VarElimResult {
  Clause clause;
  bool applied = false;
};
/// Applies VarElim exhaustively (v ≄ t with v not a proper subterm of t).
VarElimResult variable_eliminate(const Clause& c);
/// variable_eliminate followed by removal of constraints t ≄ t (which
/// ConstrElim with the identity unifier removes). Used by the saturation
/// engine's eager normalization.
VarElimResult normalize_constraints(const Clause& c);

/// A subterm position: literal index, then a path of argument indices
/// (all 0-based). The path must be nonempty (literals are not terms).
struct Position {
  size_t lit = 0;
  std::vector<size_t> path;
  bool operator==(const Position& o) const { return lit == o.lit && path == o.path; }
};
std::string to_string(const Position& p);  // 1-based "lit.arg.arg"
/// Parses the 1-based dotted form; throws Error(Input).
Position parse_position(const std::string& s);
/// Subterm at a position, or nullptr if the position is invalid.
const Term* subterm_at(const Lits& c, const Position& p);

/// ParMod: from s ≃ t ∨ C (literal `eq_lit`, used left-to-right when
/// `left_to_right`, otherwise right-to-left) into target D at position p with
/// D|p = r: (C ∨ D[t]_p)σ, σ = mgu(s, r). The target is renamed apart from
/// the equation clause. Throws Error(Invalid) on a bad literal/position or
/// when s and r do not unify.
Clause paramodulate(const Clause& eq_clause, size_t eq_lit, bool left_to_right, const Clause& target,
                    const Position& pos);

struct Paramodulant {
  size_t eq_lit;
  bool left_to_right;
  Position pos;
  Clause result;
};
/// All paramodulants from `eq_clause` into `target`. By default variables
/// are neither rewritten (the "from" side is a variable) nor rewritten into.
std::vector<Paramodulant> all_paramodulants(const Clause& eq_clause, const Clause& target, bool into_vars = false);

/// Res_P^{≤depth}(seed): clauses reachable from the seed by at most `depth`
/// rounds of resolution with P (no redundancy elimination).
ClauseSet res_p_bounded(const PointedClause& p, const ClauseSet& seed, int depth);

/// One P-resolvable pointed clause of N, its resolvent with P, and the
/// clauses of N that ⊴_{L⊥}^ve-subsume the resolvent.
struct PurificationEntry {
  PointedClause q;
  Clause resolvent;
  std::vector<Clause> subsumers;
};

struct PurifiedResult {
  bool purified = false;
  std::vector<PurificationEntry> entries;  // every P-resolvable pointed clause of N
  /// Certificate: a subsumer chosen for every entry (valid when purified).
  std::vector<Clause> certificate() const;
};

/// P is purified in N (P itself is excluded from N). With `all_subsumers`
/// every subsuming clause is listed per entry; otherwise the first suffices.
PurifiedResult is_purified(const PointedClause& p, const ClauseSet& n, VelimCache& cache, bool all_subsumers = false);
PurifiedResult is_purified(const PointedClause& p, const ClauseSet& n, bool all_subsumers = false);

/// Polarity (+1 / -1) for which ExtPurDel_X applies to N, + preferred, or
/// nullopt when neither applies.
std::optional<int> ext_purity_check(const ClauseSet& n, const std::string& x);

/// True iff the designated literal of P has a predicate variable head and
/// every occurrence of that variable in P has the designated polarity.
bool is_one_sided(const PointedClause& p);

}  // namespace scanw

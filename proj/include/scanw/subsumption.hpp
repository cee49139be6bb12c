#pragma once

// Tautologies, subsumption, L-injective subsumption, variable-elimination
// rewriting and their combination.

#include <map>
#include <string>
#include <vector>

#include "scanw/logic.hpp"

namespace scanw {

/// True iff the clause contains some literal together with its dual.
bool is_tautology(const Clause& c);

/// C ⊴ E: some substitution σ maps every literal of C into E.
bool subsumes(const Clause& c, const Clause& e);
/// Same as subsumes(), also returning a witnessing matcher.
bool subsumes(const Clause& c, const Clause& e, Subst* matcher);

/// C ⊴_L E: as subsumes(), with σ required to be injective on the literals of
/// C that have L's head and polarity (distinct such literals get distinct images).
bool subsumes_L(const Clause& c, const Clause& e, const LitSpec& l);

/// Memo table for variable-elimination closures, keyed by canonical clause.
class VelimCache {
 public:
  const std::vector<Clause>& closure(const Clause& c);
  const std::vector<PointedClause>& closure(const PointedClause& p);
  void clear() { plain_.clear(); pointed_.clear(); }

 private:
  std::map<std::string, std::vector<Clause>> plain_;
  std::map<std::pair<std::string, int>, std::vector<PointedClause>> pointed_;
};

/// One →_ve step on literal i (a constraint v ≄ t or t ≄ v with v not a
/// proper subterm of t): drops the literal and applies [v ← t]. Returns the
/// raw (uncanonicalized) literal list, or nullopt when i is not eliminable.
std::optional<Lits> velim_step(const Lits& c, size_t i);

/// {C' | C →_ve* C'}, including C itself, in breadth-first order.
std::vector<Clause> velim_closure(const Clause& c);
/// Pointed variant: the designated literal is tracked through every step.
std::vector<PointedClause> velim_closure(const PointedClause& p);

/// S ⊴_L^ve E: S ⊴_L E' for some E' in the variable-elimination closure of E.
bool subsumes_L_velim(const Clause& s, const Clause& e, const LitSpec& l);
bool subsumes_L_velim(const Clause& s, const Clause& e, const LitSpec& l, VelimCache& cache);

}  // namespace scanw

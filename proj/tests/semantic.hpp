#pragma once

// Finite-model oracles for tests: semantic equivalence and entailment of
// predicate expressions and clauses over all small models.

#include <string>
#include <vector>

#include "scanw/verify.hpp"

namespace scanw::testing {

inline ModelSignature signature_of(const std::vector<PredExpr>& es, const std::vector<Clause>& cs = {}) {
  ModelSignature sig;
  for (const auto& e : es) sig.add_formula(e.body);
  sig.add_clauses(cs);
  return sig;
}

/// First model (size ≤ max_size) where the extensions differ, or nullopt.
inline std::optional<FiniteModel> extension_mismatch(const PredExpr& a, const PredExpr& b, int max_size = 3) {
  EnumerationLimits lim;
  lim.max_size = max_size;
  std::optional<FiniteModel> bad;
  enumerate_models(signature_of({a, b}), lim, [&](const FiniteModel& m) {
    if (extension(m, Env{}, a) == extension(m, Env{}, b)) return true;
    bad = m;
    return false;
  });
  return bad;
}

inline bool equivalent_in_models(const PredExpr& a, const PredExpr& b, int max_size = 3) {
  return !extension_mismatch(a, b, max_size).has_value();
}

/// The extension of a is contained in that of b in every model of size ≤ max_size.
inline bool implies_in_models(const PredExpr& a, const PredExpr& b, int max_size = 3) {
  EnumerationLimits lim;
  lim.max_size = max_size;
  bool ok = true;
  enumerate_models(signature_of({a, b}), lim, [&](const FiniteModel& m) {
    Relation ra = extension(m, Env{}, a), rb = extension(m, Env{}, b);
    for (size_t i = 0; i < ra.bits.size(); ++i)
      if (ra.bits[i] && !rb.bits[i]) ok = false;
    return ok;
  });
  return ok;
}

/// Premises entail the conclusion in every model of size ≤ max_size.
inline bool entails_in_models(const std::vector<Clause>& premises, const Clause& conclusion, int max_size = 3) {
  std::vector<Clause> all = premises;
  all.push_back(conclusion);
  ModelSignature sig;
  sig.add_clauses(all);
  EnumerationLimits lim;
  lim.max_size = max_size;
  bool ok = true;
  // The enumerator updates one model per domain size in place, so the
  // compiled checkers are rebuilt only when the model object changes.
  const FiniteModel* current = nullptr;
  int current_n = 0;
  std::optional<ClauseChecker> pre, con;
  enumerate_models(sig, lim, [&](const FiniteModel& m) {
    if (&m != current || m.n != current_n) {
      current = &m;
      current_n = m.n;
      pre.emplace(m, premises);
      con.emplace(m, std::vector<Clause>{conclusion});
    }
    if (pre->holds() && !con->holds()) ok = false;
    return ok;
  });
  return ok;
}


}  // namespace scanw::testing

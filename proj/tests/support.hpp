#pragma once

// Helpers shared by the test binaries: terse clause construction, random
// instance generators and the brute-force oracles used by property tests.

#include <ostream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "scanw/calculus.hpp"
#include "scanw/formula.hpp"
#include "scanw/frontend.hpp"
#include "scanw/logic.hpp"
#include "scanw/subsumption.hpp"

namespace scanw {
inline void PrintTo(const Clause& c, std::ostream* os) { *os << to_string(c); }
inline void PrintTo(const PointedClause& c, std::ostream* os) { *os << to_string(c); }
}  // namespace scanw

namespace scanw::testing {

/// Index of the first literal of `c` equal to `l` (as written, canonical
/// variable names), or throws.
inline size_t index_of(const Clause& c, const Literal& l) {
  for (size_t i = 0; i < c.size(); ++i)
    if (c[i].same(l)) return i;
  throw Error(Error::Kind::Invalid, "literal not in clause");
}

inline bool is_predvar_name(const std::string& h) { return h == "X" || h == "Y" || h == "Z" || h == "X1" || h == "X2"; }

/// Parses a clause in problem syntax; heads X, Y, Z, X1, X2 are predicate
/// variables.
inline Lits raw(const std::string& text) {
  Signature sig;
  Lits out = parse_lits(text, sig);
  for (auto& l : out)
    if (l.kind == Head::Pred && is_predvar_name(l.head)) l.kind = Head::PredVar;
  return out;
}

inline Clause C(const std::string& text) { return Clause(raw(text)); }

/// Pointed clause: the designated literal is marked by a leading '_' in the
/// text, e.g. "B(?u,?v) | _~X(?u) | X(?v)".
inline PointedClause P(const std::string& text) {
  std::string t;
  int idx = -1, k = 0, depth = 0;
  bool at_start = true;
  for (char c : text) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == '|' && depth == 0) {
      ++k;
      at_start = true;
    } else if (c == '_' && at_start) {
      idx = k;
      continue;
    } else if (c != ' ') {
      at_start = false;
    }
    t += c;
  }
  if (idx < 0) throw Error(Error::Kind::Input, "no designated literal in " + text);
  return PointedClause::from(raw(t), idx);
}

inline ClauseSet S(std::initializer_list<const char*> cs) {
  ClauseSet s;
  for (const char* c : cs) s.insert(C(c));
  return s;
}

// ------------------------------------------------------------ generators

/// Random terms/literals over a tiny signature: constants a, b; unary f;
/// binary g (only when `with_binary`); variables x, y, z; predicates A/1,
/// B/2; predicate variable X/1.
struct Gen {
  std::mt19937 rng;
  bool with_binary = false;
  explicit Gen(unsigned seed) : rng(seed) {}

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }
  bool coin(double p = 0.5) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; }

  Term term(int depth, const std::vector<std::string>& vars = {"x", "y", "z"}) {
    int choice = pick(depth > 0 ? 4 : 3);
    if (choice == 0 && !vars.empty()) return Term::var(vars[static_cast<size_t>(pick(static_cast<int>(vars.size())))]);
    if (choice == 1) return Term::app("a");
    if (choice == 2) return Term::app("b");
    if (with_binary && coin()) return Term::app("g", {term(depth - 1, vars), term(depth - 1, vars)});
    return Term::app("f", {term(depth - 1, vars)});
  }

  Literal literal(int depth, bool allow_eq = true, bool allow_x = true,
                  const std::vector<std::string>& vars = {"x", "y", "z"}) {
    int k = pick(allow_eq ? 4 : 3);
    bool pos = coin();
    if (k == 0) return Literal::pred(pos, "A", {term(depth, vars)});
    if (k == 1) return Literal::pred(pos, "B", {term(depth, vars), term(depth, vars)});
    if (k == 2) {
      if (allow_x) return Literal::predvar(pos, "X", {term(depth, vars)});
      return Literal::pred(pos, "A", {term(depth, vars)});
    }
    return Literal::eq(pos, term(depth, vars), term(depth, vars));
  }

  Lits lits(int max_lits, int depth, bool allow_eq = true, bool allow_x = true,
            const std::vector<std::string>& vars = {"x", "y", "z"}) {
    int n = 1 + pick(max_lits);
    Lits out;
    for (int i = 0; i < n; ++i) out.push_back(literal(depth, allow_eq, allow_x, vars));
    return out;
  }
};

// ---------------------------------------------------------------- oracles

inline void all_subterms(const Term& t, std::set<Term>& out) {
  out.insert(t);
  for (const auto& a : t.args) all_subterms(a, out);
}

/// Enumerates every substitution mapping the variables of `c` to subterms
/// of `e` and checks containment. This is complete: in a successful matcher
/// every variable of c that occurs in a literal is mapped to a subterm of e.
inline bool brute_subsumes(const Clause& c, const Clause& e, const LitSpec* inj = nullptr) {
  std::set<std::string> vs = c.vars();
  std::set<Term> sub;
  for (const auto& l : e.lits())
    for (const auto& a : l.args) all_subterms(a, sub);
  std::vector<std::string> vars(vs.begin(), vs.end());
  std::vector<Term> cands(sub.begin(), sub.end());
  if (cands.empty() && !vars.empty()) return false;
  std::vector<size_t> idx(vars.size(), 0);
  for (;;) {
    Subst s;
    for (size_t i = 0; i < vars.size(); ++i) s[vars[i]] = cands[idx[i]];
    Lits img = apply_subst(c.lits(), s);
    bool ok = true;
    for (const auto& l : img) {
      bool found = false;
      for (const auto& m : e.lits()) found = found || l.same(m);
      ok = ok && found;
    }
    if (ok && inj) {
      // Injectivity on the designated literal class.
      for (size_t i = 0; ok && i < c.size(); ++i)
        for (size_t j = i + 1; ok && j < c.size(); ++j)
          if (inj->matches(c[i]) && inj->matches(c[j]) && img[i].same(img[j])) ok = false;
    }
    if (ok) return true;
    size_t k = 0;
    while (k < idx.size()) {
      if (++idx[k] < cands.size()) break;
      idx[k] = 0;
      ++k;
    }
    if (k == idx.size()) return false;
  }
}

}  // namespace scanw::testing

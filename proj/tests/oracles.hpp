#pragma once

// Independent oracles and random generators shared by the property tests and
// the acceptance runner.

#include <algorithm>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>

#include "support.hpp"

namespace scanw::testing {

const LitSpec kX{Head::PredVar, "X", true};
const LitSpec kNotX{Head::PredVar, "X", false};

// ⊴_L via the fresh-predicate reduction: for every injective assignment f of
// S's L-literals to C's L-literals, tag the i-th pair with a fresh predicate
// and ask for plain subsumption.
inline bool reduction_subsumes_L(const Clause& s, const Clause& c, const LitSpec& l) {
  std::vector<size_t> sl, cl;
  for (size_t i = 0; i < s.size(); ++i)
    if (l.matches(s[i])) sl.push_back(i);
  for (size_t i = 0; i < c.size(); ++i)
    if (l.matches(c[i])) cl.push_back(i);
  if (sl.size() > cl.size()) return false;
  std::vector<size_t> assign(sl.size());
  std::vector<bool> used(cl.size(), false);
  std::function<bool(size_t)> rec = [&](size_t k) -> bool {
    if (k == sl.size()) {
      Lits s2 = s.lits(), c2 = c.lits();
      for (size_t i = 0; i < sl.size(); ++i) {
        std::string tag = "Tag" + std::to_string(i);
        s2[sl[i]] = Literal::pred(true, tag, s2[sl[i]].args);
        c2[cl[assign[i]]] = Literal::pred(true, tag, c2[cl[assign[i]]].args);
      }
      return brute_subsumes(Clause(s2), Clause(c2));
    }
    for (size_t j = 0; j < cl.size(); ++j) {
      if (used[j]) continue;
      used[j] = true;
      assign[k] = j;
      bool ok = rec(k + 1);
      used[j] = false;
      if (ok) return true;
    }
    return false;
  };
  return rec(0);
}

// Independent closure under →_ve by direct rule application on raw lists.
inline std::set<std::string> oracle_velim_keys(const Clause& c) {
  std::set<std::string> seen;
  std::vector<Lits> todo{c.lits()};
  while (!todo.empty()) {
    Lits cur = todo.back();
    todo.pop_back();
    if (!seen.insert(Clause(cur).key()).second) continue;
    for (size_t i = 0; i < cur.size(); ++i) {
      if (cur[i].pos || cur[i].kind != Head::Eq) continue;
      for (int side = 0; side < 2; ++side) {
        const Term& x = cur[i].args[side];
        const Term& t = cur[i].args[1 - side];
        if (!x.is_var || occurs_properly(x.name, t)) continue;
        Lits rest;
        for (size_t k = 0; k < cur.size(); ++k)
          if (k != i) rest.push_back(apply_subst(cur[k], Subst{{x.name, t}}));
        todo.push_back(rest);
      }
    }
  }
  return seen;
}


/// Random clause pair for the subsumption oracles: both clauses have at most
/// 4 literals and term depth at most 2; E is biased toward containing an
/// instance of S.
inline std::pair<Clause, Clause> random_subsumption_pair(Gen& g) {
  Clause s(g.lits(3, 1, true, true, {"x", "y"}));
  Lits noise = g.lits(4, 2, true, true, {"x", "y", "z"});
  Lits el;
  if (g.coin(0.5)) {
    Subst inst{{"u0", g.term(1, {"x", "z"})}, {"u1", g.term(1, {"y"})}};
    el = apply_subst(s.lits(), inst);
    // Hide one argument behind a variable constraint that →_ve can undo.
    if (g.coin(0.4) && !el[0].args.empty()) {
      Term t = el[0].args[0];
      el[0].args[0] = Term::var("w2");
      el.push_back(Literal::eq(false, Term::var("w2"), t));
    }
    if (g.coin(0.5)) el.push_back(Literal::eq(false, Term::var("w"), g.term(1, {"x"})));
  }
  el.insert(el.end(), noise.begin(), noise.end());
  if (el.size() > 4) el.resize(4);
  return {s, Clause(el)};
}

/// Random one-sided pointed clause: a designated X-literal plus literals in
/// which X only occurs with the designated polarity.
inline PointedClause random_one_sided(Gen& g) {
  bool pos = g.coin();
  Lits ls = {Literal::predvar(pos, "X", {g.term(1, {"x", "y"})})};
  int extra = g.pick(3);
  for (int i = 0; i < extra; ++i) {
    Literal l = g.literal(1, true, true, {"x", "y"});
    if (l.kind == Head::PredVar) l.pos = pos;
    ls.push_back(l);
  }
  return PointedClause::from(ls, 0);
}

/// Random N, closed under adding normalized resolvents with P until P is
/// purified (at most a few rounds); nullopt if that does not happen.
inline std::optional<ClauseSet> purified_set(Gen& g, const PointedClause& p) {
  ClauseSet n;
  int size = 1 + g.pick(3);
  for (int i = 0; i < size; ++i) n.insert(Clause(g.lits(2, 1, true, true, {"z", "w"})));
  n.erase(p.clause);
  for (int round = 0; round < 4; ++round) {
    PurifiedResult r = is_purified(p, n);
    if (r.purified) return n;
    for (const auto& e : r.entries)
      if (e.subsumers.empty()) n.insert(normalize_constraints(e.resolvent).clause);
    n.erase(p.clause);
  }
  if (is_purified(p, n).purified) return n;
  return std::nullopt;
}


}  // namespace scanw::testing

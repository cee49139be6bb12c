#include "scanw/calculus.hpp"

#include <functional>
#include <sstream>

namespace scanw {

bool resolvable(const PointedClause& p, const PointedClause& q) {
  const Literal& a = p.lit();
  const Literal& b = q.lit();
  return a.kind != Head::Eq && a.kind == b.kind && a.head == b.head && a.pos != b.pos && a.args.size() == b.args.size();
}

Lits constraint_resolve_raw(const PointedClause& p, const PointedClause& q) {
  if (!resolvable(p, q)) throw Error(Error::Kind::Invalid, "not resolvable: " + to_string(p) + " with " + to_string(q));
  std::set<std::string> avoid = p.clause.vars();
  Lits q2 = rename_apart(q.clause, avoid);
  const Literal& lp = p.lit();
  const Literal& lq = q2[static_cast<size_t>(q.index)];
  Lits out;
  for (size_t i = 0; i < lp.args.size(); ++i) out.push_back(Literal::eq(false, lp.args[i], lq.args[i]));
  for (size_t i = 0; i < p.clause.size(); ++i)
    if (static_cast<int>(i) != p.index) out.push_back(p.clause[i]);
  for (size_t i = 0; i < q2.size(); ++i)
    if (static_cast<int>(i) != q.index) out.push_back(q2[i]);
  return out;
}

Clause constraint_resolve(const PointedClause& p, const PointedClause& q) { return Clause(constraint_resolve_raw(p, q)); }

Clause constraint_factor(const Clause& c, size_t i, size_t j) {
  if (i >= c.size() || j >= c.size() || i == j) throw Error(Error::Kind::Invalid, "factoring: invalid literal pair");
  const Literal& a = c[i];
  const Literal& b = c[j];
  if (a.pos != b.pos || a.kind != b.kind || a.head != b.head || a.args.size() != b.args.size())
    throw Error(Error::Kind::Invalid, "factoring: literals differ in head or polarity");
  Lits out;
  for (size_t k = 0; k < a.args.size(); ++k) out.push_back(Literal::eq(false, a.args[k], b.args[k]));
  for (size_t k = 0; k < c.size(); ++k)
    if (k != j) out.push_back(c[k]);
  return Clause(out);
}

std::optional<Clause> constraint_eliminate(const Clause& c, const std::vector<size_t>& selection) {
  std::vector<Term> lhs, rhs;
  std::set<size_t> sel;
  for (size_t i : selection) {
    if (i >= c.size() || !c[i].is_constraint())
      throw Error(Error::Kind::Invalid, "constraint elimination: selected literal is not a disequation");
    if (!sel.insert(i).second) throw Error(Error::Kind::Invalid, "constraint elimination: duplicate selection");
    lhs.push_back(c[i].args[0]);
    rhs.push_back(c[i].args[1]);
  }
  if (sel.empty()) throw Error(Error::Kind::Invalid, "constraint elimination: empty selection");
  auto s = mgu(lhs, rhs);
  if (!s) return std::nullopt;
  Lits rest;
  for (size_t i = 0; i < c.size(); ++i)
    if (!sel.count(i)) rest.push_back(c[i]);
  return Clause(apply_subst(rest, *s));
}

std::optional<Clause> constraint_eliminate_greedy(const Clause& c) {
  std::vector<size_t> sel;
  Subst s;
  for (size_t i = 0; i < c.size(); ++i) {
    if (!c[i].is_constraint()) continue;
    Subst t = s;
    if (unify_into(c[i].args[0], c[i].args[1], t)) {
      s = t;
      sel.push_back(i);
    }
  }
  if (sel.empty()) return std::nullopt;
  return constraint_eliminate(c, sel);
}

namespace {
VarElimResult velim_fix(const Clause& c, bool drop_trivial) {
  VarElimResult r{c, false};
  for (;;) {
    bool changed = false;
    const Lits ls = r.clause.lits();
    for (size_t i = 0; i < ls.size() && !changed; ++i) {
      if (!ls[i].is_constraint()) continue;
      if (auto next = velim_step(ls, i)) {
        r.clause = Clause(*next);
        changed = true;
      } else if (drop_trivial && ls[i].args[0] == ls[i].args[1]) {
        Lits rest;
        for (size_t k = 0; k < ls.size(); ++k)
          if (k != i) rest.push_back(ls[k]);
        r.clause = Clause(rest);
        changed = true;
      }
    }
    if (!changed) return r;
    r.applied = true;
  }
}
}  // namespace

VarElimResult variable_eliminate(const Clause& c) { return velim_fix(c, false); }
VarElimResult normalize_constraints(const Clause& c) { return velim_fix(c, true); }

// --------------------------------------------------------------- ParMod

std::string to_string(const Position& p) {
  std::string s = std::to_string(p.lit + 1);
  for (size_t a : p.path) s += "." + std::to_string(a + 1);
  return s;
}

Position parse_position(const std::string& s) {
  Position p;
  std::vector<size_t> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, '.')) {
    if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos)
      throw Error(Error::Kind::Input, "malformed position '" + s + "'");
    size_t v = std::stoul(item);
    if (v == 0) throw Error(Error::Kind::Input, "positions are 1-based: '" + s + "'");
    parts.push_back(v - 1);
  }
  if (parts.size() < 2) throw Error(Error::Kind::Input, "position must address a term: '" + s + "'");
  p.lit = parts[0];
  p.path.assign(parts.begin() + 1, parts.end());
  return p;
}

const Term* subterm_at(const Lits& c, const Position& p) {
  if (p.lit >= c.size() || p.path.empty()) return nullptr;
  const std::vector<Term>* args = &c[p.lit].args;
  const Term* t = nullptr;
  for (size_t a : p.path) {
    if (a >= args->size()) return nullptr;
    t = &(*args)[a];
    args = &t->args;
  }
  return t;
}

namespace {
Term replace_in_term(const Term& t, const std::vector<size_t>& path, size_t k, const Term& by) {
  if (k == path.size()) return by;
  Term r = t;
  r.args[path[k]] = replace_in_term(t.args[path[k]], path, k + 1, by);
  return r;
}

Lits replace_at(const Lits& c, const Position& p, const Term& by) {
  Lits r = c;
  Literal& l = r[p.lit];
  l.args[p.path[0]] = replace_in_term(l.args[p.path[0]], p.path, 1, by);
  return r;
}

std::optional<Clause> paramod_raw(const Lits& e, size_t eq_lit, bool l2r, const Lits& d, const Position& pos) {
  const Literal& eq = e[eq_lit];
  const Term& s = eq.args[l2r ? 0 : 1];
  const Term& t = eq.args[l2r ? 1 : 0];
  const Term* r = subterm_at(d, pos);
  if (!r) throw Error(Error::Kind::Invalid, "paramodulation: invalid position " + to_string(pos));
  auto sigma = mgu({s}, {*r});
  if (!sigma) return std::nullopt;
  Lits out;
  for (size_t i = 0; i < e.size(); ++i)
    if (i != eq_lit) out.push_back(e[i]);
  for (auto& l : replace_at(d, pos, t)) out.push_back(l);
  return Clause(apply_subst(out, *sigma));
}

void check_eq_lit(const Clause& e, size_t eq_lit) {
  if (eq_lit >= e.size() || e[eq_lit].kind != Head::Eq || !e[eq_lit].pos)
    throw Error(Error::Kind::Invalid, "paramodulation: literal is not a positive equation");
}
}  // namespace

Clause paramodulate(const Clause& eq_clause, size_t eq_lit, bool left_to_right, const Clause& target,
                    const Position& pos) {
  check_eq_lit(eq_clause, eq_lit);
  Lits d = rename_apart(target, eq_clause.vars());
  auto r = paramod_raw(eq_clause.lits(), eq_lit, left_to_right, d, pos);
  if (!r) throw Error(Error::Kind::Invalid, "paramodulation: no unifier at position " + to_string(pos));
  return *r;
}

std::vector<Paramodulant> all_paramodulants(const Clause& eq_clause, const Clause& target, bool into_vars) {
  std::vector<Paramodulant> out;
  Lits d = rename_apart(target, eq_clause.vars());
  for (size_t i = 0; i < eq_clause.size(); ++i) {
    const Literal& eq = eq_clause[i];
    if (eq.kind != Head::Eq || !eq.pos || eq.args[0] == eq.args[1]) continue;
    for (bool l2r : {true, false}) {
      const Term& s = eq.args[l2r ? 0 : 1];
      if (s.is_var && !into_vars) continue;
      for (size_t j = 0; j < d.size(); ++j) {
        std::function<void(const Term&, Position&)> walk = [&](const Term& t, Position& pos) {
          if (!t.is_var || into_vars) {
            if (auto r = paramod_raw(eq_clause.lits(), i, l2r, d, pos)) out.push_back({i, l2r, pos, *r});
          }
          for (size_t a = 0; a < t.args.size(); ++a) {
            pos.path.push_back(a);
            walk(t.args[a], pos);
            pos.path.pop_back();
          }
        };
        for (size_t a = 0; a < d[j].args.size(); ++a) {
          Position pos{j, {a}};
          walk(d[j].args[a], pos);
        }
      }
    }
  }
  return out;
}

// ------------------------------------------------------ closures & purity

ClauseSet res_p_bounded(const PointedClause& p, const ClauseSet& seed, int depth) {
  ClauseSet all = seed;
  std::vector<Clause> frontier = seed.clauses();
  for (int k = 0; k < depth && !frontier.empty(); ++k) {
    std::vector<Clause> next;
    for (const auto& c : frontier) {
      for (size_t j = 0; j < c.size(); ++j) {
        PointedClause q(c, static_cast<int>(j));
        if (!resolvable(p, q)) continue;
        Clause r = constraint_resolve(p, q);
        if (all.insert(r)) next.push_back(r);
      }
    }
    frontier = std::move(next);
  }
  return all;
}

std::vector<Clause> PurifiedResult::certificate() const {
  std::vector<Clause> out;
  for (const auto& e : entries) {
    if (e.subsumers.empty()) throw Error(Error::Kind::Invalid, "no certificate: pointed clause is not purified");
    out.push_back(e.subsumers.front());
  }
  return out;
}

PurifiedResult is_purified(const PointedClause& p, const ClauseSet& n, VelimCache& cache, bool all_subsumers) {
  PurifiedResult res;
  res.purified = true;
  const LitSpec spec = LitSpec::of(p.lit()).dual();
  std::vector<Clause> others;
  for (const auto& c : n)
    if (c != p.clause) others.push_back(c);
  for (const auto& c : others) {
    for (size_t j = 0; j < c.size(); ++j) {
      PointedClause q(c, static_cast<int>(j));
      if (!resolvable(p, q)) continue;
      PurificationEntry e{q, constraint_resolve(p, q), {}};
      for (const auto& s : others) {
        if (subsumes_L_velim(s, e.resolvent, spec, cache)) {
          e.subsumers.push_back(s);
          if (!all_subsumers) break;
        }
      }
      if (e.subsumers.empty()) res.purified = false;
      res.entries.push_back(std::move(e));
    }
  }
  return res;
}

PurifiedResult is_purified(const PointedClause& p, const ClauseSet& n, bool all_subsumers) {
  VelimCache cache;
  return is_purified(p, n, cache, all_subsumers);
}

std::optional<int> ext_purity_check(const ClauseSet& n, const std::string& x) {
  bool all_pos = true, all_neg = true;
  for (const auto& c : n) {
    bool has_pos = false, has_neg = false, has = false;
    for (const auto& l : c.lits()) {
      if (l.kind != Head::PredVar || l.head != x) continue;
      has = true;
      (l.pos ? has_pos : has_neg) = true;
    }
    if (!has) continue;
    all_pos = all_pos && has_pos;
    all_neg = all_neg && has_neg;
  }
  if (all_pos) return 1;
  if (all_neg) return -1;
  return std::nullopt;
}

bool is_one_sided(const PointedClause& p) {
  const Literal& d = p.lit();
  if (d.kind != Head::PredVar) return false;
  for (const auto& l : p.clause.lits())
    if (l.kind == Head::PredVar && l.head == d.head && l.pos != d.pos) return false;
  return true;
}

}  // namespace scanw

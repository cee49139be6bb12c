#include "scanw/witness.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "scanw/subsumption.hpp"

namespace scanw {

// ----------------------------------------------------------------- names

std::vector<Term> fresh_constants(size_t k, NameGen& names) {
  std::vector<Term> out;
  for (size_t i = 0; i < k; ++i) out.push_back(Term::app(names.fresh("c")));
  return out;
}

namespace {
void reserve_term(const Term& t, NameGen& g) {
  g.reserve(t.name);
  for (const auto& a : t.args) reserve_term(a, g);
}
}  // namespace

NameGen names_for(const std::vector<Clause>& clauses, const std::vector<std::string>& extra) {
  NameGen g;
  for (const auto& c : clauses)
    for (const auto& l : c.lits()) {
      if (!l.head.empty()) g.reserve(l.head);
      for (const auto& a : l.args) reserve_term(a, g);
    }
  for (const auto& e : extra) g.reserve(e);
  return g;
}

std::vector<std::string> param_names(size_t arity, const std::string& base) {
  if (arity == 1) return {base};
  std::vector<std::string> out;
  for (size_t i = 1; i <= arity; ++i) out.push_back(base + std::to_string(i));
  return out;
}

// ------------------------------------------------------- closures over c̄

namespace {

Literal dual_at(const Literal& l, const std::vector<Term>& args) {
  Literal d = l.dual();
  d.args = args;
  return d;
}

/// Adds `c` (normalized) to `s` unless subsumed; removes members it subsumes.
bool reduce_into(std::vector<Clause>& s, const Clause& raw) {
  Clause c = normalize_constraints(raw).clause;
  if (is_tautology(c)) return false;
  for (const auto& m : s)
    if (subsumes(m, c)) return false;
  s.erase(std::remove_if(s.begin(), s.end(), [&](const Clause& m) { return subsumes(c, m); }), s.end());
  s.push_back(c);
  return true;
}

ClauseSet to_set(const std::vector<Clause>& v) {
  ClauseSet s;
  for (const auto& c : v) s.insert(c);
  return s;
}

Term replace_consts(const Term& t, const std::map<std::string, Term>& m) {
  if (!t.is_var && t.args.empty()) {
    auto it = m.find(t.name);
    if (it != m.end()) return it->second;
  }
  Term r = t;
  for (auto& a : r.args) a = replace_consts(a, m);
  return r;
}

Lits replace_consts(const Lits& ls, const std::map<std::string, Term>& m) {
  Lits out = ls;
  for (auto& l : out)
    for (auto& a : l.args) a = replace_consts(a, m);
  return out;
}

}  // namespace

std::optional<ClauseSet> lres(const PointedClause& p, const std::vector<Term>& consts, int budget, size_t max_lits) {
  const Literal& L = p.lit();
  if (L.args.size() != consts.size()) throw Error(Error::Kind::Arity, "lres: wrong number of constants");
  LitSpec dual = LitSpec::of(L).dual();
  std::vector<Clause> s = {Clause(Lits{dual_at(L, consts)})};
  std::vector<Clause> queue = s;
  int inferences = 0;
  while (!queue.empty()) {
    Clause c = queue.front();
    queue.erase(queue.begin());
    if (std::find(s.begin(), s.end(), c) == s.end()) continue;  // removed by subsumption
    for (size_t i = 0; i < c.size(); ++i) {
      if (!dual.matches(c[i])) continue;
      if (++inferences > budget) return std::nullopt;
      Clause r = constraint_resolve(p, PointedClause(c, static_cast<int>(i)));
      Clause nr = normalize_constraints(r).clause;
      if (nr.size() > max_lits) return std::nullopt;
      if (reduce_into(s, r)) queue.push_back(nr);
    }
  }
  return to_set(s);
}

ClauseSet b_k(const PointedClause& p, int k, const std::vector<Term>& consts, size_t max_clauses) {
  const Literal& L = p.lit();
  if (L.args.size() != consts.size()) throw Error(Error::Kind::Arity, "b_k: wrong number of constants");
  LitSpec dual = LitSpec::of(L).dual();
  // Decompose P into designated literal, C and the L^⊥ literals.
  Lits rest;
  std::vector<std::vector<Term>> ts;
  for (size_t i = 0; i < p.clause.size(); ++i) {
    if (static_cast<int>(i) == p.index) continue;
    if (dual.matches(p.clause[i])) ts.push_back(p.clause[i].args);
    else rest.push_back(p.clause[i]);
  }
  std::vector<Clause> cur = {Clause()};  // B^0 = {⊥}
  std::set<std::string> pvars = p.clause.vars();
  for (int step = 0; step < k; ++step) {
    std::vector<Clause> next = {Clause(Lits{dual_at(L, consts)})};
    // Enumerate tuples (R_1..R_p) over cur.
    std::vector<size_t> idx(ts.size(), 0);
    size_t total = 1;
    for (size_t i = 0; i < ts.size(); ++i) {
      total *= cur.size();
      if (total > max_clauses) throw Error(Error::Kind::Budget, "b_k: iterate too large");
    }
    for (size_t n = 0; n < total; ++n) {
      size_t rem = n;
      Lits lits;
      for (size_t j = 0; j < L.args.size(); ++j) lits.push_back(Literal::eq(false, consts[j], L.args[j]));
      lits.insert(lits.end(), rest.begin(), rest.end());
      std::set<std::string> avoid = pvars;
      for (size_t i = 0; i < ts.size(); ++i) {
        const Clause& r = cur[rem % cur.size()];
        rem /= cur.size();
        Lits rl = rename_apart(r, avoid);
        collect_vars(rl, avoid);
        std::map<std::string, Term> m;
        for (size_t j = 0; j < consts.size(); ++j) m.emplace(consts[j].name, ts[i][j]);
        Lits inst = replace_consts(rl, m);
        lits.insert(lits.end(), inst.begin(), inst.end());
      }
      reduce_into(next, Clause(lits));
      if (next.size() > max_clauses) throw Error(Error::Kind::Budget, "b_k: iterate too large");
    }
    cur = std::move(next);
  }
  return to_set(cur);
}

PredExpr clauses_to_pred(const ClauseSet& s, const std::vector<Term>& consts) {
  PredExpr e;
  e.params = param_names(consts.size());
  std::set<std::string> avoid(e.params.begin(), e.params.end());
  std::map<std::string, Term> m;
  for (size_t j = 0; j < consts.size(); ++j) m.emplace(consts[j].name, Term::var(e.params[j]));
  std::vector<F> conj;
  for (const auto& c : s) {
    Lits ls = replace_consts(rename_apart(c, avoid), m);
    std::vector<std::string> vs;
    std::vector<F> disj;
    for (const auto& l : ls) {
      disj.push_back(f_lit(l));
      for (const auto& a : l.args) collect_vars_ordered(a, vs);
    }
    std::vector<std::string> bound;
    for (const auto& v : vs)
      if (!avoid.count(v) && std::find(bound.begin(), bound.end(), v) == bound.end()) bound.push_back(v);
    conj.push_back(f_forall(bound, f_or(std::move(disj))));
  }
  e.body = simplify(f_and(std::move(conj)));
  return e;
}

// ------------------------------------------------------------ alpha / gfp

PredExpr make_alpha(const PointedClause& p, const std::string& y, NameGen& names, const std::vector<std::string>& params_in) {
  const Literal& L0 = p.lit();
  std::vector<std::string> params = params_in.empty() ? param_names(L0.args.size()) : params_in;
  if (params.size() != L0.args.size()) throw Error(Error::Kind::Arity, "make_alpha: wrong number of parameters");
  // Rename the clause variables to v1, v2, ... (never clashing with ū).
  std::set<std::string> taken(params.begin(), params.end());
  Subst ren;
  std::vector<std::string> order;
  for (const auto& l : p.clause.lits())
    for (const auto& a : l.args) collect_vars_ordered(a, order);
  std::vector<std::string> bound;
  int k = 0;
  for (const auto& v : order) {
    if (ren.count(v)) continue;
    std::string n;
    do n = "v" + std::to_string(++k);
    while (taken.count(n));
    taken.insert(n);
    names.reserve(n);
    ren.emplace(v, Term::var(n));
    bound.push_back(n);
  }
  Lits ls = apply_subst(p.clause.lits(), ren);
  const Literal& L = ls[static_cast<size_t>(p.index)];
  LitSpec dual = LitSpec::of(L).dual();
  std::vector<Term> us;
  for (const auto& u : params) us.push_back(Term::var(u));
  F head = f_lit(dual_at(L, us));
  std::vector<F> disj;
  for (size_t j = 0; j < us.size(); ++j) disj.push_back(f_not(f_eq(us[j], L.args[j])));
  for (size_t i = 0; i < ls.size(); ++i) {
    if (static_cast<int>(i) == p.index) continue;
    if (dual.matches(ls[i])) disj.push_back(f_atom(Head::PredVar, y, ls[i].args));
    else disj.push_back(f_lit(ls[i]));
  }
  F body = f_and(head, f_forall(bound, f_or(std::move(disj))));
  return PredExpr{params, simplify(body, names)};
}

PredExpr fixpoint_expr(const PointedClause& p, NameGen& names) {
  std::string y = names.fresh("Y");
  size_t k = p.lit().args.size();
  std::vector<std::string> inner = param_names(k, "w");
  PredExpr alpha = make_alpha(p, y, names, inner);
  std::vector<std::string> params = param_names(k);
  if (!free_predvars(alpha.body).count(y)) {
    // gfp of a Y-free body is the body itself.
    Subst s;
    for (size_t j = 0; j < k; ++j) s.emplace(inner[j], Term::var(params[j]));
    return PredExpr{params, simplify(subst_formula(alpha.body, s, names), names)};
  }
  std::vector<Term> args;
  for (const auto& u : params) args.push_back(Term::var(u));
  return PredExpr{params, simplify(f_gfp(y, inner, alpha.body, args), names)};
}

PredExpr bk_expr(const PointedClause& p, int k, NameGen& names) {
  std::string y = names.fresh("Y");
  PredExpr alpha = make_alpha(p, y, names);
  PredExpr w{alpha.params, f_false()};
  for (int i = 0; i < k; ++i) w = simplify(apply_pred_subst(alpha, PredSubst{{y, w}}, names), names);
  return w;
}

// ---------------------------------------------------------- find_acyclic

std::string to_string(AcyclicResult::Status s) {
  switch (s) {
    case AcyclicResult::Status::Found: return "found";
    case AcyclicResult::Status::ProvenCyclic: return "proven-cyclic";
    case AcyclicResult::Status::BudgetExhausted: return "budget-exhausted";
  }
  return "";
}

AcyclicResult find_acyclic(const PointedClause& p, const ClauseSet& n, const AcyclicLimits& limits) {
  const std::vector<Clause>& cs = n.clauses();
  LitSpec dual = LitSpec::of(p.lit()).dual();
  VelimCache cache;
  struct Entry {
    PointedClause q;
    size_t from;
    std::vector<size_t> cands;
  };
  std::vector<Entry> entries;
  bool capped = false;
  std::vector<bool> has_dual(cs.size(), false);
  for (size_t ci = 0; ci < cs.size(); ++ci)
    for (const auto& l : cs[ci].lits()) has_dual[ci] = has_dual[ci] || dual.matches(l);
  for (size_t ci = 0; ci < cs.size(); ++ci) {
    for (size_t j = 0; j < cs[ci].size(); ++j) {
      if (!dual.matches(cs[ci][j])) continue;
      PointedClause q(cs[ci], static_cast<int>(j));
      Clause r = constraint_resolve(p, q);
      Entry e{q, ci, {}};
      for (size_t si = 0; si < cs.size(); ++si) {
        if (!subsumes_L_velim(cs[si], r, dual, cache)) continue;
        if (e.cands.size() >= limits.max_candidates) {
          capped = true;
          break;
        }
        e.cands.push_back(si);
      }
      if (e.cands.empty()) throw Error(Error::Kind::Invalid, "pointed clause is not purified in the clause set");
      // Sinks (no outgoing edges) first, then others, keeping set order.
      std::stable_sort(e.cands.begin(), e.cands.end(), [&](size_t a, size_t b) { return !has_dual[a] && has_dual[b]; });
      entries.push_back(std::move(e));
    }
  }
  // Most constrained entries first.
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.cands.size() < b.cands.size(); });

  AcyclicResult res;
  std::vector<std::multiset<size_t>> adj(cs.size());
  std::vector<size_t> choice(entries.size());
  int best = -1;
  std::vector<size_t> best_choice;
  bool budget_hit = false;

  auto reachable = [&](size_t from, size_t to) {
    std::vector<bool> seen(cs.size(), false);
    std::vector<size_t> stack = {from};
    while (!stack.empty()) {
      size_t v = stack.back();
      stack.pop_back();
      if (v == to) return true;
      if (seen[v]) continue;
      seen[v] = true;
      for (size_t w : adj[v]) stack.push_back(w);
    }
    return false;
  };
  auto longest = [&]() {
    std::vector<int> memo(cs.size(), -1);
    std::function<int(size_t)> lp = [&](size_t v) -> int {
      if (memo[v] >= 0) return memo[v];
      int m = 0;
      for (size_t w : adj[v]) m = std::max(m, 1 + lp(w));
      return memo[v] = m;
    };
    int m = 0;
    for (size_t v = 0; v < cs.size(); ++v) m = std::max(m, lp(v));
    return m;
  };

  std::function<void(size_t)> dfs = [&](size_t i) {
    if (budget_hit) return;
    if (++res.nodes > limits.max_nodes) {
      budget_hit = true;
      return;
    }
    if (best >= 0 && longest() >= best) return;  // cannot improve
    if (i == entries.size()) {
      best = longest();
      best_choice = choice;
      return;
    }
    const Entry& e = entries[i];
    for (size_t s : e.cands) {
      if (s == e.from || reachable(s, e.from)) continue;  // would close a cycle
      adj[e.from].insert(s);
      choice[i] = s;
      dfs(i + 1);
      adj[e.from].erase(adj[e.from].find(s));
      if (budget_hit || best == 0) return;
    }
  };
  dfs(0);

  if (best >= 0) {
    res.status = AcyclicResult::Status::Found;
    res.k = best;
    for (size_t i = 0; i < entries.size(); ++i) res.s.emplace_back(entries[i].q, cs[best_choice[i]]);
  } else if (budget_hit || capped) {
    res.status = AcyclicResult::Status::BudgetExhausted;
  } else {
    res.status = AcyclicResult::Status::ProvenCyclic;
  }
  return res;
}

// ----------------------------------------------------------- composition

WitnessMode parse_witness_mode(const std::string& s) {
  if (s == "auto") return WitnessMode::Auto;
  if (s == "first-order") return WitnessMode::FirstOrder;
  if (s == "fixpoint") return WitnessMode::Fixpoint;
  if (s == "resolution") return WitnessMode::Resolution;
  throw Error(Error::Kind::Input, "unknown witness mode '" + s + "' (auto, first-order, fixpoint, resolution)");
}

std::string to_string(WitnessMode m) {
  switch (m) {
    case WitnessMode::Auto: return "auto";
    case WitnessMode::FirstOrder: return "first-order";
    case WitnessMode::Fixpoint: return "fixpoint";
    case WitnessMode::Resolution: return "resolution";
  }
  return "";
}

namespace {
bool has_gfp(const F& f) {
  if (f->kind == Formula::Kind::Gfp) return true;
  for (const auto& k : f->kids)
    if (has_gfp(k)) return true;
  return false;
}
}  // namespace

bool Witness::first_order() const {
  for (const auto& [x, e] : subst)
    if (has_gfp(e.body)) return false;
  return true;
}

int Witness::size() const {
  int n = 0;
  for (const auto& [x, e] : subst) n += pred_expr_size(e);
  return n;
}

std::map<std::string, int> predvar_arities(const std::vector<Clause>& clauses, const std::vector<std::string>& xs) {
  std::map<std::string, int> out;
  for (const auto& x : xs) out[x] = 0;
  for (const auto& c : clauses)
    for (const auto& l : c.lits())
      if (l.kind == Head::PredVar && out.count(l.head)) out[l.head] = static_cast<int>(l.args.size());
  return out;
}

PredSubst tau_step(const Derivation& d, size_t i, const WitnessOptions& opts, NameGen& names,
                   std::vector<PurDelRecord>* records) {
  const Step& s = d.steps.at(i);
  if (s.kind == Step::Kind::ExtPurDel) {
    int arity = predvar_arities(d.initial, {s.x}).at(s.x);
    return {{s.x, PredExpr{param_names(static_cast<size_t>(arity)), s.polarity < 0 ? f_false() : f_true()}}};
  }
  if (s.kind != Step::Kind::PurDel) return {};
  const PointedClause& p = s.pointed;
  ClauseSet rest = d.sets.at(i);
  rest.erase(p.clause);
  PurDelRecord rec;
  rec.step = i;
  PredExpr w;
  WitnessMode mode = opts.mode;
  int k = -1;
  if (mode == WitnessMode::FirstOrder || mode == WitnessMode::Auto) {
    auto ann = opts.annotation.find(i);
    if (ann != opts.annotation.end()) {
      k = ann->second;
      rec.note = "annotation";
    } else {
      AcyclicResult a = find_acyclic(p, rest, opts.acyclic);
      if (a.status == AcyclicResult::Status::Found) {
        k = a.k;
      } else if (mode == WitnessMode::FirstOrder) {
        throw Error(Error::Kind::Invalid, "step " + std::to_string(i + 1) + ": no acyclic purification subsumption (" +
                                              to_string(a.status) + ")");
      } else {
        mode = WitnessMode::Fixpoint;
        rec.note = "acyclic search: " + to_string(a.status);
      }
    }
  }
  if (k >= 0) {
    w = bk_expr(p, k, names);
    rec.mode = "first-order";
    rec.k = k;
  } else if (mode == WitnessMode::Fixpoint) {
    w = fixpoint_expr(p, names);
    rec.mode = "fixpoint";
  } else {
    std::vector<Term> consts = fresh_constants(p.lit().args.size(), names);
    auto cl = lres(p, consts, opts.lres_budget);
    if (!cl)
      throw Error(Error::Kind::Budget, "step " + std::to_string(i + 1) + ": local resolution closure exceeds budget " +
                                           std::to_string(opts.lres_budget));
    w = clauses_to_pred(*cl, consts);
    rec.mode = "resolution";
    rec.note = std::to_string(cl->size()) + " clauses";
  }
  if (records) records->push_back(rec);
  if (p.lit().pos) w.body = simplify(f_not(w.body), names);
  return {{p.lit().head, w}};
}

Witness compose(const Derivation& d, const WitnessOptions& opts) {
  NameGen names = names_for(d.initial, d.xs);
  Witness out;
  PredSubst sigma;
  for (size_t i = d.steps.size(); i-- > 0;) {
    PredSubst tau = tau_step(d, i, opts, names, &out.records);
    if (tau.empty()) continue;
    PredSubst next = sigma;
    for (const auto& [x, e] : tau) next[x] = simplify(apply_pred_subst(e, sigma, names), names);
    sigma = std::move(next);
  }
  std::reverse(out.records.begin(), out.records.end());
  // Close remaining free occurrences of the eliminated variables.
  auto arities = predvar_arities(d.initial, d.xs);
  PredSubst closing;
  for (const auto& [x, e] : sigma)
    for (const auto& y : free_predvars(e.body))
      if (arities.count(y) && !closing.count(y))
        closing[y] = PredExpr{param_names(static_cast<size_t>(arities[y])), f_true()};
  if (!closing.empty()) {
    for (auto& [x, e] : sigma) e = simplify(apply_pred_subst(e, closing, names), names);
    for (const auto& [y, e] : closing)
      if (!sigma.count(y)) sigma[y] = e;
  }
  out.subst = std::move(sigma);
  return out;
}

}  // namespace scanw

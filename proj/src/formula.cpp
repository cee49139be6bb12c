#include "scanw/formula.hpp"

#include <algorithm>
#include <functional>
#include <unordered_set>

namespace scanw {

using K = Formula::Kind;

// ------------------------------------------------------------ constructors

namespace {
F make(Formula f) { return std::make_shared<const Formula>(std::move(f)); }

const F& true_node() {
  static const F t = make(Formula{K::True, Head::Pred, "", {}, {}, {}});
  return t;
}
const F& false_node() {
  static const F t = make(Formula{K::False, Head::Pred, "", {}, {}, {}});
  return t;
}
}  // namespace

F f_true() { return true_node(); }
F f_false() { return false_node(); }

F f_atom(Head kind, const std::string& head, std::vector<Term> args) {
  Formula f;
  f.kind = K::Atom;
  f.head_kind = kind;
  f.name = head;
  f.args = std::move(args);
  return make(std::move(f));
}

F f_eq(const Term& s, const Term& t) { return f_atom(Head::Eq, "", {s, t}); }

F f_lit(const Literal& l) {
  F a = f_atom(l.kind, l.head, l.args);
  return l.pos ? a : f_not(a);
}

F f_not(F a) {
  Formula f;
  f.kind = K::Not;
  f.kids = {std::move(a)};
  return make(std::move(f));
}

F f_and(std::vector<F> kids) {
  if (kids.empty()) return f_true();
  if (kids.size() == 1) return kids[0];
  Formula f;
  f.kind = K::And;
  f.kids = std::move(kids);
  return make(std::move(f));
}

F f_or(std::vector<F> kids) {
  if (kids.empty()) return f_false();
  if (kids.size() == 1) return kids[0];
  Formula f;
  f.kind = K::Or;
  f.kids = std::move(kids);
  return make(std::move(f));
}

F f_and(F a, F b) { return f_and(std::vector<F>{std::move(a), std::move(b)}); }
F f_or(F a, F b) { return f_or(std::vector<F>{std::move(a), std::move(b)}); }

F f_imp(F a, F b) {
  Formula f;
  f.kind = K::Imp;
  f.kids = {std::move(a), std::move(b)};
  return make(std::move(f));
}

F f_iff(F a, F b) {
  Formula f;
  f.kind = K::Iff;
  f.kids = {std::move(a), std::move(b)};
  return make(std::move(f));
}

namespace {
F quant(K k, const std::string& v, F body) {
  Formula f;
  f.kind = k;
  f.name = v;
  f.kids = {std::move(body)};
  return make(std::move(f));
}
F quant(K k, const std::vector<std::string>& vs, F body) {
  for (auto it = vs.rbegin(); it != vs.rend(); ++it) body = quant(k, *it, std::move(body));
  return body;
}
}  // namespace

F f_forall(const std::string& v, F body) { return quant(K::Forall, v, std::move(body)); }
F f_exists(const std::string& v, F body) { return quant(K::Exists, v, std::move(body)); }
F f_forall(const std::vector<std::string>& vs, F body) { return quant(K::Forall, vs, std::move(body)); }
F f_exists(const std::vector<std::string>& vs, F body) { return quant(K::Exists, vs, std::move(body)); }

F f_gfp(const std::string& y, std::vector<std::string> bound, F body, std::vector<Term> args) {
  if (bound.size() != args.size()) throw Error(Error::Kind::Arity, "gfp: bound tuple and argument tuple differ in length");
  Formula f;
  f.kind = K::Gfp;
  f.name = y;
  f.bound = std::move(bound);
  f.kids = {std::move(body)};
  f.args = std::move(args);
  return make(std::move(f));
}

F clause_formula(const Clause& c) {
  std::vector<F> ds;
  for (const auto& l : c.lits()) ds.push_back(f_lit(l));
  std::vector<std::string> vs;
  for (const auto& l : c.lits())
    for (const auto& a : l.args) collect_vars_ordered(a, vs);
  return f_forall(vs, f_or(std::move(ds)));
}

F clauses_formula(const std::vector<Clause>& cs) {
  std::vector<F> ks;
  for (const auto& c : cs) ks.push_back(clause_formula(c));
  return f_and(std::move(ks));
}

F clauses_formula(const ClauseSet& cs) { return clauses_formula(cs.clauses()); }

// -------------------------------------------------------------- traversal

namespace {
void fv(const F& f, std::set<std::string>& bound, std::set<std::string>& out) {
  switch (f->kind) {
    case K::True:
    case K::False:
      return;
    case K::Atom: {
      std::set<std::string> vs;
      for (const auto& a : f->args) collect_vars(a, vs);
      for (const auto& v : vs)
        if (!bound.count(v)) out.insert(v);
      return;
    }
    case K::Forall:
    case K::Exists: {
      bool added = bound.insert(f->name).second;
      fv(f->kids[0], bound, out);
      if (added) bound.erase(f->name);
      return;
    }
    case K::Gfp: {
      std::set<std::string> vs;
      for (const auto& a : f->args) collect_vars(a, vs);
      for (const auto& v : vs)
        if (!bound.count(v)) out.insert(v);
      std::vector<std::string> added;
      for (const auto& b : f->bound)
        if (bound.insert(b).second) added.push_back(b);
      fv(f->kids[0], bound, out);
      for (const auto& b : added) bound.erase(b);
      return;
    }
    default:
      for (const auto& k : f->kids) fv(k, bound, out);
  }
}

void fpv(const F& f, std::set<std::string>& bound, std::set<std::string>& out) {
  switch (f->kind) {
    case K::Atom:
      if (f->head_kind == Head::PredVar && !bound.count(f->name)) out.insert(f->name);
      return;
    case K::Gfp: {
      bool added = bound.insert(f->name).second;
      fpv(f->kids[0], bound, out);
      if (added) bound.erase(f->name);
      return;
    }
    default:
      for (const auto& k : f->kids) fpv(k, bound, out);
  }
}
}  // namespace

std::set<std::string> free_vars(const F& f) {
  std::set<std::string> b, out;
  fv(f, b, out);
  return out;
}

std::set<std::string> free_predvars(const F& f) {
  std::set<std::string> b, out;
  fpv(f, b, out);
  return out;
}

void all_var_names(const F& f, std::set<std::string>& out) {
  for (const auto& a : f->args) collect_vars(a, out);
  if (f->kind == K::Forall || f->kind == K::Exists) out.insert(f->name);
  for (const auto& b : f->bound) out.insert(b);
  for (const auto& k : f->kids) all_var_names(k, out);
}

namespace {
void term_symbols(const Term& t, std::map<std::string, std::pair<SymKind, int>>& out) {
  if (t.is_var) return;
  out.emplace(t.name, std::make_pair(SymKind::Function, static_cast<int>(t.args.size())));
  for (const auto& a : t.args) term_symbols(a, out);
}
}  // namespace

void symbols_of(const F& f, std::map<std::string, std::pair<SymKind, int>>& out) {
  if (f->kind == K::Atom && f->head_kind != Head::Eq)
    out.emplace(f->name, std::make_pair(f->head_kind == Head::Pred ? SymKind::Predicate : SymKind::PredVar,
                                        static_cast<int>(f->args.size())));
  for (const auto& a : f->args) term_symbols(a, out);
  for (const auto& k : f->kids) symbols_of(k, out);
}

// ----------------------------------------------------------- substitution

namespace {

std::string fresh_var(NameGen& ng, const std::set<std::string>& avoid) {
  for (;;) {
    std::string n = ng.fresh("v");
    if (!avoid.count(n)) return n;
  }
}

F rebuild(const F& f, std::vector<F> kids) {
  Formula g = *f;
  g.kids = std::move(kids);
  return make(std::move(g));
}

F subst_rec(const F& f, const Subst& s, NameGen& ng) {
  switch (f->kind) {
    case K::True:
    case K::False:
      return f;
    case K::Atom: {
      Formula g = *f;
      for (auto& a : g.args) a = apply_subst(a, s);
      return make(std::move(g));
    }
    case K::Forall:
    case K::Exists: {
      Subst s2 = s;
      s2.erase(f->name);
      std::set<std::string> body_fv = free_vars(f->kids[0]);
      for (auto it = s2.begin(); it != s2.end();) {
        if (!body_fv.count(it->first))
          it = s2.erase(it);
        else
          ++it;
      }
      if (s2.empty()) return f;
      std::set<std::string> range;
      for (const auto& [v, t] : s2) collect_vars(t, range);
      std::string var = f->name;
      F body = f->kids[0];
      if (range.count(var)) {
        std::set<std::string> avoid = range;
        all_var_names(body, avoid);
        for (const auto& [v, t] : s2) avoid.insert(v);
        std::string nv = fresh_var(ng, avoid);
        body = subst_rec(body, Subst{{var, Term::var(nv)}}, ng);
        var = nv;
      }
      return quant(f->kind, var, subst_rec(body, s2, ng));
    }
    case K::Gfp: {
      Formula g = *f;
      for (auto& a : g.args) a = apply_subst(a, s);
      Subst s2 = s;
      for (const auto& b : f->bound) s2.erase(b);
      std::set<std::string> body_fv = free_vars(f->kids[0]);
      for (auto it = s2.begin(); it != s2.end();) {
        if (!body_fv.count(it->first))
          it = s2.erase(it);
        else
          ++it;
      }
      if (s2.empty()) return make(std::move(g));
      std::set<std::string> range;
      for (const auto& [v, t] : s2) collect_vars(t, range);
      F body = f->kids[0];
      Subst ren;
      std::set<std::string> avoid = range;
      all_var_names(body, avoid);
      for (auto& b : g.bound) {
        if (!range.count(b)) continue;
        std::string nv = fresh_var(ng, avoid);
        avoid.insert(nv);
        ren.emplace(b, Term::var(nv));
        b = nv;
      }
      if (!ren.empty()) body = subst_rec(body, ren, ng);
      g.kids = {subst_rec(body, s2, ng)};
      return make(std::move(g));
    }
    default: {
      std::vector<F> ks;
      ks.reserve(f->kids.size());
      for (const auto& k : f->kids) ks.push_back(subst_rec(k, s, ng));
      return rebuild(f, std::move(ks));
    }
  }
}

F rename_predvar(const F& f, const std::string& from, const std::string& to) {
  switch (f->kind) {
    case K::Atom:
      if (f->head_kind == Head::PredVar && f->name == from) {
        Formula g = *f;
        g.name = to;
        return make(std::move(g));
      }
      return f;
    case K::Gfp:
      if (f->name == from) return f;
      [[fallthrough]];
    default: {
      if (f->kids.empty()) return f;
      std::vector<F> ks;
      for (const auto& k : f->kids) ks.push_back(rename_predvar(k, from, to));
      return rebuild(f, std::move(ks));
    }
  }
}

}  // namespace

F subst_formula(const F& f, const Subst& s, NameGen& names) {
  if (s.empty()) return f;
  return subst_rec(f, s, names);
}

F instantiate(const PredExpr& e, const std::vector<Term>& args, NameGen& names) {
  if (args.size() != e.params.size()) throw Error(Error::Kind::Arity, "predicate expression applied to wrong number of arguments");
  Subst s;
  for (size_t i = 0; i < args.size(); ++i)
    if (!(args[i].is_var && args[i].name == e.params[i])) s[e.params[i]] = args[i];
  return subst_formula(e.body, s, names);
}

namespace {

struct PsCtx {
  const PredSubst& pi;
  std::set<std::string> range_fv;   // free first-order variables of the ranges (beyond parameters)
  std::set<std::string> range_fpv;  // free predicate variables of the ranges
  NameGen& ng;
};

F aps(const F& f, const PredSubst& pi, PsCtx& ctx) {
  switch (f->kind) {
    case K::True:
    case K::False:
      return f;
    case K::Atom: {
      if (f->head_kind != Head::PredVar) return f;
      auto it = pi.find(f->name);
      if (it == pi.end()) return f;
      if (it->second.params.size() != f->args.size())
        throw Error(Error::Kind::Arity, "arity mismatch substituting for predicate variable " + f->name);
      return instantiate(it->second, f->args, ctx.ng);
    }
    case K::Forall:
    case K::Exists: {
      if (ctx.range_fv.count(f->name)) {
        std::set<std::string> avoid = ctx.range_fv;
        all_var_names(f->kids[0], avoid);
        std::string nv = fresh_var(ctx.ng, avoid);
        F body = subst_formula(f->kids[0], Subst{{f->name, Term::var(nv)}}, ctx.ng);
        return quant(f->kind, nv, aps(body, pi, ctx));
      }
      return quant(f->kind, f->name, aps(f->kids[0], pi, ctx));
    }
    case K::Gfp: {
      Formula g = *f;
      F body = f->kids[0];
      // Bound first-order variables that would capture free range variables.
      Subst ren;
      std::set<std::string> avoid = ctx.range_fv;
      all_var_names(body, avoid);
      for (auto& b : g.bound) {
        if (!ctx.range_fv.count(b)) continue;
        std::string nv = fresh_var(ctx.ng, avoid);
        avoid.insert(nv);
        ren.emplace(b, Term::var(nv));
        b = nv;
      }
      if (!ren.empty()) body = subst_formula(body, ren, ctx.ng);
      // The fixpoint variable shadows / must not capture.
      if (ctx.range_fpv.count(g.name)) {
        std::string ny = ctx.ng.fresh("Y");
        body = rename_predvar(body, g.name, ny);
        g.name = ny;
      }
      if (pi.count(g.name)) {
        PredSubst inner = pi;
        inner.erase(g.name);
        g.kids = {aps(body, inner, ctx)};
      } else {
        g.kids = {aps(body, pi, ctx)};
      }
      return make(std::move(g));
    }
    default: {
      std::vector<F> ks;
      for (const auto& k : f->kids) ks.push_back(aps(k, pi, ctx));
      return rebuild(f, std::move(ks));
    }
  }
}

}  // namespace

F apply_pred_subst(const F& f, const PredSubst& pi, NameGen& names) {
  if (pi.empty()) return f;
  PsCtx ctx{pi, {}, {}, names};
  for (const auto& [x, e] : pi) {
    std::set<std::string> v = free_vars(e.body);
    for (const auto& p : e.params) v.erase(p);
    ctx.range_fv.insert(v.begin(), v.end());
    std::set<std::string> pv = free_predvars(e.body);
    ctx.range_fpv.insert(pv.begin(), pv.end());
  }
  return aps(f, pi, ctx);
}

F apply_pred_subst(const Clause& c, const PredSubst& pi, NameGen& names) {
  return apply_pred_subst(clause_formula(c), pi, names);
}

F apply_pred_subst(const ClauseSet& n, const PredSubst& pi, NameGen& names) {
  return apply_pred_subst(clauses_formula(n), pi, names);
}

PredExpr apply_pred_subst(const PredExpr& e, const PredSubst& pi, NameGen& names) {
  PredExpr r = e;
  // Parameters must not capture free variables of the ranges.
  std::set<std::string> range_fv;
  for (const auto& [x, ex] : pi) {
    std::set<std::string> v = free_vars(ex.body);
    for (const auto& p : ex.params) v.erase(p);
    range_fv.insert(v.begin(), v.end());
  }
  Subst ren;
  std::set<std::string> avoid = range_fv;
  all_var_names(e.body, avoid);
  for (auto& p : r.params) {
    if (!range_fv.count(p)) continue;
    std::string nv = fresh_var(names, avoid);
    avoid.insert(nv);
    ren.emplace(p, Term::var(nv));
    p = nv;
  }
  F body = ren.empty() ? e.body : subst_formula(e.body, ren, names);
  r.body = apply_pred_subst(body, pi, names);
  return r;
}

// --------------------------------------------------------------- polarity

namespace {
void pol(const std::string& x, const F& f, int sign, std::set<int>& out) {
  switch (f->kind) {
    case K::Atom:
      if (f->head_kind == Head::PredVar && f->name == x) out.insert(sign);
      return;
    case K::Not:
      pol(x, f->kids[0], -sign, out);
      return;
    case K::Imp:
      pol(x, f->kids[0], -sign, out);
      pol(x, f->kids[1], sign, out);
      return;
    case K::Iff:
      for (const auto& k : f->kids) {
        pol(x, k, sign, out);
        pol(x, k, -sign, out);
      }
      return;
    case K::Gfp:
      if (f->name == x) return;
      pol(x, f->kids[0], sign, out);
      return;
    default:
      for (const auto& k : f->kids) pol(x, k, sign, out);
  }
}
}  // namespace

std::set<int> polarity_of(const std::string& x, const F& f) {
  std::set<int> out;
  pol(x, f, 1, out);
  return out;
}

std::set<int> polarity_of(const std::string& x, const Clause& c) {
  std::set<int> out;
  for (const auto& l : c.lits())
    if (l.kind == Head::PredVar && l.head == x) out.insert(l.pos ? 1 : -1);
  return out;
}

// ------------------------------------------------------------ alpha keys

namespace {
struct AlphaEnv {
  std::vector<std::pair<std::string, std::string>> vars;   // name -> index label
  std::vector<std::pair<std::string, std::string>> preds;
  int counter = 0;
  std::string lookup_var(const std::string& v) const {
    for (auto it = vars.rbegin(); it != vars.rend(); ++it)
      if (it->first == v) return it->second;
    return "";
  }
  std::string lookup_pred(const std::string& p) const {
    for (auto it = preds.rbegin(); it != preds.rend(); ++it)
      if (it->first == p) return it->second;
    return "";
  }
};

void akey_term(const Term& t, const AlphaEnv& env, std::string& out) {
  if (t.is_var) {
    std::string b = env.lookup_var(t.name);
    out += b.empty() ? ("?" + t.name) : b;
    return;
  }
  out += t.name;
  if (t.args.empty()) return;
  out += '(';
  for (size_t i = 0; i < t.args.size(); ++i) {
    if (i) out += ',';
    akey_term(t.args[i], env, out);
  }
  out += ')';
}

void akey(const F& f, AlphaEnv& env, std::string& out) {
  switch (f->kind) {
    case K::True:
      out += "T";
      return;
    case K::False:
      out += "F";
      return;
    case K::Atom: {
      if (f->head_kind == Head::Eq) {
        std::string a, b;
        akey_term(f->args[0], env, a);
        akey_term(f->args[1], env, b);
        if (b < a) std::swap(a, b);
        out += "=(" + a + "," + b + ")";
        return;
      }
      std::string p = f->head_kind == Head::PredVar ? env.lookup_pred(f->name) : "";
      out += p.empty() ? f->name : p;
      out += '(';
      for (size_t i = 0; i < f->args.size(); ++i) {
        if (i) out += ',';
        akey_term(f->args[i], env, out);
      }
      out += ')';
      return;
    }
    case K::Forall:
    case K::Exists: {
      std::string lbl = "#" + std::to_string(env.counter++);
      out += f->kind == K::Forall ? "A" : "E";
      out += lbl + ".";
      env.vars.emplace_back(f->name, lbl);
      akey(f->kids[0], env, out);
      env.vars.pop_back();
      return;
    }
    case K::Gfp: {
      std::string ylbl = "Y#" + std::to_string(env.counter++);
      out += "gfp " + ylbl;
      for (const auto& b : f->bound) {
        std::string lbl = "#" + std::to_string(env.counter++);
        out += " " + lbl;
        env.vars.emplace_back(b, lbl);
      }
      env.preds.emplace_back(f->name, ylbl);
      out += ".";
      akey(f->kids[0], env, out);
      env.preds.pop_back();
      for (size_t i = 0; i < f->bound.size(); ++i) env.vars.pop_back();
      out += "@(";
      for (size_t i = 0; i < f->args.size(); ++i) {
        if (i) out += ',';
        akey_term(f->args[i], env, out);
      }
      out += ")";
      return;
    }
    default: {
      static const char* names[] = {"", "", "", "not", "and", "or", "imp", "iff"};
      out += names[static_cast<int>(f->kind)];
      out += '[';
      for (size_t i = 0; i < f->kids.size(); ++i) {
        if (i) out += ';';
        akey(f->kids[i], env, out);
      }
      out += ']';
    }
  }
}
}  // namespace

std::string alpha_key(const F& f) {
  AlphaEnv env;
  std::string out;
  akey(f, env, out);
  return out;
}

bool alpha_equal(const F& a, const F& b) { return alpha_key(a) == alpha_key(b); }

bool alpha_equal(const PredExpr& a, const PredExpr& b) {
  if (a.params.size() != b.params.size()) return false;
  NameGen ng;
  std::set<std::string> avoid;
  all_var_names(a.body, avoid);
  all_var_names(b.body, avoid);
  for (const auto& v : avoid) ng.reserve(v);
  Subst sa, sb;
  for (size_t i = 0; i < a.params.size(); ++i) {
    std::string n = "%p" + std::to_string(i);
    sa[a.params[i]] = Term::var(n);
    sb[b.params[i]] = Term::var(n);
  }
  return alpha_equal(subst_formula(a.body, sa, ng), subst_formula(b.body, sb, ng));
}

// ------------------------------------------------------------- simplifier

namespace {

struct Simp {
  NameGen& ng;

  F run(const F& f) {
    switch (f->kind) {
      case K::True:
      case K::False:
        return f;
      case K::Atom:
        if (f->head_kind == Head::Eq && f->args[0] == f->args[1]) return f_true();
        return f;
      case K::Not:
        return neg(run(f->kids[0]));
      case K::And:
      case K::Or: {
        std::vector<F> ks;
        for (const auto& k : f->kids) ks.push_back(run(k));
        return junction(f->kind, std::move(ks));
      }
      case K::Imp: {
        F a = run(f->kids[0]), b = run(f->kids[1]);
        if (a->kind == K::True) return b;
        if (a->kind == K::False || b->kind == K::True) return f_true();
        if (b->kind == K::False) return neg(a);
        if (alpha_equal(a, b)) return f_true();
        return f_imp(a, b);
      }
      case K::Iff: {
        F a = run(f->kids[0]), b = run(f->kids[1]);
        if (a->kind == K::True) return b;
        if (b->kind == K::True) return a;
        if (a->kind == K::False) return neg(b);
        if (b->kind == K::False) return neg(a);
        if (alpha_equal(a, b)) return f_true();
        return f_iff(a, b);
      }
      case K::Forall:
      case K::Exists: {
        std::vector<std::string> vars;
        F body = f;
        while (body->kind == f->kind) {
          vars.push_back(body->name);
          body = body->kids[0];
        }
        return quantify(f->kind, vars, run(body));
      }
      case K::Gfp: {
        F body = run(f->kids[0]);
        if (!free_predvars(body).count(f->name)) {
          Subst s;
          for (size_t i = 0; i < f->bound.size(); ++i) s[f->bound[i]] = f->args[i];
          return run(subst_formula(body, s, ng));
        }
        if (body->kind == K::Atom && body->head_kind == Head::PredVar && body->name == f->name) {
          bool ident = body->args.size() == f->bound.size();
          for (size_t i = 0; ident && i < body->args.size(); ++i)
            ident = body->args[i].is_var && body->args[i].name == f->bound[i];
          if (ident) return f_true();
        }
        return f_gfp(f->name, f->bound, body, f->args);
      }
    }
    return f;
  }

  // Negation of an already simplified formula, pushed inwards.
  F neg(const F& f) {
    switch (f->kind) {
      case K::True:
        return f_false();
      case K::False:
        return f_true();
      case K::Not:
        return f->kids[0];
      case K::And:
      case K::Or: {
        std::vector<F> ks;
        for (const auto& k : f->kids) ks.push_back(neg(k));
        return junction(f->kind == K::And ? K::Or : K::And, std::move(ks));
      }
      case K::Imp:
        return junction(K::And, {f->kids[0], neg(f->kids[1])});
      case K::Iff:
        return f_iff(f->kids[0], neg(f->kids[1]));
      case K::Forall:
      case K::Exists:
        return quantify(f->kind == K::Forall ? K::Exists : K::Forall, {f->name}, neg(f->kids[0]));
      default:
        return f_not(f);
    }
  }

  F junction(K kind, std::vector<F> in) {
    const K absorbing = kind == K::And ? K::False : K::True;
    const K identity = kind == K::And ? K::True : K::False;
    std::vector<F> ks;
    std::unordered_set<std::string> seen;
    std::vector<std::string> keys;
    std::function<bool(const F&)> add = [&](const F& k) -> bool {
      if (k->kind == absorbing) return false;
      if (k->kind == identity) return true;
      if (k->kind == kind) {
        for (const auto& kk : k->kids)
          if (!add(kk)) return false;
        return true;
      }
      std::string key = alpha_key(k);
      if (!seen.insert(key).second) return true;
      ks.push_back(k);
      keys.push_back(std::move(key));
      return true;
    };
    for (const auto& k : in)
      if (!add(k)) return kind == K::And ? f_false() : f_true();
    // Complementary pair.
    for (const auto& k : ks)
      if (k->kind == K::Not && seen.count(alpha_key(k->kids[0]))) return kind == K::And ? f_false() : f_true();
    if (ks.empty()) return identity == K::True ? f_true() : f_false();
    if (ks.size() == 1) return ks[0];
    Formula g;
    g.kind = kind;
    g.kids = std::move(ks);
    return make(std::move(g));
  }

  // Tries to find, among the junction members, a literal that fixes one of
  // the bound variables: x ≄ t inside a universal disjunction, x ≃ t inside
  // an existential conjunction.
  static bool find_binding(K qkind, const std::vector<std::string>& vars, const std::vector<F>& members, size_t& which,
                           std::string& var, Term& val) {
    for (size_t i = 0; i < members.size(); ++i) {
      const F& m = members[i];
      const F* atom = nullptr;
      if (qkind == K::Forall && m->kind == K::Not && m->kids[0]->kind == K::Atom && m->kids[0]->head_kind == Head::Eq)
        atom = &m->kids[0];
      if (qkind == K::Exists && m->kind == K::Atom && m->head_kind == Head::Eq) atom = &m;
      if (!atom) continue;
      for (int side = 0; side < 2; ++side) {
        const Term& x = (*atom)->args[side];
        const Term& t = (*atom)->args[1 - side];
        if (!x.is_var || std::find(vars.begin(), vars.end(), x.name) == vars.end()) continue;
        if (occurs(x.name, t)) continue;
        which = i;
        var = x.name;
        val = t;
        return true;
      }
    }
    return false;
  }

  F quantify(K qkind, std::vector<std::string> vars, F body) {
    for (int guard = 0; guard < 64; ++guard) {
      // Keep only the innermost binder of repeated names, then drop vacuous ones.
      std::vector<std::string> vs;
      for (size_t i = 0; i < vars.size(); ++i)
        if (std::find(vars.begin() + static_cast<long>(i) + 1, vars.end(), vars[i]) == vars.end()) vs.push_back(vars[i]);
      std::set<std::string> fvb = free_vars(body);
      vars.clear();
      for (const auto& v : vs)
        if (fvb.count(v)) vars.push_back(v);
      if (vars.empty()) return body;

      const K dist = qkind == K::Forall ? K::And : K::Or;    // quantifier distributes over this
      const K inner = qkind == K::Forall ? K::Or : K::And;   // members searched for bindings
      if (body->kind == dist) {
        std::vector<F> ks;
        for (const auto& k : body->kids) ks.push_back(quantify(qkind, vars, k));
        return junction(dist, std::move(ks));
      }
      std::vector<F> members = body->kind == inner ? body->kids : std::vector<F>{body};
      size_t which = 0;
      std::string var;
      Term val;
      if (find_binding(qkind, vars, members, which, var, val)) {
        std::vector<F> rest;
        for (size_t i = 0; i < members.size(); ++i)
          if (i != which) rest.push_back(members[i]);
        F nb = inner == K::Or ? f_or(rest) : f_and(rest);
        nb = run(subst_formula(nb, Subst{{var, val}}, ng));
        vars.erase(std::find(vars.begin(), vars.end(), var));
        body = nb;
        continue;
      }
      // Miniscoping: members not mentioning any bound variable move out.
      if (body->kind == inner) {
        std::vector<F> out, in;
        for (const auto& m : members) {
          std::set<std::string> mv = free_vars(m);
          bool mentions = false;
          for (const auto& v : vars) mentions = mentions || mv.count(v);
          (mentions ? in : out).push_back(m);
        }
        if (!out.empty()) {
          F q = quantify(qkind, vars, inner == K::Or ? f_or(in) : f_and(in));
          out.push_back(q);
          return junction(inner, std::move(out));
        }
      }
      return quant(qkind, vars, body);
    }
    return quant(qkind, vars, body);
  }
};

}  // namespace

F simplify(const F& f, NameGen& names) {
  Simp s{names};
  F cur = f;
  std::string key = alpha_key(cur);
  for (int i = 0; i < 8; ++i) {
    F next = s.run(cur);
    std::string nk = alpha_key(next);
    cur = next;
    if (nk == key) break;
    key = nk;
  }
  return cur;
}

F simplify(const F& f) {
  NameGen ng;
  std::set<std::string> used;
  all_var_names(f, used);
  for (const auto& u : used) ng.reserve(u);
  return simplify(f, ng);
}

PredExpr simplify(const PredExpr& e, NameGen& names) { return PredExpr{e.params, simplify(e.body, names)}; }

// --------------------------------------------------------------- printing

namespace {

int prec(const F& f) {
  switch (f->kind) {
    case K::Iff:
      return 1;
    case K::Imp:
      return 2;
    case K::Or:
      return 3;
    case K::And:
      return 4;
    case K::Not:
      return 5;
    case K::Forall:
    case K::Exists:
    case K::Gfp:
      return 0;
    default:
      return 6;
  }
}

void print(const F& f, int min_prec, std::string& out);

void print_args(const std::vector<Term>& args, std::string& out) {
  out += '(';
  for (size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    out += to_plain_string(args[i]);
  }
  out += ')';
}

void print_inner(const F& f, std::string& out) {
  switch (f->kind) {
    case K::True:
      out += "true";
      return;
    case K::False:
      out += "false";
      return;
    case K::Atom:
      if (f->head_kind == Head::Eq) {
        out += to_plain_string(f->args[0]) + " = " + to_plain_string(f->args[1]);
        return;
      }
      out += f->name;
      if (!f->args.empty()) {
        out += '(';
        for (size_t i = 0; i < f->args.size(); ++i) {
          if (i) out += ',';
          out += to_plain_string(f->args[i]);
        }
        out += ')';
      }
      return;
    case K::Not: {
      const F& k = f->kids[0];
      if (k->kind == K::Atom && k->head_kind == Head::Eq) {
        out += to_plain_string(k->args[0]) + " != " + to_plain_string(k->args[1]);
        return;
      }
      out += '~';
      print(k, 5, out);
      return;
    }
    case K::And:
    case K::Or:
      for (size_t i = 0; i < f->kids.size(); ++i) {
        if (i) out += f->kind == K::And ? " /\\ " : " \\/ ";
        print(f->kids[i], f->kind == K::And ? 5 : 4, out);
      }
      return;
    case K::Imp:
      print(f->kids[0], 3, out);
      out += " -> ";
      print(f->kids[1], 2, out);
      return;
    case K::Iff:
      print(f->kids[0], 2, out);
      out += " <-> ";
      print(f->kids[1], 2, out);
      return;
    case K::Forall:
    case K::Exists: {
      out += f->kind == K::Forall ? "forall" : "exists";
      F b = f;
      while (b->kind == f->kind) {
        out += " " + b->name;
        b = b->kids[0];
      }
      out += ". ";
      print(b, 0, out);
      return;
    }
    case K::Gfp:
      out += "gfp " + f->name;
      for (const auto& v : f->bound) out += " " + v;
      out += ". ";
      print(f->kids[0], 0, out);
      out += " @ ";
      print_args(f->args, out);
      return;
  }
}

void print(const F& f, int min_prec, std::string& out) {
  // Negated equations print as "s != t", an atom-level construct.
  int p = prec(f);
  if (f->kind == K::Not && f->kids[0]->kind == K::Atom && f->kids[0]->head_kind == Head::Eq) p = 6;
  if (p < min_prec || (p == 0 && min_prec > 0)) {
    out += '(';
    print_inner(f, out);
    out += ')';
  } else {
    print_inner(f, out);
  }
}

}  // namespace

std::string to_string(const F& f) {
  std::string out;
  print(f, 0, out);
  return out;
}

std::string to_string(const PredExpr& e) {
  std::string out = "lambda";
  for (const auto& p : e.params) out += " " + p;
  if (e.params.empty()) out += " ";
  out += ". " + to_string(e.body);
  return out;
}

std::string to_string(const PredSubst& s) {
  std::string out;
  for (const auto& [x, e] : s) out += x + " := " + to_string(e) + "\n";
  return out;
}

int formula_size(const F& f) {
  int n = 0;
  switch (f->kind) {
    case K::True:
    case K::False:
      return 1;
    case K::Atom:
      n = 1;
      for (const auto& a : f->args) n += term_size(a);
      return n;
    case K::Not:
      return 1 + formula_size(f->kids[0]);
    case K::Forall:
    case K::Exists:
      return 2 + formula_size(f->kids[0]);
    case K::Gfp:
      n = 2 + static_cast<int>(f->bound.size()) + formula_size(f->kids[0]);
      for (const auto& a : f->args) n += term_size(a);
      return n;
    default:
      n = static_cast<int>(f->kids.size()) - 1;
      for (const auto& k : f->kids) n += formula_size(k);
      return n;
  }
}

int pred_expr_size(const PredExpr& e) { return 1 + static_cast<int>(e.params.size()) + formula_size(e.body); }

}  // namespace scanw

#include "scanw/verify.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <queue>
#include <random>
#include <set>
#include <sstream>

#include "scanw/calculus.hpp"
#include "scanw/subsumption.hpp"

namespace scanw {

// ---------------------------------------------------------------- models

size_t tuple_count(int n, int arity) {
  size_t c = 1;
  for (int i = 0; i < arity; ++i) {
    if (c > SIZE_MAX / static_cast<size_t>(n)) return SIZE_MAX;
    c *= static_cast<size_t>(n);
  }
  return c;
}

size_t tuple_index(const std::vector<int>& tuple, int n) {
  size_t idx = 0;
  for (int v : tuple) idx = idx * static_cast<size_t>(n) + static_cast<size_t>(v);
  return idx;
}

namespace {
std::vector<int> tuple_at(size_t idx, int n, int arity) {
  std::vector<int> t(static_cast<size_t>(arity));
  for (int i = arity - 1; i >= 0; --i) {
    t[static_cast<size_t>(i)] = static_cast<int>(idx % static_cast<size_t>(n));
    idx /= static_cast<size_t>(n);
  }
  return t;
}
}  // namespace

Relation Relation::empty(int n, int arity) { return Relation{arity, std::vector<bool>(tuple_count(n, arity), false)}; }
Relation Relation::full(int n, int arity) { return Relation{arity, std::vector<bool>(tuple_count(n, arity), true)}; }

bool Relation::holds(const std::vector<int>& tuple, int n) const {
  if (static_cast<int>(tuple.size()) != arity) throw Error(Error::Kind::Arity, "relation applied to wrong number of arguments");
  return bits.at(tuple_index(tuple, n));
}

void FiniteModel::set_function(const std::string& f, int arity, std::vector<int> table) {
  if (table.size() != tuple_count(n, arity)) throw Error(Error::Kind::Invalid, "function table of " + f + " is not total");
  for (int v : table)
    if (v < 0 || v >= n) throw Error(Error::Kind::Invalid, "function table of " + f + " leaves the domain");
  functions[f] = {arity, std::move(table)};
}

void FiniteModel::set_relation(const std::string& p, int arity, const std::vector<std::vector<int>>& tuples) {
  Relation r = Relation::empty(n, arity);
  for (const auto& t : tuples) {
    if (static_cast<int>(t.size()) != arity) throw Error(Error::Kind::Arity, "tuple of wrong arity for " + p);
    r.bits[tuple_index(t, n)] = true;
  }
  relations[p] = std::move(r);
}

std::string FiniteModel::to_string() const {
  std::ostringstream os;
  os << "domain {0.." << n - 1 << "}";
  for (const auto& [f, t] : functions) {
    os << "; " << f;
    if (t.first == 0) {
      os << " = " << t.second[0];
      continue;
    }
    os << " = [";
    for (size_t i = 0; i < t.second.size(); ++i) os << (i ? " " : "") << t.second[i];
    os << "]";
  }
  for (const auto& [p, r] : relations) {
    os << "; " << p << " = {";
    bool first = true;
    for (size_t i = 0; i < r.bits.size(); ++i) {
      if (!r.bits[i]) continue;
      auto t = tuple_at(i, n, r.arity);
      os << (first ? "" : ",") << "(";
      for (size_t j = 0; j < t.size(); ++j) os << (j ? "," : "") << t[j];
      os << ")";
      first = false;
    }
    os << "}";
  }
  return os.str();
}

namespace {

/// Evaluator with a mutable environment (bindings are pushed and restored).
class Evaluator {
 public:
  Evaluator(const FiniteModel& m, Env env) : m_(m), env_(std::move(env)) {}

  int term(const Term& t) {
    if (t.is_var) {
      auto it = env_.vars.find(t.name);
      if (it == env_.vars.end()) throw Error(Error::Kind::Invalid, "unbound variable " + t.name);
      return it->second;
    }
    auto it = m_.functions.find(t.name);
    if (it == m_.functions.end()) throw Error(Error::Kind::Invalid, "uninterpreted function symbol " + t.name);
    if (static_cast<size_t>(it->second.first) != t.args.size())
      throw Error(Error::Kind::Arity, "function " + t.name + " applied to wrong number of arguments");
    size_t idx = 0;
    for (const auto& a : t.args) idx = idx * static_cast<size_t>(m_.n) + static_cast<size_t>(term(a));
    return it->second.second[idx];
  }

  std::vector<int> terms(const std::vector<Term>& ts) {
    std::vector<int> out;
    out.reserve(ts.size());
    for (const auto& t : ts) out.push_back(term(t));
    return out;
  }

  const Relation& relation(Head kind, const std::string& name) {
    if (kind == Head::PredVar) {
      auto it = env_.preds.find(name);
      if (it != env_.preds.end()) return it->second;
    }
    auto it = m_.relations.find(name);
    if (it == m_.relations.end()) throw Error(Error::Kind::Invalid, "uninterpreted predicate symbol " + name);
    return it->second;
  }

  bool literal(const Literal& l) {
    bool v;
    if (l.kind == Head::Eq) v = term(l.args[0]) == term(l.args[1]);
    else v = relation(l.kind, l.head).holds(terms(l.args), m_.n);
    return v == l.pos;
  }

  bool formula(const F& f) {
    switch (f->kind) {
      case Formula::Kind::True: return true;
      case Formula::Kind::False: return false;
      case Formula::Kind::Atom:
        if (f->head_kind == Head::Eq) return term(f->args[0]) == term(f->args[1]);
        return relation(f->head_kind, f->name).holds(terms(f->args), m_.n);
      case Formula::Kind::Not: return !formula(f->kids[0]);
      case Formula::Kind::And:
        for (const auto& k : f->kids)
          if (!formula(k)) return false;
        return true;
      case Formula::Kind::Or:
        for (const auto& k : f->kids)
          if (formula(k)) return true;
        return false;
      case Formula::Kind::Imp: return !formula(f->kids[0]) || formula(f->kids[1]);
      case Formula::Kind::Iff: return formula(f->kids[0]) == formula(f->kids[1]);
      case Formula::Kind::Forall:
      case Formula::Kind::Exists: {
        bool want = f->kind == Formula::Kind::Exists;
        auto saved = bind_save(f->name);
        bool result = !want;
        for (int e = 0; e < m_.n; ++e) {
          env_.vars[f->name] = e;
          if (formula(f->kids[0]) == want) {
            result = want;
            break;
          }
        }
        restore(f->name, saved);
        return result;
      }
      case Formula::Kind::Gfp: {
        std::vector<int> at = terms(f->args);
        Relation r = gfp(f->name, f->bound, f->kids[0]);
        return r.holds(at, m_.n);
      }
    }
    return false;
  }

  /// Greatest fixpoint of λū.body with Y bound to the current iterate.
  Relation gfp(const std::string& y, const std::vector<std::string>& bound, const F& body) {
    int k = static_cast<int>(bound.size());
    Relation cur = Relation::full(m_.n, k);
    auto saved_pred = env_.preds.find(y) != env_.preds.end() ? std::optional<Relation>(env_.preds[y]) : std::nullopt;
    while (true) {
      env_.preds[y] = cur;
      Relation next = extension_of(bound, body);
      if (next == cur) break;
      cur = std::move(next);
    }
    if (saved_pred) env_.preds[y] = *saved_pred;
    else env_.preds.erase(y);
    return cur;
  }

  Relation extension_of(const std::vector<std::string>& params, const F& body) {
    int k = static_cast<int>(params.size());
    Relation r = Relation::empty(m_.n, k);
    std::vector<std::optional<int>> saved;
    for (const auto& p : params) saved.push_back(bind_save(p));
    for (size_t i = 0; i < r.bits.size(); ++i) {
      auto t = tuple_at(i, m_.n, k);
      for (int j = 0; j < k; ++j) env_.vars[params[static_cast<size_t>(j)]] = t[static_cast<size_t>(j)];
      r.bits[i] = formula(body);
    }
    for (size_t j = params.size(); j-- > 0;) restore(params[j], saved[j]);
    return r;
  }

  Env& env() { return env_; }

 private:
  std::optional<int> bind_save(const std::string& v) {
    auto it = env_.vars.find(v);
    return it == env_.vars.end() ? std::nullopt : std::optional<int>(it->second);
  }
  void restore(const std::string& v, const std::optional<int>& old) {
    if (old) env_.vars[v] = *old;
    else env_.vars.erase(v);
  }

  const FiniteModel& m_;
  Env env_;
};

}  // namespace

int eval_term(const FiniteModel& m, const Env& env, const Term& t) { return Evaluator(m, env).term(t); }

bool eval(const FiniteModel& m, const Env& env, const F& f) { return Evaluator(m, env).formula(f); }

bool eval(const FiniteModel& m, const F& f) { return eval(m, Env{}, f); }

Relation extension(const FiniteModel& m, const Env& env, const PredExpr& e) {
  return Evaluator(m, env).extension_of(e.params, e.body);
}

ClauseChecker::ClauseChecker(const FiniteModel& m, const std::vector<Clause>& cs,
                             const std::map<std::string, const Relation*>& preds)
    : m_(m) {
  for (const auto& c : cs) {
    CClause cc;
    std::map<std::string, int> vars;
    for (const auto& l : c.lits()) {
      CLit cl;
      cl.pos = l.pos;
      cl.eq = l.kind == Head::Eq;
      if (!cl.eq) {
        const Relation* r = nullptr;
        if (l.kind == Head::PredVar) {
          auto it = preds.find(l.head);
          if (it != preds.end()) r = it->second;
        }
        if (!r) {
          auto it = m.relations.find(l.head);
          if (it == m.relations.end()) throw Error(Error::Kind::Invalid, "uninterpreted predicate symbol " + l.head);
          r = &it->second;
        }
        if (r->arity != static_cast<int>(l.args.size()))
          throw Error(Error::Kind::Arity, "predicate " + l.head + " applied to wrong number of arguments");
        cl.bits = &r->bits;
      }
      for (const auto& a : l.args) cl.args.push_back(compile(a, vars));
      cc.lits.push_back(std::move(cl));
    }
    cc.vars = static_cast<int>(vars.size());
    clauses_.push_back(std::move(cc));
  }
}

ClauseChecker::CTerm ClauseChecker::compile(const Term& t, std::map<std::string, int>& vars) const {
  CTerm ct;
  if (t.is_var) {
    auto it = vars.find(t.name);
    if (it == vars.end()) it = vars.emplace(t.name, static_cast<int>(vars.size())).first;
    ct.var = it->second;
    return ct;
  }
  auto it = m_.functions.find(t.name);
  if (it == m_.functions.end()) throw Error(Error::Kind::Invalid, "uninterpreted function symbol " + t.name);
  if (static_cast<size_t>(it->second.first) != t.args.size())
    throw Error(Error::Kind::Arity, "function " + t.name + " applied to wrong number of arguments");
  ct.table = &it->second.second;
  for (const auto& a : t.args) ct.args.push_back(compile(a, vars));
  return ct;
}

int ClauseChecker::term(const CTerm& t, const int* vals) const {
  if (t.var >= 0) return vals[t.var];
  size_t idx = 0;
  for (const auto& a : t.args) idx = idx * static_cast<size_t>(m_.n) + static_cast<size_t>(term(a, vals));
  return (*t.table)[idx];
}

bool ClauseChecker::holds(size_t ci) const {
  const CClause& c = clauses_[ci];
  int vals[16] = {0};
  std::vector<int> big;
  int* v = vals;
  if (c.vars > 16) {
    big.assign(static_cast<size_t>(c.vars), 0);
    v = big.data();
  }
  while (true) {
    bool sat = false;
    for (const auto& l : c.lits) {
      bool val;
      if (l.eq) {
        val = term(l.args[0], v) == term(l.args[1], v);
      } else {
        size_t idx = 0;
        for (const auto& a : l.args) idx = idx * static_cast<size_t>(m_.n) + static_cast<size_t>(term(a, v));
        val = (*l.bits)[idx];
      }
      if (val == l.pos) {
        sat = true;
        break;
      }
    }
    if (!sat) return false;
    int i = 0;
    while (i < c.vars && ++v[i] == m_.n) v[i++] = 0;
    if (i == c.vars) return true;
  }
}

bool ClauseChecker::holds() const {
  for (size_t i = 0; i < clauses_.size(); ++i)
    if (!holds(i)) return false;
  return true;
}

bool eval_clauses(const FiniteModel& m, const Env& env, const std::vector<Clause>& cs) {
  std::map<std::string, const Relation*> preds;
  for (const auto& [x, r] : env.preds) preds.emplace(x, &r);
  return ClauseChecker(m, cs, preds).holds();
}

bool soqe_holds(const FiniteModel& m, const std::vector<Clause>& n, const std::vector<std::pair<std::string, int>>& xs) {
  std::vector<size_t> sizes;
  size_t bits = 0;
  for (const auto& [x, a] : xs) {
    size_t c = tuple_count(m.n, a);
    if (c > 9) throw Error(Error::Kind::Budget, "relation enumeration for " + x + " too large (n^arity > 9)");
    sizes.push_back(c);
    bits += c;
  }
  // Clauses without predicate variables must hold regardless of X̄.
  std::vector<Clause> with_x, without_x;
  std::set<std::string> names;
  for (const auto& [x, a] : xs) names.insert(x);
  for (const auto& c : n) {
    bool has = false;
    for (const auto& l : c.lits()) has = has || (l.kind == Head::PredVar && names.count(l.head));
    (has ? with_x : without_x).push_back(c);
  }
  if (!ClauseChecker(m, without_x).holds()) return false;
  if (with_x.empty()) return true;
  std::vector<Relation> rels;
  for (const auto& [x, a] : xs) rels.push_back(Relation::empty(m.n, a));
  std::map<std::string, const Relation*> preds;
  for (size_t i = 0; i < xs.size(); ++i) preds.emplace(xs[i].first, &rels[i]);
  ClauseChecker check(m, with_x, preds);
  uint64_t total = uint64_t{1} << bits;
  for (uint64_t code = 0; code < total; ++code) {
    size_t off = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
      for (size_t b = 0; b < sizes[i]; ++b) rels[i].bits[b] = (code >> (off + b)) & 1U;
      off += sizes[i];
    }
    if (check.holds()) return true;
  }
  return false;
}

// ------------------------------------------------------- model enumeration

namespace {
void add_symbol(std::vector<std::pair<std::string, int>>& v, const std::string& name, int arity) {
  for (const auto& [n, a] : v)
    if (n == name) return;
  v.emplace_back(name, arity);
}
void add_term_symbols(ModelSignature& sig, const Term& t) {
  if (t.is_var) return;
  add_symbol(sig.functions, t.name, static_cast<int>(t.args.size()));
  for (const auto& a : t.args) add_term_symbols(sig, a);
}
}  // namespace

void ModelSignature::add_clauses(const std::vector<Clause>& cs, const std::vector<std::string>& skip) {
  for (const auto& c : cs)
    for (const auto& l : c.lits()) {
      for (const auto& a : l.args) add_term_symbols(*this, a);
      if (l.kind == Head::Eq) continue;
      if (std::find(skip.begin(), skip.end(), l.head) != skip.end()) continue;
      add_symbol(predicates, l.head, static_cast<int>(l.args.size()));
    }
}

void ModelSignature::add_formula(const F& f, const std::vector<std::string>& skip) {
  std::map<std::string, std::pair<SymKind, int>> syms;
  symbols_of(f, syms);
  std::set<std::string> free_pv = free_predvars(f);  // gfp-bound names are not interpreted
  for (const auto& [name, info] : syms) {
    if (std::find(skip.begin(), skip.end(), name) != skip.end()) continue;
    if (info.first == SymKind::PredVar && !free_pv.count(name)) continue;
    if (info.first == SymKind::Function) add_symbol(functions, name, info.second);
    else add_symbol(predicates, name, info.second);
  }
}

uint64_t model_count(const ModelSignature& sig, int n) {
  long double c = 1;
  for (const auto& [f, a] : sig.functions) c *= std::pow(static_cast<long double>(n), static_cast<long double>(tuple_count(n, a)));
  for (const auto& [p, a] : sig.predicates) c *= std::pow(2.0L, static_cast<long double>(tuple_count(n, a)));
  if (c >= 1.8e19L) return UINT64_MAX;
  return static_cast<uint64_t>(c);
}

int effective_max_size(const ModelSignature& sig, int requested) {
  int proper = 0;
  bool small = true;
  for (const auto& [f, a] : sig.functions) {
    if (a == 0) continue;
    ++proper;
    small = small && a <= 2;
  }
  if (requested >= 3 && !(proper <= 2 && small)) return std::min(requested, 2);
  return requested;
}

EnumerationStats enumerate_models(const ModelSignature& sig, const EnumerationLimits& limits,
                                  const std::function<bool(const FiniteModel&)>& visit) {
  EnumerationStats stats;
  std::mt19937_64 rng(limits.seed);
  int top = effective_max_size(sig, limits.max_size);
  for (int n = 1; n <= top; ++n) {
    // Digits: every function-table entry (radix n), then every relation bit.
    // The model is updated in place as the digits change.
    FiniteModel m;
    m.n = n;
    for (const auto& [f, a] : sig.functions) m.functions[f] = {a, std::vector<int>(tuple_count(n, a), 0)};
    for (const auto& [p, a] : sig.predicates) m.relations[p] = Relation::empty(n, a);
    struct Slot {
      std::vector<int>* table;
      std::vector<bool>* bits;
      size_t index;
      int radix;
    };
    std::vector<Slot> slots;
    for (const auto& [f, a] : sig.functions) {
      auto& t = m.functions[f].second;
      for (size_t i = 0; i < t.size(); ++i) slots.push_back({&t, nullptr, i, n});
    }
    for (const auto& [p, a] : sig.predicates) {
      auto& b = m.relations[p].bits;
      for (size_t i = 0; i < b.size(); ++i) slots.push_back({nullptr, &b, i, 2});
    }
    auto set = [&](const Slot& s, int v) {
      if (s.table) (*s.table)[s.index] = v;
      else (*s.bits)[s.index] = v != 0;
    };
    std::vector<int> digits(slots.size(), 0);
    uint64_t count = model_count(sig, n);
    stats.max_size = n;
    if (count > limits.max_models) {
      stats.sampled = true;
      for (uint64_t k = 0; k < limits.sample; ++k) {
        for (const auto& s : slots) set(s, static_cast<int>(rng() % static_cast<uint64_t>(s.radix)));
        ++stats.models;
        if (!visit(m)) return stats;
      }
      continue;
    }
    while (true) {
      ++stats.models;
      if (!visit(m)) return stats;
      size_t i = 0;
      while (i < digits.size() && ++digits[i] == slots[i].radix) {
        digits[i] = 0;
        set(slots[i], 0);
        ++i;
      }
      if (i == digits.size()) break;
      set(slots[i], digits[i]);
    }
  }
  return stats;
}

// --------------------------------------------------------- clausification

namespace {

F nnf(const F& f, bool neg) {
  switch (f->kind) {
    case Formula::Kind::True: return neg ? f_false() : f_true();
    case Formula::Kind::False: return neg ? f_true() : f_false();
    case Formula::Kind::Atom: return neg ? f_not(f) : f;
    case Formula::Kind::Not: return nnf(f->kids[0], !neg);
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::vector<F> ks;
      for (const auto& k : f->kids) ks.push_back(nnf(k, neg));
      bool conj = (f->kind == Formula::Kind::And) != neg;
      return conj ? f_and(std::move(ks)) : f_or(std::move(ks));
    }
    case Formula::Kind::Imp: {
      F a = nnf(f->kids[0], !neg), b = nnf(f->kids[1], neg);
      return neg ? f_and(a, b) : f_or(a, b);
    }
    case Formula::Kind::Iff: {
      const F& a = f->kids[0];
      const F& b = f->kids[1];
      if (!neg) return f_and(f_or(nnf(a, true), nnf(b, false)), f_or(nnf(b, true), nnf(a, false)));
      return f_or(f_and(nnf(a, false), nnf(b, true)), f_and(nnf(a, true), nnf(b, false)));
    }
    case Formula::Kind::Forall:
    case Formula::Kind::Exists: {
      bool all = (f->kind == Formula::Kind::Forall) != neg;
      F body = nnf(f->kids[0], neg);
      return all ? f_forall(f->name, body) : f_exists(f->name, body);
    }
    case Formula::Kind::Gfp: throw Error(Error::Kind::Invalid, "formulas with gfp cannot be clausified");
  }
  return f;
}

Term subst_term(const Term& t, const Subst& s) { return apply_subst(t, s); }

/// Renames binders apart and replaces existential variables by Skolem terms
/// over the universal variables they depend on. Returns a quantifier-free
/// NNF formula.
F skolemize(const F& f, std::vector<std::string>& univ, Subst& sub, NameGen& names) {
  switch (f->kind) {
    case Formula::Kind::True:
    case Formula::Kind::False: return f;
    case Formula::Kind::Atom: {
      std::vector<Term> args;
      for (const auto& a : f->args) args.push_back(subst_term(a, sub));
      return f_atom(f->head_kind, f->name, std::move(args));
    }
    case Formula::Kind::Not: return f_not(skolemize(f->kids[0], univ, sub, names));
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::vector<F> ks;
      for (const auto& k : f->kids) ks.push_back(skolemize(k, univ, sub, names));
      return f->kind == Formula::Kind::And ? f_and(std::move(ks)) : f_or(std::move(ks));
    }
    case Formula::Kind::Forall:
    case Formula::Kind::Exists: {
      auto old = sub.find(f->name) != sub.end() ? std::optional<Term>(sub[f->name]) : std::nullopt;
      if (f->kind == Formula::Kind::Forall) {
        std::string v = names.fresh("v");
        sub[f->name] = Term::var(v);
        univ.push_back(v);
        F r = skolemize(f->kids[0], univ, sub, names);
        univ.pop_back();
        if (old) sub[f->name] = *old;
        else sub.erase(f->name);
        return r;
      }
      // Skolem arguments: the universals the existential's scope depends on.
      std::set<std::string> deps;
      for (const auto& fv : free_vars(f))
        if (auto it = sub.find(fv); it != sub.end()) collect_vars(it->second, deps);
        else deps.insert(fv);
      std::vector<Term> args;
      for (const auto& u : univ)
        if (deps.count(u)) args.push_back(Term::var(u));
      sub[f->name] = Term::app(names.fresh("sk"), std::move(args));
      F r = skolemize(f->kids[0], univ, sub, names);
      if (old) sub[f->name] = *old;
      else sub.erase(f->name);
      return r;
    }
    default: throw Error(Error::Kind::Internal, "skolemize: unexpected connective");
  }
}

Literal to_literal(const F& atom, bool pos) {
  if (atom->head_kind == Head::Eq) return Literal::eq(pos, atom->args[0], atom->args[1]);
  return Literal{pos, atom->head_kind, atom->name, atom->args};
}

constexpr size_t kMaxCnfClauses = 50000;

std::vector<Lits> cnf(const F& f) {
  switch (f->kind) {
    case Formula::Kind::True: return {};
    case Formula::Kind::False: return {Lits{}};
    case Formula::Kind::Atom: return {Lits{to_literal(f, true)}};
    case Formula::Kind::Not: return {Lits{to_literal(f->kids[0], false)}};
    case Formula::Kind::And: {
      std::vector<Lits> out;
      for (const auto& k : f->kids) {
        auto part = cnf(k);
        out.insert(out.end(), part.begin(), part.end());
      }
      return out;
    }
    case Formula::Kind::Or: {
      std::vector<Lits> out = {Lits{}};
      for (const auto& k : f->kids) {
        auto part = cnf(k);
        std::vector<Lits> next;
        if (out.size() * part.size() > kMaxCnfClauses) throw Error(Error::Kind::Budget, "clause normal form too large");
        for (const auto& a : out)
          for (const auto& b : part) {
            Lits c = a;
            c.insert(c.end(), b.begin(), b.end());
            next.push_back(std::move(c));
          }
        out = std::move(next);
      }
      return out;
    }
    default: throw Error(Error::Kind::Internal, "cnf: unexpected connective");
  }
}

void reserve_formula(const F& f, NameGen& names) {
  std::set<std::string> vs;
  all_var_names(f, vs);
  for (const auto& v : vs) names.reserve(v);
  std::map<std::string, std::pair<SymKind, int>> syms;
  symbols_of(f, syms);
  for (const auto& [s, info] : syms) names.reserve(s);
}

}  // namespace

std::vector<Clause> clausify(const F& f, NameGen& names) {
  reserve_formula(f, names);
  F n = nnf(f, false);
  std::vector<std::string> univ;
  Subst sub;
  F qf = skolemize(n, univ, sub, names);
  std::vector<Clause> out;
  std::set<std::string> seen;
  for (const auto& ls : cnf(qf)) {
    Clause c(ls);
    if (is_tautology(c)) continue;
    if (seen.insert(c.key()).second) out.push_back(c);
  }
  return out;
}

std::vector<Clause> clausify(const F& f) {
  NameGen names;
  return clausify(f, names);
}

// ----------------------------------------------------------------- prover

std::string to_string(ProverResult::Status s) {
  switch (s) {
    case ProverResult::Status::Proved: return "proved";
    case ProverResult::Status::Disproved: return "disproved";
    case ProverResult::Status::Unknown: return "unknown";
  }
  return "";
}

namespace {

/// Subsumption restricted to subsumers with at most as many literals, so a
/// clause never deletes its own factors.
bool subsumes_short(const Clause& c, const Clause& d) { return c.size() <= d.size() && subsumes(c, d); }

bool has_reflexive_equation(const Clause& c) {
  for (const auto& l : c.lits())
    if (l.kind == Head::Eq && l.pos && l.args[0] == l.args[1]) return true;
  return false;
}

class Prover {
 public:
  Prover(std::vector<Clause> initial, const ProverLimits& limits)
      : limits_(limits), deadline_(limits.timeout), initial_(std::move(initial)), st_(initial_) {}

  ProverResult run() {
    ProverResult res;
    res.initial = initial_;
    for (const auto& [id, c] : std::map<int, Clause>(st_.live())) admit(id);
    while (!empty_id_ && !passive_.empty()) {
      if (deadline_.expired()) {
        res.note = "timeout";
        break;
      }
      if (inferences_ > limits_.max_inferences) {
        res.note = "inference limit reached";
        break;
      }
      auto [w, id] = passive_.top();
      passive_.pop();
      if (!st_.has(id) || st_.resolve(id) != id) continue;
      const Clause g = st_.get(id);
      bool redundant = false;
      for (int a : active_)
        if (subsumes_short(st_.get(a), g)) {
          redundant = true;
          break;
        }
      if (redundant) continue;
      active_.erase(std::remove_if(active_.begin(), active_.end(), [&](int a) { return subsumes_short(g, st_.get(a)); }),
                    active_.end());
      active_.push_back(id);
      generate(id);
    }
    res.inferences = inferences_;
    if (empty_id_) {
      res.status = ProverResult::Status::Proved;
      res.trace = extract(empty_id_);
      return res;
    }
    if (res.note.empty()) res.note = discarded_ ? "saturated (long clauses discarded)" : "saturated";
    if (limits_.countermodels) {
      ModelSignature sig;
      sig.add_clauses(initial_);
      EnumerationLimits el;
      el.max_models = 50000;
      el.sample = 5000;
      std::optional<FiniteModel> found;
      enumerate_models(sig, el, [&](const FiniteModel& m) {
        if (deadline_.expired()) return false;
        if (!eval_clauses(m, Env{}, initial_)) return true;
        found = m;
        return false;
      });
      if (found) {
        res.status = ProverResult::Status::Disproved;
        res.countermodel = found;
        res.note = "countermodel of size " + std::to_string(found->n);
      }
    }
    return res;
  }

 private:
  void admit(int id) {
    const Clause& c = st_.get(id);
    if (c.empty()) {
      empty_id_ = id;
      return;
    }
    VarElimResult v = normalize_constraints(c);
    if (v.applied) {
      Step s;
      s.kind = Step::Kind::VarElim;
      s.clause = id;
      if (record(s, {id})) admit(st_.resolve(s.result));
      return;
    }
    if (is_tautology(c) || has_reflexive_equation(c)) return;
    if (c.size() > static_cast<size_t>(limits_.max_clause_lits)) {
      discarded_ = true;
      return;
    }
    int weight = clause_size(c) + static_cast<int>(c.size());
    passive_.push({weight, id});
  }

  /// Applies the step; returns whether a new clause was added.
  bool record(Step& s, std::vector<int> parents) {
    try {
      apply_step(st_, s, {});
    } catch (const Error&) {
      return false;
    }
    if (st_.resolve(s.result) != s.result) return false;  // duplicate
    steps_.emplace(s.result, s);
    parents_.emplace(s.result, std::move(parents));
    return true;
  }

  void infer(Step s, std::vector<int> parents) {
    if (empty_id_) return;
    ++inferences_;
    if (record(s, std::move(parents))) admit(s.result);
  }

  void generate(int gi) {
    const Clause g = st_.get(gi);
    std::vector<int> act = active_;
    for (int hi : act) {
      if (empty_id_) return;
      const Clause h = st_.get(hi);
      for (size_t i = 0; i < g.size(); ++i)
        for (size_t j = 0; j < h.size(); ++j) {
          if (hi == gi && j <= i) continue;
          if (!resolvable(PointedClause(g, static_cast<int>(i)), PointedClause(h, static_cast<int>(j)))) continue;
          Step s;
          s.kind = Step::Kind::Res;
          s.a = {gi, static_cast<int>(i)};
          s.b = {hi, static_cast<int>(j)};
          infer(s, {gi, hi});
        }
      paramod(gi, g, hi, h);
      if (hi != gi) paramod(hi, h, gi, g);
    }
    for (size_t i = 0; i < g.size(); ++i) {
      if (g[i].is_constraint()) {
        if (!mgu({g[i].args[0]}, {g[i].args[1]})) continue;
        Step s;
        s.kind = Step::Kind::ConstrElim;
        s.a = {gi, 0};
        s.sel = {static_cast<int>(i)};
        infer(s, {gi});
      }
      for (size_t j = i + 1; j < g.size(); ++j) {
        if (g[i].kind != g[j].kind || g[i].head != g[j].head || g[i].pos != g[j].pos) continue;
        if (g[i].kind == Head::Eq && !g[i].pos) continue;
        if (!mgu(g[i].args, g[j].args)) continue;
        Step s;
        s.kind = Step::Kind::Fac;
        s.a = {gi, static_cast<int>(i)};
        s.b = {gi, static_cast<int>(j)};
        infer(s, {gi});
      }
    }
  }

  void paramod(int ei, const Clause& e, int ti, const Clause& t) {
    for (const auto& pm : all_paramodulants(e, t)) {
      if (empty_id_) return;
      Step s;
      s.kind = Step::Kind::ParMod;
      s.a = {ei, static_cast<int>(pm.eq_lit)};
      s.eq_dir = pm.left_to_right ? 1 : -1;
      s.target = ti;
      s.pos = pm.pos;
      infer(s, {ei, ti});
    }
  }

  std::vector<Step> extract(int goal) {
    std::set<int> need;
    std::vector<int> stack = {goal};
    while (!stack.empty()) {
      int id = stack.back();
      stack.pop_back();
      if (!need.insert(id).second) continue;
      auto it = parents_.find(id);
      if (it == parents_.end()) continue;
      for (int p : it->second) stack.push_back(p);
    }
    std::vector<Step> out;
    for (int id : need)
      if (steps_.count(id)) out.push_back(steps_.at(id));
    return out;  // ids increase with creation order
  }

  ProverLimits limits_;
  Deadline deadline_;
  std::vector<Clause> initial_;
  State st_;
  std::priority_queue<std::pair<int, int>, std::vector<std::pair<int, int>>, std::greater<>> passive_;
  std::vector<int> active_;
  std::map<int, Step> steps_;
  std::map<int, std::vector<int>> parents_;
  int empty_id_ = 0;
  int inferences_ = 0;
  bool discarded_ = false;
};

std::vector<Clause> dedupe(const std::vector<Clause>& cs) {
  std::vector<Clause> out;
  std::set<std::string> seen;
  for (const auto& c : cs)
    if (seen.insert(c.key()).second) out.push_back(c);
  return out;
}

}  // namespace

ProverResult refute(const std::vector<Clause>& clauses, const ProverLimits& limits) {
  return Prover(dedupe(clauses), limits).run();
}

ProverResult prove(const std::vector<Clause>& premises, const F& goal, const ProverLimits& limits) {
  NameGen names;
  for (const auto& c : premises)
    for (const auto& l : c.lits()) {
      names.reserve(l.head);
      std::set<std::string> vs;
      collect_vars(l, vs);
      for (const auto& v : vs) names.reserve(v);
      for (const auto& a : l.args) {
        std::vector<Term> stack = {a};
        while (!stack.empty()) {
          Term t = stack.back();
          stack.pop_back();
          names.reserve(t.name);
          for (const auto& s : t.args) stack.push_back(s);
        }
      }
    }
  std::vector<Clause> all = premises;
  auto neg = clausify(f_not(goal), names);
  all.insert(all.end(), neg.begin(), neg.end());
  return refute(all, limits);
}

// ------------------------------------------------------- witness checking

std::string to_string(WitnessReport::Verdict v) {
  switch (v) {
    case WitnessReport::Verdict::Pass: return "PASS";
    case WitnessReport::Verdict::Fail: return "FAIL";
    case WitnessReport::Verdict::Unknown: return "UNKNOWN";
  }
  return "";
}

std::string WitnessReport::to_string() const {
  std::ostringstream os;
  os << "verification: " << scanw::to_string(verdict) << "\n";
  if (goals.empty()) {
    os << "  prover: skipped" << (prover_note.empty() ? "" : " (" + prover_note + ")") << "\n";
  } else {
    int proved = 0;
    for (const auto& g : goals) proved += g.status == ProverResult::Status::Proved;
    os << "  prover: " << proved << "/" << goals.size() << " clauses proved from the conclusion\n";
    for (const auto& g : goals)
      if (g.status != ProverResult::Status::Proved)
        os << "    " << scanw::to_string(g.status) << ": " << scanw::to_string(g.clause)
           << (g.note.empty() ? "" : " (" + g.note + ")") << "\n";
  }
  if (!models_checked) {
    os << "  models: skipped" << (mismatch_note.empty() ? "" : " (" + mismatch_note + ")") << "\n";
  } else if (mismatch) {
    os << "  models: mismatch (" << mismatch_note << ") in " << mismatch->to_string() << "\n";
  } else {
    os << "  models: " << model_stats.models << " models up to size " << model_stats.max_size
       << (model_stats.sampled ? " (sampled)" : "") << " agree\n";
  }
  return os.str();
}

namespace {
bool contains_gfp(const F& f) {
  if (f->kind == Formula::Kind::Gfp) return true;
  for (const auto& k : f->kids)
    if (contains_gfp(k)) return true;
  return false;
}
}  // namespace

WitnessReport check_witness(const std::vector<Clause>& n, const std::vector<std::pair<std::string, int>>& xs,
                            const std::vector<Clause>& conclusion, const PredSubst& w, const CheckOptions& opts) {
  std::map<std::string, int> arity(xs.begin(), xs.end());
  std::vector<std::string> xnames;
  for (const auto& [x, a] : xs) xnames.push_back(x);
  for (const auto& [x, e] : w) {
    auto it = arity.find(x);
    if (it == arity.end()) throw Error(Error::Kind::Arity, "witness for " + x + ", which is not a predicate variable of the problem");
    if (static_cast<int>(e.params.size()) != it->second)
      throw Error(Error::Kind::Arity, "witness for " + x + " has " + std::to_string(e.params.size()) + " parameters, expected " +
                                          std::to_string(it->second));
  }
  NameGen names;
  for (const auto& c : n)
    for (const auto& l : c.lits()) names.reserve(l.head);
  for (const auto& [x, e] : w) reserve_formula(e.body, names);
  for (const auto& x : xnames) names.reserve(x);

  WitnessReport rep;
  bool gfp = false;
  for (const auto& [x, e] : w) gfp = gfp || contains_gfp(e.body);
  // Predicate variables left free by the witness are read existentially.
  std::vector<std::pair<std::string, int>> rest;
  for (const auto& [x, a] : xs)
    if (!w.count(x)) rest.emplace_back(x, a);

  if (!opts.use_prover) {
    rep.prover_note = "disabled";
  } else if (gfp) {
    rep.prover_note = "fixpoint witness; finite models only";
  } else {
    bool free_x = false;
    for (const auto& c : n)
      for (const auto& l : c.lits())
        free_x = free_x || (l.kind == Head::PredVar && arity.count(l.head) && !w.count(l.head));
    if (free_x) {
      rep.prover_note = "witness leaves predicate variables free";
    } else {
      for (const auto& c : n) {
        F goal = apply_pred_subst(c, w, names);
        ProverResult r = prove(conclusion, goal, opts.prover);
        rep.goals.push_back({c, r.status, r.note});
      }
    }
  }

  if (opts.use_models) {
    ModelSignature sig;
    sig.add_clauses(n, xnames);
    sig.add_clauses(conclusion, xnames);
    for (const auto& [x, e] : w) sig.add_formula(e.body, xnames);
    EnumerationLimits el = opts.models;
    // Keep the relation enumeration for X̄ within n^arity ≤ 9.
    int amax = 0;
    for (const auto& [x, a] : xs) amax = std::max(amax, a);
    while (el.max_size > 1 && tuple_count(el.max_size, amax) > 9) --el.max_size;
    F nw = simplify(apply_pred_subst(ClauseSet(n), w, names), names);
    try {
      rep.model_stats = enumerate_models(sig, el, [&](const FiniteModel& m) {
        bool lhs = soqe_holds(m, n, xs);
        bool rhs;
        if (rest.empty()) {
          rhs = eval(m, nw);
        } else {
          // ∃ rest. Nσ by enumeration.
          rhs = false;
          size_t bits = 0;
          for (const auto& [x, a] : rest) bits += tuple_count(m.n, a);
          for (uint64_t code = 0; code < (uint64_t{1} << bits) && !rhs; ++code) {
            Env env;
            size_t off = 0;
            for (const auto& [x, a] : rest) {
              Relation r = Relation::empty(m.n, a);
              for (size_t b = 0; b < r.bits.size(); ++b) r.bits[b] = (code >> (off + b)) & 1U;
              off += r.bits.size();
              env.preds[x] = std::move(r);
            }
            rhs = eval(m, env, nw);
          }
        }
        if (lhs == rhs) return true;
        rep.mismatch = m;
        rep.mismatch_note = lhs ? "exists X holds but N under the witness is false" : "N under the witness holds but exists X fails";
        return false;
      });
      rep.models_checked = true;
    } catch (const Error& e) {
      rep.mismatch_note = e.what();
    }
  } else {
    rep.mismatch_note = "disabled";
  }

  bool failed = rep.mismatch.has_value();
  bool prover_complete = !rep.goals.empty();
  for (const auto& g : rep.goals) {
    failed = failed || g.status == ProverResult::Status::Disproved;
    prover_complete = prover_complete && g.status == ProverResult::Status::Proved;
  }
  if (n.empty() && rep.goals.empty() && opts.use_prover && !gfp) prover_complete = true;
  if (failed) rep.verdict = WitnessReport::Verdict::Fail;
  else if (prover_complete || rep.models_checked) rep.verdict = WitnessReport::Verdict::Pass;
  else rep.verdict = WitnessReport::Verdict::Unknown;
  return rep;
}

}  // namespace scanw

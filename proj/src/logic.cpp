#include "scanw/logic.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace scanw {

// ---------------------------------------------------------------- symbols

void Signature::declare(const std::string& name, SymKind kind, int arity) {
  if (name.empty()) throw Error(Error::Kind::Input, "empty symbol name");
  auto it = table_.find(name);
  if (it == table_.end()) {
    table_.emplace(name, SymbolInfo{kind, arity});
    return;
  }
  if (it->second.kind != kind || it->second.arity != arity) {
    auto kind_name = [](SymKind k) {
      switch (k) {
        case SymKind::Function: return "function";
        case SymKind::Predicate: return "predicate";
        case SymKind::PredVar: return "predicate variable";
      }
      return "?";
    };
    std::ostringstream os;
    os << "arity conflict: '" << name << "' used as " << kind_name(kind) << "/" << arity
       << " but previously as " << kind_name(it->second.kind) << "/" << it->second.arity;
    throw Error(Error::Kind::Arity, os.str());
  }
}

std::optional<SymbolInfo> Signature::lookup(const std::string& name) const {
  auto it = table_.find(name);
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::pair<std::string, int>> Signature::of_kind(SymKind kind) const {
  std::vector<std::pair<std::string, int>> out;
  for (const auto& [n, info] : table_)
    if (info.kind == kind) out.emplace_back(n, info.arity);
  return out;
}

void Signature::merge(const Signature& other) {
  for (const auto& [n, info] : other.table_) declare(n, info.kind, info.arity);
}

void NameGen::reserve(const Signature& sig) {
  for (const auto& [n, info] : sig.symbols()) used_.insert(n);
}

std::string NameGen::fresh(const std::string& prefix) {
  for (;;) {
    std::string n = prefix + std::to_string(++counter_);
    if (used_.insert(n).second) return n;
  }
}

// ------------------------------------------------------------------ terms

bool Term::operator<(const Term& o) const {
  if (is_var != o.is_var) return is_var > o.is_var;
  if (name != o.name) return name < o.name;
  return args < o.args;
}

namespace {
void render(const Term& t, bool marked, std::string& out) {
  if (t.is_var) {
    if (marked) out += '?';
    out += t.name;
    return;
  }
  out += t.name;
  if (t.args.empty()) return;
  out += '(';
  for (size_t i = 0; i < t.args.size(); ++i) {
    if (i) out += ',';
    render(t.args[i], marked, out);
  }
  out += ')';
}
}  // namespace

std::string to_string(const Term& t) {
  std::string s;
  render(t, true, s);
  return s;
}

std::string to_plain_string(const Term& t) {
  std::string s;
  render(t, false, s);
  return s;
}

bool occurs(const std::string& var, const Term& t) {
  if (t.is_var) return t.name == var;
  for (const auto& a : t.args)
    if (occurs(var, a)) return true;
  return false;
}

bool occurs_properly(const std::string& var, const Term& t) { return !t.is_var && occurs(var, t); }

void collect_vars(const Term& t, std::set<std::string>& out) {
  if (t.is_var) {
    out.insert(t.name);
    return;
  }
  for (const auto& a : t.args) collect_vars(a, out);
}

void collect_vars_ordered(const Term& t, std::vector<std::string>& out) {
  if (t.is_var) {
    if (std::find(out.begin(), out.end(), t.name) == out.end()) out.push_back(t.name);
    return;
  }
  for (const auto& a : t.args) collect_vars_ordered(a, out);
}

int term_size(const Term& t) {
  int n = 1;
  for (const auto& a : t.args) n += term_size(a);
  return n;
}

int term_depth(const Term& t) {
  int d = 0;
  for (const auto& a : t.args) d = std::max(d, term_depth(a) + 1);
  return d;
}

// --------------------------------------------------------------- literals

bool Literal::same(const Literal& o) const {
  if (pos != o.pos || kind != o.kind || head != o.head) return false;
  if (args == o.args) return true;
  return kind == Head::Eq && args[0] == o.args[1] && args[1] == o.args[0];
}

std::string to_string(const Literal& l) {
  if (l.kind == Head::Eq) return to_string(l.args[0]) + (l.pos ? " = " : " != ") + to_string(l.args[1]);
  std::string s = l.pos ? "" : "~";
  s += l.head;
  if (!l.args.empty()) {
    s += '(';
    for (size_t i = 0; i < l.args.size(); ++i) {
      if (i) s += ',';
      s += to_string(l.args[i]);
    }
    s += ')';
  }
  return s;
}

void collect_vars(const Literal& l, std::set<std::string>& out) {
  for (const auto& a : l.args) collect_vars(a, out);
}

void collect_vars(const Lits& ls, std::set<std::string>& out) {
  for (const auto& l : ls) collect_vars(l, out);
}

// ------------------------------------------------------- canonical clauses

namespace {

void abstract_term(const Term& t, std::string& out) {
  if (t.is_var) {
    out += '_';
    return;
  }
  out += t.name;
  if (t.args.empty()) return;
  out += '(';
  for (size_t i = 0; i < t.args.size(); ++i) {
    if (i) out += ',';
    abstract_term(t.args[i], out);
  }
  out += ')';
}

std::string abstract_of(const Term& t) {
  std::string s;
  abstract_term(t, s);
  return s;
}

// Group key: head kind, head name, polarity (negative first), abstract args.
std::string group_key(const Literal& l, bool* symmetric_eq) {
  std::string k;
  k += static_cast<char>('0' + static_cast<int>(l.kind));
  k += l.head;
  k += '\x01';
  k += l.pos ? '1' : '0';
  k += '\x01';
  if (l.kind == Head::Eq) {
    std::string a = abstract_of(l.args[0]), b = abstract_of(l.args[1]);
    if (symmetric_eq) *symmetric_eq = (a == b);
    if (b < a) std::swap(a, b);
    k += a + "=" + b;
  } else {
    if (symmetric_eq) *symmetric_eq = false;
    for (const auto& t : l.args) {
      k += abstract_of(t);
      k += ',';
    }
  }
  return k;
}

struct VarMap {
  std::vector<std::pair<std::string, std::string>> pairs;  // small: linear lookup
  int next = 0;
  const std::string* find(const std::string& v) const {
    for (const auto& p : pairs)
      if (p.first == v) return &p.second;
    return nullptr;
  }
  const std::string& get(const std::string& v) {
    if (const auto* r = find(v)) return *r;
    pairs.emplace_back(v, "u" + std::to_string(next++));
    return pairs.back().second;
  }
};

void ser_term(const Term& t, VarMap& vm, std::string& out) {
  if (t.is_var) {
    out += '?';
    out += vm.get(t.name);
    return;
  }
  out += t.name;
  if (t.args.empty()) return;
  out += '(';
  for (size_t i = 0; i < t.args.size(); ++i) {
    if (i) out += ',';
    ser_term(t.args[i], vm, out);
  }
  out += ')';
}

std::string ser_literal(const Literal& l, bool flip, VarMap& vm) {
  std::string s;
  s += l.pos ? "" : "~";
  if (l.kind == Head::Eq) {
    ser_term(l.args[flip ? 1 : 0], vm, s);
    s += '=';
    ser_term(l.args[flip ? 0 : 1], vm, s);
  } else {
    s += l.head;
    s += '(';
    for (size_t i = 0; i < l.args.size(); ++i) {
      if (i) s += ',';
      ser_term(l.args[i], vm, s);
    }
    s += ')';
  }
  return s;
}

Term rename_term(const Term& t, const VarMap& vm) {
  if (t.is_var) return Term::var(*vm.find(t.name));
  Term r = Term::app(t.name);
  r.args.reserve(t.args.size());
  for (const auto& a : t.args) r.args.push_back(rename_term(a, vm));
  return r;
}

struct Canonicalizer {
  const Lits& in;
  std::vector<std::string> gkeys;
  std::vector<bool> symm;
  std::vector<bool> flip_default;
  std::vector<std::vector<int>> groups;  // literal indices per group, groups sorted by key

  // Best solution found so far.
  std::vector<std::string> best_ser;
  std::vector<std::pair<int, bool>> best_order;
  VarMap best_vm;
  bool have_best = false;
  int leaves = 0;
  static constexpr int kMaxLeaves = 512;

  explicit Canonicalizer(const Lits& lits) : in(lits) {
    gkeys.resize(in.size());
    symm.resize(in.size());
    flip_default.resize(in.size());
    for (size_t i = 0; i < in.size(); ++i) {
      bool s = false;
      gkeys[i] = group_key(in[i], &s);
      symm[i] = s;
      if (in[i].kind == Head::Eq && !s) flip_default[i] = abstract_of(in[i].args[1]) < abstract_of(in[i].args[0]);
    }
    std::vector<int> idx(in.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return gkeys[a] < gkeys[b]; });
    for (size_t i = 0; i < idx.size(); ++i) {
      if (i == 0 || gkeys[idx[i]] != gkeys[idx[i - 1]]) groups.emplace_back();
      groups.back().push_back(idx[i]);
    }
  }

  void run() {
    std::vector<std::string> ser;
    std::vector<std::pair<int, bool>> order;
    std::vector<std::vector<int>> remaining = groups;
    dfs(0, remaining, VarMap{}, ser, order);
  }

  // Returns true when the caller should stop exploring (leaf budget spent).
  bool dfs(size_t g, std::vector<std::vector<int>>& remaining, VarMap vm, std::vector<std::string>& ser,
           std::vector<std::pair<int, bool>>& order) {
    while (g < remaining.size() && remaining[g].empty()) ++g;
    if (g == remaining.size()) {
      ++leaves;
      if (!have_best || ser < best_ser) {
        best_ser = ser;
        best_order = order;
        best_vm = vm;
        have_best = true;
      }
      return leaves >= kMaxLeaves;
    }
    // Prune: if the current prefix is already larger than the best, stop.
    if (have_best) {
      size_t n = ser.size();
      for (size_t i = 0; i < n; ++i) {
        if (ser[i] < best_ser[i]) break;
        if (ser[i] > best_ser[i]) return false;
      }
    }
    struct Cand {
      size_t pos;
      bool flip;
      VarMap vm;
    };
    std::vector<Cand> cands;
    std::string best;
    for (size_t k = 0; k < remaining[g].size(); ++k) {
      int li = remaining[g][k];
      for (int f = 0; f < (symm[li] ? 2 : 1); ++f) {
        bool flip = symm[li] ? (f == 1) : flip_default[li];
        VarMap v2 = vm;
        std::string s = ser_literal(in[li], flip, v2);
        if (cands.empty() || s < best) {
          cands.clear();
          best = s;
          cands.push_back({k, flip, std::move(v2)});
        } else if (s == best) {
          cands.push_back({k, flip, std::move(v2)});
        }
      }
    }
    for (auto& c : cands) {
      int li = remaining[g][c.pos];
      remaining[g].erase(remaining[g].begin() + static_cast<long>(c.pos));
      ser.push_back(best);
      order.emplace_back(li, c.flip);
      bool stop = dfs(g, remaining, c.vm, ser, order);
      order.pop_back();
      ser.pop_back();
      remaining[g].insert(remaining[g].begin() + static_cast<long>(c.pos), li);
      if (stop) return true;
    }
    return false;
  }
};

}  // namespace

Clause::Clause(const Lits& lits, std::vector<int>* orig_to_canon) {
  if (orig_to_canon) orig_to_canon->assign(lits.size(), -1);
  if (lits.empty()) {
    key_ = "[]";
    return;
  }
  for (const auto& l : lits)
    if (l.kind == Head::Eq && l.args.size() != 2) throw Error(Error::Kind::Internal, "equality literal needs two arguments");
  Canonicalizer can(lits);
  can.run();
  std::string prev;
  for (size_t i = 0; i < can.best_order.size(); ++i) {
    const auto& [li, flip] = can.best_order[i];
    const std::string& s = can.best_ser[i];
    if (i > 0 && s == prev) {
      if (orig_to_canon) (*orig_to_canon)[li] = static_cast<int>(lits_.size()) - 1;
      continue;
    }
    prev = s;
    const Literal& src = lits[li];
    Literal l;
    l.pos = src.pos;
    l.kind = src.kind;
    l.head = src.head;
    if (src.kind == Head::Eq) {
      l.args.push_back(rename_term(src.args[flip ? 1 : 0], can.best_vm));
      l.args.push_back(rename_term(src.args[flip ? 0 : 1], can.best_vm));
    } else {
      for (const auto& a : src.args) l.args.push_back(rename_term(a, can.best_vm));
    }
    if (orig_to_canon) (*orig_to_canon)[li] = static_cast<int>(lits_.size());
    lits_.push_back(std::move(l));
    if (!key_.empty()) key_ += " | ";
    key_ += s;
  }
}

std::set<std::string> Clause::vars() const {
  std::set<std::string> v;
  collect_vars(lits_, v);
  return v;
}

bool Clause::contains_head(Head k, const std::string& head) const {
  for (const auto& l : lits_)
    if (l.kind == k && l.head == head) return true;
  return false;
}

std::string to_string(const Clause& c) {
  if (c.empty()) return "$false";
  std::string s;
  for (size_t i = 0; i < c.size(); ++i) {
    if (i) s += " | ";
    s += to_string(c[i]);
  }
  return s;
}

PointedClause::PointedClause(Clause c, int i) : clause(std::move(c)), index(i) {
  if (i < 0 || static_cast<size_t>(i) >= clause.size())
    throw Error(Error::Kind::Invalid, "designated literal index out of range");
}

PointedClause PointedClause::from(const Lits& lits, int i) {
  std::vector<int> m;
  Clause c(lits, &m);
  return PointedClause(std::move(c), m.at(static_cast<size_t>(i)));
}

std::string to_string(const PointedClause& p) {
  std::string s;
  for (size_t i = 0; i < p.clause.size(); ++i) {
    if (i) s += " | ";
    if (static_cast<int>(i) == p.index) s += "_";
    s += to_string(p.clause[i]);
    if (static_cast<int>(i) == p.index) s += "_";
  }
  return s;
}

bool ClauseSet::insert(const Clause& c) {
  if (!keys_.insert(c.key()).second) return false;
  items_.push_back(c);
  return true;
}

bool ClauseSet::erase(const Clause& c) {
  if (!keys_.erase(c.key())) return false;
  items_.erase(std::find(items_.begin(), items_.end(), c));
  return true;
}

std::vector<Clause> ClauseSet::sorted() const {
  std::vector<Clause> v = items_;
  std::sort(v.begin(), v.end());
  return v;
}

bool ClauseSet::operator==(const ClauseSet& o) const { return keys_ == o.keys_; }

// ---------------------------------------------------------- substitutions

Term apply_subst(const Term& t, const Subst& s) {
  if (t.is_var) {
    auto it = s.find(t.name);
    return it == s.end() ? t : it->second;
  }
  if (t.args.empty()) return t;
  Term r = Term::app(t.name);
  r.args.reserve(t.args.size());
  for (const auto& a : t.args) r.args.push_back(apply_subst(a, s));
  return r;
}

Literal apply_subst(const Literal& l, const Subst& s) {
  Literal r = l;
  for (auto& a : r.args) a = apply_subst(a, s);
  return r;
}

Lits apply_subst(const Lits& ls, const Subst& s) {
  Lits r;
  r.reserve(ls.size());
  for (const auto& l : ls) r.push_back(apply_subst(l, s));
  return r;
}

Clause apply_subst(const Clause& c, const Subst& s) { return Clause(apply_subst(c.lits(), s)); }

namespace {
Term walk(const Term& t, const Subst& s) {
  // `s` is kept idempotent, so one lookup suffices.
  if (t.is_var) {
    auto it = s.find(t.name);
    if (it != s.end()) return it->second;
  }
  return t;
}

void bind_var(const std::string& v, const Term& t, Subst& s) {
  Subst single{{v, t}};
  for (auto& [k, val] : s) val = apply_subst(val, single);
  s[v] = t;
}
}  // namespace

bool unify_into(const Term& a0, const Term& b0, Subst& s) {
  Term a = a0.is_var ? walk(a0, s) : apply_subst(a0, s);
  Term b = b0.is_var ? walk(b0, s) : apply_subst(b0, s);
  if (a == b) return true;
  if (a.is_var) {
    if (occurs(a.name, b)) return false;
    bind_var(a.name, b, s);
    return true;
  }
  if (b.is_var) {
    if (occurs(b.name, a)) return false;
    bind_var(b.name, a, s);
    return true;
  }
  if (a.name != b.name || a.args.size() != b.args.size()) return false;
  for (size_t i = 0; i < a.args.size(); ++i)
    if (!unify_into(a.args[i], b.args[i], s)) return false;
  return true;
}

std::optional<Subst> mgu(const std::vector<Term>& a, const std::vector<Term>& b) {
  if (a.size() != b.size()) throw Error(Error::Kind::Invalid, "mgu: tuples of different length");
  Subst s;
  for (size_t i = 0; i < a.size(); ++i)
    if (!unify_into(a[i], b[i], s)) return std::nullopt;
  // Drop identity bindings.
  for (auto it = s.begin(); it != s.end();) {
    if (it->second.is_var && it->second.name == it->first)
      it = s.erase(it);
    else
      ++it;
  }
  return s;
}

bool match_term(const Term& pat, const Term& tgt, Subst& s) {
  if (pat.is_var) {
    auto it = s.find(pat.name);
    if (it != s.end()) return it->second == tgt;
    s.emplace(pat.name, tgt);
    return true;
  }
  if (tgt.is_var || pat.name != tgt.name || pat.args.size() != tgt.args.size()) return false;
  for (size_t i = 0; i < pat.args.size(); ++i)
    if (!match_term(pat.args[i], tgt.args[i], s)) return false;
  return true;
}

void match_literal_all(const Literal& pat, const Literal& tgt, const Subst& s, std::vector<Subst>& out) {
  if (pat.pos != tgt.pos || pat.kind != tgt.kind || pat.head != tgt.head || pat.args.size() != tgt.args.size()) return;
  {
    Subst t = s;
    bool ok = true;
    for (size_t i = 0; ok && i < pat.args.size(); ++i) ok = match_term(pat.args[i], tgt.args[i], t);
    if (ok) out.push_back(std::move(t));
  }
  if (pat.kind == Head::Eq) {
    Subst t = s;
    if (match_term(pat.args[0], tgt.args[1], t) && match_term(pat.args[1], tgt.args[0], t)) {
      bool dup = false;
      for (const auto& o : out) dup = dup || o == t;
      if (!dup) out.push_back(std::move(t));
    }
  }
}

Lits rename_apart(const Lits& c, const std::set<std::string>& avoid) {
  std::set<std::string> vs;
  collect_vars(c, vs);
  Subst ren;
  std::set<std::string> taken = avoid;
  taken.insert(vs.begin(), vs.end());
  int k = 0;
  for (const auto& v : vs) {
    if (!avoid.count(v)) continue;
    std::string n;
    do n = "w" + std::to_string(k++);
    while (taken.count(n));
    taken.insert(n);
    ren.emplace(v, Term::var(n));
  }
  return apply_subst(c, ren);
}

Lits rename_apart(const Clause& c, const std::set<std::string>& avoid) { return rename_apart(c.lits(), avoid); }

int literal_size(const Literal& l) {
  int n = l.kind == Head::Eq ? 0 : 1;
  for (const auto& a : l.args) n += term_size(a);
  return n;
}

int clause_size(const Clause& c) {
  int n = 0;
  for (const auto& l : c.lits()) n += literal_size(l);
  return n;
}

}  // namespace scanw

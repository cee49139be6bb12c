#include "scanw/saturation.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace scanw {

// -------------------------------------------------------------------- State

State::State(const std::vector<Clause>& initial) {
  for (size_t i = 0; i < initial.size(); ++i) add(static_cast<int>(i + 1), initial[i]);
  next_id_ = static_cast<int>(initial.size()) + 1;
}

int State::resolve(int id) const {
  for (int guard = 0; guard < 1000; ++guard) {
    auto it = alias_.find(id);
    if (it == alias_.end()) return id;
    id = it->second;
  }
  return id;
}

const Clause& State::get(int id) const {
  auto it = live_.find(resolve(id));
  if (it == live_.end()) throw Error(Error::Kind::Invalid, "clause " + std::to_string(id) + " is not in the current clause set");
  return it->second;
}

bool State::add(int id, const Clause& c) {
  if (live_.count(id) || alias_.count(id)) throw Error(Error::Kind::Invalid, "clause id " + std::to_string(id) + " is already in use");
  next_id_ = std::max(next_id_, id + 1);
  auto it = by_key_.find(c.key());
  if (it != by_key_.end()) {
    alias_[id] = it->second;
    return false;
  }
  live_.emplace(id, c);
  by_key_[c.key()] = id;
  return true;
}

void State::erase(int id) {
  int r = resolve(id);
  auto it = live_.find(r);
  if (it == live_.end()) throw Error(Error::Kind::Invalid, "clause " + std::to_string(id) + " is not in the current clause set");
  by_key_.erase(it->second.key());
  live_.erase(it);
}

ClauseSet State::clause_set() const {
  ClauseSet s;
  for (const auto& [id, c] : live_) s.insert(c);
  return s;
}

int State::find(const Clause& c) const {
  auto it = by_key_.find(c.key());
  return it == by_key_.end() ? 0 : it->second;
}

// ------------------------------------------------------------------- steps

bool mentions_any(const Clause& c, const std::vector<std::string>& xs) {
  for (const auto& l : c.lits())
    if (l.kind == Head::PredVar && std::find(xs.begin(), xs.end(), l.head) != xs.end()) return true;
  return false;
}

namespace {

[[noreturn]] void invalid(const std::string& msg) { throw Error(Error::Kind::Invalid, msg); }

const Clause& lit_clause(const State& st, const LitRef& r) {
  const Clause& c = st.get(r.id);
  if (r.lit < 0 || static_cast<size_t>(r.lit) >= c.size())
    invalid("literal " + std::to_string(r.id) + "." + std::to_string(r.lit + 1) + " does not exist");
  return c;
}

int take_result_id(State& st, Step& s) {
  if (s.result == 0) s.result = st.fresh_id();
  return s.result;
}

bool default_direction(const Literal& eq, int& dir_out, const std::function<bool(bool)>& works) {
  // Prefer a non-variable "from" side, left side first.
  for (bool l2r : {true, false}) {
    const Term& from = eq.args[l2r ? 0 : 1];
    if (from.is_var) continue;
    if (works(l2r)) {
      dir_out = l2r ? 1 : -1;
      return true;
    }
  }
  return false;
}

}  // namespace

void apply_step(State& st, Step& s, const std::vector<std::string>& xs) {
  switch (s.kind) {
    case Step::Kind::Res: {
      PointedClause p(lit_clause(st, s.a), s.a.lit);
      PointedClause q(lit_clause(st, s.b), s.b.lit);
      if (!resolvable(p, q)) invalid("literals are not complementary");
      s.conclusion = constraint_resolve(p, q);
      st.add(take_result_id(st, s), s.conclusion);
      return;
    }
    case Step::Kind::Fac: {
      if (st.resolve(s.a.id) != st.resolve(s.b.id)) invalid("factoring needs two literals of the same clause");
      const Clause& c = lit_clause(st, s.a);
      lit_clause(st, s.b);
      s.conclusion = constraint_factor(c, static_cast<size_t>(s.a.lit), static_cast<size_t>(s.b.lit));
      st.add(take_result_id(st, s), s.conclusion);
      return;
    }
    case Step::Kind::ConstrElim: {
      const Clause& c = st.get(s.a.id);
      std::vector<size_t> sel;
      for (int i : s.sel) {
        if (i < 0 || static_cast<size_t>(i) >= c.size()) invalid("selected literal does not exist");
        sel.push_back(static_cast<size_t>(i));
      }
      auto r = constraint_eliminate(c, sel);
      if (!r) invalid("selected constraints are not unifiable");
      s.conclusion = *r;
      st.add(take_result_id(st, s), s.conclusion);
      return;
    }
    case Step::Kind::ParMod: {
      const Clause& e = lit_clause(st, s.a);
      const Clause& d = st.get(s.target);
      const Literal& eq = e[static_cast<size_t>(s.a.lit)];
      if (eq.kind != Head::Eq || !eq.pos) invalid("paramodulation from a literal that is not a positive equation");
      if (!subterm_at(d.lits(), s.pos)) invalid("invalid position " + to_string(s.pos));
      auto attempt = [&](bool l2r) -> std::optional<Clause> {
        try {
          return paramodulate(e, static_cast<size_t>(s.a.lit), l2r, d, s.pos);
        } catch (const Error&) {
          return std::nullopt;
        }
      };
      if (s.eq_dir == 0) {
        int dir = 0;
        if (!default_direction(eq, dir, [&](bool l2r) { return attempt(l2r).has_value(); }))
          invalid("equation does not unify with the subterm at " + to_string(s.pos));
        s.eq_dir = dir;
      }
      auto r = attempt(s.eq_dir > 0);
      if (!r) invalid("equation does not unify with the subterm at " + to_string(s.pos));
      s.conclusion = *r;
      st.add(take_result_id(st, s), s.conclusion);
      return;
    }
    case Step::Kind::RedDel: {
      const Clause c = st.get(s.clause);
      if (s.by == 0) {
        if (!is_tautology(c)) invalid("clause " + std::to_string(s.clause) + " is not a tautology");
      } else {
        if (st.resolve(s.by) == st.resolve(s.clause)) invalid("a clause cannot subsume itself away");
        if (!subsumes(st.get(s.by), c))
          invalid("clause " + std::to_string(s.by) + " does not subsume clause " + std::to_string(s.clause));
      }
      s.deleted = {c};
      s.deleted_ids = {st.resolve(s.clause)};
      st.erase(s.clause);
      return;
    }
    case Step::Kind::VarElim: {
      const Clause c = st.get(s.clause);
      VarElimResult r = normalize_constraints(c);
      if (!r.applied) invalid("no variable constraint to eliminate in clause " + std::to_string(s.clause));
      s.conclusion = r.clause;
      s.deleted = {c};
      s.deleted_ids = {st.resolve(s.clause)};
      st.erase(s.clause);
      st.add(take_result_id(st, s), s.conclusion);
      return;
    }
    case Step::Kind::ExtPurDel: {
      if (std::find(xs.begin(), xs.end(), s.x) == xs.end()) invalid(s.x + " is not a predicate variable to eliminate");
      if (s.polarity != 1 && s.polarity != -1) invalid("polarity must be + or -");
      std::vector<int> del;
      for (const auto& [id, c] : st.live()) {
        bool has = false, good = false;
        for (const auto& l : c.lits()) {
          if (l.kind != Head::PredVar || l.head != s.x) continue;
          has = true;
          good = good || (l.pos == (s.polarity > 0));
        }
        if (!has) continue;
        if (!good)
          invalid("clause " + std::to_string(id) + " has no " + (s.polarity > 0 ? "positive" : "negative") +
                  " occurrence of " + s.x);
        del.push_back(id);
      }
      s.deleted.clear();
      s.deleted_ids = del;
      for (int id : del) {
        s.deleted.push_back(st.get(id));
        st.erase(id);
      }
      return;
    }
    case Step::Kind::PurDel: {
      const Clause c = lit_clause(st, s.a);
      PointedClause p(c, s.a.lit);
      if (p.lit().kind != Head::PredVar || std::find(xs.begin(), xs.end(), p.lit().head) == xs.end())
        invalid("designated literal is not a literal of a predicate variable to eliminate");
      ClauseSet rest;
      for (const auto& [id, d] : st.live())
        if (id != st.resolve(s.a.id)) rest.insert(d);
      PurifiedResult r = is_purified(p, rest);
      if (!r.purified) invalid("pointed clause " + std::to_string(s.a.id) + "." + std::to_string(s.a.lit + 1) + " is not purified");
      s.pointed = p;
      s.certificate = r.entries;
      s.deleted = {c};
      s.deleted_ids = {st.resolve(s.a.id)};
      st.erase(s.a.id);
      return;
    }
  }
}

// ------------------------------------------------------------- derivations

bool Derivation::eliminating() const {
  for (const auto& c : conclusion())
    if (mentions_any(c, xs)) return false;
  return true;
}

std::vector<size_t> Derivation::purdel_indices() const {
  std::vector<size_t> r;
  for (size_t i = 0; i < steps.size(); ++i)
    if (steps[i].kind == Step::Kind::PurDel) r.push_back(i);
  return r;
}

std::string Derivation::trace() const {
  std::string out;
  for (const auto& s : steps) out += step_to_string(s) + "\n";
  return out;
}

Derivation replay(const std::vector<Clause>& initial, const std::vector<std::string>& xs, std::vector<Step> steps) {
  Derivation d;
  d.initial = initial;
  d.xs = xs;
  State st(initial);
  d.sets.push_back(st.clause_set());
  for (size_t i = 0; i < steps.size(); ++i) {
    try {
      apply_step(st, steps[i], xs);
    } catch (const Error& e) {
      throw Error(Error::Kind::Invalid, "invalid step " + std::to_string(i + 1) + " (" + step_to_string(steps[i]) + "): " + e.what());
    }
    d.sets.push_back(st.clause_set());
  }
  d.steps = std::move(steps);
  d.final_ids = st.live();
  return d;
}

// -------------------------------------------------------------- trace text

namespace {
std::string ref(const LitRef& r) { return std::to_string(r.id) + "." + std::to_string(r.lit + 1); }

[[noreturn]] void bad_line(int n, const std::string& msg) {
  throw Error(Error::Kind::Input, "trace line " + std::to_string(n) + ": " + msg);
}

int parse_int(const std::string& s, int n) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) bad_line(n, "expected a number, found '" + s + "'");
  return std::stoi(s);
}

LitRef parse_ref(const std::string& s, int n) {
  auto dot = s.find('.');
  if (dot == std::string::npos) bad_line(n, "expected <clause>.<literal>, found '" + s + "'");
  LitRef r{parse_int(s.substr(0, dot), n), parse_int(s.substr(dot + 1), n) - 1};
  if (r.lit < 0) bad_line(n, "literal indices are 1-based");
  return r;
}
}  // namespace

std::string step_to_string(const Step& s) {
  switch (s.kind) {
    case Step::Kind::Res:
      return "res " + ref(s.a) + " " + ref(s.b) + " -> " + std::to_string(s.result);
    case Step::Kind::Fac:
      return "fac " + ref(s.a) + " " + ref(s.b) + " -> " + std::to_string(s.result);
    case Step::Kind::ConstrElim: {
      std::string sel;
      for (size_t i = 0; i < s.sel.size(); ++i) sel += (i ? "," : "") + std::to_string(s.sel[i] + 1);
      return "constrelim " + std::to_string(s.a.id) + "." + sel + " -> " + std::to_string(s.result);
    }
    case Step::Kind::ParMod:
      return "parmod " + ref(s.a) + (s.eq_dir > 0 ? ">" : s.eq_dir < 0 ? "<" : "") + " " + std::to_string(s.target) + "@" +
             to_string(s.pos) + " -> " + std::to_string(s.result);
    case Step::Kind::RedDel:
      return "redel " + std::to_string(s.clause) + (s.by ? " subsumed-by " + std::to_string(s.by) : " tautology");
    case Step::Kind::VarElim:
      return "varelim " + std::to_string(s.clause) + " -> " + std::to_string(s.result);
    case Step::Kind::ExtPurDel:
      return "extpurdel " + s.x + (s.polarity > 0 ? " +" : " -");
    case Step::Kind::PurDel:
      return "purdel " + ref(s.a);
  }
  return "";
}

std::vector<Step> parse_trace(const std::string& text) {
  std::vector<Step> out;
  std::stringstream ss(text);
  std::string line;
  int n = 0;
  while (std::getline(ss, line)) {
    ++n;
    auto h = line.find('#');
    if (h != std::string::npos) line = line.substr(0, h);
    std::stringstream ls(line);
    std::vector<std::string> w;
    std::string t;
    while (ls >> t) w.push_back(t);
    if (w.empty()) continue;
    Step s;
    auto arrow = [&](size_t i) {
      if (w.size() != i + 2 || w[i] != "->") bad_line(n, "expected '-> <id>'");
      return parse_int(w[i + 1], n);
    };
    const std::string& k = w[0];
    if (k == "res" || k == "fac") {
      if (w.size() < 3) bad_line(n, "missing literal references");
      s.kind = k == "res" ? Step::Kind::Res : Step::Kind::Fac;
      s.a = parse_ref(w[1], n);
      s.b = parse_ref(w[2], n);
      s.result = arrow(3);
    } else if (k == "constrelim") {
      if (w.size() < 2) bad_line(n, "missing selection");
      s.kind = Step::Kind::ConstrElim;
      auto dot = w[1].find('.');
      if (dot == std::string::npos) bad_line(n, "expected <clause>.<i>,<j>,...");
      s.a.id = parse_int(w[1].substr(0, dot), n);
      std::stringstream sel(w[1].substr(dot + 1));
      std::string item;
      while (std::getline(sel, item, ',')) s.sel.push_back(parse_int(item, n) - 1);
      s.result = arrow(2);
    } else if (k == "parmod") {
      if (w.size() < 3) bad_line(n, "missing arguments");
      s.kind = Step::Kind::ParMod;
      std::string e = w[1];
      if (!e.empty() && (e.back() == '>' || e.back() == '<')) {
        s.eq_dir = e.back() == '>' ? 1 : -1;
        e.pop_back();
      }
      s.a = parse_ref(e, n);
      auto at = w[2].find('@');
      if (at == std::string::npos) bad_line(n, "expected <clause>@<position>");
      s.target = parse_int(w[2].substr(0, at), n);
      try {
        s.pos = parse_position(w[2].substr(at + 1));
      } catch (const Error& err) {
        bad_line(n, err.what());
      }
      s.result = arrow(3);
    } else if (k == "redel") {
      s.kind = Step::Kind::RedDel;
      if (w.size() == 3 && w[2] == "tautology") {
        s.clause = parse_int(w[1], n);
      } else if (w.size() == 4 && w[2] == "subsumed-by") {
        s.clause = parse_int(w[1], n);
        s.by = parse_int(w[3], n);
      } else {
        bad_line(n, "expected 'redel <id> tautology' or 'redel <id> subsumed-by <id>'");
      }
    } else if (k == "varelim") {
      s.kind = Step::Kind::VarElim;
      if (w.size() < 2) bad_line(n, "missing clause id");
      s.clause = parse_int(w[1], n);
      s.result = arrow(2);
    } else if (k == "extpurdel") {
      if (w.size() != 3 || (w[2] != "+" && w[2] != "-")) bad_line(n, "expected 'extpurdel <X> +|-'");
      s.kind = Step::Kind::ExtPurDel;
      s.x = w[1];
      s.polarity = w[2] == "+" ? 1 : -1;
    } else if (k == "purdel") {
      if (w.size() != 2) bad_line(n, "expected 'purdel <id>.<lit>'");
      s.kind = Step::Kind::PurDel;
      s.a = parse_ref(w[1], n);
    } else {
      bad_line(n, "unknown step '" + k + "'");
    }
    out.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------- preprocessing

namespace {

bool x_free(const Clause& c, const std::vector<std::string>& xs) { return !mentions_any(c, xs); }

// Applies the step, records it, and writes the filled-in step back.
void run(State& st, Step& s, const std::vector<std::string>& xs, std::vector<Step>& out, bool theory = false) {
  s.theory = theory;
  apply_step(st, s, xs);
  out.push_back(s);
}

// Deletes every live clause (other than `protect`) that is ⊴-subsumed by
// another live clause; among mutually subsuming clauses the one with the
// smallest canonical key survives. Only clauses satisfying `only` are candidates.
bool backward_subsumption(State& st, const std::vector<std::string>& xs, std::vector<Step>& out, int protect,
                          const std::function<bool(const Clause&)>& only, bool theory) {
  bool any = false;
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<std::pair<int, Clause>> live(st.live().begin(), st.live().end());
    for (const auto& [id, c] : live) {
      if (id == protect || !only(c)) continue;
      for (const auto& [did, d] : live) {
        if (did == id || !st.has(did) || !st.has(id) || st.resolve(did) != did) continue;
        if (!subsumes(d, c)) continue;
        if (subsumes(c, d) && !(d.key() < c.key()) && did != protect) continue;
        Step s;
        s.kind = Step::Kind::RedDel;
        s.clause = id;
        s.by = did;
        run(st, s, xs, out, theory);
        any = changed = true;
        break;
      }
    }
  }
  return any;
}

}  // namespace

void preprocess(State& st, const std::vector<std::string>& xs, std::vector<Step>& out, const Deadline* dl) {
  std::set<std::string> factored;
  for (int round = 0; round < 1000; ++round) {
    if (dl && dl->expired()) return;
    bool changed = false;
    // Variable elimination.
    for (const auto& [id, c] : std::map<int, Clause>(st.live())) {
      if (!normalize_constraints(c).applied) continue;
      Step s;
      s.kind = Step::Kind::VarElim;
      s.clause = id;
      run(st, s, xs, out);
      changed = true;
    }
    // Tautologies.
    for (const auto& [id, c] : std::map<int, Clause>(st.live())) {
      if (!is_tautology(c)) continue;
      Step s;
      s.kind = Step::Kind::RedDel;
      s.clause = id;
      run(st, s, xs, out);
      changed = true;
    }
    // Backward subsumption.
    changed |= backward_subsumption(st, xs, out, 0, [](const Clause&) { return true; }, false);
    // Extended purity.
    for (const auto& x : xs) {
      bool occurs_x = false;
      for (const auto& [id, c] : st.live()) occurs_x = occurs_x || c.contains_head(Head::PredVar, x);
      if (!occurs_x) continue;
      if (auto pol = ext_purity_check(st.clause_set(), x)) {
        Step s;
        s.kind = Step::Kind::ExtPurDel;
        s.x = x;
        s.polarity = *pol;
        run(st, s, xs, out);
        changed = true;
      }
    }
    if (changed) continue;
    // Non-redundant constraint factors on predicate-variable literals.
    for (const auto& [id, c] : std::map<int, Clause>(st.live())) {
      for (size_t i = 0; i < c.size() && !changed; ++i) {
        const Literal& li = c[i];
        if (li.kind != Head::PredVar || std::find(xs.begin(), xs.end(), li.head) == xs.end()) continue;
        for (size_t j = i + 1; j < c.size() && !changed; ++j) {
          const Literal& lj = c[j];
          if (lj.kind != li.kind || lj.head != li.head || lj.pos != li.pos) continue;
          Clause f = constraint_factor(c, i, j);
          Clause nf = normalize_constraints(f).clause;
          if (!factored.insert(f.key()).second) continue;
          bool redundant = false;
          for (const auto& [did, d] : st.live()) redundant = redundant || subsumes(d, nf);
          if (redundant) continue;
          Step s;
          s.kind = Step::Kind::Fac;
          s.a = {id, static_cast<int>(i)};
          s.b = {id, static_cast<int>(j)};
          run(st, s, xs, out);
          changed = true;
        }
      }
      if (changed) break;
    }
    if (!changed) return;
  }
}

// ------------------------------------------------------------ purification

bool purify(State& st, LitRef p, const std::vector<std::string>& xs, int budget, std::vector<Step>& out,
            const Deadline* dl, size_t max_lits) {
  VelimCache cache;
  int added = 0;
  for (;;) {
    if (dl && dl->expired()) return false;
    const Clause pc = st.get(p.id);
    PointedClause pp(pc, p.lit);
    ClauseSet rest;
    for (const auto& [id, d] : st.live())
      if (id != st.resolve(p.id)) rest.insert(d);
    PurifiedResult r = is_purified(pp, rest, cache);
    if (r.purified) {
      Step s;
      s.kind = Step::Kind::PurDel;
      s.a = p;
      run(st, s, xs, out);
      return true;
    }
    if (++added > budget) return false;
    const PurificationEntry* open = nullptr;
    for (const auto& e : r.entries)
      if (e.subsumers.empty()) {
        open = &e;
        break;
      }
    Step s;
    s.kind = Step::Kind::Res;
    s.a = p;
    s.b = {st.find(open->q.clause), open->q.index};
    run(st, s, xs, out);
    int nid = s.result;
    if (s.conclusion.size() > max_lits) return false;
    if (!st.has(nid) || st.resolve(nid) != nid) continue;
    if (normalize_constraints(st.get(nid)).applied) {
      Step v;
      v.kind = Step::Kind::VarElim;
      v.clause = nid;
      run(st, v, xs, out);
      nid = v.result;
      if (!st.has(nid) || st.resolve(nid) != nid) continue;
    }
    // Backward subsumption by the new clause; the pointed clause is protected.
    const Clause nc = st.get(nid);
    for (const auto& [id, c] : std::map<int, Clause>(st.live())) {
      if (id == nid || id == st.resolve(p.id)) continue;
      if (!subsumes(nc, c)) continue;
      Step d;
      d.kind = Step::Kind::RedDel;
      d.clause = id;
      d.by = nid;
      run(st, d, xs, out);
    }
  }
}

// ----------------------------------------------------------- theory phase

void theory_saturate(State& st, const std::vector<std::string>& xs, int budget, std::vector<Step>& out, const Deadline* dl) {
  size_t max_lits = 0;
  bool has_eq = false;
  for (const auto& [id, c] : st.live()) {
    if (!x_free(c, xs)) continue;
    max_lits = std::max(max_lits, c.size());
    for (const auto& l : c.lits()) has_eq = has_eq || (l.kind == Head::Eq && l.pos);
  }
  if (!has_eq) return;
  auto is_theory = [&](const Clause& c) { return x_free(c, xs); };
  std::vector<int> processed;
  std::vector<int> queue;
  for (const auto& [id, c] : st.live())
    if (is_theory(c)) queue.push_back(id);
  int spent = 0;
  auto by_size = [&](int a, int b) {
    size_t sa = st.has(a) ? st.get(a).size() : 0, sb = st.has(b) ? st.get(b).size() : 0;
    return sa != sb ? sa < sb : a < b;
  };
  while (!queue.empty() && spent < budget) {
    if (dl && dl->expired()) return;
    std::sort(queue.begin(), queue.end(), by_size);
    int given = queue.front();
    queue.erase(queue.begin());
    if (!st.has(given) || st.resolve(given) != given) continue;
    processed.push_back(given);
    std::vector<std::pair<int, int>> pairs;
    for (int other : processed) {
      if (!st.has(other) || st.resolve(other) != other) continue;
      pairs.emplace_back(given, other);
      if (other != given) pairs.emplace_back(other, given);
    }
    for (const auto& [eid, tid] : pairs) {
      if (spent >= budget) break;
      if (!st.has(eid) || !st.has(tid) || st.resolve(eid) != eid || st.resolve(tid) != tid) continue;
      const Clause e = st.get(eid), t = st.get(tid);
      for (const auto& pm : all_paramodulants(e, t)) {
        ++spent;
        Clause nf = normalize_constraints(pm.result).clause;
        if (nf.size() > max_lits || is_tautology(nf)) continue;
        bool reflexive = false;
        for (const auto& l : nf.lits()) reflexive = reflexive || (l.kind == Head::Eq && l.pos && l.args[0] == l.args[1]);
        if (reflexive) continue;
        bool redundant = false;
        for (const auto& [did, d] : st.live()) redundant = redundant || subsumes(d, nf);
        if (redundant) continue;
        if (!st.has(eid) || !st.has(tid)) break;
        Step s;
        s.kind = Step::Kind::ParMod;
        s.a = {eid, static_cast<int>(pm.eq_lit)};
        s.eq_dir = pm.left_to_right ? 1 : -1;
        s.target = tid;
        s.pos = pm.pos;
        run(st, s, xs, out, true);
        int nid = s.result;
        if (normalize_constraints(st.get(nid)).applied) {
          Step v;
          v.kind = Step::Kind::VarElim;
          v.clause = nid;
          run(st, v, xs, out, true);
          nid = v.result;
        }
        if (!st.has(nid) || st.resolve(nid) != nid) continue;
        const Clause nc = st.get(nid);
        for (const auto& [id, c] : std::map<int, Clause>(st.live())) {
          if (id == nid || !is_theory(c) || !subsumes(nc, c)) continue;
          Step d;
          d.kind = Step::Kind::RedDel;
          d.clause = id;
          d.by = nid;
          run(st, d, xs, out, true);
        }
        queue.push_back(nid);
        if (!st.has(eid) || !st.has(tid)) break;
      }
    }
  }
}

// ------------------------------------------------------------------ trim

int counted_steps(const Derivation& d) {
  int n = 0;
  for (const auto& s : d.steps) {
    bool theory = false;
    if (s.kind == Step::Kind::ParMod) theory = !mentions_any(s.conclusion, d.xs);
    if (s.kind == Step::Kind::RedDel || s.kind == Step::Kind::VarElim) theory = !s.deleted.empty() && !mentions_any(s.deleted[0], d.xs);
    if (!theory) ++n;
  }
  return n;
}

Derivation trim(const Derivation& d) {
  bool any_theory = false;
  for (const auto& s : d.steps) any_theory = any_theory || s.theory;
  if (!any_theory) return d;
  // Replay to recover ids of certificate subsumers.
  State st(d.initial);
  std::set<int> needed;
  std::vector<Step> steps = d.steps;
  for (auto& s : steps) {
    if (s.kind == Step::Kind::PurDel) {
      State before = st;
      apply_step(st, s, d.xs);
      for (const auto& e : s.certificate)
        for (const auto& sub : e.subsumers) needed.insert(before.find(sub));
      continue;
    }
    if (!s.theory) {
      switch (s.kind) {
        case Step::Kind::Res:
        case Step::Kind::Fac:
          needed.insert(st.resolve(s.a.id));
          needed.insert(st.resolve(s.b.id));
          break;
        case Step::Kind::ConstrElim:
          needed.insert(st.resolve(s.a.id));
          break;
        case Step::Kind::ParMod:
          needed.insert(st.resolve(s.a.id));
          needed.insert(st.resolve(s.target));
          break;
        case Step::Kind::RedDel:
          if (s.by && mentions_any(st.get(s.clause), d.xs)) needed.insert(st.resolve(s.by));
          break;
        case Step::Kind::VarElim:
          needed.insert(st.resolve(s.clause));
          break;
        default:
          break;
      }
    }
    apply_step(st, s, d.xs);
  }
  // Propagate backwards through theory steps.
  std::vector<bool> keep(steps.size(), true);
  for (size_t k = steps.size(); k-- > 0;) {
    const Step& s = steps[k];
    if (!s.theory) continue;
    if (s.kind == Step::Kind::ParMod) {
      if (needed.count(s.result)) {
        needed.insert(s.a.id);
        needed.insert(s.target);
      } else {
        keep[k] = false;
      }
    } else if (s.kind == Step::Kind::VarElim) {
      if (needed.count(s.result)) needed.insert(s.clause);
      else keep[k] = false;
    } else if (s.kind == Step::Kind::RedDel) {
      keep[k] = false;
    }
  }
  std::vector<Step> kept;
  for (size_t k = 0; k < steps.size(); ++k) {
    if (!keep[k]) continue;
    Step s = steps[k];
    s.conclusion = Clause();
    s.certificate.clear();
    s.deleted.clear();
    s.deleted_ids.clear();
    kept.push_back(s);
  }
  // Steps of the remaining theory phase that delete clauses which are no
  // longer created are dropped as well; validate by replay.
  try {
    Derivation t = replay(d.initial, d.xs, kept);
    for (size_t i = 0; i < t.steps.size(); ++i) t.steps[i].theory = kept[i].theory;
    if (t.eliminating() == d.eliminating()) return t;
  } catch (const Error&) {
  }
  return d;
}

// ------------------------------------------------------------------ search

namespace {

struct Searcher {
  std::vector<Clause> initial;
  std::vector<std::string> xs;
  SearchLimits limits;
  const std::function<bool(const Derivation&)>& yield;
  Deadline dl;
  SearchStats stats;
  bool stop = false;
  std::set<std::string> emitted;

  Searcher(const std::vector<Clause>& n, const std::vector<std::string>& x, const SearchLimits& l,
           const std::function<bool(const Derivation&)>& y)
      : initial(n), xs(x), limits(l), yield(y), dl(l.timeout) {}

  bool any_x(const State& st) const {
    for (const auto& [id, c] : st.live())
      if (mentions_any(c, xs)) return true;
    return false;
  }

  int nontheory(const std::vector<Step>& steps) const {
    int n = 0;
    for (const auto& s : steps) n += !s.theory;
    return n;
  }

  void emit(const std::vector<Step>& steps) {
    Derivation d;
    try {
      d = replay(initial, xs, steps);
    } catch (const Error&) {
      return;  // never happens for steps produced by the engine; skip defensively
    }
    for (size_t i = 0; i < d.steps.size(); ++i) d.steps[i].theory = steps[i].theory;
    if (!d.eliminating()) return;
    d = trim(d);
    if (counted_steps(d) > limits.max_steps) return;
    std::string key = d.trace();
    if (!emitted.insert(key).second) return;
    if (!yield(d)) stop = true;
  }

  struct Cand {
    LitRef ref;
    bool one_sided;
    int partners;
    size_t size;
    std::string key;
  };

  std::vector<Cand> candidates(const State& st) const {
    std::vector<Cand> out;
    for (const auto& [id, c] : st.live()) {
      for (size_t i = 0; i < c.size(); ++i) {
        const Literal& l = c[i];
        if (l.kind != Head::PredVar || std::find(xs.begin(), xs.end(), l.head) == xs.end()) continue;
        PointedClause p(c, static_cast<int>(i));
        int partners = 0;
        for (const auto& [did, d] : st.live()) {
          if (did == id) continue;
          for (size_t j = 0; j < d.size(); ++j) partners += resolvable(p, PointedClause(d, static_cast<int>(j)));
        }
        out.push_back({{id, static_cast<int>(i)}, is_one_sided(p), partners, c.size(), c.key() + "#" + std::to_string(i)});
      }
    }
    std::stable_sort(out.begin(), out.end(), [](const Cand& a, const Cand& b) {
      if (a.one_sided != b.one_sided) return a.one_sided;
      if (a.partners != b.partners) return a.partners < b.partners;
      if (a.size != b.size) return a.size < b.size;
      return a.key < b.key;
    });
    return out;
  }

  void dfs(State st, std::vector<Step> steps, int used, int bound) {
    if (stop) return;
    if (dl.expired()) {
      stats.timed_out = stop = true;
      return;
    }
    preprocess(st, xs, steps, &dl);
    if (nontheory(steps) > limits.max_steps) return;
    if (!any_x(st)) {
      if (used == bound) emit(steps);
      return;
    }
    if (used == bound) return;
    for (const Cand& c : candidates(st)) {
      if (stop) return;
      if (stats.branches >= limits.max_branches) {
        stats.exhausted = stop = true;
        return;
      }
      ++stats.branches;
      State s2 = st;
      std::vector<Step> st2 = steps;
      if (!purify(s2, c.ref, xs, limits.purify_budget, st2, &dl, limits.max_clause_lits)) continue;
      if (nontheory(st2) > limits.max_steps) continue;
      dfs(std::move(s2), std::move(st2), used + 1, bound);
    }
  }

  void run() {
    State st(initial);
    if (!any_x(st)) {
      emit({});
      return;
    }
    std::vector<Step> steps;
    theory_saturate(st, xs, limits.theory_budget, steps, &dl);
    for (int bound = 0; bound <= limits.max_rounds && !stop; ++bound) dfs(st, steps, 0, bound);
    if (dl.expired()) stats.timed_out = true;
  }
};

}  // namespace

SearchStats search(const std::vector<Clause>& n, const std::vector<std::string>& xs, const SearchLimits& limits,
                   const std::function<bool(const Derivation&)>& yield) {
  Searcher s(n, xs, limits, yield);
  s.run();
  return s.stats;
}

std::optional<Derivation> find_derivation(const std::vector<Clause>& n, const std::vector<std::string>& xs,
                                          const SearchLimits& limits) {
  std::optional<Derivation> out;
  search(n, xs, limits, [&](const Derivation& d) {
    out = d;
    return false;
  });
  return out;
}

}  // namespace scanw

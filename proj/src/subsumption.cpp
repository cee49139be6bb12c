#include "scanw/subsumption.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace scanw {

bool is_tautology(const Clause& c) {
  const Lits& ls = c.lits();
  for (size_t i = 0; i < ls.size(); ++i)
    for (size_t j = i + 1; j < ls.size(); ++j)
      if (ls[i].pos != ls[j].pos && ls[i].same(ls[j].dual())) return true;
  return false;
}

namespace {

// Backtracking matcher of the pattern literals into the target literals.
// Pattern literals are processed most-constrained first. When `inj` is set,
// pattern literals of the given literal class must receive pairwise distinct images.
class Matcher {
 public:
  Matcher(const Lits& pat, const Lits& tgt, const LitSpec* inj) : pat_(pat), tgt_(tgt), inj_(inj) {}

  bool run(Subst* out) {
    cands_.assign(pat_.size(), {});
    for (size_t i = 0; i < pat_.size(); ++i) {
      const Literal& p = pat_[i];
      for (size_t j = 0; j < tgt_.size(); ++j) {
        const Literal& t = tgt_[j];
        if (p.pos == t.pos && p.kind == t.kind && p.head == t.head && p.args.size() == t.args.size())
          cands_[i].push_back(j);
      }
      if (cands_[i].empty()) return false;
    }
    order_.resize(pat_.size());
    for (size_t i = 0; i < order_.size(); ++i) order_[i] = i;
    std::stable_sort(order_.begin(), order_.end(),
                     [&](size_t a, size_t b) { return cands_[a].size() < cands_[b].size(); });
    used_.assign(tgt_.size(), false);
    Subst s;
    if (!rec(0, s)) return false;
    if (out) *out = s;
    return true;
  }

 private:
  bool rec(size_t k, const Subst& s) {
    if (k == order_.size()) {
      result_ = s;
      return true;
    }
    size_t i = order_[k];
    bool injective = inj_ && inj_->matches(pat_[i]);
    std::vector<Subst> alts;
    for (size_t j : cands_[i]) {
      if (injective && used_[j]) continue;
      alts.clear();
      match_literal_all(pat_[i], tgt_[j], s, alts);
      for (const auto& a : alts) {
        if (injective) used_[j] = true;
        bool ok = rec(k + 1, a);
        if (injective) used_[j] = false;
        if (ok) return true;
      }
    }
    return false;
  }

  const Lits& pat_;
  const Lits& tgt_;
  const LitSpec* inj_;
  std::vector<std::vector<size_t>> cands_;
  std::vector<size_t> order_;
  std::vector<bool> used_;
  Subst result_;

 public:
  const Subst& result() const { return result_; }
};

}  // namespace

bool subsumes(const Clause& c, const Clause& e, Subst* matcher) {
  if (c.empty()) {
    if (matcher) matcher->clear();
    return true;
  }
  Matcher m(c.lits(), e.lits(), nullptr);
  if (!m.run(nullptr)) return false;
  if (matcher) *matcher = m.result();
  return true;
}

bool subsumes(const Clause& c, const Clause& e) { return subsumes(c, e, nullptr); }

bool subsumes_L(const Clause& c, const Clause& e, const LitSpec& l) {
  if (c.empty()) return true;
  size_t need = 0, have = 0;
  for (const auto& x : c.lits()) need += l.matches(x);
  for (const auto& x : e.lits()) have += l.matches(x);
  if (need > have) return false;
  Matcher m(c.lits(), e.lits(), &l);
  return m.run(nullptr);
}

std::optional<Lits> velim_step(const Lits& c, size_t i) {
  const Literal& l = c[i];
  if (!l.is_constraint()) return std::nullopt;
  for (int side = 0; side < 2; ++side) {
    const Term& v = l.args[side];
    const Term& t = l.args[1 - side];
    if (!v.is_var || occurs_properly(v.name, t)) continue;
    Lits rest;
    for (size_t k = 0; k < c.size(); ++k)
      if (k != i) rest.push_back(c[k]);
    if (t.is_var && t.name == v.name) return rest;
    return apply_subst(rest, Subst{{v.name, t}});
  }
  return std::nullopt;
}

namespace {

std::vector<Clause> compute_closure(const Clause& c) {
  std::vector<Clause> out{c};
  std::set<std::string> seen{c.key()};
  for (size_t q = 0; q < out.size(); ++q) {
    const Lits ls = out[q].lits();
    for (size_t i = 0; i < ls.size(); ++i) {
      // For u ≄ v both directions are tried: they may give non-variant results.
      const Literal& l = ls[i];
      if (!l.is_constraint()) continue;
      for (int side = 0; side < 2; ++side) {
        const Term& v = l.args[side];
        const Term& t = l.args[1 - side];
        if (!v.is_var || occurs_properly(v.name, t)) continue;
        Lits rest;
        for (size_t k = 0; k < ls.size(); ++k)
          if (k != i) rest.push_back(ls[k]);
        Clause nc(t.is_var && t.name == v.name ? rest : apply_subst(rest, Subst{{v.name, t}}));
        if (seen.insert(nc.key()).second) out.push_back(nc);
      }
    }
  }
  return out;
}

std::vector<PointedClause> compute_closure(const PointedClause& p) {
  std::vector<PointedClause> out{p};
  std::set<std::pair<std::string, int>> seen{{p.clause.key(), p.index}};
  for (size_t q = 0; q < out.size(); ++q) {
    const Lits ls = out[q].clause.lits();
    const int d = out[q].index;
    for (size_t i = 0; i < ls.size(); ++i) {
      const Literal& l = ls[i];
      if (!l.is_constraint() || static_cast<int>(i) == d) continue;
      for (int side = 0; side < 2; ++side) {
        const Term& v = l.args[side];
        const Term& t = l.args[1 - side];
        if (!v.is_var || occurs_properly(v.name, t)) continue;
        Lits rest;
        int nd = -1;
        for (size_t k = 0; k < ls.size(); ++k) {
          if (k == i) continue;
          if (static_cast<int>(k) == d) nd = static_cast<int>(rest.size());
          rest.push_back(ls[k]);
        }
        if (!(t.is_var && t.name == v.name)) rest = apply_subst(rest, Subst{{v.name, t}});
        PointedClause np = PointedClause::from(rest, nd);
        if (seen.insert({np.clause.key(), np.index}).second) out.push_back(np);
      }
    }
  }
  return out;
}

}  // namespace

const std::vector<Clause>& VelimCache::closure(const Clause& c) {
  auto it = plain_.find(c.key());
  if (it != plain_.end()) return it->second;
  return plain_.emplace(c.key(), compute_closure(c)).first->second;
}

const std::vector<PointedClause>& VelimCache::closure(const PointedClause& p) {
  auto k = std::make_pair(p.clause.key(), p.index);
  auto it = pointed_.find(k);
  if (it != pointed_.end()) return it->second;
  return pointed_.emplace(k, compute_closure(p)).first->second;
}

std::vector<Clause> velim_closure(const Clause& c) { return compute_closure(c); }
std::vector<PointedClause> velim_closure(const PointedClause& p) { return compute_closure(p); }

bool subsumes_L_velim(const Clause& s, const Clause& e, const LitSpec& l, VelimCache& cache) {
  for (const auto& e2 : cache.closure(e))
    if (subsumes_L(s, e2, l)) return true;
  return false;
}

bool subsumes_L_velim(const Clause& s, const Clause& e, const LitSpec& l) {
  for (const auto& e2 : velim_closure(e))
    if (subsumes_L(s, e2, l)) return true;
  return false;
}

}  // namespace scanw

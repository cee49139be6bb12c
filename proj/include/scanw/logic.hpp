#pragma once

// Core first-order data model: symbols, terms, literals, canonical clauses,
// clause sets, substitutions and unification.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace scanw {

/// Every recoverable failure in the library is reported with this type; the
/// kind lets front ends map failures onto exit codes.
class Error : public std::runtime_error {
 public:
  enum class Kind { Input, Arity, Invalid, Budget, Internal };
  Error(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// ---------------------------------------------------------------- symbols

enum class SymKind { Function, Predicate, PredVar };

struct SymbolInfo {
  SymKind kind;
  int arity;
};

/// Symbol table. Names are unique across kinds; equality is built in and
/// cannot be declared.
class Signature {
 public:
  /// Declares `name`; redeclaring with the same kind and arity is a no-op,
  /// anything else throws Error(Arity).
  void declare(const std::string& name, SymKind kind, int arity);
  std::optional<SymbolInfo> lookup(const std::string& name) const;
  bool has(const std::string& name) const { return table_.count(name) != 0; }
  const std::map<std::string, SymbolInfo>& symbols() const { return table_; }
  std::vector<std::pair<std::string, int>> of_kind(SymKind kind) const;
  /// Merges another signature into this one (conflicts throw).
  void merge(const Signature& other);

 private:
  std::map<std::string, SymbolInfo> table_;
};

/// Monotone fresh-name source. Prefixes in use: "v" variables, "c" fresh
/// constants, "sk" Skolem symbols, "Y" predicate variables.
class NameGen {
 public:
  NameGen() = default;
  explicit NameGen(const Signature& sig) { reserve(sig); }
  void reserve(const std::string& name) { used_.insert(name); }
  void reserve(const Signature& sig);
  std::string fresh(const std::string& prefix);

 private:
  std::set<std::string> used_;
  std::uint64_t counter_ = 0;
};

// ------------------------------------------------------------------ terms

struct Term {
  bool is_var = false;
  std::string name;
  std::vector<Term> args;

  static Term var(std::string n) { return Term{true, std::move(n), {}}; }
  static Term app(std::string f, std::vector<Term> a = {}) { return Term{false, std::move(f), std::move(a)}; }

  bool operator==(const Term& o) const { return is_var == o.is_var && name == o.name && args == o.args; }
  bool operator!=(const Term& o) const { return !(*this == o); }
  bool operator<(const Term& o) const;
};

/// Problem-format rendering: variables carry a leading '?'.
std::string to_string(const Term& t);
/// Formula-format rendering: variables are bare identifiers.
std::string to_plain_string(const Term& t);

bool occurs(const std::string& var, const Term& t);
/// True iff `var` occurs in `t` and `t` is not the variable itself.
bool occurs_properly(const std::string& var, const Term& t);
void collect_vars(const Term& t, std::set<std::string>& out);
void collect_vars_ordered(const Term& t, std::vector<std::string>& out);
int term_size(const Term& t);
int term_depth(const Term& t);

// --------------------------------------------------------------- literals

enum class Head : std::uint8_t { Pred = 0, PredVar = 1, Eq = 2 };

struct Literal {
  bool pos = true;
  Head kind = Head::Pred;
  std::string head;  // empty for equality
  std::vector<Term> args;

  static Literal pred(bool pos, std::string p, std::vector<Term> a) { return {pos, Head::Pred, std::move(p), std::move(a)}; }
  static Literal predvar(bool pos, std::string x, std::vector<Term> a) { return {pos, Head::PredVar, std::move(x), std::move(a)}; }
  static Literal eq(bool pos, Term s, Term t) { return {pos, Head::Eq, "", {std::move(s), std::move(t)}}; }

  /// A negative equality s ≄ t.
  bool is_constraint() const { return !pos && kind == Head::Eq; }
  Literal dual() const { Literal l = *this; l.pos = !l.pos; return l; }
  /// Syntactic identity with equality treated as symmetric.
  bool same(const Literal& o) const;
  bool operator==(const Literal& o) const { return pos == o.pos && kind == o.kind && head == o.head && args == o.args; }
};

std::string to_string(const Literal& l);
void collect_vars(const Literal& l, std::set<std::string>& out);

/// A literal class "L-literal": same head and same polarity as L.
struct LitSpec {
  Head kind;
  std::string head;
  bool pos;
  static LitSpec of(const Literal& l) { return {l.kind, l.head, l.pos}; }
  LitSpec dual() const { return {kind, head, !pos}; }
  bool matches(const Literal& l) const { return l.kind == kind && l.head == head && l.pos == pos; }
};

// ---------------------------------------------------------------- clauses

using Lits = std::vector<Literal>;

/// A finite set of literals in canonical form: literals in a fixed order and
/// variables renamed u0,u1,... by first occurrence, so that two clauses are
/// variants of each other iff their keys coincide.
class Clause {
 public:
  Clause() { key_ = "[]"; }
  explicit Clause(const Lits& lits) : Clause(lits, nullptr) {}
  /// Canonicalizes; when `orig_to_canon` is given it receives, for every
  /// input literal, the index of its image in the canonical literal list.
  Clause(const Lits& lits, std::vector<int>* orig_to_canon);

  const Lits& lits() const { return lits_; }
  const Literal& operator[](size_t i) const { return lits_[i]; }
  size_t size() const { return lits_.size(); }
  bool empty() const { return lits_.empty(); }
  const std::string& key() const { return key_; }
  std::set<std::string> vars() const;
  bool contains_head(Head k, const std::string& head) const;

  bool operator==(const Clause& o) const { return key_ == o.key_; }
  bool operator!=(const Clause& o) const { return key_ != o.key_; }
  bool operator<(const Clause& o) const { return key_ < o.key_; }

 private:
  Lits lits_;
  std::string key_;
};

std::string to_string(const Clause& c);

/// A clause with one designated literal (1 of the clause's canonical literals).
struct PointedClause {
  Clause clause;
  int index = 0;

  PointedClause() = default;
  PointedClause(Clause c, int i);
  /// Builds from raw literals, designating raw literal `i`; the designation
  /// survives canonicalization.
  static PointedClause from(const Lits& lits, int i);
  const Literal& lit() const { return clause[index]; }
  bool operator==(const PointedClause& o) const { return clause == o.clause && index == o.index; }
};

std::string to_string(const PointedClause& p);

/// Duplicate-free set of canonical clauses; iteration is in insertion order.
class ClauseSet {
 public:
  ClauseSet() = default;
  ClauseSet(std::initializer_list<Clause> cs) { for (const auto& c : cs) insert(c); }
  explicit ClauseSet(const std::vector<Clause>& cs) { for (const auto& c : cs) insert(c); }

  bool insert(const Clause& c);
  bool erase(const Clause& c);
  bool contains(const Clause& c) const { return keys_.count(c.key()) != 0; }
  size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const std::vector<Clause>& clauses() const { return items_; }
  std::vector<Clause>::const_iterator begin() const { return items_.begin(); }
  std::vector<Clause>::const_iterator end() const { return items_.end(); }
  /// Clauses sorted by canonical key (set equality = equality of this list).
  std::vector<Clause> sorted() const;
  bool operator==(const ClauseSet& o) const;

 private:
  std::vector<Clause> items_;
  std::unordered_set<std::string> keys_;
};

// ---------------------------------------------------------- substitutions

/// Finite map from variables to terms, applied simultaneously.
using Subst = std::map<std::string, Term>;

Term apply_subst(const Term& t, const Subst& s);
Literal apply_subst(const Literal& l, const Subst& s);
Lits apply_subst(const Lits& ls, const Subst& s);
Clause apply_subst(const Clause& c, const Subst& s);

/// Most general unifier of two equally long term tuples, idempotent; nullopt
/// on symbol clash or occurs-check failure.
std::optional<Subst> mgu(const std::vector<Term>& a, const std::vector<Term>& b);
/// Extends `s` to a unifier of `a` and `b` (s must be idempotent).
bool unify_into(const Term& a, const Term& b, Subst& s);

/// One-way matching: binds variables of `pat` only; `tgt` is treated as
/// rigid (its variables behave like constants).
bool match_term(const Term& pat, const Term& tgt, Subst& s);
/// Matches literal `pat` onto `tgt` (same polarity and head); equality is
/// tried in both orientations, each alternative appended to `out`.
void match_literal_all(const Literal& pat, const Literal& tgt, const Subst& s, std::vector<Subst>& out);

/// Renames the clause's variables injectively so that none of them is in
/// `avoid`. The result is deliberately not canonicalized (canonicalization
/// would undo the renaming).
Lits rename_apart(const Clause& c, const std::set<std::string>& avoid);
Lits rename_apart(const Lits& c, const std::set<std::string>& avoid);

void collect_vars(const Lits& ls, std::set<std::string>& out);

/// Number of non-logical symbols (predicate, function, constant and variable
/// occurrences; equality is a logical symbol and is not counted).
int literal_size(const Literal& l);
int clause_size(const Clause& c);

}  // namespace scanw

#pragma once

// Problem files, formula and witness text, background theories, the graph
// reachability encoding and the Ackermann fast path.

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "scanw/formula.hpp"
#include "scanw/logic.hpp"

namespace scanw {

/// An elimination problem: ∃X̄ (T ∧ N).
struct Problem {
  Signature sig;
  std::vector<std::pair<std::string, int>> xs;  // predicate variables to eliminate
  std::vector<Clause> clauses;                  // file order, duplicates removed; ids are 1-based positions
  std::vector<bool> theory;                     // parallel to `clauses`
  std::string origin;

  std::vector<std::string> x_names() const;
  /// Every clause (theory included), in id order.
  ClauseSet clause_set() const;
  ClauseSet theory_set() const;
  ClauseSet non_theory_set() const;
  /// Appends a clause (ignored when already present); returns whether added.
  bool add(const Clause& c, bool is_theory = false);
};

/// Parses the line-oriented problem format. Throws Error(Input) (syntax,
/// "line:col: message") or Error(Arity) (conflicting symbol use).
Problem parse_problem(const std::string& text, const std::string& origin = "<input>");
/// Reads and parses a file; Error(Input) if it cannot be read.
Problem load_problem(const std::string& path);
std::string read_file(const std::string& path);
/// Renders a problem in the same format (parse ∘ print is the identity on
/// canonical problems).
std::string print_problem(const Problem& p);
/// Parses a single clause line against a signature (extending it).
Clause parse_clause(const std::string& text, Signature& sig);
/// The same, keeping literal order and variable names (not canonicalized).
Lits parse_lits(const std::string& text, Signature& sig);

/// The problem with the theory clauses moved into N. Throws Error(Invalid)
/// when a theory clause mentions a predicate variable.
Problem merge_theory(const Problem& p);

struct GraphSpec {
  int nodes = 0;
  std::set<std::pair<int, int>> edges;  // 1-based
  std::set<int> init, fail;
};
GraphSpec parse_graph(const std::string& text);
/// R(I,F) (ids 1..) followed by the theory T(G): distinctness for i<j,
/// positive edge facts, negative non-edge facts (lexicographic), domain
/// closure. Constants a1..an, edge predicate E, predicate variable X.
Problem encode_graph(const GraphSpec& g);

/// Ackermann fast path: when N = N' ∪ {¬X(ū) ∨ C} with N' X-positive, C
/// X-free and ū distinct variables, returns [X ← λū. ∀w̄ C] (w̄ the other
/// variables of C); dually [X ← λū. ¬∀w̄ C] for X(ū) ∨ C with N' X-negative.
std::optional<PredSubst> ackermann_witness(const Problem& p, const std::string& x);

/// Parses a formula in the witness text syntax. Identifiers bound by a
/// binder are variables (`?u` is accepted as well), other bare identifiers
/// are constants or 0-ary predicates, `gfp`-bound names and predicate
/// variables of `sig` are predicate variables. When `extend` is false,
/// unknown symbols are an error; otherwise they are added to `sig`.
F parse_formula(const std::string& text, Signature& sig, bool extend = false,
                const std::vector<std::string>& free_vars = {});
/// Parses `X := lambda u v. body` lines (one binding per line; a binding
/// may continue on following lines). Checks arities against the problem.
PredSubst parse_witness(const std::string& text, const Problem& p);
std::string print_witness(const PredSubst& s);

}  // namespace scanw

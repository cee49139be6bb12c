#include "scanw/frontend.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace scanw {

// ------------------------------------------------------------------ Problem

std::vector<std::string> Problem::x_names() const {
  std::vector<std::string> r;
  for (const auto& [x, a] : xs) r.push_back(x);
  return r;
}

ClauseSet Problem::clause_set() const { return ClauseSet(clauses); }

ClauseSet Problem::theory_set() const {
  ClauseSet r;
  for (size_t i = 0; i < clauses.size(); ++i)
    if (theory[i]) r.insert(clauses[i]);
  return r;
}

ClauseSet Problem::non_theory_set() const {
  ClauseSet r;
  for (size_t i = 0; i < clauses.size(); ++i)
    if (!theory[i]) r.insert(clauses[i]);
  return r;
}

bool Problem::add(const Clause& c, bool is_theory) {
  for (const auto& d : clauses)
    if (d == c) return false;
  clauses.push_back(c);
  theory.push_back(is_theory);
  return true;
}

// -------------------------------------------------------------------- lexer

namespace {

enum class Tok { Ident, Var, Number, LParen, RParen, Comma, Pipe, Tilde, Eq, Neq, Dot, And, Or, Imp, Iff, At, Assign, Slash, End };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int col;
};

[[noreturn]] void fail_at(int line, int col, const std::string& msg) {
  throw Error(Error::Kind::Input, std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
}

std::vector<Token> lex(const std::string& s, int first_line = 1) {
  std::vector<Token> out;
  int line = first_line, col = 1;
  size_t i = 0;
  auto adv = [&](size_t k) {
    for (size_t j = 0; j < k; ++j) {
      if (s[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  auto ident_char = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
  while (i < s.size()) {
    char c = s[i];
    if (c == '#') {
      while (i < s.size() && s[i] != '\n') adv(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      adv(1);
      continue;
    }
    int l = line, cc = col;
    auto two = [&](const char* p) { return s.compare(i, 2, p) == 0; };
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < s.size() && ident_char(s[j])) ++j;
      out.push_back({Tok::Ident, s.substr(i, j - i), l, cc});
      adv(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      out.push_back({Tok::Number, s.substr(i, j - i), l, cc});
      adv(j - i);
    } else if (c == '?') {
      size_t j = i + 1;
      if (j >= s.size() || !std::isalpha(static_cast<unsigned char>(s[j]))) fail_at(l, cc, "expected variable name after '?'");
      while (j < s.size() && ident_char(s[j])) ++j;
      out.push_back({Tok::Var, s.substr(i + 1, j - i - 1), l, cc});
      adv(j - i);
    } else if (s.compare(i, 3, "<->") == 0) {
      out.push_back({Tok::Iff, "<->", l, cc});
      adv(3);
    } else if (two("->")) {
      out.push_back({Tok::Imp, "->", l, cc});
      adv(2);
    } else if (two("/\\")) {
      out.push_back({Tok::And, "/\\", l, cc});
      adv(2);
    } else if (two("\\/")) {
      out.push_back({Tok::Or, "\\/", l, cc});
      adv(2);
    } else if (two("!=")) {
      out.push_back({Tok::Neq, "!=", l, cc});
      adv(2);
    } else if (two(":=")) {
      out.push_back({Tok::Assign, ":=", l, cc});
      adv(2);
    } else {
      Tok k;
      switch (c) {
        case '(': k = Tok::LParen; break;
        case ')': k = Tok::RParen; break;
        case ',': k = Tok::Comma; break;
        case '|': k = Tok::Pipe; break;
        case '~': k = Tok::Tilde; break;
        case '=': k = Tok::Eq; break;
        case '.': k = Tok::Dot; break;
        case '@': k = Tok::At; break;
        case '/': k = Tok::Slash; break;
        default: fail_at(l, cc, std::string("unexpected character '") + c + "'");
      }
      out.push_back({k, std::string(1, c), l, cc});
      adv(1);
    }
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

const char* tok_name(Tok k) {
  switch (k) {
    case Tok::Ident: return "identifier";
    case Tok::Var: return "variable";
    case Tok::Number: return "number";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Comma: return "','";
    case Tok::Pipe: return "'|'";
    case Tok::Tilde: return "'~'";
    case Tok::Eq: return "'='";
    case Tok::Neq: return "'!='";
    case Tok::Dot: return "'.'";
    case Tok::And: return "'/\\'";
    case Tok::Or: return "'\\/'";
    case Tok::Imp: return "'->'";
    case Tok::Iff: return "'<->'";
    case Tok::At: return "'@'";
    case Tok::Assign: return "':='";
    case Tok::Slash: return "'/'";
    case Tok::End: return "end of input";
  }
  return "?";
}

class Cursor {
 public:
  explicit Cursor(std::vector<Token> t) : toks_(std::move(t)) {}
  const Token& peek(size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at(Tok k) const { return peek().kind == k; }
  Token next() {
    Token t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  bool accept(Tok k) {
    if (!at(k)) return false;
    next();
    return true;
  }
  Token expect(Tok k, const char* what = nullptr) {
    if (!at(k)) fail(std::string("expected ") + (what ? what : tok_name(k)) + ", found " + describe(peek()));
    return next();
  }
  [[noreturn]] void fail(const std::string& msg) const { fail_at(peek().line, peek().col, msg); }
  [[noreturn]] void fail_tok(const Token& t, const std::string& msg) const { fail_at(t.line, t.col, msg); }
  static std::string describe(const Token& t) {
    if (t.kind == Tok::Ident || t.kind == Tok::Number) return "'" + t.text + "'";
    if (t.kind == Tok::Var) return "'?" + t.text + "'";
    return tok_name(t.kind);
  }

 private:
  std::vector<Token> toks_;
  size_t pos_ = 0;
};

void declare_at(Signature& sig, const Token& t, const std::string& name, SymKind kind, int arity) {
  auto prev = sig.lookup(name);
  if (prev && (prev->kind != kind || prev->arity != arity)) {
    auto kn = [](SymKind k) {
      return k == SymKind::Function ? "function" : k == SymKind::Predicate ? "predicate" : "predicate variable";
    };
    std::string msg = std::to_string(t.line) + ":" + std::to_string(t.col) + ": symbol '" + name + "' used as " +
                      kn(kind) + "/" + std::to_string(arity) + " but previously as " + kn(prev->kind) + "/" +
                      std::to_string(prev->arity);
    throw Error(Error::Kind::Arity, msg);
  }
  sig.declare(name, kind, arity);
}

// ------------------------------------------------------------ clause syntax

Term parse_term(Cursor& cur, Signature& sig) {
  if (cur.at(Tok::Var)) return Term::var(cur.next().text);
  Token id = cur.expect(Tok::Ident, "term");
  std::vector<Term> args;
  if (cur.accept(Tok::LParen)) {
    do args.push_back(parse_term(cur, sig));
    while (cur.accept(Tok::Comma));
    cur.expect(Tok::RParen);
  }
  auto info = sig.lookup(id.text);
  if (info && info->kind == SymKind::PredVar)
    cur.fail_tok(id, "predicate variable '" + id.text + "' used as a first-order symbol");
  declare_at(sig, id, id.text, SymKind::Function, static_cast<int>(args.size()));
  return Term::app(id.text, std::move(args));
}

Literal parse_literal(Cursor& cur, Signature& sig) {
  bool neg = cur.accept(Tok::Tilde);
  if (cur.at(Tok::Var)) {
    Term s = parse_term(cur, sig);
    bool eq = cur.at(Tok::Eq);
    if (!eq && !cur.at(Tok::Neq)) cur.fail("expected '=' or '!=' after variable");
    cur.next();
    Term t = parse_term(cur, sig);
    return Literal::eq(eq != neg, s, t);
  }
  Token id = cur.expect(Tok::Ident, "literal");
  std::vector<Term> args;
  if (cur.accept(Tok::LParen)) {
    do args.push_back(parse_term(cur, sig));
    while (cur.accept(Tok::Comma));
    cur.expect(Tok::RParen);
  }
  if (cur.at(Tok::Eq) || cur.at(Tok::Neq)) {
    bool eq = cur.next().kind == Tok::Eq;
    auto info = sig.lookup(id.text);
    if (info && info->kind == SymKind::PredVar)
      cur.fail_tok(id, "predicate variable '" + id.text + "' used as a first-order symbol");
    declare_at(sig, id, id.text, SymKind::Function, static_cast<int>(args.size()));
    Term s = Term::app(id.text, std::move(args));
    Term t = parse_term(cur, sig);
    return Literal::eq(eq != neg, s, t);
  }
  auto info = sig.lookup(id.text);
  if (info && info->kind == SymKind::PredVar) {
    if (info->arity != static_cast<int>(args.size()))
      throw Error(Error::Kind::Arity, std::to_string(id.line) + ":" + std::to_string(id.col) + ": predicate variable '" +
                                          id.text + "' has arity " + std::to_string(info->arity));
    return Literal::predvar(!neg, id.text, std::move(args));
  }
  declare_at(sig, id, id.text, SymKind::Predicate, static_cast<int>(args.size()));
  return Literal::pred(!neg, id.text, std::move(args));
}

Lits parse_lits_tokens(Cursor& cur, Signature& sig) {
  Lits lits;
  if (cur.at(Tok::Ident) && cur.peek().text == "false" && (cur.peek(1).kind == Tok::Dot || cur.peek(1).kind == Tok::End)) {
    cur.next();
  } else {
    do lits.push_back(parse_literal(cur, sig));
    while (cur.accept(Tok::Pipe));
  }
  cur.accept(Tok::Dot);
  if (!cur.at(Tok::End)) cur.fail("unexpected " + Cursor::describe(cur.peek()) + " after clause");
  return lits;
}

Clause parse_clause_tokens(Cursor& cur, Signature& sig) { return Clause(parse_lits_tokens(cur, sig)); }

std::string strip_comment(const std::string& line) {
  auto h = line.find('#');
  return h == std::string::npos ? line : line.substr(0, h);
}

bool starts_with_keyword(const std::string& s, const std::string& kw, size_t& rest) {
  size_t i = s.find_first_not_of(" \t\r");
  if (i == std::string::npos || s.compare(i, kw.size(), kw) != 0) return false;
  size_t j = i + kw.size();
  if (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) return false;
  rest = j;
  return true;
}

}  // namespace

Clause parse_clause(const std::string& text, Signature& sig) {
  Cursor cur(lex(text));
  return parse_clause_tokens(cur, sig);
}

Lits parse_lits(const std::string& text, Signature& sig) {
  Cursor cur(lex(text));
  return parse_lits_tokens(cur, sig);
}

Problem parse_problem(const std::string& text, const std::string& origin) {
  Problem p;
  p.origin = origin;
  std::vector<std::string> lines;
  {
    std::stringstream ss(text);
    std::string l;
    while (std::getline(ss, l)) lines.push_back(l);
  }
  // Predicate-variable directives first, so that clause lines may precede them.
  for (size_t n = 0; n < lines.size(); ++n) {
    std::string l = strip_comment(lines[n]);
    size_t rest;
    if (!starts_with_keyword(l, "exists", rest)) continue;
    std::string body(l.size(), ' ');
    std::copy(l.begin() + static_cast<long>(rest), l.end(), body.begin() + static_cast<long>(rest));
    Cursor cur(lex(body, static_cast<int>(n + 1)));
    do {
      Token id = cur.expect(Tok::Ident, "predicate variable name");
      cur.expect(Tok::Slash);
      Token ar = cur.expect(Tok::Number, "arity");
      int arity = std::stoi(ar.text);
      declare_at(p.sig, id, id.text, SymKind::PredVar, arity);
      if (std::find(p.xs.begin(), p.xs.end(), std::make_pair(id.text, arity)) == p.xs.end()) p.xs.emplace_back(id.text, arity);
    } while (cur.accept(Tok::Comma));
    cur.accept(Tok::Dot);
    if (!cur.at(Tok::End)) cur.fail("unexpected " + Cursor::describe(cur.peek()) + " in exists directive");
  }
  for (size_t n = 0; n < lines.size(); ++n) {
    std::string l = strip_comment(lines[n]);
    if (l.find_first_not_of(" \t\r") == std::string::npos) continue;
    size_t rest;
    if (starts_with_keyword(l, "exists", rest)) continue;
    bool th = starts_with_keyword(l, "theory", rest);
    std::string body = l;
    if (th) std::fill(body.begin(), body.begin() + static_cast<long>(rest), ' ');
    Cursor cur(lex(body, static_cast<int>(n + 1)));
    Clause c = parse_clause_tokens(cur, p.sig);
    if (th)
      for (const auto& lit : c.lits())
        if (lit.kind == Head::PredVar)
          throw Error(Error::Kind::Input, std::to_string(n + 1) + ":1: theory clause mentions predicate variable " + lit.head);
    p.add(c, th);
  }
  return p;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Error::Kind::Input, "cannot read file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Problem load_problem(const std::string& path) {
  try {
    return parse_problem(read_file(path), path);
  } catch (const Error& e) {
    if (e.kind() == Error::Kind::Input || e.kind() == Error::Kind::Arity) throw Error(e.kind(), path + ":" + e.what());
    throw;
  }
}

std::string print_problem(const Problem& p) {
  std::string out;
  if (!p.xs.empty()) {
    out += "exists ";
    for (size_t i = 0; i < p.xs.size(); ++i) {
      if (i) out += ", ";
      out += p.xs[i].first + "/" + std::to_string(p.xs[i].second);
    }
    out += ".\n";
  }
  for (size_t i = 0; i < p.clauses.size(); ++i) {
    if (p.theory[i]) out += "theory ";
    out += p.clauses[i].empty() ? "false" : to_string(p.clauses[i]);
    out += "\n";
  }
  return out;
}

Problem merge_theory(const Problem& p) {
  Problem r = p;
  for (size_t i = 0; i < r.clauses.size(); ++i) {
    if (!r.theory[i]) continue;
    for (const auto& l : r.clauses[i].lits())
      if (l.kind == Head::PredVar)
        throw Error(Error::Kind::Invalid, "theory clause mentions predicate variable " + l.head);
    r.theory[i] = false;
  }
  return r;
}

// ------------------------------------------------------------------- graphs

GraphSpec parse_graph(const std::string& text) {
  GraphSpec g;
  std::stringstream ss(text);
  std::string line;
  int n = 0;
  std::vector<std::tuple<int, std::string, std::vector<int>>> items;
  while (std::getline(ss, line)) {
    ++n;
    std::stringstream ls(strip_comment(line));
    std::string kw;
    if (!(ls >> kw)) continue;
    std::vector<int> nums;
    std::string w;
    while (ls >> w) {
      if (w.find_first_not_of("0123456789") != std::string::npos)
        throw Error(Error::Kind::Input, std::to_string(n) + ":1: expected node number, found '" + w + "'");
      nums.push_back(std::stoi(w));
    }
    if (kw == "nodes") {
      if (nums.size() != 1 || nums[0] < 1) throw Error(Error::Kind::Input, std::to_string(n) + ":1: 'nodes' takes one positive number");
      g.nodes = nums[0];
    } else if (kw == "edge" || kw == "init" || kw == "fail") {
      if (kw == "edge" && nums.size() != 2) throw Error(Error::Kind::Input, std::to_string(n) + ":1: 'edge' takes two nodes");
      items.emplace_back(n, kw, nums);
    } else {
      throw Error(Error::Kind::Input, std::to_string(n) + ":1: unknown directive '" + kw + "'");
    }
  }
  if (g.nodes < 1) throw Error(Error::Kind::Input, "graph: missing 'nodes' directive");
  for (const auto& [ln, kw, nums] : items) {
    for (int v : nums)
      if (v < 1 || v > g.nodes) throw Error(Error::Kind::Input, std::to_string(ln) + ":1: node " + std::to_string(v) + " out of range");
    if (kw == "edge") g.edges.emplace(nums[0], nums[1]);
    if (kw == "init") g.init.insert(nums.begin(), nums.end());
    if (kw == "fail") g.fail.insert(nums.begin(), nums.end());
  }
  return g;
}

Problem encode_graph(const GraphSpec& g) {
  if (g.nodes < 1) throw Error(Error::Kind::Invalid, "graph must have at least one node");
  Problem p;
  p.origin = "graph";
  auto a = [](int i) { return Term::app("a" + std::to_string(i)); };
  Term u = Term::var("u"), v = Term::var("v");
  p.sig.declare("X", SymKind::PredVar, 1);
  p.sig.declare("E", SymKind::Predicate, 2);
  for (int i = 1; i <= g.nodes; ++i) p.sig.declare("a" + std::to_string(i), SymKind::Function, 0);
  p.xs.emplace_back("X", 1);
  for (int i : g.init) p.add(Clause(Lits{Literal::predvar(true, "X", {a(i)})}));
  for (int i : g.fail) p.add(Clause(Lits{Literal::predvar(false, "X", {a(i)})}));
  p.add(Clause(Lits{Literal::predvar(false, "X", {u}), Literal::pred(false, "E", {u, v}), Literal::predvar(true, "X", {v})}));
  for (int i = 1; i <= g.nodes; ++i)
    for (int j = i + 1; j <= g.nodes; ++j) p.add(Clause(Lits{Literal::eq(false, a(i), a(j))}), true);
  for (const auto& [i, j] : g.edges) p.add(Clause(Lits{Literal::pred(true, "E", {a(i), a(j)})}), true);
  for (int i = 1; i <= g.nodes; ++i)
    for (int j = 1; j <= g.nodes; ++j)
      if (!g.edges.count({i, j})) p.add(Clause(Lits{Literal::pred(false, "E", {a(i), a(j)})}), true);
  Lits closure;
  for (int i = 1; i <= g.nodes; ++i) closure.push_back(Literal::eq(true, u, a(i)));
  p.add(Clause(closure), true);
  return p;
}

// ---------------------------------------------------------------- Ackermann

std::optional<PredSubst> ackermann_witness(const Problem& p, const std::string& x) {
  const std::vector<Clause>& cs = p.clauses;
  for (int polarity : {-1, 1}) {
    // polarity: sign of the X-literal in the Ackermann clause.
    std::optional<size_t> chosen;
    bool ok = true;
    for (size_t i = 0; i < cs.size() && ok; ++i) {
      bool has_same = false, has_other = false;
      for (const auto& l : cs[i].lits())
        if (l.kind == Head::PredVar && l.head == x) ((l.pos ? 1 : -1) == polarity ? has_same : has_other) = true;
      if (!has_same) continue;
      if (chosen || has_other) {
        ok = false;
        break;
      }
      chosen = i;
    }
    if (!ok || !chosen) continue;
    const Clause& c = cs[*chosen];
    size_t count = 0, idx = 0;
    for (size_t i = 0; i < c.size(); ++i)
      if (c[i].kind == Head::PredVar && c[i].head == x) {
        ++count;
        idx = i;
      }
    if (count != 1) continue;
    const Literal& xl = c[idx];
    std::vector<std::string> params;
    bool distinct = true;
    for (const auto& t : xl.args) {
      if (!t.is_var || std::find(params.begin(), params.end(), t.name) != params.end()) distinct = false;
      else params.push_back(t.name);
    }
    if (!distinct) continue;
    std::vector<F> rest;
    std::vector<std::string> others;
    for (size_t i = 0; i < c.size(); ++i) {
      if (i == idx) continue;
      rest.push_back(f_lit(c[i]));
      for (const auto& t : c[i].args) {
        std::vector<std::string> vs;
        collect_vars_ordered(t, vs);
        for (const auto& v : vs)
          if (std::find(params.begin(), params.end(), v) == params.end() &&
              std::find(others.begin(), others.end(), v) == others.end())
            others.push_back(v);
      }
    }
    F body = f_forall(others, f_or(rest));
    if (polarity == 1) body = f_not(body);
    return PredSubst{{x, PredExpr{params, body}}};
  }
  return std::nullopt;
}

// ---------------------------------------------------------- formula syntax

namespace {

class FormulaParser {
 public:
  FormulaParser(Cursor& cur, Signature& sig, bool extend) : cur_(cur), sig_(sig), extend_(extend) {}

  std::vector<std::string> vars;                          // first-order variables in scope
  std::vector<std::pair<std::string, int>> preds;         // gfp-bound predicate variables

  F formula() {
    if (cur_.at(Tok::Ident)) {
      const std::string& w = cur_.peek().text;
      if (w == "forall" || w == "exists") return quantified();
      if (w == "gfp") return gfp();
    }
    return iff();
  }

 private:
  bool bound_var(const std::string& n) const { return std::find(vars.begin(), vars.end(), n) != vars.end(); }

  std::string binder_name() {
    if (cur_.at(Tok::Var)) return cur_.next().text;
    Token t = cur_.expect(Tok::Ident, "variable name");
    if (t.text == "forall" || t.text == "exists" || t.text == "gfp" || t.text == "lambda" || t.text == "true" ||
        t.text == "false")
      cur_.fail_tok(t, "reserved word '" + t.text + "' cannot be a variable");
    return t.text;
  }

  F quantified() {
    bool all = cur_.next().text == "forall";
    std::vector<std::string> vs;
    while (!cur_.at(Tok::Dot)) vs.push_back(binder_name());
    if (vs.empty()) cur_.fail("quantifier without variables");
    cur_.expect(Tok::Dot);
    size_t mark = vars.size();
    vars.insert(vars.end(), vs.begin(), vs.end());
    F body = formula();
    vars.resize(mark);
    return all ? f_forall(vs, body) : f_exists(vs, body);
  }

  F gfp() {
    cur_.next();
    Token y = cur_.expect(Tok::Ident, "fixpoint predicate variable");
    std::vector<std::string> bound;
    while (!cur_.at(Tok::Dot)) bound.push_back(binder_name());
    cur_.expect(Tok::Dot);
    size_t mark = vars.size();
    vars.insert(vars.end(), bound.begin(), bound.end());
    preds.emplace_back(y.text, static_cast<int>(bound.size()));
    F body = formula();
    preds.pop_back();
    vars.resize(mark);
    cur_.expect(Tok::At);
    cur_.expect(Tok::LParen);
    std::vector<Term> args;
    if (!cur_.at(Tok::RParen)) {
      do args.push_back(term());
      while (cur_.accept(Tok::Comma));
    }
    cur_.expect(Tok::RParen);
    if (args.size() != bound.size()) cur_.fail_tok(y, "gfp applied to wrong number of arguments");
    return f_gfp(y.text, bound, body, args);
  }

  F iff() {
    F a = imp();
    while (cur_.accept(Tok::Iff)) a = f_iff(a, imp());
    return a;
  }

  F imp() {
    F a = disj();
    if (cur_.accept(Tok::Imp)) return f_imp(a, imp_rhs());
    return a;
  }
  F imp_rhs() {
    if (cur_.at(Tok::Ident) && (cur_.peek().text == "forall" || cur_.peek().text == "exists" || cur_.peek().text == "gfp"))
      return formula();
    return imp();
  }

  F disj() {
    std::vector<F> ks{conj()};
    while (cur_.accept(Tok::Or)) ks.push_back(conj());
    return ks.size() == 1 ? ks[0] : f_or(ks);
  }

  F conj() {
    std::vector<F> ks{unary()};
    while (cur_.accept(Tok::And)) ks.push_back(unary());
    return ks.size() == 1 ? ks[0] : f_and(ks);
  }

  F unary() {
    if (cur_.accept(Tok::Tilde)) return f_not(unary());
    if (cur_.accept(Tok::LParen)) {
      F f = formula();
      cur_.expect(Tok::RParen);
      return f;
    }
    if (cur_.at(Tok::Ident)) {
      const std::string& w = cur_.peek().text;
      if (w == "forall" || w == "exists") return quantified();
      if (w == "gfp") return gfp();
      if (w == "true") {
        cur_.next();
        return f_true();
      }
      if (w == "false") {
        cur_.next();
        return f_false();
      }
    }
    return atomic();
  }

  void symbol(const Token& t, const std::string& name, SymKind kind, int arity) {
    auto info = sig_.lookup(name);
    if (!info && !extend_) cur_.fail_tok(t, "unknown symbol '" + name + "'");
    declare_at(sig_, t, name, kind, arity);
  }

  Term term() {
    if (cur_.at(Tok::Var)) {
      Token t = cur_.next();
      if (!bound_var(t.text)) cur_.fail_tok(t, "unbound variable '?" + t.text + "'");
      return Term::var(t.text);
    }
    Token id = cur_.expect(Tok::Ident, "term");
    if (!cur_.at(Tok::LParen) && bound_var(id.text)) return Term::var(id.text);
    std::vector<Term> args;
    if (cur_.accept(Tok::LParen)) {
      do args.push_back(term());
      while (cur_.accept(Tok::Comma));
      cur_.expect(Tok::RParen);
    }
    symbol(id, id.text, SymKind::Function, static_cast<int>(args.size()));
    return Term::app(id.text, std::move(args));
  }

  F atomic() {
    if (cur_.at(Tok::Var)) {
      Term s = term();
      return equation(s);
    }
    Token id = cur_.expect(Tok::Ident, "atom");
    if (!cur_.at(Tok::LParen) && bound_var(id.text)) return equation(Term::var(id.text));
    std::vector<Term> args;
    if (cur_.accept(Tok::LParen)) {
      if (!cur_.at(Tok::RParen)) {
        do args.push_back(term());
        while (cur_.accept(Tok::Comma));
      }
      cur_.expect(Tok::RParen);
    }
    if (cur_.at(Tok::Eq) || cur_.at(Tok::Neq)) {
      symbol(id, id.text, SymKind::Function, static_cast<int>(args.size()));
      return equation(Term::app(id.text, std::move(args)));
    }
    for (auto it = preds.rbegin(); it != preds.rend(); ++it) {
      if (it->first != id.text) continue;
      if (it->second != static_cast<int>(args.size())) cur_.fail_tok(id, "fixpoint variable '" + id.text + "' applied with wrong arity");
      return f_atom(Head::PredVar, id.text, std::move(args));
    }
    auto info = sig_.lookup(id.text);
    if (info && info->kind == SymKind::PredVar) {
      if (info->arity != static_cast<int>(args.size()))
        throw Error(Error::Kind::Arity, std::to_string(id.line) + ":" + std::to_string(id.col) + ": predicate variable '" +
                                            id.text + "' has arity " + std::to_string(info->arity));
      return f_atom(Head::PredVar, id.text, std::move(args));
    }
    symbol(id, id.text, SymKind::Predicate, static_cast<int>(args.size()));
    return f_atom(Head::Pred, id.text, std::move(args));
  }

  F equation(const Term& s) {
    bool eq = cur_.at(Tok::Eq);
    if (!eq && !cur_.at(Tok::Neq)) cur_.fail("expected '=' or '!=' after term");
    cur_.next();
    Term t = term();
    return eq ? f_eq(s, t) : f_not(f_eq(s, t));
  }

  Cursor& cur_;
  Signature& sig_;
  bool extend_;
};

}  // namespace

F parse_formula(const std::string& text, Signature& sig, bool extend, const std::vector<std::string>& free_vars) {
  Cursor cur(lex(text));
  FormulaParser fp(cur, sig, extend);
  fp.vars = free_vars;
  F f = fp.formula();
  if (!cur.at(Tok::End)) cur.fail("unexpected " + Cursor::describe(cur.peek()) + " after formula");
  return f;
}

PredSubst parse_witness(const std::string& text, const Problem& p) {
  // Split into bindings: a binding starts at a line of the form `Name :=`.
  std::vector<std::pair<int, std::string>> chunks;
  {
    std::stringstream ss(text);
    std::string line;
    int n = 0;
    while (std::getline(ss, line)) {
      ++n;
      std::string l = strip_comment(line);
      if (l.find_first_not_of(" \t\r") == std::string::npos) continue;
      auto assign = l.find(":=");
      if (assign != std::string::npos) {
        chunks.emplace_back(n, l + "\n");
      } else {
        if (chunks.empty()) throw Error(Error::Kind::Input, std::to_string(n) + ":1: expected 'X := lambda ...'");
        chunks.back().second += l + "\n";
      }
    }
  }
  PredSubst out;
  Signature sig = p.sig;
  for (const auto& [line, chunk] : chunks) {
    Cursor cur(lex(chunk, line));
    Token x = cur.expect(Tok::Ident, "predicate variable");
    auto info = sig.lookup(x.text);
    if (!info || info->kind != SymKind::PredVar) cur.fail_tok(x, "'" + x.text + "' is not a predicate variable of the problem");
    cur.expect(Tok::Assign);
    Token lam = cur.expect(Tok::Ident, "'lambda'");
    if (lam.text != "lambda") cur.fail_tok(lam, "expected 'lambda'");
    std::vector<std::string> params;
    while (!cur.at(Tok::Dot)) {
      if (cur.at(Tok::Var)) params.push_back(cur.next().text);
      else params.push_back(cur.expect(Tok::Ident, "parameter").text);
    }
    cur.expect(Tok::Dot);
    if (static_cast<int>(params.size()) != info->arity)
      throw Error(Error::Kind::Arity, std::to_string(x.line) + ":" + std::to_string(x.col) + ": witness for " + x.text + " has " +
                                          std::to_string(params.size()) + " parameters, expected " + std::to_string(info->arity));
    FormulaParser fp(cur, sig, false);
    fp.vars = params;
    F body = fp.formula();
    if (!cur.at(Tok::End)) cur.fail("unexpected " + Cursor::describe(cur.peek()) + " after witness body");
    if (out.count(x.text)) cur.fail_tok(x, "duplicate binding for " + x.text);
    out[x.text] = PredExpr{params, body};
  }
  return out;
}

std::string print_witness(const PredSubst& s) {
  std::string out;
  for (const auto& [x, e] : s) out += x + " := " + to_string(e) + "\n";
  return out;
}

}  // namespace scanw

#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <regex>
#include <sstream>
#include <thread>

#include "scanw/frontend.hpp"
#include "scanw/saturation.hpp"
#include "scanw/verify.hpp"
#include "scanw/witness.hpp"

namespace scanw::cli {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

std::optional<std::chrono::milliseconds> parse_duration(const std::string& text) {
  static const std::regex re(R"(^\s*([0-9]+(?:\.[0-9]+)?)\s*(ms|s|m)?\s*$)");
  std::smatch m;
  if (!std::regex_match(text, m, re)) return std::nullopt;
  double v = std::stod(m[1]);
  std::string unit = m[2].matched ? m[2].str() : "s";
  double ms = unit == "ms" ? v : unit == "s" ? v * 1000 : v * 60000;
  return std::chrono::milliseconds(static_cast<long long>(ms));
}

namespace {

struct Options {
  std::string format = "text";
  std::string timeout = "10s";
  int max_steps = 50;
  int lres_budget = 200;
  uint64_t seed = 1;
  std::string witness_mode = "auto";
  bool verify = false;
  bool trace = false;
  int all = 1;
  int jobs = 1;
  bool no_verify = false;

  std::chrono::milliseconds timeout_ms() const {
    auto d = parse_duration(timeout);
    if (!d) throw Error(Error::Kind::Input, "invalid duration '" + timeout + "'");
    return *d;
  }
  bool json() const { return format == "json"; }
  SearchLimits search_limits() const {
    SearchLimits l;
    l.max_steps = max_steps;
    l.timeout = timeout_ms();
    return l;
  }
  WitnessOptions witness_options() const {
    WitnessOptions w;
    w.mode = parse_witness_mode(witness_mode);
    w.lres_budget = lres_budget;
    return w;
  }
  CheckOptions check_options() const {
    CheckOptions c;
    c.models.seed = seed;
    c.prover.timeout = std::min(c.prover.timeout, timeout_ms());
    return c;
  }
};

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::vector<std::string> clause_lines(const ClauseSet& s) {
  std::vector<std::string> out;
  for (const auto& c : s) out.push_back(c.empty() ? "false" : to_string(c));
  return out;
}

std::string status_name(ProverResult::Status s) { return to_string(s); }

json report_json(const WitnessReport& r) {
  json j;
  j["verdict"] = to_string(r.verdict);
  json goals = json::array();
  for (const auto& g : r.goals)
    goals.push_back({{"clause", to_string(g.clause)}, {"status", status_name(g.status)}, {"note", g.note}});
  j["goals"] = goals;
  if (!r.prover_note.empty()) j["prover_note"] = r.prover_note;
  j["models_checked"] = r.models_checked;
  j["models"] = r.model_stats.models;
  j["max_size"] = r.model_stats.max_size;
  j["sampled"] = r.model_stats.sampled;
  if (r.mismatch) j["mismatch"] = r.mismatch->to_string();
  if (!r.mismatch_note.empty()) j["mismatch_note"] = r.mismatch_note;
  return j;
}

std::string indent(const std::string& text, const std::string& pad = "  ") {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line)) out += pad + line + "\n";
  return out;
}

/// Witness extraction and (optional) verification for one derivation.
struct Outcome {
  json j;
  std::string text;
  bool failed = false;
};

Outcome witness_outcome(const Problem& m, const Derivation& d, const Options& o, bool verify) {
  Outcome r;
  r.j["steps"] = counted_steps(d);
  r.j["conclusion"] = clause_lines(d.conclusion());
  std::ostringstream t;
  t << "conclusion:\n";
  for (const auto& l : clause_lines(d.conclusion())) t << "  " << l << "\n";
  if (d.conclusion().empty()) t << "  (empty: true)\n";
  if (o.trace) {
    r.j["trace"] = d.trace();
    t << "trace:\n" << indent(d.trace());
  }
  Witness w;
  try {
    w = compose(d, o.witness_options());
  } catch (const Error& e) {
    r.failed = true;
    r.j["witness_error"] = e.what();
    t << "witness: not extracted (" << e.what() << ")\n";
    r.text = t.str();
    return r;
  }
  r.j["witness"] = print_witness(w.subst);
  r.j["witness_size"] = w.size();
  r.j["first_order"] = w.first_order();
  json recs = json::array();
  t << "witness:\n" << indent(w.subst.empty() ? "(identity)" : print_witness(w.subst));
  for (const auto& rec : w.records) {
    recs.push_back({{"step", rec.step}, {"mode", rec.mode}, {"k", rec.k}, {"note", rec.note}});
    t << "  purdel step " << rec.step << ": " << rec.mode;
    if (rec.k >= 0) t << " k=" << rec.k;
    if (!rec.note.empty()) t << " (" << rec.note << ")";
    t << "\n";
  }
  r.j["purdel"] = recs;
  if (verify) {
    WitnessReport rep = check_witness(m.clauses, m.xs, d.conclusion().clauses(), w.subst, o.check_options());
    r.j["verification"] = report_json(rep);
    t << rep.to_string();
    r.failed = rep.verdict == WitnessReport::Verdict::Fail;
  }
  r.text = t.str();
  return r;
}

void emit(std::ostream& out, const Options& o, const json& j, const std::string& text) {
  if (o.json())
    out << j.dump(2) << "\n";
  else
    out << text;
}

// ------------------------------------------------------------------ commands

int cmd_solve(const std::string& file, const Options& o, std::ostream& out) {
  Problem p = load_problem(file);
  Problem m = merge_theory(p);
  std::vector<Derivation> ds;
  SearchStats st = search(m.clauses, m.x_names(), o.search_limits(), [&](const Derivation& d) {
    ds.push_back(d);
    return static_cast<int>(ds.size()) < std::max(1, o.all);
  });
  json j;
  j["problem"] = file;
  j["eliminate"] = m.x_names();
  std::ostringstream t;
  t << "problem: " << file << "\n";
  if (ds.empty()) {
    std::string why = st.timed_out ? "timeout" : st.exhausted ? "search space exhausted" : "limits reached";
    j["status"] = "no-derivation";
    j["reason"] = why;
    t << "status: no derivation (" << why << ")\n";
    emit(out, o, j, t.str());
    return kNoDerivation;
  }
  bool failed = false;
  json arr = json::array();
  t << "status: solved (" << ds.size() << " derivation" << (ds.size() == 1 ? "" : "s") << ")\n";
  for (size_t i = 0; i < ds.size(); ++i) {
    Outcome r = witness_outcome(m, ds[i], o, o.verify);
    failed = failed || r.failed;
    arr.push_back(r.j);
    t << "== derivation " << i + 1 << " (" << counted_steps(ds[i]) << " steps)\n" << r.text;
  }
  j["status"] = "solved";
  j["derivations"] = arr;
  emit(out, o, j, t.str());
  return failed ? kVerifyFailed : kSolved;
}

int cmd_check(const std::string& problem, const std::string& witness, const std::string& conclusion,
              const Options& o, std::ostream& out) {
  Problem m = merge_theory(load_problem(problem));
  PredSubst w = parse_witness(read_file(witness), m);
  CheckOptions co = o.check_options();
  std::vector<Clause> concl;
  std::string source;
  if (!conclusion.empty()) {
    concl = load_problem(conclusion).clauses;
    source = conclusion;
  } else if (auto d = find_derivation(m.clauses, m.x_names(), o.search_limits())) {
    concl = d->conclusion().clauses();
    source = "search";
  } else {
    co.use_prover = false;
    source = "none (no derivation found; prover part skipped)";
  }
  WitnessReport rep = check_witness(m.clauses, m.xs, concl, w, co);
  json j = report_json(rep);
  j["conclusion_source"] = source;
  emit(out, o, j, "conclusion: " + source + "\n" + rep.to_string());
  return rep.verdict == WitnessReport::Verdict::Fail ? kVerifyFailed : kSolved;
}

int cmd_encode_graph(const std::string& file, std::ostream& out) {
  out << print_problem(encode_graph(parse_graph(read_file(file))));
  return kSolved;
}

int cmd_replay(const std::string& problem, const std::string& trace, const Options& o, std::ostream& out) {
  Problem m = merge_theory(load_problem(problem));
  std::vector<Step> steps = parse_trace(read_file(trace));
  Derivation d = replay(m.clauses, m.x_names(), steps);
  Outcome r = witness_outcome(m, d, o, !o.no_verify);
  r.j["problem"] = problem;
  r.j["trace_file"] = trace;
  emit(out, o, r.j, "problem: " + problem + "\nreplayed: " + std::to_string(d.steps.size()) + " steps\n" + r.text);
  return r.failed ? kVerifyFailed : kSolved;
}

int cmd_prove(const std::string& premises, const std::string& goal, const Options& o, std::ostream& out) {
  Problem p = load_problem(premises);
  F g = parse_formula(read_file(goal), p.sig, true);
  ProverLimits lim;
  lim.timeout = o.timeout_ms();
  ProverResult r = prove(p.clauses, g, lim);
  json j;
  j["status"] = status_name(r.status);
  j["inferences"] = r.inferences;
  if (!r.note.empty()) j["note"] = r.note;
  std::ostringstream t;
  t << "status: " << status_name(r.status) << " (" << r.inferences << " inferences)\n";
  if (!r.note.empty()) t << "note: " << r.note << "\n";
  if (r.countermodel) {
    j["countermodel"] = r.countermodel->to_string();
    t << "countermodel: " << r.countermodel->to_string() << "\n";
  }
  if (o.trace && r.status == ProverResult::Status::Proved) {
    j["initial"] = clause_lines(ClauseSet(r.initial));
    std::string tr;
    for (const auto& s : r.trace) tr += step_to_string(s) + "\n";
    j["trace"] = tr;
    t << "initial:\n";
    for (size_t i = 0; i < r.initial.size(); ++i) t << "  " << i + 1 << ": " << to_string(r.initial[i]) << "\n";
    t << "refutation:\n" << indent(tr);
  }
  emit(out, o, j, t.str());
  switch (r.status) {
    case ProverResult::Status::Proved: return kSolved;
    case ProverResult::Status::Disproved: return kVerifyFailed;
    default: return kNoDerivation;
  }
}

BenchRow bench_one(const std::string& file, const Options& o) {
  BenchRow row;
  row.problem = std::filesystem::path(file).filename().string();
  try {
    Problem m = merge_theory(load_problem(file));
    for (const auto& c : m.clauses) row.input_size += clause_size(c);
    auto t0 = Clock::now();
    auto d = find_derivation(m.clauses, m.x_names(), o.search_limits());
    row.scan_ms = ms_since(t0);
    if (!d) {
      row.verification = "skipped";
      return row;
    }
    row.derived = true;
    row.length = counted_steps(*d);
    t0 = Clock::now();
    Witness w = compose(*d, o.witness_options());
    row.witness_ms = ms_since(t0);
    row.witness_size = w.size();
    if (o.no_verify) {
      row.verification = "skipped";
    } else {
      WitnessReport rep = check_witness(m.clauses, m.xs, d->conclusion().clauses(), w.subst, o.check_options());
      row.verification = to_string(rep.verdict);
    }
  } catch (const std::exception& e) {
    row.verification = std::string("error: ") + e.what();
  }
  return row;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << v;
  return os.str();
}

int cmd_bench(const std::string& dir, const Options& o, std::ostream& out) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error(Error::Kind::Input, "not a directory: '" + dir + "'");
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".soqe") files.push_back(e.path().string());
  std::sort(files.begin(), files.end());
  std::vector<BenchRow> rows(files.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i; (i = next++) < files.size();) rows[i] = bench_one(files[i], o);
  };
  std::vector<std::thread> pool;
  for (int k = 1; k < std::max(1, o.jobs); ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  // Aggregates over problems (derivation columns over derived problems only).
  struct Column {
    std::string name;
    std::function<double(const BenchRow&)> get;
    bool derived_only;
  };
  std::vector<Column> cols = {
      {"input_size", [](const BenchRow& r) { return r.input_size; }, false},
      {"length", [](const BenchRow& r) { return r.length; }, true},
      {"scan_ms", [](const BenchRow& r) { return r.scan_ms; }, false},
      {"witness_ms", [](const BenchRow& r) { return r.witness_ms; }, true},
      {"witness_size", [](const BenchRow& r) { return r.witness_size; }, true},
  };
  std::map<std::string, std::map<std::string, double>> agg;  // stat -> column -> value
  for (const auto& c : cols) {
    std::vector<double> vs;
    for (const auto& r : rows)
      if (!c.derived_only || r.derived) vs.push_back(c.get(r));
    if (vs.empty()) continue;
    double sum = 0;
    for (double v : vs) sum += v;
    agg["min"][c.name] = *std::min_element(vs.begin(), vs.end());
    agg["max"][c.name] = *std::max_element(vs.begin(), vs.end());
    agg["mean"][c.name] = sum / static_cast<double>(vs.size());
  }
  int derived = 0;
  for (const auto& r : rows) derived += r.derived;

  if (o.json()) {
    json j;
    json arr = json::array();
    for (const auto& r : rows)
      arr.push_back({{"problem", r.problem},
                     {"input_size", r.input_size},
                     {"derived", r.derived},
                     {"length", r.length},
                     {"scan_ms", r.scan_ms},
                     {"witness_ms", r.witness_ms},
                     {"witness_size", r.witness_size},
                     {"verification", r.verification}});
    j["rows"] = arr;
    json a = json::object();
    for (const auto& [stat, m] : agg) a[stat] = m;
    j["aggregates"] = a;
    j["derived"] = derived;
    j["problems"] = rows.size();
    out << j.dump(2) << "\n";
    return kSolved;
  }
  out << "problem,input_size,derived,length,scan_ms,witness_ms,witness_size,verification\n";
  for (const auto& r : rows)
    out << csv_field(r.problem) << "," << r.input_size << "," << (r.derived ? "yes" : "no") << "," << r.length << ","
        << fmt(r.scan_ms) << "," << fmt(r.witness_ms) << "," << r.witness_size << "," << csv_field(r.verification)
        << "\n";
  for (const char* stat : {"min", "max", "mean"}) {
    if (!agg.count(stat)) continue;
    const auto& m = agg[stat];
    auto cell = [&](const std::string& c) { return m.count(c) ? fmt(m.at(c)) : std::string(); };
    out << stat << "," << cell("input_size") << "," << derived << "/" << rows.size() << "," << cell("length") << ","
        << cell("scan_ms") << "," << cell("witness_ms") << "," << cell("witness_size") << ",\n";
  }
  return kSolved;
}

void add_common(CLI::App* app, Options& o) {
  app->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "json"}));
  app->add_option("--timeout", o.timeout, "Time limit, e.g. 10s or 500ms (default from SCANW_TIMEOUT, else 10s)");
  app->add_option("--max-steps", o.max_steps, "Maximal derivation length")->check(CLI::PositiveNumber);
  app->add_option("--lres-budget", o.lres_budget, "Resolution budget of local closures")->check(CLI::PositiveNumber);
  app->add_option("--seed", o.seed, "Seed for sampled model checks");
  app->add_option("--witness-mode", o.witness_mode, "auto | first-order | fixpoint | resolution")
      ->check(CLI::IsMember({"auto", "first-order", "fixpoint", "resolution"}));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  if (const char* env = std::getenv("SCANW_TIMEOUT")) o.timeout = env;

  CLI::App app{"scanw: second-order quantifier elimination with witnesses"};
  app.require_subcommand(1);
  std::string file, file2, file3;

  auto* solve = app.add_subcommand("solve", "Eliminate the predicate variables of a problem file");
  solve->add_option("problem", file, "Problem file")->required();
  solve->add_flag("--trace", o.trace, "Print the derivation trace");
  solve->add_flag("--verify", o.verify, "Check every witness");
  solve->add_option("--all", o.all, "Report up to N distinct derivations")->check(CLI::PositiveNumber);
  add_common(solve, o);

  auto* check = app.add_subcommand("check", "Check a witness for a problem");
  check->add_option("problem", file, "Problem file")->required();
  check->add_option("witness", file2, "Witness file (X := lambda u. ...)")->required();
  check->add_option("conclusion", file3, "Conclusion clause file (default: run the search)");
  add_common(check, o);

  auto* enc = app.add_subcommand("encode-graph", "Print the reachability encoding of a graph file");
  enc->add_option("graph", file, "Graph file")->required();

  auto* rep = app.add_subcommand("replay", "Replay a derivation trace and extract its witness");
  rep->add_option("problem", file, "Problem file")->required();
  rep->add_option("trace-file", file2, "Trace file")->required();
  rep->add_flag("--trace", o.trace, "Echo the replayed trace");
  rep->add_flag("--no-verify", o.no_verify, "Skip the witness check");
  add_common(rep, o);

  auto* prv = app.add_subcommand("prove", "Prove a goal formula from premise clauses");
  prv->add_option("premises", file, "Premise clause file")->required();
  prv->add_option("goal", file2, "Goal formula file")->required();
  prv->add_flag("--trace", o.trace, "Print the refutation");
  add_common(prv, o);

  auto* bench = app.add_subcommand("bench", "Measure every .soqe problem of a directory");
  bench->add_option("directory", file, "Problem directory")->required();
  bench->add_option("--jobs", o.jobs, "Problems measured in parallel")->check(CLI::PositiveNumber);
  bench->add_flag("--no-verify", o.no_verify, "Skip witness checks");
  add_common(bench, o);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kSolved : kInputError;
  }

  try {
    o.timeout_ms();
    parse_witness_mode(o.witness_mode);
    if (solve->parsed()) return cmd_solve(file, o, out);
    if (check->parsed()) return cmd_check(file, file2, file3, o, out);
    if (enc->parsed()) return cmd_encode_graph(file, out);
    if (rep->parsed()) return cmd_replay(file, file2, o, out);
    if (prv->parsed()) return cmd_prove(file, file2, o, out);
    if (bench->parsed()) return cmd_bench(file, o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == Error::Kind::Budget ? kNoDerivation : kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

}  // namespace scanw::cli

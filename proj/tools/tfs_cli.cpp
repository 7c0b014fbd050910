// tfs: drive the d.s.r zoo from the command line.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tfs/arrival.hpp"
#include "tfs/compiler.hpp"
#include "tfs/error.hpp"
#include "tfs/games.hpp"
#include "tfs/king.hpp"
#include "tfs/local_search.hpp"
#include "tfs/order.hpp"
#include "tfs/plcp.hpp"
#include "tfs/tarski.hpp"

using namespace tfs;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kOther = 1, kVerify = 2, kBudget = 3, kParse = 4 };

struct Config {
  std::string command;
  std::string problem;
  size_t n = 3;
  uint64_t seed = 1;
  uint64_t budget_steps = 10'000'000;
  size_t budget_witness_bits = 1 << 16;
  std::string trace;
  std::string format = "text";
  std::string algo = "linear";
  bool stats = false;
  std::string instance;
  std::string solution;
  std::vector<size_t> sizes;
  size_t trials = 5;
};

const std::vector<std::string> kProblems = {"lop", "ru-lop", "tarski", "plcp", "memdet", "sarrival", "king", "sod"};

// One loaded or generated instance of a problem with a d.s.r.
struct Loaded {
  ProblemPtr problem;
  DsrPtr dsr;
  BitString x;
  json instance;
  // human-readable solution
  std::function<json(const BitString&)> show;
};

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::InputError, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, path + ": " + e.what());
  }
}

LopInstance lop_from_json(const json& j) {
  try {
    LopInstance inst{j.at("n").get<size_t>(), circuit_from_json(j.at("circuit"))};
    if (inst.prec.num_inputs != 2 * inst.n) fail(ErrorCode::ParseError, "lop circuit must read 2n inputs");
    return inst;
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, std::string("lop json: ") + e.what());
  }
}

json lop_to_json(const LopInstance& inst) {
  return {{"problem", "lop"}, {"n", inst.n}, {"circuit", circuit_to_json(inst.prec)}};
}

json lop_solution_json(size_t n, const BitString& y) {
  auto s = decode_lop_solution(n, y);
  if (!s) return {{"raw", y.to_string()}};
  static const char* kinds[] = {"minimum", "reflexive", "incomparable", "intransitive"};
  return {{"kind", kinds[static_cast<int>(s->kind)]}, {"w", s->w}};
}

json point_json(const Point& p) { return json(p); }

Loaded load(const Config& cfg, Rng& rng) {
  const std::string& p = cfg.problem;
  const bool from_file = !cfg.instance.empty();
  json file = from_file ? read_json(cfg.instance) : json();
  Loaded out;
  if (p == "lop" || p == "ru-lop") {
    LopInstance inst = from_file ? lop_from_json(file) : lop_random_order(cfg.n, rng);
    if (inst.n == 0 || inst.n > 12) fail(ErrorCode::BudgetError, "lop needs 1 <= n <= 12");
    bool unique = p == "ru-lop";
    out = {unique ? lop_unique_problem() : lop_problem(), unique ? lop_unique_dsr() : lop_dsr(), encode_lop(inst),
           lop_to_json(inst), [n = inst.n](const BitString& y) { return lop_solution_json(n, y); }};
  } else if (p == "tarski") {
    TarskiFunction f = from_file ? TarskiFunction::from_json(file) : tarski_random_monotone(cfg.n, 2, rng);
    TarskiPlusInstance inst = tarski_to_plus(f);
    out = {tarski_problem(), tarski_dsr(), encode_tarski(inst), f.to_json(), [inst](const BitString& y) -> json {
             auto s = decode_tarski_solution(inst, y);
             if (!s) return {{"raw", y.to_string()}};
             static const char* kinds[] = {"fixpoint", "violation", "escape"};
             json j = {{"kind", kinds[static_cast<int>(s->kind)]}, {"x", point_json(s->x)}};
             if (s->kind == TarskiKind::Violation) j["y"] = point_json(s->y);
             return j;
           }};
  } else if (p == "plcp") {
    if (!from_file && (cfg.n == 0 || cfg.n > 8)) fail(ErrorCode::BudgetError, "plcp demo needs 1 <= n <= 8");
    LcpInstance inst = from_file ? lcp_from_json(file) : plcp_random_spd(static_cast<Eigen::Index>(cfg.n), rng);
    out = {plcp_problem(), plcp_dsr(), encode_lcp(inst), lcp_to_json(inst), [](const BitString& y) -> json {
             try {
               RatVector z = decode_rational_vector(y);
               json j = json::array();
               for (Eigen::Index i = 0; i < z.size(); ++i) j.push_back(rational_to_string(z(i)));
               return {{"z", j}};
             } catch (const Error&) {
               return {{"raw", y.to_string()}};
             }
           }};
  } else if (p == "memdet") {
    if (!from_file && (cfg.n == 0 || cfg.n > 8)) fail(ErrorCode::BudgetError, "memdet demo needs 1 <= n <= 8");
    GraphGame g = from_file ? game_from_json(file) : memdet_random(cfg.n, 2 * cfg.n, rng);
    out = {memdet_problem(), memdet_dsr(), encode_game(g), game_to_json(g), [g](const BitString& y) -> json {
             try {
               return memdet_solution_to_json(g, decode_memdet_solution(y));
             } catch (const Error&) {
               return {{"raw", y.to_string()}};
             }
           }};
  } else if (p == "sarrival") {
    if (!from_file && (cfg.n == 0 || cfg.n > 16)) fail(ErrorCode::BudgetError, "sarrival demo needs 1 <= n <= 16");
    SArrivalInstance inst = from_file ? sarrival_from_json(file) : sarrival_random(cfg.n, rng);
    out = {sarrival_problem(), sarrival_dsr(), encode_sarrival(inst), sarrival_to_json(inst),
           [inst](const BitString& y) -> json {
             try {
               return profile_to_json(inst, decode_profile(y));
             } catch (const Error&) {
               return {{"raw", y.to_string()}};
             }
           }};
  } else if (p == "king" || p == "sod") {
    fail(ErrorCode::InputError, p + " has no d.s.r; use demo, solve or verify");
  } else {
    fail(ErrorCode::InputError, "unknown problem '" + p + "'");
  }
  return out;
}

void emit(const Config& cfg, const json& report) {
  if (cfg.format == "json") {
    std::cout << report.dump(2) << "\n";
    return;
  }
  for (auto& [k, v] : report.items()) {
    if (k == "instance") continue;
    std::cout << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
  }
}

std::optional<std::ofstream> open_trace(const Config& cfg) {
  if (cfg.trace.empty()) return std::nullopt;
  std::ofstream out(cfg.trace);
  if (!out) fail(ErrorCode::InputError, "cannot write " + cfg.trace);
  return out;
}

struct Compiled {
  CompiledSod sod;
  SodAnswer answer;
  std::vector<uint64_t> pots;
  BitString solution;
};

// Compiles, checks the witness budget, follows the path (tracing tables if
// asked) and extracts the solution.
Compiled compile_and_follow(const Config& cfg, const Loaded& l) {
  Compiled c{compile_to_sod(l.problem, l.dsr, l.x), {}, {}, {}};
  const TableLayout& lay = c.sod.ctx->layout();
  if (lay.s > cfg.budget_witness_bits)
    fail(ErrorCode::BudgetError, "table field width " + std::to_string(lay.s) + " exceeds --budget-witness-bits");
  if (c.sod.target - 1 > cfg.budget_steps)
    fail(ErrorCode::BudgetError, "path length " + std::to_string(c.sod.target - 1) + " exceeds --budget-steps");
  auto trace = open_trace(cfg);
  if (trace) {
    BitString v = c.sod.source;
    for (uint64_t step = 0;; ++step) {
      auto t = StackTable::decode(v, lay);
      for (json row : table_rows_json(*t)) {
        row["step"] = step;
        row["potential"] = c.sod.instance.V(v);
        *trace << row.dump() << "\n";
      }
      BitString next = c.sod.instance.S(v);
      if (next == v || c.sod.instance.V(next) <= c.sod.instance.V(v)) break;
      v = next;
    }
  }
  c.answer = solve_sod_pathfollow(c.sod.instance, c.sod.source, cfg.budget_steps, &c.pots);
  c.solution = extract_solution(c.answer.vertex, *c.sod.ctx, AnswerKind::SinkOfDag);
  return c;
}

json compile_report(const Compiled& c) {
  const TableLayout& lay = c.sod.ctx->layout();
  return {{"depth", lay.d},
          {"width", lay.w},
          {"field_bits", lay.s},
          {"vertex_bits", c.sod.instance.vertex_bits},
          {"T", c.sod.target},
          {"T_formula", target_potential(lay.d, lay.w)},
          {"steps", c.answer.steps},
          {"step_exact", c.answer.steps + 1 == c.sod.target && c.pots.size() == c.sod.target}};
}

// ------------------------------------------------------------------ king

Tournament king_instance(const Config& cfg, Rng& rng) {
  if (!cfg.instance.empty()) {
    json j = read_json(cfg.instance);
    return Tournament::from_json(j);
  }
  if (cfg.n > 14) fail(ErrorCode::BudgetError, "king demo takes --n as log2 of the vertex count, at most 14");
  return Tournament::random(size_t{1} << cfg.n, rng);
}

int king_demo(const Config& cfg, Rng& rng) {
  Tournament t = king_instance(cfg, rng);
  if (auto bad = check_tournament(t))
    fail(ErrorCode::InputError, "not a tournament at pair (" + std::to_string(bad->first) + ", " +
                                    std::to_string(bad->second) + ")");
  KingStats st;
  size_t king;
  if (cfg.algo == "linear")
    king = king_linear(t, &st);
  else if (cfg.algo == "random") {
    Rng r = substream(cfg.seed, "king-randomized");
    king = king_randomized(t, r, cfg.budget_steps, &st);
  } else if (cfg.algo == "pls")
    king = king_pls(t, &st);
  else
    fail(ErrorCode::InputError, "--algo must be linear, random or pls");
  bool ok = is_king(t, king);
  json report = {{"problem", "king"}, {"vertices", t.size()}, {"algo", cfg.algo}, {"king", king}, {"verified", ok}};
  if (cfg.stats)
    report["stats"] = {{"extend_calls", st.extend_calls},
                       {"edge_probes", st.edge_probes},
                       {"path_queries", st.path_queries},
                       {"iterations", st.iterations}};
  emit(cfg, report);
  return ok ? kOk : kVerify;
}

// ------------------------------------------------------------------ commands

int cmd_demo(const Config& cfg) {
  Rng rng = substream(cfg.seed, "instance");
  if (cfg.problem == "king") return king_demo(cfg, rng);
  Loaded l = load(cfg, rng);
  if (!l.problem->promise(l.x)) fail(ErrorCode::InputError, "instance is outside the promise");
  Rng rec_rng = substream(cfg.seed, "recursion");
  RecursionStats rs;
  BitString y = run_recursive(*l.problem, *l.dsr, l.x, rec_rng, &rs);
  bool rec_ok = l.problem->verify(l.x, y);

  Compiled c = compile_and_follow(cfg, l);
  bool sod_ok = l.problem->verify(l.x, c.solution);

  Rng audit_rng = substream(cfg.seed, "audit");
  AuditReport audit = audit_dsr(*l.problem, *l.dsr, l.x, audit_rng);

  json report = {{"problem", cfg.problem},
                 {"instance", l.instance},
                 {"solution", l.show(y)},
                 {"recursion", {{"calls", rs.calls}, {"queries", rs.queries}, {"max_depth", rs.max_depth}}},
                 {"sod", compile_report(c)},
                 {"sod_solution_matches", c.solution == y},
                 {"audit", audit.passed ? "passed" : violation_name(audit.violations[0].kind)}};
  bool ok = rec_ok && sod_ok && audit.passed;
  if (l.problem->unique()) {
    CompiledSovl sv = compile_to_sovl(l.problem, l.dsr, l.x);
    SodAnswer a = solve_sod_pathfollow(sv.instance.sod, sv.instance.source, cfg.budget_steps);
    // pathfollow stops one edge short of the sink
    BitString sink = sv.instance.sod.S(a.vertex);
    bool sovl_ok = verify_sovl_solution(sv.instance, sink) && extract_solution(sink, *sv.ctx, AnswerKind::Sovl) == y;
    report["sovl"] = {{"target", sv.instance.target}, {"verified", sovl_ok}};
    ok = ok && sovl_ok;
  }
  if (cfg.problem == "lop" && l.x.size() && decode_lop(l.x).n <= 12) {
    auto s = decode_lop_solution(decode_lop(l.x).n, y);
    if (s && s->kind == LopKind::Minimum) report["brute_minimum"] = lop_brute_minimum(decode_lop(l.x));
  }
  report["verified"] = ok;
  emit(cfg, report);
  return ok ? kOk : kVerify;
}

int cmd_compile(const Config& cfg) {
  Rng rng = substream(cfg.seed, "instance");
  Loaded l = load(cfg, rng);
  Compiled c = compile_and_follow(cfg, l);
  json report = compile_report(c);
  report["problem"] = cfg.problem;
  report["solution"] = l.show(c.solution);
  bool ok = l.problem->verify(l.x, c.solution);
  report["verified"] = ok;
  emit(cfg, report);
  return ok ? kOk : kVerify;
}

int cmd_solve(const Config& cfg) {
  Rng rng = substream(cfg.seed, "instance");
  if (cfg.problem == "king") return king_demo(cfg, rng);
  if (cfg.problem == "sod") {
    if (cfg.instance.empty()) fail(ErrorCode::InputError, "sod needs --instance");
    ToySod t = ToySod::from_json(read_json(cfg.instance));
    SinkOfDagInstance inst = t.instance();
    SodAnswer a = solve_sod_pathfollow(inst, BitString(t.vertex_bits), cfg.budget_steps);
    bool ok = verify_sod_solution(inst, a.vertex);
    emit(cfg, {{"problem", "sod"}, {"vertex", a.vertex.to_string()}, {"steps", a.steps}, {"verified", ok}});
    return ok ? kOk : kVerify;
  }
  Loaded l = load(cfg, rng);
  Rng rec_rng = substream(cfg.seed, "recursion");
  RecursionStats rs;
  BitString y = run_recursive(*l.problem, *l.dsr, l.x, rec_rng, &rs);
  bool ok = l.problem->verify(l.x, y);
  json report = {{"problem", cfg.problem}, {"solution", l.show(y)}, {"solution_bits", y.to_string()},
                 {"verified", ok}};
  if (cfg.stats) report["recursion"] = {{"calls", rs.calls}, {"queries", rs.queries}, {"max_depth", rs.max_depth}};
  emit(cfg, report);
  return ok ? kOk : kVerify;
}

int cmd_audit(const Config& cfg) {
  Rng rng = substream(cfg.seed, "instance");
  Loaded l = load(cfg, rng);
  Rng audit_rng = substream(cfg.seed, "audit");
  AuditReport rep = audit_dsr(*l.problem, *l.dsr, l.x, audit_rng);
  json v = json::array();
  for (const AuditViolation& a : rep.violations) v.push_back({{"kind", violation_name(a.kind)}, {"detail", a.detail}});
  emit(cfg, {{"problem", cfg.problem}, {"passed", rep.passed}, {"frames", rep.frames}, {"violations", v}});
  return rep.passed ? kOk : kVerify;
}

// Solution given as a bit string, or as hex with a 0x prefix (4 bits per digit).
BitString parse_solution(const std::string& s) {
  try {
    if (s.rfind("0x", 0) == 0) return BitString::from_hex(s.substr(2), 4 * (s.size() - 2));
    return BitString::from_string(s);
  } catch (const Error&) {
    fail(ErrorCode::ParseError, "solution must be a bit string or 0x-prefixed hex");
  }
}

int cmd_verify(const Config& cfg) {
  if (cfg.instance.empty()) fail(ErrorCode::InputError, "verify needs --instance");
  BitString y = parse_solution(cfg.solution);
  bool ok;
  if (cfg.problem == "king") {
    Tournament t = Tournament::from_json(read_json(cfg.instance));
    ok = king_problem()->verify(encode_tournament(t), y);
  } else if (cfg.problem == "sod") {
    ok = verify_sod_solution(ToySod::from_json(read_json(cfg.instance)).instance(), y);
  } else {
    Rng rng = substream(cfg.seed, "instance");
    Loaded l = load(cfg, rng);
    ok = l.problem->verify(l.x, y);
  }
  emit(cfg, {{"problem", cfg.problem}, {"verified", ok}});
  return ok ? kOk : kVerify;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : (v[m - 1] + v[m]) / 2;
}

int cmd_bench(const Config& cfg) {
  std::vector<size_t> sizes = cfg.sizes;
  if (sizes.empty()) sizes = cfg.problem == "king" ? std::vector<size_t>{6, 7, 8, 9, 10} : std::vector<size_t>{1, 2, 3};
  json rows = json::array();
  for (size_t n : sizes) {
    json cell = {{"n", n}};
    std::vector<double> queries, steps, iters;
    try {
      for (size_t trial = 0; trial < cfg.trials; ++trial) {
        Rng rng = substream(cfg.seed, "bench-" + std::to_string(n) + "-" + std::to_string(trial));
        Config c = cfg;
        c.n = n;
        if (cfg.problem == "king") {
          Tournament t = Tournament::random(size_t{1} << n, rng);
          KingStats st;
          if (cfg.algo == "random")
            king_randomized(t, rng, cfg.budget_steps, &st);
          else if (cfg.algo == "pls")
            king_pls(t, &st);
          else
            king_linear(t, &st);
          queries.push_back(static_cast<double>(st.edge_probes + st.path_queries));
          iters.push_back(static_cast<double>(st.iterations));
          continue;
        }
        Loaded l = load(c, rng);
        RecursionStats rs;
        Rng rec = substream(cfg.seed, "recursion");
        run_recursive(*l.problem, *l.dsr, l.x, rec, &rs);
        queries.push_back(static_cast<double>(rs.queries));
        Compiled comp = compile_and_follow(c, l);
        steps.push_back(static_cast<double>(comp.answer.steps));
        const TableLayout& lay = comp.sod.ctx->layout();
        cell["T_matches_formula"] = comp.sod.target == target_potential(lay.d, lay.w);
      }
      cell["median_queries"] = median(queries);
      if (!steps.empty()) cell["median_path_length"] = median(steps);
      if (!iters.empty()) cell["median_iterations"] = median(iters);
    } catch (const Error& e) {
      // a cell over budget is marked and the sweep goes on
      cell["error"] = error_code_name(e.code());
      cell["detail"] = e.what();
    }
    rows.push_back(cell);
  }
  json report = {{"problem", cfg.problem}, {"trials", cfg.trials}, {"cells", rows}};
  if (cfg.problem == "king") report["algo"] = cfg.algo;
  std::cout << report.dump(cfg.format == "json" ? 2 : -1) << "\n";
  return kOk;
}

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::ParseError:
    case ErrorCode::Malformed:
      return kParse;
    case ErrorCode::BudgetError:
    case ErrorCode::StepBudgetExceeded:
    case ErrorCode::IterBudgetExceeded:
    case ErrorCode::CapExceeded:
      return kBudget;
    case ErrorCode::BadSolution:
      return kVerify;
    default:
      return kOther;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compile, solve, audit and benchmark d.s.r problems"};
  app.require_subcommand(1);
  Config cfg;

  auto common = [&](CLI::App* sub) {
    sub->add_option("problem,--problem", cfg.problem, "lop, ru-lop, tarski, plcp, memdet, sarrival, king, sod");
    sub->add_option("--n", cfg.n, "instance size for generated instances");
    sub->add_option("--seed", cfg.seed, "seed for every random choice");
    sub->add_option("--budget-steps", cfg.budget_steps, "cap on path-following steps and iterations");
    sub->add_option("--budget-witness-bits", cfg.budget_witness_bits, "cap on the table field width");
    sub->add_option("--trace", cfg.trace, "write visited tables as JSONL");
    sub->add_option("--format", cfg.format, "json or text")->check(CLI::IsMember({"json", "text"}));
    sub->add_option("--algo", cfg.algo, "king algorithm: linear, random or pls")
        ->check(CLI::IsMember({"linear", "random", "pls"}));
    sub->add_flag("--stats", cfg.stats, "include counters");
    sub->add_option("--instance", cfg.instance, "instance file (JSON)");
  };

  CLI::App* demo = app.add_subcommand("demo", "generate or load an instance and run the full pipeline");
  CLI::App* compile = app.add_subcommand("compile", "compile to Sink-of-DAG and follow the path");
  CLI::App* solve = app.add_subcommand("solve", "run the recursion and print the solution");
  CLI::App* audit = app.add_subcommand("audit", "check the d.s.r contract on one instance");
  CLI::App* bench = app.add_subcommand("bench", "per-size medians as JSON");
  CLI::App* verify = app.add_subcommand("verify", "check a solution against an instance file");
  for (CLI::App* s : {demo, compile, solve, audit, bench, verify}) common(s);
  bench->add_option("--sizes", cfg.sizes, "sizes to sweep");
  bench->add_option("--trials", cfg.trials, "trials per size");
  verify->add_option("--solution", cfg.solution, "bit string or 0x hex")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kParse;
  }

  cfg.command = app.get_subcommands()[0]->get_name();
  if (cfg.problem.empty()) {
    std::cerr << json({{"error", error_code_name(ErrorCode::InputError)}, {"detail", "no problem given"}}).dump() << "\n";
    return kOther;
  }
  if (std::find(kProblems.begin(), kProblems.end(), cfg.problem) == kProblems.end()) {
    std::cerr << json({{"error", error_code_name(ErrorCode::InputError)}, {"detail", "unknown problem " + cfg.problem}}).dump() << "\n";
    return kOther;
  }
  try {
    if (cfg.command == "demo") return cmd_demo(cfg);
    if (cfg.command == "compile") return cmd_compile(cfg);
    if (cfg.command == "solve") return cmd_solve(cfg);
    if (cfg.command == "audit") return cmd_audit(cfg);
    if (cfg.command == "bench") return cmd_bench(cfg);
    return cmd_verify(cfg);
  } catch (const Error& e) {
    std::cerr << json({{"error", error_code_name(e.code())}, {"detail", e.what()}}).dump() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << json({{"error", "internal"}, {"detail", e.what()}}).dump() << "\n";
    return kOther;
  }
}

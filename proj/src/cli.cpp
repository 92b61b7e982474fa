#include "serialbench/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "serialbench/bench.hpp"
#include "serialbench/cellular_automaton.hpp"
#include "serialbench/circuit.hpp"
#include "serialbench/derandomize.hpp"
#include "serialbench/do1.hpp"
#include "serialbench/error.hpp"
#include "serialbench/group_word.hpp"
#include "serialbench/netlist.hpp"

namespace serialbench::cli {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot write '" + path + "'");
  f << text;
}

void print_meter(std::ostream& err, const CostMeter& m) {
  err << "work=" << m.work << " depth=" << m.depth << '\n';
}

// --- ca ------------------------------------------------------------------------

struct CaArgs {
  int rule = 0;
  std::string tape;
  std::size_t rows = 1;
  std::optional<std::size_t> row;
  std::optional<std::size_t> cell;
  std::optional<int> k;
};

int cmd_ca(const CaArgs& a, std::ostream& out, std::ostream& err) {
  const ca::Rule rule(a.rule);
  const ca::Tape tape = ca::Tape::from_string(a.tape);
  const std::size_t target = a.row.value_or(a.rows);

  if (a.cell) {
    out << int(ca::cell_at(rule, tape, target, *a.cell)) << '\n';
    return kExitOk;
  }
  CostMeter m;
  if (a.k) {
    const auto table = ca::compile_k(rule, *a.k).table_size();
    out << ca::evolve_compiled(tape, rule, *a.k, target, m).to_string() << '\n';
    err << "work=" << m.work << " depth=" << m.depth << " k=" << *a.k
        << " table_size=" << table << '\n';
    return kExitOk;
  }
  if (a.row) {
    out << ca::evolve(tape, rule, *a.row, m).to_string() << '\n';
    return kExitOk;
  }
  ca::Tape cur = tape;
  for (std::size_t r = 0; r < a.rows; ++r) {
    cur = ca::step(cur, rule, m);
    out << cur.to_string() << '\n';
  }
  return kExitOk;
}

// --- cvp -----------------------------------------------------------------------

struct CvpArgs {
  std::string netlist;
  std::string assignment;
  bool layered = false;
};

int cmd_cvp(const CvpArgs& a, std::ostream& out, std::ostream& err) {
  const Circuit c = read_netlist_file(a.netlist);
  const Assignment x = Assignment::from_string(a.assignment);
  CostMeter m;
  const GateValues v = a.layered ? eval_layered(c, x, m) : eval_serial(c, x, m);
  out << int(v[c.output()]) << '\n';
  print_meter(err, m);
  return kExitOk;
}

// --- s5 ------------------------------------------------------------------------

struct S5Args {
  std::string fold = "serial";
  std::size_t n = 8;
  std::uint64_t seed = 1;
  std::string word_file;
  bool emit_word = false;
  bool derived_series = false;
};

int cmd_s5(const S5Args& a, std::ostream& out, std::ostream& err) {
  if (a.derived_series) {
    const auto orders = s5::derived_series();
    for (std::size_t i = 0; i < orders.size(); ++i) out << (i ? " " : "") << orders[i];
    out << '\n';
    return kExitOk;
  }
  if (a.n < 1 && a.word_file.empty()) throw ValidationError("--n must be >= 1");
  const s5::Word w = a.word_file.empty() ? s5::random_word(a.seed, a.n)
                                         : s5::parse_word(read_file(a.word_file));
  if (a.emit_word) {
    out << s5::write_word(w);
    return kExitOk;
  }
  CostMeter m;
  const s5::Perm5 p = a.fold == "tree" ? s5::fold_tree(w, m) : s5::fold_serial(w, m);
  out << p.to_string() << '\n';
  print_meter(err, m);
  return kExitOk;
}

// --- do1 -----------------------------------------------------------------------

struct Do1Args {
  std::string netlist;
  std::string assignment;
  bool extract = false;
  bool exact_oracle = false;
  std::optional<double> noise;
  std::uint64_t noise_seed = 1;
  std::optional<std::size_t> episode;
  std::string log;
};

int cmd_do1(const Do1Args& a, std::ostream& out, std::ostream& err) {
  auto cfg = std::make_shared<const do1::CircuitConfig>(
      do1::AltCircuit(read_netlist_file(a.netlist)), Assignment::from_string(a.assignment));

  if (a.episode) {
    std::ofstream log_file;
    if (!a.log.empty()) {
      log_file.open(a.log, std::ios::binary);
      if (!log_file) throw ValidationError("cannot write '" + a.log + "'");
    }
    do1::Do1Env env(cfg, *a.episode, a.log.empty() ? nullptr : &log_file);
    const do1::Do1EnvState* s = &env.reset();
    double total = 0.0;
    for (;;) {
      const auto r = env.step(do1::oracle_policy(*s));
      total += r.reward;
      s = &env.state();
      if (r.done) break;
    }
    out << total << '\n';
    return kExitOk;
  }

  if (!(a.extract || a.exact_oracle || a.noise)) {
    out << do1::d1(*cfg) << '\n';
    return kExitOk;
  }

  const double eps = a.noise.value_or(1.0);
  do1::Extraction ex;
  if (a.noise) {
    ex = do1::extract_do1(*cfg, do1::NoisyValueOracle(eps, a.noise_seed));
  } else {
    ex = do1::extract_do1(*cfg, do1::ExactValueOracle{});
  }
  const double d = cfg->d1();
  const double est = static_cast<double>(ex.estimate);
  const bool ok = ex.estimate == 0 ? cfg->d1() == 0 : (eps * est <= d && d <= 2.0 / eps * est);
  out << ex.estimate << '\n' << (ok ? "bracket OK" : "bracket VIOLATED") << '\n';
  err << "probes=" << ex.probes << " m=" << ex.m << " d1=" << cfg->d1() << '\n';
  return kExitOk;
}

// --- derand --------------------------------------------------------------------

struct DerandArgs {
  double p = 0.3;
  double delta = 0.01;
  bool bound_only = false;
  std::size_t n = 8;
  std::size_t vocab = 2;
  double delta_all = 0.01;
  std::uint64_t seed = 1;
  std::size_t max_attempts = 20;
  bool json_out = false;
};

int cmd_derand(const DerandArgs& a, std::ostream& out, std::ostream&) {
  if (a.bound_only) {
    out << derand::hoeffding_k(a.p, a.delta) << '\n';
    return kExitOk;
  }
  const derand::CalibratedDecider decider(a.p, a.seed);
  const auto res =
      derand::find_universal_seeds(decider, a.n, a.vocab, a.delta_all, a.seed, a.max_attempts);
  if (a.json_out) {
    json j{{"k", res.k},
           {"attempts", res.attempts},
           {"success", res.success},
           {"failures_per_attempt", res.failures_per_attempt},
           {"bundle", res.bundle}};
    out << j.dump() << '\n';
  } else {
    out << "k " << res.k << '\n' << "attempts " << res.attempts << '\n' << "failures";
    for (auto f : res.failures_per_attempt) out << ' ' << f;
    out << '\n' << (res.success ? "bundle" : "no bundle");
    for (auto s : res.bundle) out << ' ' << s;
    out << '\n';
  }
  return res.success ? kExitOk : kExitInternal;
}

// --- bench ---------------------------------------------------------------------

struct BenchArgs {
  std::string config;
  std::string csv;
  std::string report;
  unsigned threads = 1;
};

int cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  const auto cases = a.config.empty() ? bench::default_suite() : bench::parse_suite(read_file(a.config));
  const auto records = bench::run_suite(cases, a.threads);
  const bool to_stdout = a.csv.empty() && a.report.empty();
  if (!a.csv.empty() || to_stdout) write_output(a.csv.empty() ? "-" : a.csv, bench::emit_csv(records), out);
  if (!a.report.empty()) write_output(a.report, bench::emit_report(records), out);
  const auto failed = std::count_if(records.begin(), records.end(), [](auto& r) { return r.failed(); });
  err << records.size() << " cases, " << failed << " failed\n";
  return kExitOk;
}

// Appends `--key value` for every JSON key that names an option of the chosen
// subcommand and is not already given on the command line.
std::vector<std::string> merge_options(const CLI::App& app, std::vector<std::string> args,
                                       const std::string& path) {
  const json doc = json::parse(read_file(path));
  if (!doc.is_object()) throw ValidationError("options file must hold a JSON object");

  const CLI::App* sub = nullptr;
  for (const auto& arg : args) {
    for (const CLI::App* s : app.get_subcommands([](const CLI::App*) { return true; })) {
      if (s->get_name() == arg) sub = s;
    }
    if (sub) break;
  }
  if (!sub) return args;

  for (const auto& [key, value] : doc.items()) {
    const std::string flag = "--" + key;
    if (!sub->get_option_no_throw(flag)) continue;
    const bool given = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
    if (given) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
    } else {
      args.push_back(flag);
      args.push_back(value.is_string() ? value.get<std::string>() : value.dump());
    }
  }
  return args;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Work/depth workbench for inherently serial problems"};
  app.require_subcommand(1);
  std::string options_file;
  app.add_option("--options", options_file, "JSON file of default flag values");

  CaArgs ca_args;
  auto* ca = app.add_subcommand("ca", "Evolve an elementary cellular automaton");
  ca->add_option("rule", ca_args.rule, "Rule number 0-255")->required();
  ca->add_option("tape", ca_args.tape, "Initial row as a 0/1 string")->required();
  ca->add_option("--rows", ca_args.rows, "Number of rows to print");
  ca->add_option("--row", ca_args.row, "Print only this row");
  ca->add_option("--cell", ca_args.cell, "Print one cell of the centred frame");
  ca->add_option("--k", ca_args.k, "Advance k rows per lookup")->check(CLI::PositiveNumber);

  CvpArgs cvp_args;
  auto* cvp = app.add_subcommand("cvp", "Evaluate a netlist's output bit");
  cvp->add_option("netlist", cvp_args.netlist)->required();
  cvp->add_option("assignment", cvp_args.assignment)->required();
  cvp->add_flag("--layered", cvp_args.layered, "Evaluate layer by layer");

  S5Args s5_args;
  auto* s5 = app.add_subcommand("s5", "Multiply a word over S5");
  s5->add_option("--fold", s5_args.fold)->check(CLI::IsMember({"serial", "tree"}));
  s5->add_option("--n", s5_args.n, "Random word length");
  s5->add_option("--seed", s5_args.seed);
  s5->add_option("--word", s5_args.word_file, "Read the word from a file");
  s5->add_flag("--emit-word", s5_args.emit_word, "Print the word instead of its product");
  s5->add_flag("--derived-series", s5_args.derived_series, "Print the derived series orders");

  Do1Args do1_args;
  auto* do1 = app.add_subcommand("do1", "Depth-of-1 of an alternating circuit");
  do1->add_option("netlist", do1_args.netlist)->required();
  do1->add_option("assignment", do1_args.assignment)->required();
  do1->add_flag("--extract", do1_args.extract, "Estimate d1 from value-oracle probes");
  do1->add_flag("--exact-oracle", do1_args.exact_oracle, "Probe the exact optimal value");
  do1->add_option("--noise", do1_args.noise, "Multiplicative oracle noise floor epsilon")
      ->check(CLI::Range(0.0, 1.0));
  do1->add_option("--noise-seed", do1_args.noise_seed);
  do1->add_option("--episode", do1_args.episode, "Run the oracle policy with this chain length");
  do1->add_option("--log", do1_args.log, "JSON-lines episode log path");

  DerandArgs dr_args;
  auto* dr = app.add_subcommand("derand", "Majority-vote derandomization");
  dr->add_option("--p", dr_args.p, "Decider error bound");
  dr->add_option("--delta", dr_args.delta, "Failure budget for a single input");
  dr->add_flag("--bound-only", dr_args.bound_only, "Print the Hoeffding replication count");
  dr->add_option("--n", dr_args.n, "Input length");
  dr->add_option("--vocab", dr_args.vocab, "Vocabulary size");
  dr->add_option("--delta-all", dr_args.delta_all, "Failure budget over all inputs");
  dr->add_option("--seed", dr_args.seed);
  dr->add_option("--max-attempts", dr_args.max_attempts);
  dr->add_flag("--json", dr_args.json_out, "Print a JSON summary");

  BenchArgs bench_args;
  auto* bn = app.add_subcommand("bench", "Run a benchmark suite");
  bn->add_option("--config", bench_args.config, "JSON suite with a cases array");
  bn->add_option("--csv", bench_args.csv, "CSV output path, '-' for stdout");
  bn->add_option("--report", bench_args.report, "Text report path, '-' for stdout");
  bn->add_option("--threads", bench_args.threads)->check(CLI::PositiveNumber);

  std::vector<std::string> args = raw_args;
  try {
    auto it = std::find(args.begin(), args.end(), "--options");
    if (it != args.end() && it + 1 != args.end()) args = merge_options(app, args, *(it + 1));

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*ca) return cmd_ca(ca_args, out, err);
    if (*cvp) return cmd_cvp(cvp_args, out, err);
    if (*s5) return cmd_s5(s5_args, out, err);
    if (*do1) return cmd_do1(do1_args, out, err);
    if (*dr) return cmd_derand(dr_args, out, err);
    if (*bn) return cmd_bench(bench_args, out, err);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const do1::AlternationError& e) {
    err << "validation error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const StructuralError& e) {
    err << "invalid circuit: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CapacityError& e) {
    err << "capacity error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitUsage;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, out, err);
}

}  // namespace serialbench::cli

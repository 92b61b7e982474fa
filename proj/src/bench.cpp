#include "serialbench/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "serialbench/cellular_automaton.hpp"
#include "serialbench/circuit.hpp"
#include "serialbench/derandomize.hpp"
#include "serialbench/do1.hpp"
#include "serialbench/error.hpp"
#include "serialbench/group_word.hpp"
#include "serialbench/rng.hpp"

namespace serialbench::bench {

namespace {

// --- parameter helpers ------------------------------------------------------

std::uint64_t param_u64(const BenchCase& c, const std::string& key, std::uint64_t fallback) {
  auto it = c.params.find(key);
  if (it == c.params.end()) return fallback;
  std::uint64_t v = 0;
  const auto& s = it->second;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ValidationError("param " + key + " must be a non-negative integer, got '" + s + "'");
  }
  return v;
}

double param_double(const BenchCase& c, const std::string& key, double fallback) {
  auto it = c.params.find(key);
  if (it == c.params.end()) return fallback;
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ValidationError("param " + key + " must be a number, got '" + it->second + "'");
  }
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

struct Outcome {
  std::uint64_t work = 0;
  std::uint64_t depth = 0;
  Aux aux;
};

// --- families ----------------------------------------------------------------

Outcome run_ca(const BenchCase& c) {
  const ca::Rule rule(static_cast<int>(param_u64(c, "rule", 110)));
  if (c.size < 1) throw ValidationError("ca: size (rows) must be >= 1");

  int k = 1;
  const bool plain = c.solver == "plain";
  if (!plain) {
    if (c.solver.rfind("compiled-k", 0) != 0) {
      throw ValidationError("ca: unsupported solver '" + c.solver + "'");
    }
    const std::string digits = c.solver.substr(10);
    if (digits.empty() || digits.size() > 2 ||
        digits.find_first_not_of("0123456789") != std::string::npos) {
      throw ValidationError("ca: malformed solver '" + c.solver + "'");
    }
    k = std::stoi(digits);
  }

  const std::size_t width = 2 * c.size - 1;
  Rng rng(c.seed);
  ca::Tape tape;
  tape.cells.resize(width);
  for (auto& cell : tape.cells) cell = rng.bernoulli(0.5) ? 1 : 0;

  CostMeter m;
  ca::Tape out;
  std::uint64_t table = 8;
  if (plain) {
    out = ca::evolve(tape, rule, c.size, m);
  } else {
    table = ca::compile_k(rule, k).table_size();
    out = ca::evolve_compiled(tape, rule, k, c.size, m);
  }
  const auto ones = std::count(out.cells.begin(), out.cells.end(), 1);
  return {m.work, m.depth,
          Aux{{"rule", std::to_string(rule.number())},
              {"k", std::to_string(k)},
              {"table_size", std::to_string(table)},
              {"width", std::to_string(width)},
              {"ones", std::to_string(ones)}}};
}

Outcome run_cvp(const BenchCase& c) {
  const std::size_t n_inputs = param_u64(c, "n_inputs", 16);
  const std::size_t fanin = param_u64(c, "fanin", 3);
  const double majority = param_double(c, "majority", 0.2);
  if (c.solver != "serial" && c.solver != "layered") {
    throw ValidationError("cvp: unsupported solver '" + c.solver + "'");
  }
  const Circuit circuit = random_circuit(c.seed, n_inputs, c.size, fanin, majority);
  Rng rng(hash_combine(c.seed, 0xc1));
  Assignment a;
  a.bits.resize(n_inputs);
  for (auto& b : a.bits) b = rng.bernoulli(0.5) ? 1 : 0;

  CostMeter m;
  const GateValues values =
      c.solver == "serial" ? eval_serial(circuit, a, m) : eval_layered(circuit, a, m);
  return {m.work, m.depth,
          Aux{{"output", std::to_string(values[circuit.output()])},
              {"layers", std::to_string(circuit.depth())}}};
}

Outcome run_s5(const BenchCase& c) {
  if (c.size < 1) throw ValidationError("s5: size must be >= 1");
  if (c.solver != "serial" && c.solver != "tree") {
    throw ValidationError("s5: unsupported solver '" + c.solver + "'");
  }
  const s5::Word w = s5::random_word(c.seed, c.size);
  CostMeter m;
  const s5::Perm5 product = c.solver == "serial" ? s5::fold_serial(w, m) : s5::fold_tree(w, m);
  return {m.work, m.depth,
          Aux{{"product", product.to_string()},
              {"memo_log10", fixed(s5::memo_table_log10(c.size), 2)}}};
}

Outcome run_do1(const BenchCase& c) {
  const std::size_t n_inputs = param_u64(c, "n_inputs", 8);
  const std::size_t fanin = param_u64(c, "fanin", 3);
  const double density = param_double(c, "density", 0.5);
  if (c.solver != "serial" && c.solver != "extract-exact" && c.solver != "extract-noisy") {
    throw ValidationError("do1: unsupported solver '" + c.solver + "'");
  }
  const do1::CircuitConfig cfg = do1::random_config(c.seed, n_inputs, c.size, fanin, density);
  Aux aux{{"d1", std::to_string(cfg.d1())}};

  if (c.solver == "serial") {
    CostMeter m;
    eval_serial(cfg.circuit(), cfg.assignment(), m);
    return {m.work, m.depth, std::move(aux)};
  }

  double eps = 1.0;
  do1::Extraction ex;
  if (c.solver == "extract-exact") {
    ex = do1::extract_do1(cfg, do1::ExactValueOracle{});
  } else {
    eps = param_double(c, "eps", 0.5);
    ex = do1::extract_do1(cfg, do1::NoisyValueOracle(eps, hash_combine(c.seed, 0xd01)));
  }
  const double d = cfg.d1();
  const double est = static_cast<double>(ex.estimate);
  const bool ok = ex.estimate == 0 ? cfg.d1() == 0 : (eps * est <= d && d <= 2.0 / eps * est);
  aux.emplace_back("estimate", std::to_string(ex.estimate));
  aux.emplace_back("probes", std::to_string(ex.probes));
  aux.emplace_back("m", std::to_string(ex.m));
  aux.emplace_back("eps", fixed(eps, 2));
  aux.emplace_back("bracket", ok ? "ok" : "violated");
  // All probes form a single parallel round.
  return {ex.probes, ex.probes > 0 ? 1u : 0u, std::move(aux)};
}

Outcome run_derand(const BenchCase& c) {
  if (c.solver != "search") throw ValidationError("derand: unsupported solver '" + c.solver + "'");
  const double p = param_double(c, "p", 0.3);
  const std::size_t vocab = param_u64(c, "vocab", 2);
  const double delta = param_double(c, "delta", 0.01);
  const std::size_t attempts = param_u64(c, "max_attempts", 20);
  const derand::CalibratedDecider decider(p, hash_combine(c.seed, 0xde));
  const auto res = derand::find_universal_seeds(decider, c.size, vocab, delta, c.seed, attempts);
  std::uint64_t inputs = 1;
  for (std::uint64_t i = 0; i < c.size; ++i) inputs *= vocab;

  std::string failures;
  for (auto f : res.failures_per_attempt) {
    if (!failures.empty()) failures += '/';
    failures += std::to_string(f);
  }
  // Each attempt checks every input with k decider calls in one parallel round.
  return {res.attempts * inputs * res.k, res.attempts,
          Aux{{"k", std::to_string(res.k)},
              {"attempts", std::to_string(res.attempts)},
              {"success", res.success ? "1" : "0"},
              {"failures", failures}}};
}

// Keeps text inside the CSV grammar.
std::string sanitize(std::string s) {
  for (char& ch : s) {
    if (ch == ',' || ch == ';' || ch == '\n' || ch == '\r') ch = ' ';
    if (ch == '=') ch = ':';
  }
  return s;
}

}  // namespace

std::string BenchRecord::aux_value(std::string_view key) const {
  for (const auto& [k, v] : aux) {
    if (k == key) return v;
  }
  return {};
}

BenchRecord run_case(const BenchCase& c) {
  BenchRecord r;
  r.family = c.family;
  r.size = c.size;
  r.solver = c.solver;
  r.seed = c.seed;
  const auto start = std::chrono::steady_clock::now();
  try {
    Outcome o;
    if (c.family == "ca") {
      o = run_ca(c);
    } else if (c.family == "cvp") {
      o = run_cvp(c);
    } else if (c.family == "s5") {
      o = run_s5(c);
    } else if (c.family == "do1") {
      o = run_do1(c);
    } else if (c.family == "derand") {
      o = run_derand(c);
    } else {
      throw ValidationError("unsupported family '" + c.family + "'");
    }
    r.work = o.work;
    r.depth = o.depth;
    r.aux = std::move(o.aux);
  } catch (const std::exception& e) {
    r.work = 0;
    r.depth = 0;
    r.aux = {{"error", sanitize(e.what())}};
  }
  r.wall_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                  std::chrono::steady_clock::now() - start)
                  .count();
  return r;
}

std::vector<BenchRecord> run_suite(const std::vector<BenchCase>& cases, unsigned threads) {
  std::vector<BenchRecord> out(cases.size());
  if (threads <= 1 || cases.size() <= 1) {
    for (std::size_t i = 0; i < cases.size(); ++i) out[i] = run_case(cases[i]);
    return out;
  }
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < cases.size(); i = next++) out[i] = run_case(cases[i]);
      });
    }
  }
  return out;
}

// --- CSV ---------------------------------------------------------------------

std::string emit_csv(const std::vector<BenchRecord>& records) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : records) {
    out += sanitize(r.family) + ',' + std::to_string(r.size) + ',' + sanitize(r.solver) + ',' +
           std::to_string(r.seed) + ',' + std::to_string(r.work) + ',' + std::to_string(r.depth) +
           ',' + std::to_string(r.wall_ns) + ',';
    bool first = true;
    for (const auto& [k, v] : r.aux) {
      if (!first) out += ';';
      first = false;
      out += sanitize(k) + '=' + sanitize(v);
    }
    out += '\n';
  }
  return out;
}

namespace {

template <typename T>
T parse_number(std::string_view s, std::size_t line, const char* what) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(line, std::string("bad ") + what + " '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t at = s.find(sep, start);
    if (at == std::string_view::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, at - start));
    start = at + 1;
  }
}

}  // namespace

std::vector<BenchRecord> parse_csv(std::string_view text) {
  std::vector<BenchRecord> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool saw_header = false;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!saw_header) {
      if (line != kCsvHeader) {
        throw ParseError(line_no, "expected header '" + std::string(kCsvHeader) + "'");
      }
      saw_header = true;
      continue;
    }
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 8) {
      throw ParseError(line_no, "expected 8 fields, got " + std::to_string(f.size()));
    }
    BenchRecord r;
    r.family = std::string(f[0]);
    r.size = parse_number<std::uint64_t>(f[1], line_no, "size");
    r.solver = std::string(f[2]);
    r.seed = parse_number<std::uint64_t>(f[3], line_no, "seed");
    r.work = parse_number<std::uint64_t>(f[4], line_no, "work");
    r.depth = parse_number<std::uint64_t>(f[5], line_no, "depth");
    r.wall_ns = parse_number<std::int64_t>(f[6], line_no, "wall_ns");
    if (!f[7].empty()) {
      for (auto kv : split(f[7], ';')) {
        const auto eq = kv.find('=');
        if (eq == std::string_view::npos) throw ParseError(line_no, "aux entry without '='");
        r.aux.emplace_back(std::string(kv.substr(0, eq)), std::string(kv.substr(eq + 1)));
      }
    }
    out.push_back(std::move(r));
  }
  if (!saw_header) throw ParseError(1, "missing CSV header");
  return out;
}

// --- report ------------------------------------------------------------------

namespace {

constexpr std::string_view kFamilies[] = {"ca", "cvp", "s5", "do1", "derand"};

using Table = std::vector<std::vector<std::string>>;

void print_table(std::ostringstream& os, const Table& t) {
  if (t.empty()) return;
  std::vector<std::size_t> widths(t.front().size(), 0);
  for (const auto& row : t) {
    for (std::size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], row[i].size());
  }
  for (const auto& row : t) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) line += "  ";
      line += row[i];
      if (i + 1 < row.size()) line.append(widths[i] - row[i].size(), ' ');
    }
    os << line << '\n';
  }
}

std::vector<std::string> solvers_of(const std::vector<const BenchRecord*>& recs) {
  std::vector<std::string> solvers;
  for (const auto* r : recs) {
    if (std::find(solvers.begin(), solvers.end(), r->solver) == solvers.end()) {
      solvers.push_back(r->solver);
    }
  }
  return solvers;
}

// Rows keyed by (size, seed) in ascending order; one column per solver.
Table metric_table(const std::vector<const BenchRecord*>& recs,
                   const std::vector<std::string>& solvers, bool depth) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> keys;
  for (const auto* r : recs) keys.emplace_back(r->size, r->seed);
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

  Table t;
  std::vector<std::string> header{"size", "seed"};
  header.insert(header.end(), solvers.begin(), solvers.end());
  t.push_back(std::move(header));
  for (const auto& [size, seed] : keys) {
    std::vector<std::string> row{std::to_string(size), std::to_string(seed)};
    for (const auto& s : solvers) {
      std::string cell = "-";
      for (const auto* r : recs) {
        if (r->size == size && r->seed == seed && r->solver == s) {
          cell = std::to_string(depth ? r->depth : r->work);
          break;
        }
      }
      row.push_back(std::move(cell));
    }
    t.push_back(std::move(row));
  }
  return t;
}

}  // namespace

std::string emit_report(const std::vector<BenchRecord>& records) {
  std::ostringstream os;
  os << "serialbench report: " << records.size() << " records\n";

  std::vector<const BenchRecord*> failed;
  for (const auto& r : records) {
    if (r.failed()) failed.push_back(&r);
  }

  for (std::string_view family : kFamilies) {
    std::vector<const BenchRecord*> recs;
    for (const auto& r : records) {
      if (r.family == family && !r.failed()) recs.push_back(&r);
    }
    os << "\n== " << family << " ==\n";
    if (recs.empty()) {
      os << "(no records)\n";
      continue;
    }
    const auto solvers = solvers_of(recs);
    os << "depth\n";
    print_table(os, metric_table(recs, solvers, true));
    os << "work\n";
    print_table(os, metric_table(recs, solvers, false));

    if (family == "ca") {
      Table t{{"solver", "k", "table_size", "entries"}};
      for (const auto& s : solvers) {
        for (const auto* r : recs) {
          if (r->solver != s) continue;
          const std::string k = r->aux_value("k");
          t.push_back({s, k, r->aux_value("table_size"),
                       "2^" + std::to_string(2 * std::stoi(k) + 1)});
          break;
        }
      }
      os << "lookup table size\n";
      print_table(os, t);
    } else if (family == "s5") {
      std::vector<std::uint64_t> sizes;
      for (const auto* r : recs) sizes.push_back(r->size);
      std::sort(sizes.begin(), sizes.end());
      sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
      Table t{{"n", "memo_table_rows", "approx"}};
      for (auto n : sizes) {
        t.push_back({std::to_string(n), "e^(" + std::to_string(n) + " ln 120)",
                     "10^" + fixed(s5::memo_table_log10(n), 2)});
      }
      os << "word-to-product lookup table\n";
      print_table(os, t);
    } else if (family == "do1") {
      Table t{{"size", "seed", "solver", "d1", "estimate", "probes", "bracket"}};
      for (const auto* r : recs) {
        if (r->solver == "serial") continue;
        t.push_back({std::to_string(r->size), std::to_string(r->seed), r->solver,
                     r->aux_value("d1"), r->aux_value("estimate"), r->aux_value("probes"),
                     r->aux_value("bracket")});
      }
      if (t.size() > 1) {
        os << "extraction\n";
        print_table(os, t);
      }
    } else if (family == "derand") {
      Table t{{"size", "seed", "k", "attempts", "success"}};
      for (const auto* r : recs) {
        t.push_back({std::to_string(r->size), std::to_string(r->seed), r->aux_value("k"),
                     r->aux_value("attempts"), r->aux_value("success")});
      }
      os << "seed search\n";
      print_table(os, t);
    }
  }

  if (!failed.empty()) {
    os << "\n== errors ==\n";
    for (const auto* r : failed) {
      os << r->family << ' ' << r->solver << " size=" << r->size << " seed=" << r->seed << ": "
         << r->aux_value("error") << '\n';
    }
  }
  return os.str();
}

// --- suite configuration -------------------------------------------------------

std::vector<BenchCase> parse_suite(std::string_view json_text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(1, std::string("suite config: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("cases") || !doc["cases"].is_array()) {
    throw ValidationError("suite config needs a \"cases\" array");
  }
  std::vector<BenchCase> cases;
  for (const auto& j : doc["cases"]) {
    try {
      BenchCase c;
      c.family = j.at("family").get<std::string>();
      c.size = j.at("size").get<std::uint64_t>();
      c.solver = j.at("solver").get<std::string>();
      c.seed = j.value("seed", std::uint64_t{0});
      if (j.contains("params")) {
        for (const auto& [k, v] : j["params"].items()) {
          c.params[k] = v.is_string() ? v.get<std::string>() : v.dump();
        }
      }
      cases.push_back(std::move(c));
    } catch (const json::exception& e) {
      throw ValidationError("suite case " + std::to_string(cases.size()) + ": " + e.what());
    }
  }
  return cases;
}

std::vector<BenchCase> default_suite() {
  std::vector<BenchCase> cases;
  for (std::uint64_t n : {16, 32, 64}) {
    for (const char* s : {"plain", "compiled-k2", "compiled-k3"}) {
      cases.push_back({"ca", n, s, 1, {{"rule", "110"}}});
    }
  }
  for (std::uint64_t n : {16, 64, 256, 1024}) {
    for (const char* s : {"serial", "layered"}) cases.push_back({"cvp", n, s, 1, {}});
  }
  for (std::uint64_t n = 16; n <= 1024; n *= 2) {
    for (const char* s : {"serial", "tree"}) cases.push_back({"s5", n, s, 1, {}});
  }
  for (std::uint64_t n : {16, 64, 200}) {
    for (const char* s : {"serial", "extract-exact", "extract-noisy"}) {
      cases.push_back({"do1", n, s, 1, {{"eps", "0.5"}}});
    }
  }
  for (std::uint64_t n : {4, 8}) cases.push_back({"derand", n, "search", 1, {{"p", "0.3"}}});
  return cases;
}

}  // namespace serialbench::bench

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace serialbench::bench {

// One benchmark run. Supported families and solvers:
//
//   ca      plain | compiled-k<K>                    size = rows N
//   cvp     serial | layered                         size = generated gates
//   s5      serial | tree                            size = word length n
//   do1     serial | extract-exact | extract-noisy   size = logic gates
//   derand  search                                   size = input length n
//
// params are family specific (e.g. rule, fanin, p); unknown keys are ignored.
struct BenchCase {
  std::string family;
  std::uint64_t size = 0;
  std::string solver;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> params;
};

using Aux = std::vector<std::pair<std::string, std::string>>;

struct BenchRecord {
  std::string family;
  std::uint64_t size = 0;
  std::string solver;
  std::uint64_t seed = 0;
  std::uint64_t work = 0;
  std::uint64_t depth = 0;
  std::int64_t wall_ns = 0;
  Aux aux;

  // Value of an aux key, or "" when absent.
  std::string aux_value(std::string_view key) const;
  bool failed() const { return !aux_value("error").empty(); }

  friend bool operator==(const BenchRecord&, const BenchRecord&) = default;
};

// Runs one case. Unsupported or failing cases come back as a record with
// work = depth = 0 and an `error` aux entry rather than an exception.
BenchRecord run_case(const BenchCase& c);

// One record per case, in input order. With threads > 1 cases run
// concurrently; all fields except wall_ns are deterministic in the seeds.
std::vector<BenchRecord> run_suite(const std::vector<BenchCase>& cases, unsigned threads = 1);

inline constexpr std::string_view kCsvHeader = "family,size,solver,seed,work,depth,wall_ns,aux";

// Header plus one row per record, aux as `key=value` joined by ';'.
std::string emit_csv(const std::vector<BenchRecord>& records);

// Inverse of emit_csv; throws ParseError with the offending line number.
std::vector<BenchRecord> parse_csv(std::string_view text);

// Plain-text tables: depth and work against size for each solver, per family,
// plus the CA table-size growth and the S5 memorisation-table size.
std::string emit_report(const std::vector<BenchRecord>& records);

// Suite document: {"cases": [{"family": .., "size": .., "solver": ..,
// "seed": .., "params": {..}}, ...]}. Param values may be strings or numbers.
std::vector<BenchCase> parse_suite(std::string_view json_text);

// The sweep used when no suite file is given.
std::vector<BenchCase> default_suite();

}  // namespace serialbench::bench

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "serialbench/cost_meter.hpp"

namespace serialbench::ca {

// Elementary (radius-1, binary) rule in Wolfram numbering: the new value for
// neighborhood (l, c, r) is bit (l<<2 | c<<1 | r) of the rule number.
class Rule {
 public:
  explicit Rule(int number);

  std::uint8_t number() const noexcept { return number_; }
  std::uint8_t apply(std::uint8_t l, std::uint8_t c, std::uint8_t r) const noexcept {
    return (number_ >> ((l << 2) | (c << 1) | r)) & 1U;
  }

 private:
  std::uint8_t number_;
};

// Row of cells. Everything outside [0, width) is permanently 0.
struct Tape {
  std::vector<std::uint8_t> cells;

  static Tape from_string(std::string_view s);
  std::string to_string() const;
  std::size_t width() const noexcept { return cells.size(); }

  friend bool operator==(const Tape&, const Tape&) = default;
};

// Default cap on the main table of a compiled rule.
inline constexpr std::uint64_t kDefaultTableBudget = std::uint64_t{1} << 25;

// k-step lookup table. table[b] is the centre cell after k steps of the
// (2k+1)-cell neighborhood whose bits, read left to right from the most
// significant, form b.
//
// The fixed-zero boundary means a cell within k of an edge does not see a
// full neighborhood, and the padding cells never change. Those cells read
// dedicated edge tables: left_edge[i] maps the i+k+1 cells [0, i+k] to cell i
// after k steps, right_edge[i] maps the i+k+1 rightmost cells to cell
// width-1-i. This keeps one compiled round exactly equal to k plain steps.
struct CompiledRule {
  int k = 1;
  std::uint8_t rule = 0;
  std::vector<std::uint8_t> table;
  std::vector<std::vector<std::uint8_t>> left_edge;
  std::vector<std::vector<std::uint8_t>> right_edge;

  std::uint64_t table_size() const noexcept { return table.size(); }
  std::uint64_t edge_table_entries() const noexcept;
};

// One row update. Charges work += width, depth += 1.
Tape step(const Tape& t, const Rule& r, CostMeter& m);

// steps-fold composition of step.
Tape evolve(const Tape& t, const Rule& r, std::size_t steps, CostMeter& m);

// Throws ValidationError for k < 1 and CapacityError when 2^(2k+1) exceeds
// table_budget.
CompiledRule compile_k(const Rule& r, int k, std::uint64_t table_budget = kDefaultTableBudget);

// Advances k rows in one round: depth += 1, work += width.
Tape step_compiled(const Tape& t, const CompiledRule& cr, CostMeter& m);

// Advances `steps` rows using ceil(steps / k) compiled rounds: full k-step
// rounds, then one round of a (steps mod k)-step table when needed.
Tape evolve_compiled(const Tape& t, const Rule& r, int k, std::size_t steps, CostMeter& m,
                     std::uint64_t table_budget = kDefaultTableBudget);

// Decision-problem form: centre `initial` in a zero frame of width
// max(2*n_rows - 1, initial.width()), evolve n_rows rows, return cell i
// (0-based). When the padding is odd the extra zero goes on the right.
// Throws ValidationError when i is outside the frame.
std::uint8_t cell_at(const Rule& r, const Tape& initial, std::size_t n_rows, std::size_t i);

// The padded starting frame used by cell_at.
Tape centered_frame(const Tape& initial, std::size_t n_rows);

}  // namespace serialbench::ca

#include "serialbench/cellular_automaton.hpp"

#include <algorithm>

#include "serialbench/error.hpp"

namespace serialbench::ca {

namespace {

// k plain steps over an isolated window (zero outside it), without metering.
std::vector<std::uint8_t> run_window(std::vector<std::uint8_t> cells, const Rule& r, int k) {
  std::vector<std::uint8_t> next(cells.size());
  for (int s = 0; s < k; ++s) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const std::uint8_t l = i > 0 ? cells[i - 1] : 0;
      const std::uint8_t rr = i + 1 < cells.size() ? cells[i + 1] : 0;
      next[i] = r.apply(l, cells[i], rr);
    }
    cells.swap(next);
  }
  return cells;
}

std::vector<std::uint8_t> bits_of(std::uint64_t b, std::size_t width) {
  std::vector<std::uint8_t> cells(width);
  for (std::size_t j = 0; j < width; ++j) cells[j] = (b >> (width - 1 - j)) & 1U;
  return cells;
}

std::uint64_t pack(const std::vector<std::uint8_t>& cells, std::size_t from, std::size_t len) {
  std::uint64_t b = 0;
  for (std::size_t j = 0; j < len; ++j) b = (b << 1) | cells[from + j];
  return b;
}

}  // namespace

Rule::Rule(int number) {
  if (number < 0 || number > 255) {
    throw ValidationError("rule must be in 0..255, got " + std::to_string(number));
  }
  number_ = static_cast<std::uint8_t>(number);
}

Tape Tape::from_string(std::string_view s) {
  if (s.empty()) throw ValidationError("tape must not be empty");
  Tape t;
  t.cells.reserve(s.size());
  for (char ch : s) {
    if (ch != '0' && ch != '1') {
      throw ValidationError("tape must be a 0/1 string, got '" + std::string(s) + "'");
    }
    t.cells.push_back(ch == '1' ? 1 : 0);
  }
  return t;
}

std::string Tape::to_string() const {
  std::string s;
  s.reserve(cells.size());
  for (auto c : cells) s.push_back(c ? '1' : '0');
  return s;
}

std::uint64_t CompiledRule::edge_table_entries() const noexcept {
  std::uint64_t n = 0;
  for (const auto& t : left_edge) n += t.size();
  for (const auto& t : right_edge) n += t.size();
  return n;
}

Tape step(const Tape& t, const Rule& r, CostMeter& m) {
  Tape out;
  out.cells = run_window(t.cells, r, 1);
  m.charge(t.width(), 1);
  return out;
}

Tape evolve(const Tape& t, const Rule& r, std::size_t steps, CostMeter& m) {
  Tape cur = t;
  for (std::size_t s = 0; s < steps; ++s) cur = step(cur, r, m);
  return cur;
}

CompiledRule compile_k(const Rule& r, int k, std::uint64_t table_budget) {
  if (k < 1) throw ValidationError("compile_k: k must be >= 1");
  const int bits = 2 * k + 1;
  if (bits >= 63 || (std::uint64_t{1} << bits) > table_budget) {
    throw CapacityError("compile_k: 2^" + std::to_string(bits) +
                        " table entries exceed the budget of " + std::to_string(table_budget));
  }

  CompiledRule cr;
  cr.k = k;
  cr.rule = r.number();
  const auto width = static_cast<std::size_t>(bits);
  const std::uint64_t entries = std::uint64_t{1} << bits;
  cr.table.resize(entries);
  for (std::uint64_t b = 0; b < entries; ++b) {
    cr.table[b] = run_window(bits_of(b, width), r, k)[static_cast<std::size_t>(k)];
  }

  // Edge windows only need the boundary on one side; a zero on the far side
  // corrupts at most the cells more than k away from it, which we discard.
  cr.left_edge.resize(static_cast<std::size_t>(k));
  cr.right_edge.resize(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < static_cast<std::size_t>(k); ++i) {
    const std::size_t w = i + static_cast<std::size_t>(k) + 1;
    const std::uint64_t n = std::uint64_t{1} << w;
    cr.left_edge[i].resize(n);
    cr.right_edge[i].resize(n);
    for (std::uint64_t b = 0; b < n; ++b) {
      const auto after = run_window(bits_of(b, w), r, k);
      cr.left_edge[i][b] = after[i];
      cr.right_edge[i][b] = after[w - 1 - i];
    }
  }
  return cr;
}

Tape step_compiled(const Tape& t, const CompiledRule& cr, CostMeter& m) {
  const std::size_t w = t.width();
  const auto k = static_cast<std::size_t>(cr.k);
  Tape out;
  out.cells.resize(w);
  m.charge(w, 1);

  if (w < 2 * k) {
    // Some cell sees both boundaries; no table covers that, so run the window.
    out.cells = run_window(t.cells, Rule(cr.rule), cr.k);
    return out;
  }

  std::vector<std::uint8_t> padded(w + 2 * k, 0);
  std::copy(t.cells.begin(), t.cells.end(), padded.begin() + static_cast<std::ptrdiff_t>(k));
  for (std::size_t i = k; i + k < w; ++i) {
    out.cells[i] = cr.table[pack(padded, i, 2 * k + 1)];
  }
  for (std::size_t i = 0; i < k; ++i) {
    out.cells[i] = cr.left_edge[i][pack(t.cells, 0, i + k + 1)];
    out.cells[w - 1 - i] = cr.right_edge[i][pack(t.cells, w - 1 - i - k, i + k + 1)];
  }
  return out;
}

Tape evolve_compiled(const Tape& t, const Rule& r, int k, std::size_t steps, CostMeter& m,
                     std::uint64_t table_budget) {
  const CompiledRule full = compile_k(r, k, table_budget);
  const auto uk = static_cast<std::size_t>(k);
  Tape cur = t;
  for (std::size_t s = 0; s < steps / uk; ++s) cur = step_compiled(cur, full, m);
  if (const std::size_t rest = steps % uk; rest != 0) {
    cur = step_compiled(cur, compile_k(r, static_cast<int>(rest), table_budget), m);
  }
  return cur;
}

Tape centered_frame(const Tape& initial, std::size_t n_rows) {
  const std::size_t frame = std::max(n_rows == 0 ? 0 : 2 * n_rows - 1, initial.width());
  const std::size_t left = (frame - initial.width()) / 2;
  Tape t;
  t.cells.assign(frame, 0);
  std::copy(initial.cells.begin(), initial.cells.end(),
            t.cells.begin() + static_cast<std::ptrdiff_t>(left));
  return t;
}

std::uint8_t cell_at(const Rule& r, const Tape& initial, std::size_t n_rows, std::size_t i) {
  Tape frame = centered_frame(initial, n_rows);
  if (i >= frame.width()) {
    throw ValidationError("cell index " + std::to_string(i) + " outside frame of width " +
                          std::to_string(frame.width()));
  }
  CostMeter m;
  return evolve(frame, r, n_rows, m).cells[i];
}

}  // namespace serialbench::ca

#include "serialbench/circuit.hpp"

#include <algorithm>
#include <deque>

#include "serialbench/rng.hpp"

namespace serialbench {

namespace {

std::string edge_text(Edge e) {
  return std::to_string(e.from) + " -> " + std::to_string(e.to);
}

void check_arity(const Gate& g) {
  const auto n = g.inputs.size();
  switch (g.kind) {
    case GateKind::Input:
    case GateKind::Const0:
    case GateKind::Const1:
      if (n != 0) {
        throw StructuralError("gate " + std::to_string(g.id) + " (" +
                              std::string(kind_name(g.kind)) + ") must have no inputs");
      }
      break;
    case GateKind::Not:
      if (n != 1) {
        throw StructuralError("gate " + std::to_string(g.id) + " (not) must have exactly 1 input");
      }
      break;
    case GateKind::And:
    case GateKind::Or:
    case GateKind::Majority:
      if (n == 0) {
        throw StructuralError("gate " + std::to_string(g.id) + " (" +
                              std::string(kind_name(g.kind)) + ") needs at least 1 input");
      }
      break;
  }
}

// Follows input edges among the gates left over by Kahn's algorithm until a
// gate repeats; the edge that closes the loop lies on a cycle.
Edge find_cycle_edge(std::span<const Gate> gates, const std::vector<std::uint32_t>& pending) {
  GateId cur = 0;
  while (pending[cur] == 0) ++cur;
  std::vector<std::uint8_t> seen(gates.size(), 0);
  for (;;) {
    seen[cur] = 1;
    for (GateId next : gates[cur].inputs) {
      if (pending[next] == 0) continue;
      if (seen[next]) return Edge{cur, next};
      cur = next;
      break;
    }
  }
}

}  // namespace

std::string_view kind_name(GateKind k) noexcept {
  switch (k) {
    case GateKind::Input: return "input";
    case GateKind::Const0:
    case GateKind::Const1: return "const";
    case GateKind::And: return "and";
    case GateKind::Or: return "or";
    case GateKind::Not: return "not";
    case GateKind::Majority: return "maj";
  }
  return "?";
}

CycleError::CycleError(Edge e)
    : StructuralError("cycle through edge " + edge_text(e)), edge_(e) {}

Layering topo_layering(std::span<const Gate> gates) {
  const std::size_t n = gates.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Gate& g = gates[i];
    if (g.id != i) {
      throw StructuralError("gate at position " + std::to_string(i) + " has id " +
                            std::to_string(g.id) + "; ids must be dense and ordered");
    }
    check_arity(g);
    for (GateId in : g.inputs) {
      if (in >= n) {
        throw StructuralError("gate " + std::to_string(g.id) + " references unknown gate " +
                              std::to_string(in));
      }
    }
  }

  // Kahn's algorithm over gate -> input edges, counting unresolved inputs.
  std::vector<std::uint32_t> pending(n, 0);
  std::vector<std::vector<GateId>> consumers(n);
  for (const Gate& g : gates) {
    pending[g.id] = static_cast<std::uint32_t>(g.inputs.size());
    for (GateId in : g.inputs) consumers[in].push_back(g.id);
  }

  Layering out;
  out.depth.assign(n, 0);
  std::deque<GateId> ready;
  for (const Gate& g : gates) {
    if (pending[g.id] == 0) ready.push_back(g.id);
  }
  std::size_t resolved = 0;
  while (!ready.empty()) {
    const GateId id = ready.front();
    ready.pop_front();
    ++resolved;
    for (GateId c : consumers[id]) {
      out.depth[c] = std::max(out.depth[c], out.depth[id] + 1);
      if (--pending[c] == 0) ready.push_back(c);
    }
  }
  if (resolved != n) throw CycleError(find_cycle_edge(gates, pending));

  for (const Gate& g : gates) {
    if (is_source(g.kind)) continue;
    const std::uint32_t d = out.depth[g.id];
    if (out.layers.size() < d) out.layers.resize(d);
    out.layers[d - 1].push_back(g.id);
  }
  // Gates were appended in id order, so each layer is already sorted.
  return out;
}

Layering topo_layering(const Circuit& c) { return c.layering(); }

Circuit::Circuit(std::vector<Gate> gates, GateId output)
    : gates_(std::move(gates)), output_(output) {
  if (gates_.empty()) throw StructuralError("circuit has no gates");
  if (output_ >= gates_.size()) {
    throw StructuralError("output " + std::to_string(output_) + " is not a gate");
  }
  layering_ = topo_layering(std::span<const Gate>(gates_));

  bool inputs_done = false;
  for (const Gate& g : gates_) {
    if (g.kind == GateKind::Input) {
      if (inputs_done) {
        throw StructuralError("input gate " + std::to_string(g.id) +
                              " follows a non-input gate; inputs must occupy the lowest ids");
      }
      ++n_inputs_;
    } else {
      inputs_done = true;
      if (!is_source(g.kind)) ++logic_count_;
    }
  }
}

Assignment Assignment::from_string(std::string_view s) {
  Assignment a;
  a.bits.reserve(s.size());
  for (char ch : s) {
    if (ch != '0' && ch != '1') {
      throw ValidationError("assignment must be a 0/1 string, got '" + std::string(s) + "'");
    }
    a.bits.push_back(ch == '1' ? 1 : 0);
  }
  return a;
}

std::string Assignment::to_string() const {
  std::string s;
  s.reserve(bits.size());
  for (auto b : bits) s.push_back(b ? '1' : '0');
  return s;
}

bool apply_gate(GateKind kind, std::span<const std::uint8_t> v) noexcept {
  switch (kind) {
    case GateKind::Input: return false;
    case GateKind::Const0: return false;
    case GateKind::Const1: return true;
    case GateKind::And:
      return std::all_of(v.begin(), v.end(), [](auto b) { return b != 0; });
    case GateKind::Or:
      return std::any_of(v.begin(), v.end(), [](auto b) { return b != 0; });
    case GateKind::Not: return v[0] == 0;
    case GateKind::Majority: {
      const auto ones = static_cast<std::size_t>(std::count(v.begin(), v.end(), 1));
      return 2 * ones > v.size();
    }
  }
  return false;
}

namespace {

void check_assignment(const Circuit& c, const Assignment& a) {
  if (a.bits.size() != c.n_inputs()) {
    throw ValidationError("assignment has " + std::to_string(a.bits.size()) +
                          " bits but circuit has " + std::to_string(c.n_inputs()) + " inputs");
  }
}

GateValues seed_sources(const Circuit& c, const Assignment& a) {
  GateValues values(c.size(), 0);
  for (const Gate& g : c.gates()) {
    if (g.kind == GateKind::Input) values[g.id] = a.bits[g.id];
    if (g.kind == GateKind::Const1) values[g.id] = 1;
  }
  return values;
}

void evaluate_gate(const Gate& g, GateValues& values, std::vector<std::uint8_t>& scratch) {
  scratch.clear();
  for (GateId in : g.inputs) scratch.push_back(values[in]);
  values[g.id] = apply_gate(g.kind, scratch) ? 1 : 0;
}

}  // namespace

GateValues eval_serial(const Circuit& c, const Assignment& a, CostMeter& m) {
  check_assignment(c, a);
  GateValues values = seed_sources(c, a);
  std::vector<std::uint8_t> scratch;
  std::uint64_t steps = 0;
  for (const auto& layer : c.layering().layers) {
    for (GateId id : layer) {
      evaluate_gate(c.gate(id), values, scratch);
      ++steps;
    }
  }
  m.charge(steps, steps);
  return values;
}

GateValues eval_layered(const Circuit& c, const Assignment& a, CostMeter& m) {
  check_assignment(c, a);
  GateValues values = seed_sources(c, a);
  std::vector<std::uint8_t> scratch;
  std::uint64_t work = 0;
  // A layer only reads values from earlier layers, so any order within it
  // (or a concurrent sweep) produces the same result.
  for (const auto& layer : c.layering().layers) {
    for (GateId id : layer) evaluate_gate(c.gate(id), values, scratch);
    work += layer.size();
  }
  m.charge(work, c.layering().layer_count());
  return values;
}

bool cvp(const Circuit& c, const Assignment& a) {
  CostMeter m;
  return eval_serial(c, a, m)[c.output()] != 0;
}

Circuit random_circuit(std::uint64_t seed, std::size_t n_inputs, std::size_t n_gates,
                       std::size_t fanin_max, double majority_fraction, bool monotone) {
  if (n_gates < 1) throw ValidationError("random_circuit: n_gates must be >= 1");
  if (n_inputs < 1) throw ValidationError("random_circuit: n_inputs must be >= 1");
  if (fanin_max < 1) throw ValidationError("random_circuit: fanin_max must be >= 1");
  if (!(majority_fraction >= 0.0 && majority_fraction <= 1.0)) {
    throw ValidationError("random_circuit: majority_fraction must lie in [0, 1]");
  }

  Rng rng(seed);
  std::vector<Gate> gates;
  gates.reserve(n_inputs + n_gates);
  for (std::size_t i = 0; i < n_inputs; ++i) {
    gates.push_back(Gate{static_cast<GateId>(i), GateKind::Input, {}});
  }
  const GateKind plain_kinds[] = {GateKind::And, GateKind::Or, GateKind::Not};
  const std::size_t plain_count = monotone ? 2 : 3;
  for (std::size_t i = 0; i < n_gates; ++i) {
    const auto id = static_cast<GateId>(n_inputs + i);
    GateKind kind;
    if (rng.bernoulli(0.05)) {
      kind = rng.bernoulli(0.5) ? GateKind::Const1 : GateKind::Const0;
    } else if (rng.bernoulli(majority_fraction)) {
      kind = GateKind::Majority;
    } else {
      kind = plain_kinds[rng.below(plain_count)];
    }
    // The output is the last gate; keep it a logic gate so cvp exercises the DAG.
    if (i + 1 == n_gates && is_source(kind)) kind = GateKind::Or;

    Gate g{id, kind, {}};
    if (!is_source(kind)) {
      const std::size_t fanin = kind == GateKind::Not ? 1 : 1 + rng.below(fanin_max);
      for (std::size_t j = 0; j < fanin; ++j) {
        g.inputs.push_back(static_cast<GateId>(rng.below(id)));
      }
    }
    gates.push_back(std::move(g));
  }
  const auto output = static_cast<GateId>(gates.size() - 1);
  return Circuit(std::move(gates), output);
}

std::vector<Assignment> all_assignments(std::size_t n_inputs) {
  if (n_inputs > 20) throw CapacityError("all_assignments: more than 2^20 assignments");
  std::vector<Assignment> out;
  const std::uint64_t total = std::uint64_t{1} << n_inputs;
  out.reserve(total);
  for (std::uint64_t x = 0; x < total; ++x) {
    Assignment a;
    a.bits.resize(n_inputs);
    for (std::size_t i = 0; i < n_inputs; ++i) a.bits[i] = (x >> i) & 1U;
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace serialbench

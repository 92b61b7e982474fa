#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "serialbench/cost_meter.hpp"
#include "serialbench/error.hpp"

namespace serialbench {

using GateId = std::uint32_t;

enum class GateKind : std::uint8_t { Input, Const0, Const1, And, Or, Not, Majority };

// INPUT and CONST gates have no inputs and are never charged or layered.
constexpr bool is_source(GateKind k) noexcept {
  return k == GateKind::Input || k == GateKind::Const0 || k == GateKind::Const1;
}

std::string_view kind_name(GateKind k) noexcept;

struct Gate {
  GateId id = 0;
  GateKind kind = GateKind::Input;
  std::vector<GateId> inputs;

  friend bool operator==(const Gate&, const Gate&) = default;
};

// A directed edge gate -> one of its inputs.
struct Edge {
  GateId from = 0;
  GateId to = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Raised when the gate graph has a cycle; carries one edge on it.
class CycleError : public StructuralError {
 public:
  explicit CycleError(Edge e);
  Edge edge() const noexcept { return edge_; }

 private:
  Edge edge_;
};

// Gates grouped by depth. layers[d - 1] holds the gates of depth d in
// ascending id order; source gates have depth 0 and are not listed.
struct Layering {
  std::vector<std::vector<GateId>> layers;
  std::vector<std::uint32_t> depth;  // indexed by gate id

  std::size_t layer_count() const noexcept { return layers.size(); }
};

// Checks arity, id density, reference validity and acyclicity; the returned
// layering assigns every logic gate 1 + the maximum depth of its inputs.
// Throws StructuralError (or CycleError) on violation.
Layering topo_layering(std::span<const Gate> gates);

// Immutable Boolean circuit. Gate ids are dense and 0-based with the INPUT
// gates occupying 0..n_inputs-1; construction validates every invariant.
class Circuit {
 public:
  Circuit(std::vector<Gate> gates, GateId output);

  std::span<const Gate> gates() const noexcept { return gates_; }
  const Gate& gate(GateId id) const { return gates_.at(id); }
  std::size_t size() const noexcept { return gates_.size(); }
  std::size_t n_inputs() const noexcept { return n_inputs_; }
  GateId output() const noexcept { return output_; }

  // Number of AND/OR/NOT/MAJORITY gates.
  std::size_t logic_gate_count() const noexcept { return logic_count_; }

  const Layering& layering() const noexcept { return layering_; }
  std::uint32_t depth_of(GateId id) const { return layering_.depth.at(id); }
  std::size_t depth() const noexcept { return layering_.layer_count(); }

  friend bool operator==(const Circuit& a, const Circuit& b) {
    return a.gates_ == b.gates_ && a.output_ == b.output_;
  }

 private:
  std::vector<Gate> gates_;
  GateId output_;
  std::size_t n_inputs_ = 0;
  std::size_t logic_count_ = 0;
  Layering layering_;
};

struct Assignment {
  std::vector<std::uint8_t> bits;

  // Parses a string of '0'/'1' characters; throws ValidationError otherwise.
  static Assignment from_string(std::string_view s);
  std::string to_string() const;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

using GateValues = std::vector<std::uint8_t>;

Layering topo_layering(const Circuit& c);

// Evaluates gates one at a time in topological order.
// Charges work = depth = number of logic gates.
GateValues eval_serial(const Circuit& c, const Assignment& a, CostMeter& m);

// Evaluates layer by layer. Gates inside a layer are independent; charges
// work = number of logic gates and depth = number of layers.
GateValues eval_layered(const Circuit& c, const Assignment& a, CostMeter& m);

// Circuit Value Problem: the output gate's value.
bool cvp(const Circuit& c, const Assignment& a);

// Applies one gate's semantics to already-computed input values.
// MAJORITY is strict: 1 iff more than half of the inputs are 1.
bool apply_gate(GateKind kind, std::span<const std::uint8_t> input_values) noexcept;

// Random DAG for testing and benchmarking. Gate ids n_inputs..n_inputs+n_gates-1
// hold the generated gates; each draws its inputs only from earlier ids, so the
// result is acyclic by construction. The last gate is the output. With
// monotone set, no NOT gates are produced.
Circuit random_circuit(std::uint64_t seed, std::size_t n_inputs, std::size_t n_gates,
                       std::size_t fanin_max, double majority_fraction,
                       bool monotone = false);

// Enumerates all 2^n assignments for n inputs (n <= 20) in binary-counter order.
std::vector<Assignment> all_assignments(std::size_t n_inputs);

}  // namespace serialbench

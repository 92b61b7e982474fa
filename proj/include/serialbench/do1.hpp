#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "serialbench/circuit.hpp"
#include "serialbench/error.hpp"

// Depth-of-1 problem and the decision environment built on it.
//
// A configuration is a monotone alternating AND/OR circuit plus an input. Its
// depth-of-1 (d1) is the largest depth of any gate that outputs 1. The
// environment offers a forced choice between the configuration and an
// alternating chain of known length, then lets the agent pick further gates on
// the side it kept; the terminal reward is the largest chosen depth when every
// chosen gate is hot. extract_do1 recovers d1 to within a factor of two from
// value estimates of the post-choice states alone.
namespace serialbench::do1 {

class AlternationError : public ValidationError {
 public:
  AlternationError(std::string what, std::vector<Edge> edges)
      : ValidationError(std::move(what)), edges_(std::move(edges)) {}
  const std::vector<Edge>& edges() const noexcept { return edges_; }

 private:
  std::vector<Edge> edges_;
};

// Circuit restricted to AND/OR gates over INPUT/CONST sources in which every
// AND reads only OR gates and every OR reads only AND gates (source feeds are
// always allowed).
class AltCircuit {
 public:
  // Throws AlternationError listing every offending gate -> input edge.
  explicit AltCircuit(Circuit c);

  // Edges gate -> input that break alternation, plus (g, g) for any gate whose
  // kind is not AND/OR/INPUT/CONST.
  static std::vector<Edge> violations(const Circuit& c);

  const Circuit& circuit() const noexcept { return circuit_; }
  // The AND/OR gates; these are the gates an agent may select.
  std::span<const GateId> selectable() const noexcept { return selectable_; }
  // |C|: number of selectable gates.
  std::size_t gate_count() const noexcept { return selectable_.size(); }

 private:
  Circuit circuit_;
  std::vector<GateId> selectable_;
};

// Circuit plus input, with gate values and depths evaluated once up front.
class CircuitConfig {
 public:
  CircuitConfig(AltCircuit circuit, Assignment assignment);

  const AltCircuit& alt() const noexcept { return circuit_; }
  const Circuit& circuit() const noexcept { return circuit_.circuit(); }
  const Assignment& assignment() const noexcept { return assignment_; }

  bool hot(GateId g) const { return values_.at(g) != 0; }
  std::uint32_t depth(GateId g) const { return circuit().depth_of(g); }
  bool is_selectable(GateId g) const noexcept;

  // d1 and the lowest-id hot gate attaining it (nullopt when d1 = 0).
  std::uint32_t d1() const noexcept { return d1_; }
  std::optional<GateId> deepest_hot() const noexcept { return deepest_hot_; }

 private:
  AltCircuit circuit_;
  Assignment assignment_;
  GateValues values_;
  std::uint32_t d1_ = 0;
  std::optional<GateId> deepest_hot_;
};

// Max depth over hot gates, from a full evaluation; 0 if nothing is hot.
std::uint32_t d1(const CircuitConfig& cfg);

// OR -> AND -> OR -> ... chain of k gates over a single CONST1 (id 0); chain
// gate j (1-based) has id j and depth j.
AltCircuit make_chain(std::size_t k);

// d1 == 0 test that looks only at gates reading a source directly, treating
// their gate inputs as cold. By monotonicity the shallowest hot gate is found
// this way whenever one exists, so no full evaluation is needed.
bool is_d1_zero(const CircuitConfig& cfg);

enum class Phase : std::uint8_t { ForcedChoice, SelectingCircuit, SelectingChain, Done };

std::string_view phase_name(Phase p) noexcept;

struct Action {
  enum class Kind : std::uint8_t { PickCircuitGate, PickChainGate, SelectGate, Pass };

  Kind kind = Kind::Pass;
  GateId gate = 0;

  static Action pick_circuit(GateId g) { return {Kind::PickCircuitGate, g}; }
  static Action pick_chain(GateId g) { return {Kind::PickChainGate, g}; }
  static Action select(GateId g) { return {Kind::SelectGate, g}; }
  static Action pass() { return {Kind::Pass, 0}; }

  friend bool operator==(const Action&, const Action&) = default;
};

std::string to_string(const Action& a);

class IllegalActionError : public Error {
 public:
  using Error::Error;
};

struct Do1EnvState {
  std::shared_ptr<const CircuitConfig> config;
  std::shared_ptr<const CircuitConfig> chain;
  std::size_t chain_len = 1;
  Phase phase = Phase::ForcedChoice;
  std::vector<GateId> chosen;  // sorted, on the surviving side
  std::size_t t = 0;
  std::size_t horizon = 1;
  bool chosen_from_chain = false;

  // The side kept at the forced choice; undefined before it.
  const CircuitConfig& surviving() const;
};

struct StepResult {
  Do1EnvState state;
  double reward = 0.0;
  bool done = false;
};

// Horizon H = max(chain_len, |C|). Throws ValidationError for chain_len < 1.
Do1EnvState env_reset(std::shared_ptr<const CircuitConfig> cfg, std::size_t chain_len);

// The forced choice is the first timed step. Illegal actions throw
// IllegalActionError; since the input state is const it stays unchanged.
StepResult env_step(const Do1EnvState& s, const Action& a);

// Reward r_H an episode would receive if it ended in s.
double terminal_reward(const Do1EnvState& s);

// Optimal total episode reward consistent with s. All reward arrives at t = H,
// so for a finished state this is the reward it received.
double optimal_value(const Do1EnvState& s);

// Greedy w.r.t. optimal_value. At the forced choice it takes the deepest hot
// gate of the circuit when d1 >= chain_len and the last chain gate otherwise,
// then passes. Throws ValidationError on a finished state.
Action oracle_policy(const Do1EnvState& s);

class ValueOracle {
 public:
  virtual ~ValueOracle() = default;
  virtual double value(const Do1EnvState& s) const = 0;
};

class ExactValueOracle final : public ValueOracle {
 public:
  double value(const Do1EnvState& s) const override { return optimal_value(s); }
};

// optimal_value scaled by a factor uniform in [epsilon, 1], drawn from a hash
// of (seed, state) so repeated probes of the same state agree.
class NoisyValueOracle final : public ValueOracle {
 public:
  NoisyValueOracle(double epsilon, std::uint64_t seed);
  double value(const Do1EnvState& s) const override;
  double epsilon() const noexcept { return epsilon_; }

 private:
  double epsilon_;
  std::uint64_t seed_;
};

struct Extraction {
  std::uint64_t estimate = 0;  // d'
  std::size_t probes = 0;
  int m = 0;                   // 2^(m-1) < |C| <= 2^m
  bool zero_by_scan = false;   // d1 = 0 short-circuit taken
  std::vector<bool> circuit_preferred;  // indexed by l = 0..m
  std::optional<int> switchover;        // largest l preferring the circuit
};

// Builds environments with chains of length 2^l for l = 0..m, probes v on
// every post-choice state and returns d' = 2^k* for the largest l = k* at which
// some circuit gate scores at least the chain. No preference at all gives 1;
// preference at l = m gives |C|. With v within [eps V*, V*] the result obeys
// eps d' <= d1 <= (2/eps) d'.
Extraction extract_do1(const CircuitConfig& cfg, const ValueOracle& v);

// Smallest m with |C| <= 2^m.
int probe_exponent(std::size_t gate_count) noexcept;

// Random alternating circuit: n_gates AND/OR gates over n_inputs inputs, each
// reading up to fanin_max earlier gates/sources. Recent opposite-kind gates are
// favoured so depth grows with n_gates.
AltCircuit random_alternating_circuit(std::uint64_t seed, std::size_t n_inputs,
                                      std::size_t n_gates, std::size_t fanin_max);

// Random circuit plus an input with the given density of ones.
CircuitConfig random_config(std::uint64_t seed, std::size_t n_inputs, std::size_t n_gates,
                            std::size_t fanin_max, double one_density);

// Environment wrapper with the usual reset/step surface. When a log stream is
// attached, every reset and step is written as one JSON object per line.
class Do1Env {
 public:
  Do1Env(std::shared_ptr<const CircuitConfig> cfg, std::size_t chain_len,
         std::ostream* log = nullptr);

  const Do1EnvState& reset();
  StepResult step(const Action& a);
  const Do1EnvState& state() const noexcept { return state_; }

 private:
  std::shared_ptr<const CircuitConfig> cfg_;
  std::size_t chain_len_;
  std::ostream* log_;
  Do1EnvState state_;
};

std::string action_json(const Action& a);
Action action_from_json(const std::string& line);

// Re-runs the actions of a JSON-lines episode log against a fresh environment
// and returns the total reward. Throws ParseError on malformed lines and
// ValidationError when a logged observation disagrees with the replay.
double replay_episode(std::shared_ptr<const CircuitConfig> cfg, std::size_t chain_len,
                      std::istream& log);

}  // namespace serialbench::do1

#include "serialbench/do1.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "serialbench/rng.hpp"

namespace serialbench::do1 {

namespace {

bool is_and_or(GateKind k) { return k == GateKind::And || k == GateKind::Or; }

std::string edges_text(const std::vector<Edge>& edges) {
  std::string s;
  for (const Edge& e : edges) {
    if (!s.empty()) s += ", ";
    s += std::to_string(e.from) + "->" + std::to_string(e.to);
  }
  return s;
}

}  // namespace

std::vector<Edge> AltCircuit::violations(const Circuit& c) {
  std::vector<Edge> bad;
  for (const Gate& g : c.gates()) {
    if (is_source(g.kind)) continue;
    if (!is_and_or(g.kind)) {
      bad.push_back({g.id, g.id});
      continue;
    }
    for (GateId in : g.inputs) {
      const GateKind ik = c.gate(in).kind;
      if (is_source(ik)) continue;
      if (ik == g.kind || !is_and_or(ik)) bad.push_back({g.id, in});
    }
  }
  return bad;
}

AltCircuit::AltCircuit(Circuit c) : circuit_(std::move(c)) {
  if (auto bad = violations(circuit_); !bad.empty()) {
    std::string what = "circuit is not alternating; offending edges: " + edges_text(bad);
    throw AlternationError(std::move(what), std::move(bad));
  }
  for (const Gate& g : circuit_.gates()) {
    if (!is_source(g.kind)) selectable_.push_back(g.id);
  }
}

CircuitConfig::CircuitConfig(AltCircuit circuit, Assignment assignment)
    : circuit_(std::move(circuit)), assignment_(std::move(assignment)) {
  CostMeter m;
  values_ = eval_serial(circuit_.circuit(), assignment_, m);
  for (GateId g : circuit_.selectable()) {
    if (values_[g] && depth(g) > d1_) {
      d1_ = depth(g);
      deepest_hot_ = g;
    }
  }
}

bool CircuitConfig::is_selectable(GateId g) const noexcept {
  const auto sel = circuit_.selectable();
  return std::binary_search(sel.begin(), sel.end(), g);
}

std::uint32_t d1(const CircuitConfig& cfg) { return cfg.d1(); }

AltCircuit make_chain(std::size_t k) {
  if (k < 1) throw ValidationError("make_chain: k must be >= 1");
  std::vector<Gate> gates;
  gates.reserve(k + 1);
  gates.push_back(Gate{0, GateKind::Const1, {}});
  for (std::size_t j = 1; j <= k; ++j) {
    const GateKind kind = j % 2 == 1 ? GateKind::Or : GateKind::And;
    gates.push_back(Gate{static_cast<GateId>(j), kind, {static_cast<GateId>(j - 1)}});
  }
  return AltCircuit(Circuit(std::move(gates), static_cast<GateId>(k)));
}

bool is_d1_zero(const CircuitConfig& cfg) {
  const Circuit& c = cfg.circuit();
  const auto& bits = cfg.assignment().bits;
  auto source_value = [&](const Gate& s) -> std::uint8_t {
    if (s.kind == GateKind::Input) return bits[s.id];
    return s.kind == GateKind::Const1 ? 1 : 0;
  };
  // Each check below is independent of the others: one parallel round.
  for (GateId id : cfg.alt().selectable()) {
    const Gate& g = c.gate(id);
    bool reads_source = false;
    std::vector<std::uint8_t> local;
    local.reserve(g.inputs.size());
    for (GateId in : g.inputs) {
      const Gate& src = c.gate(in);
      if (is_source(src.kind)) {
        reads_source = true;
        local.push_back(source_value(src));
      } else {
        local.push_back(0);
      }
    }
    if (reads_source && apply_gate(g.kind, local)) return false;
  }
  return true;
}

std::string_view phase_name(Phase p) noexcept {
  switch (p) {
    case Phase::ForcedChoice: return "forced_choice";
    case Phase::SelectingCircuit: return "selecting_circuit";
    case Phase::SelectingChain: return "selecting_chain";
    case Phase::Done: return "done";
  }
  return "?";
}

std::string to_string(const Action& a) {
  switch (a.kind) {
    case Action::Kind::PickCircuitGate: return "pick_circuit(" + std::to_string(a.gate) + ")";
    case Action::Kind::PickChainGate: return "pick_chain(" + std::to_string(a.gate) + ")";
    case Action::Kind::SelectGate: return "select(" + std::to_string(a.gate) + ")";
    case Action::Kind::Pass: return "pass";
  }
  return "?";
}

const CircuitConfig& Do1EnvState::surviving() const {
  if (phase == Phase::ForcedChoice) throw ValidationError("no side has been chosen yet");
  return chosen_from_chain ? *chain : *config;
}

Do1EnvState env_reset(std::shared_ptr<const CircuitConfig> cfg, std::size_t chain_len) {
  if (!cfg) throw ValidationError("env_reset: null configuration");
  if (chain_len < 1) throw ValidationError("env_reset: chain_len must be >= 1");
  Do1EnvState s;
  s.chain = std::make_shared<const CircuitConfig>(make_chain(chain_len), Assignment{});
  s.chain_len = chain_len;
  s.horizon = std::max(chain_len, cfg->alt().gate_count());
  s.config = std::move(cfg);
  return s;
}

double terminal_reward(const Do1EnvState& s) {
  if (s.chosen.empty()) return 0.0;
  const CircuitConfig& side = s.surviving();
  std::uint32_t best = 0;
  for (GateId g : s.chosen) {
    if (!side.hot(g)) return 0.0;
    best = std::max(best, side.depth(g));
  }
  return static_cast<double>(best);
}

StepResult env_step(const Do1EnvState& s, const Action& a) {
  auto reject = [&](const std::string& why) -> IllegalActionError {
    return IllegalActionError(to_string(a) + " rejected in phase " +
                              std::string(phase_name(s.phase)) + ": " + why);
  };

  StepResult r{s, 0.0, false};
  Do1EnvState& next = r.state;
  switch (s.phase) {
    case Phase::Done:
      throw reject("episode is over");
    case Phase::ForcedChoice:
      if (a.kind == Action::Kind::PickCircuitGate) {
        if (!s.config->is_selectable(a.gate)) throw reject("not a selectable circuit gate");
        next.phase = Phase::SelectingCircuit;
        next.chosen_from_chain = false;
      } else if (a.kind == Action::Kind::PickChainGate) {
        if (!s.chain->is_selectable(a.gate)) throw reject("not a chain gate");
        next.phase = Phase::SelectingChain;
        next.chosen_from_chain = true;
      } else {
        throw reject("the first action must pick a circuit or chain gate");
      }
      next.chosen = {a.gate};
      break;
    case Phase::SelectingCircuit:
    case Phase::SelectingChain:
      if (a.kind == Action::Kind::SelectGate) {
        if (!s.surviving().is_selectable(a.gate)) throw reject("unknown gate on the kept side");
        auto it = std::lower_bound(next.chosen.begin(), next.chosen.end(), a.gate);
        if (it != next.chosen.end() && *it == a.gate) throw reject("gate already selected");
        next.chosen.insert(it, a.gate);
      } else if (a.kind != Action::Kind::Pass) {
        throw reject("only select or pass is allowed after the forced choice");
      }
      break;
  }

  ++next.t;
  if (next.t == next.horizon) {
    r.reward = terminal_reward(next);
    next.phase = Phase::Done;
    r.done = true;
  }
  return r;
}

double optimal_value(const Do1EnvState& s) {
  if (s.phase == Phase::ForcedChoice) {
    return static_cast<double>(std::max<std::size_t>(s.config->d1(), s.chain_len));
  }
  const CircuitConfig& side = s.surviving();
  std::uint32_t best = 0;
  for (GateId g : s.chosen) {
    if (!side.hot(g)) return 0.0;
    best = std::max(best, side.depth(g));
  }
  // Any unfinished state has at least one step left, enough to add the
  // deepest hot gate of the kept side.
  if (s.phase != Phase::Done) best = std::max(best, side.d1());
  return static_cast<double>(best);
}

Action oracle_policy(const Do1EnvState& s) {
  switch (s.phase) {
    case Phase::Done:
      throw ValidationError("oracle_policy: episode is over");
    case Phase::ForcedChoice:
      if (s.config->d1() >= s.chain_len) return Action::pick_circuit(*s.config->deepest_hot());
      return Action::pick_chain(static_cast<GateId>(s.chain_len));
    default: {
      const CircuitConfig& side = s.surviving();
      const auto target = side.deepest_hot();
      if (target && !std::binary_search(s.chosen.begin(), s.chosen.end(), *target)) {
        return Action::select(*target);
      }
      return Action::pass();
    }
  }
}

NoisyValueOracle::NoisyValueOracle(double epsilon, std::uint64_t seed)
    : epsilon_(epsilon), seed_(seed) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw ValidationError("noise epsilon must lie in (0, 1]");
  }
}

double NoisyValueOracle::value(const Do1EnvState& s) const {
  std::uint64_t h = hash_combine(seed_, s.chain_len);
  h = hash_combine(h, static_cast<std::uint64_t>(s.phase));
  h = hash_combine(h, s.t);
  for (GateId g : s.chosen) h = hash_combine(h, g);
  const double factor = epsilon_ + (1.0 - epsilon_) * unit_interval(h);
  return factor * optimal_value(s);
}

int probe_exponent(std::size_t gate_count) noexcept {
  int m = 0;
  while ((std::size_t{1} << m) < gate_count) ++m;
  return m;
}

Extraction extract_do1(const CircuitConfig& cfg, const ValueOracle& v) {
  Extraction out;
  const std::size_t n = cfg.alt().gate_count();
  out.m = probe_exponent(n);
  if (is_d1_zero(cfg)) {
    out.zero_by_scan = true;
    out.estimate = 0;
    return out;
  }

  auto shared = std::make_shared<const CircuitConfig>(cfg);
  // Every (l, g) probe below is independent of the others.
  for (int l = 0; l <= out.m; ++l) {
    const Do1EnvState start = env_reset(shared, std::size_t{1} << l);
    double best_gate = 0.0;
    bool any_gate = false;
    for (GateId g : cfg.alt().selectable()) {
      const double val = v.value(env_step(start, Action::pick_circuit(g)).state);
      ++out.probes;
      best_gate = any_gate ? std::max(best_gate, val) : val;
      any_gate = true;
    }
    const double chain_val = v.value(env_step(start, Action::pick_chain(1)).state);
    ++out.probes;
    out.circuit_preferred.push_back(any_gate && best_gate >= chain_val);
  }

  for (int l = out.m; l >= 0; --l) {
    if (out.circuit_preferred[static_cast<std::size_t>(l)]) {
      out.switchover = l;
      break;
    }
  }
  if (!out.switchover) {
    out.estimate = 1;
  } else if (*out.switchover == out.m) {
    out.estimate = n;
  } else {
    out.estimate = std::uint64_t{1} << *out.switchover;
  }
  return out;
}

AltCircuit random_alternating_circuit(std::uint64_t seed, std::size_t n_inputs,
                                      std::size_t n_gates, std::size_t fanin_max) {
  if (n_inputs < 1 || n_gates < 1 || fanin_max < 1) {
    throw ValidationError("random_alternating_circuit: counts must be >= 1");
  }
  Rng rng(seed);
  std::vector<Gate> gates;
  for (std::size_t i = 0; i < n_inputs; ++i) {
    gates.push_back(Gate{static_cast<GateId>(i), GateKind::Input, {}});
  }
  std::vector<GateId> ands;
  std::vector<GateId> ors;
  GateKind prev = rng.bernoulli(0.5) ? GateKind::And : GateKind::Or;
  for (std::size_t i = 0; i < n_gates; ++i) {
    const auto id = static_cast<GateId>(gates.size());
    GateKind kind;
    if (rng.bernoulli(0.75)) {
      kind = prev == GateKind::And ? GateKind::Or : GateKind::And;
    } else {
      kind = rng.bernoulli(0.5) ? GateKind::And : GateKind::Or;
    }
    const auto& pool = kind == GateKind::And ? ors : ands;
    // AND gates get narrow fan-in so hot signals can climb.
    const std::size_t width = kind == GateKind::And ? std::min<std::size_t>(fanin_max, 2) : fanin_max;
    const std::size_t fanin = 1 + rng.below(width);
    Gate g{id, kind, {}};
    for (std::size_t j = 0; j < fanin; ++j) {
      if (pool.empty() || rng.bernoulli(0.3)) {
        g.inputs.push_back(static_cast<GateId>(rng.below(n_inputs)));
      } else if (rng.bernoulli(0.6)) {
        const std::size_t recent = std::min<std::size_t>(pool.size(), 3);
        g.inputs.push_back(pool[pool.size() - 1 - rng.below(recent)]);
      } else {
        g.inputs.push_back(pool[rng.below(pool.size())]);
      }
    }
    std::sort(g.inputs.begin(), g.inputs.end());
    g.inputs.erase(std::unique(g.inputs.begin(), g.inputs.end()), g.inputs.end());
    (kind == GateKind::And ? ands : ors).push_back(id);
    gates.push_back(std::move(g));
    prev = kind;
  }
  const auto output = static_cast<GateId>(gates.size() - 1);
  return AltCircuit(Circuit(std::move(gates), output));
}

CircuitConfig random_config(std::uint64_t seed, std::size_t n_inputs, std::size_t n_gates,
                            std::size_t fanin_max, double one_density) {
  AltCircuit c = random_alternating_circuit(seed, n_inputs, n_gates, fanin_max);
  Rng rng(hash_combine(seed, 0x5eed));
  Assignment a;
  a.bits.resize(n_inputs);
  for (auto& b : a.bits) b = rng.bernoulli(one_density) ? 1 : 0;
  return CircuitConfig(std::move(c), std::move(a));
}

// --- episode logging -------------------------------------------------------

namespace {

using nlohmann::json;

std::string_view kind_key(Action::Kind k) {
  switch (k) {
    case Action::Kind::PickCircuitGate: return "pick_circuit";
    case Action::Kind::PickChainGate: return "pick_chain";
    case Action::Kind::SelectGate: return "select";
    case Action::Kind::Pass: return "pass";
  }
  return "?";
}

json action_object(const Action& a) {
  json j{{"kind", kind_key(a.kind)}};
  if (a.kind != Action::Kind::Pass) j["gate"] = a.gate;
  return j;
}

Action action_from_object(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "pass") return Action::pass();
  const auto gate = j.at("gate").get<GateId>();
  if (kind == "pick_circuit") return Action::pick_circuit(gate);
  if (kind == "pick_chain") return Action::pick_chain(gate);
  if (kind == "select") return Action::select(gate);
  throw ValidationError("unknown action kind '" + kind + "'");
}

json observation(const Do1EnvState& s) {
  return json{{"t", s.t},
              {"phase", phase_name(s.phase)},
              {"chosen", s.chosen},
              {"horizon", s.horizon}};
}

}  // namespace

std::string action_json(const Action& a) { return action_object(a).dump(); }

Action action_from_json(const std::string& line) {
  try {
    return action_from_object(json::parse(line));
  } catch (const json::exception& e) {
    throw ParseError(1, e.what());
  }
}

Do1Env::Do1Env(std::shared_ptr<const CircuitConfig> cfg, std::size_t chain_len, std::ostream* log)
    : cfg_(std::move(cfg)), chain_len_(chain_len), log_(log), state_(env_reset(cfg_, chain_len_)) {}

const Do1EnvState& Do1Env::reset() {
  state_ = env_reset(cfg_, chain_len_);
  if (log_) {
    json j = observation(state_);
    j["event"] = "reset";
    j["chain_len"] = chain_len_;
    *log_ << j.dump() << '\n';
  }
  return state_;
}

StepResult Do1Env::step(const Action& a) {
  StepResult r = env_step(state_, a);
  state_ = r.state;
  if (log_) {
    json j = observation(state_);
    j["event"] = "step";
    j["action"] = action_object(a);
    j["reward"] = r.reward;
    j["done"] = r.done;
    *log_ << j.dump() << '\n';
  }
  return r;
}

double replay_episode(std::shared_ptr<const CircuitConfig> cfg, std::size_t chain_len,
                      std::istream& log) {
  Do1Env env(std::move(cfg), chain_len);
  env.reset();
  double total = 0.0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(log, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(line_no, e.what());
    }
    const std::string event = j.value("event", "");
    if (event == "reset") {
      if (j.value("chain_len", std::size_t{0}) != chain_len) {
        throw ValidationError("log was recorded with a different chain length");
      }
      env.reset();
      total = 0.0;
      continue;
    }
    if (event != "step") throw ParseError(line_no, "unknown event '" + event + "'");
    Action action;
    json logged;
    double logged_reward = 0.0;
    bool logged_done = false;
    try {
      action = action_from_object(j.at("action"));
      logged = json{{"t", j.at("t")},
                    {"phase", j.at("phase")},
                    {"chosen", j.at("chosen")},
                    {"horizon", j.at("horizon")}};
      logged_reward = j.at("reward").get<double>();
      logged_done = j.at("done").get<bool>();
    } catch (const json::exception& e) {
      throw ParseError(line_no, e.what());
    }
    const StepResult r = env.step(action);
    total += r.reward;
    if (observation(r.state) != logged || logged_reward != r.reward || logged_done != r.done) {
      throw ValidationError("replay diverges from the log at line " + std::to_string(line_no));
    }
  }
  return total;
}

}  // namespace serialbench::do1

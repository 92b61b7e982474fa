#include <gtest/gtest.h>

#include <sstream>

#include "oracles/oracles.hpp"
#include "serialbench/do1.hpp"
#include "serialbench/netlist.hpp"

namespace sb = serialbench;
namespace do1 = serialbench::do1;
using sb::Gate;
using sb::GateKind;

namespace {

std::shared_ptr<const do1::CircuitConfig> chain_config(std::size_t k) {
  return std::make_shared<const do1::CircuitConfig>(do1::make_chain(k), sb::Assignment{});
}

std::shared_ptr<const do1::CircuitConfig> shared(do1::CircuitConfig c) {
  return std::make_shared<const do1::CircuitConfig>(std::move(c));
}

double run_oracle_policy(const std::shared_ptr<const do1::CircuitConfig>& cfg, std::size_t chain) {
  auto s = do1::env_reset(cfg, chain);
  double total = 0;
  while (s.phase != do1::Phase::Done) {
    auto r = do1::env_step(s, do1::oracle_policy(s));
    total += r.reward;
    s = std::move(r.state);
  }
  return total;
}

}  // namespace

TEST(Do1, ChainDepths) {
  const auto chain = do1::make_chain(5);
  EXPECT_EQ(chain.gate_count(), 5u);
  const do1::CircuitConfig cfg(chain, sb::Assignment{});
  EXPECT_EQ(cfg.d1(), 5u);
  for (sb::GateId j = 1; j <= 5; ++j) {
    EXPECT_EQ(cfg.depth(j), j);
    EXPECT_TRUE(cfg.hot(j));
  }
  EXPECT_EQ(chain.circuit().gate(1).kind, GateKind::Or);
  EXPECT_EQ(chain.circuit().gate(2).kind, GateKind::And);
}

TEST(Do1, AlternationViolationsListed) {
  // and 2 reads and 1; not 3 is not an AND/OR gate.
  const sb::Circuit c({Gate{0, GateKind::Input, {}}, Gate{1, GateKind::And, {0}},
                       Gate{2, GateKind::And, {1}}, Gate{3, GateKind::Not, {2}}},
                      3);
  try {
    do1::AltCircuit alt(c);
    FAIL();
  } catch (const do1::AlternationError& e) {
    EXPECT_EQ(e.edges(), (std::vector<sb::Edge>{{2, 1}, {3, 3}}));
  }
}

TEST(Do1, AllColdIsZero) {
  const auto c = sb::parse_netlist("input 0\ninput 1\nand 2 0 1\nor 3 2 0\noutput 3\n");
  const do1::CircuitConfig cfg(do1::AltCircuit(c), sb::Assignment::from_string("00"));
  EXPECT_EQ(cfg.d1(), 0u);
  EXPECT_TRUE(do1::is_d1_zero(cfg));
  EXPECT_FALSE(cfg.deepest_hot());
  const auto ex = do1::extract_do1(cfg, do1::ExactValueOracle{});
  EXPECT_EQ(ex.estimate, 0u);
  EXPECT_TRUE(ex.zero_by_scan);
  EXPECT_EQ(ex.probes, 0u);
}

TEST(Do1, ScanSeesDeepSourceReaders) {
  // Gate 3 sits at depth 2 but reads input 1 directly; with only input 1 hot,
  // nothing at depth 1 is hot yet d1 = 2.
  const auto c = sb::parse_netlist("input 0\ninput 1\nand 2 0 1\nor 3 2 1\noutput 3\n");
  const do1::CircuitConfig cfg(do1::AltCircuit(c), sb::Assignment::from_string("01"));
  EXPECT_EQ(cfg.d1(), 2u);
  EXPECT_FALSE(do1::is_d1_zero(cfg));
}

TEST(Do1, D1MatchesOracle) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto cfg = do1::random_config(seed, 4, 1 + seed % 30, 3, 0.5);
    ASSERT_EQ(cfg.d1(), oracle::d1(cfg.circuit(), cfg.assignment().bits)) << seed;
    ASSERT_EQ(do1::is_d1_zero(cfg), cfg.d1() == 0) << seed;
  }
}

TEST(Do1, EnvFlow) {
  const auto cfg = chain_config(3);
  auto s = do1::env_reset(cfg, 2);
  EXPECT_EQ(s.horizon, 3u);
  EXPECT_EQ(s.phase, do1::Phase::ForcedChoice);
  EXPECT_THROW(do1::env_step(s, do1::Action::pass()), do1::IllegalActionError);
  EXPECT_THROW(do1::env_step(s, do1::Action::pick_chain(3)), do1::IllegalActionError);

  auto r = do1::env_step(s, do1::Action::pick_circuit(2));
  EXPECT_EQ(r.state.phase, do1::Phase::SelectingCircuit);
  EXPECT_EQ(r.state.t, 1u);
  EXPECT_THROW(do1::env_step(r.state, do1::Action::select(2)), do1::IllegalActionError);
  EXPECT_THROW(do1::env_step(r.state, do1::Action::pick_chain(1)), do1::IllegalActionError);
  r = do1::env_step(r.state, do1::Action::select(3));
  EXPECT_EQ(r.state.chosen, (std::vector<sb::GateId>{2, 3}));
  r = do1::env_step(r.state, do1::Action::pass());
  EXPECT_TRUE(r.done);
  EXPECT_EQ(r.reward, 3.0);
  EXPECT_THROW(do1::env_step(r.state, do1::Action::pass()), do1::IllegalActionError);
  EXPECT_THROW(do1::env_reset(cfg, 0), sb::ValidationError);
}

TEST(Do1, ColdChoiceScoresZero) {
  const auto c = sb::parse_netlist("input 0\ninput 1\nand 2 0 1\nor 3 2 1\noutput 3\n");
  auto cfg = shared(do1::CircuitConfig(do1::AltCircuit(c), sb::Assignment::from_string("01")));
  auto s = do1::env_reset(cfg, 1);
  auto r = do1::env_step(s, do1::Action::pick_circuit(2));  // cold
  EXPECT_EQ(do1::optimal_value(r.state), 0.0);
  r = do1::env_step(r.state, do1::Action::select(3));
  EXPECT_TRUE(r.done);
  EXPECT_EQ(r.reward, 0.0);
}

// Property: on small instances the oracle policy is optimal and earns
// max(d1, chain_len); optimal_value agrees with search from every reachable
// post-choice state.
TEST(Do1Property, OraclePolicyOptimal) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    auto cfg = shared(do1::random_config(seed, 3, 1 + seed % 8, 2, 0.6));
    ASSERT_LE(cfg->alt().gate_count(), 8u);
    for (std::size_t chain = 1; chain <= 8; chain += 3) {
      const auto s0 = do1::env_reset(cfg, chain);
      const double best = oracle::do1_best_return(s0);
      ASSERT_EQ(best, static_cast<double>(std::max<std::size_t>(cfg->d1(), chain)));
      ASSERT_EQ(run_oracle_policy(cfg, chain), best);
      ASSERT_EQ(do1::optimal_value(s0), best);
      for (sb::GateId g : cfg->alt().selectable()) {
        // optimal_value counts reward already paid, the search only what remains.
        const auto r1 = do1::env_step(s0, do1::Action::pick_circuit(g));
        ASSERT_EQ(do1::optimal_value(r1.state), r1.reward + oracle::do1_best_return(r1.state))
            << seed;
      }
    }
  }
}

TEST(Do1, ExtractionOnChain) {
  // d1 = 5 lies in [4, 8): switchover at l = 2.
  const do1::CircuitConfig cfg(do1::make_chain(5), sb::Assignment{});
  const auto ex = do1::extract_do1(cfg, do1::ExactValueOracle{});
  EXPECT_EQ(ex.m, 3);
  EXPECT_EQ(ex.estimate, 4u);
  EXPECT_EQ(ex.switchover, 2);
  EXPECT_EQ(ex.probes, (5u + 1) * (3 + 1));
  EXPECT_EQ(ex.circuit_preferred, (std::vector<bool>{true, true, true, false}));
}

TEST(Do1, ExtractionFullDepthGivesGateCount) {
  const do1::CircuitConfig cfg(do1::make_chain(4), sb::Assignment{});
  EXPECT_EQ(do1::extract_do1(cfg, do1::ExactValueOracle{}).estimate, 4u);
}

TEST(Do1, ProbeExponent) {
  EXPECT_EQ(do1::probe_exponent(1), 0);
  EXPECT_EQ(do1::probe_exponent(2), 1);
  EXPECT_EQ(do1::probe_exponent(5), 3);
  EXPECT_EQ(do1::probe_exponent(8), 3);
}

TEST(Do1, NoisyOracleRange) {
  const auto cfg = chain_config(6);
  const do1::NoisyValueOracle v(0.5, 9);
  auto s = do1::env_reset(cfg, 3);
  const auto s1 = do1::env_step(s, do1::Action::pick_circuit(4)).state;
  const double exact = do1::optimal_value(s1);
  const double noisy = v.value(s1);
  EXPECT_GE(noisy, 0.5 * exact);
  EXPECT_LE(noisy, exact);
  EXPECT_EQ(noisy, v.value(s1));
  EXPECT_THROW(do1::NoisyValueOracle(0.0, 1), sb::ValidationError);
}

TEST(Do1, LogReplay) {
  auto cfg = shared(do1::random_config(3, 4, 12, 3, 0.6));
  std::ostringstream log;
  do1::Do1Env env(cfg, 4, &log);
  auto s = env.reset();
  double total = 0;
  while (s.phase != do1::Phase::Done) {
    auto r = env.step(do1::oracle_policy(s));
    total += r.reward;
    s = r.state;
  }
  std::istringstream in(log.str());
  EXPECT_EQ(do1::replay_episode(cfg, 4, in), total);

  const std::string first = log.str().substr(0, log.str().find('\n'));
  EXPECT_NE(first.find("\"event\":\"reset\""), std::string::npos);

  std::istringstream bad("{\"event\":\"step\",\"action\":{\"kind\":\"bogus\"}}\n");
  EXPECT_THROW(do1::replay_episode(cfg, 4, bad), sb::Error);
}

TEST(Do1, ActionJsonRoundTrip) {
  for (const auto& a : {do1::Action::pick_circuit(3), do1::Action::pick_chain(2),
                        do1::Action::select(7), do1::Action::pass()}) {
    EXPECT_EQ(do1::action_from_json(do1::action_json(a)), a);
  }
}

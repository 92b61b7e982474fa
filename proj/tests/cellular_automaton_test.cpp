#include <gtest/gtest.h>

#include "oracles/oracles.hpp"
#include "serialbench/cellular_automaton.hpp"
#include "serialbench/error.hpp"
#include "serialbench/rng.hpp"

namespace sb = serialbench;
namespace ca = serialbench::ca;

namespace {

ca::Tape random_tape(std::uint64_t seed, std::size_t width) {
  sb::Rng rng(seed);
  ca::Tape t;
  t.cells.resize(width);
  for (auto& c : t.cells) c = rng.bernoulli(0.5) ? 1 : 0;
  return t;
}

}  // namespace

TEST(Ca, Rule110Step) {
  sb::CostMeter m;
  const auto out = ca::step(ca::Tape::from_string("00100"), ca::Rule(110), m);
  EXPECT_EQ(out.to_string(), "01100");
  EXPECT_EQ(m, (sb::CostMeter{5, 1}));
}

TEST(Ca, Rule0Clears) {
  sb::CostMeter m;
  EXPECT_EQ(ca::evolve(ca::Tape::from_string("111"), ca::Rule(0), 3, m).to_string(), "000");
}

TEST(Ca, Rule110EdgeSeesZero) {
  // 001 -> 1 for rule 110, so a lone cell at the right edge grows left.
  sb::CostMeter m;
  EXPECT_EQ(ca::step(ca::Tape::from_string("001"), ca::Rule(110), m).to_string(), "011");
}

TEST(Ca, BadInputs) {
  EXPECT_THROW(ca::Rule(256), sb::ValidationError);
  EXPECT_THROW(ca::Rule(-1), sb::ValidationError);
  EXPECT_THROW(ca::Tape::from_string(""), sb::ValidationError);
  EXPECT_THROW(ca::Tape::from_string("012"), sb::ValidationError);
  EXPECT_THROW(ca::compile_k(ca::Rule(110), 0), sb::ValidationError);
  EXPECT_THROW(ca::compile_k(ca::Rule(110), 13), sb::CapacityError);
}

TEST(Ca, TableSizes) {
  for (int k = 1; k <= 5; ++k) {
    EXPECT_EQ(ca::compile_k(ca::Rule(30), k).table_size(), std::uint64_t{1} << (2 * k + 1));
  }
}

TEST(Ca, CompiledTableMatchesWindow) {
  // table[b] is the centre of the 2k+1 window b after k unbounded steps.
  const ca::Rule r(110);
  const auto cr = ca::compile_k(r, 2);
  for (std::uint32_t b = 0; b < 32; ++b) {
    std::string w;
    for (int i = 4; i >= 0; --i) w += ((b >> i) & 1) ? '1' : '0';
    // Pad by k on each side so the window's own edges do not interfere.
    const auto wide = oracle::ca_evolve("00" + w + "00", 110, 2);
    ASSERT_EQ(cr.table[b], wide[4] - '0') << w;
  }
}

TEST(Ca, CompiledMatchesPlainAllRules) {
  for (int rule = 0; rule < 256; ++rule) {
    for (int k = 1; k <= 3; ++k) {
      const auto cr = ca::compile_k(ca::Rule(rule), k);
      for (std::uint64_t s = 0; s < 4; ++s) {
        for (std::size_t width : {1u, 2u, 5u, 17u}) {
          const auto t = random_tape(rule * 131 + s * 7 + width, width);
          sb::CostMeter m;
          const auto got = ca::step_compiled(t, cr, m);
          ASSERT_EQ(got.to_string(), oracle::ca_evolve(t.to_string(), rule, k))
              << "rule " << rule << " k " << k << " width " << width;
          ASSERT_EQ(m, (sb::CostMeter{width, 1}));
        }
      }
    }
  }
}

TEST(Ca, EvolveCompiledDepth) {
  const auto t = random_tape(5, 121);
  sb::CostMeter plain;
  const auto expect = ca::evolve(t, ca::Rule(110), 60, plain);
  EXPECT_EQ(plain.depth, 60u);
  for (int k = 1; k <= 4; ++k) {
    for (std::size_t steps : {0u, 1u, 7u, 60u}) {
      sb::CostMeter m;
      const auto got = ca::evolve_compiled(t, ca::Rule(110), k, steps, m);
      sb::CostMeter mp;
      ASSERT_EQ(got, ca::evolve(t, ca::Rule(110), steps, mp));
      ASSERT_EQ(m.depth, (steps + k - 1) / k);
    }
  }
}

TEST(Ca, CellAt) {
  const ca::Rule r(110);
  const auto init = ca::Tape::from_string("1");
  const auto frame = ca::centered_frame(init, 5);
  EXPECT_EQ(frame.to_string(), "000010000");
  const auto row = oracle::ca_evolve(frame.to_string(), 110, 5);
  for (std::size_t i = 0; i < frame.width(); ++i) {
    EXPECT_EQ(ca::cell_at(r, init, 5, i), row[i] - '0');
  }
  EXPECT_THROW(ca::cell_at(r, init, 5, 9), sb::ValidationError);
  // Padding split with the extra zero on the right.
  EXPECT_EQ(ca::centered_frame(ca::Tape::from_string("11"), 2).to_string(), "110");
  EXPECT_EQ(ca::centered_frame(ca::Tape::from_string("11"), 3).to_string(), "01100");
}

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace serialbench::derand {

using Symbol = std::uint32_t;
using InputWord = std::span<const Symbol>;

// f(x, s): a randomized decision procedure together with the function it is
// meant to compute. For every input at most a fraction error_bound() of seeds
// gives a wrong answer, with error_bound() < 1/2.
class RandomizedDecider {
 public:
  virtual ~RandomizedDecider() = default;
  virtual bool decide(InputWord x, std::uint64_t seed) const = 0;
  virtual bool truth(InputWord x) const = 0;
  virtual double error_bound() const = 0;
};

// Answers truth(x) except when a hash of (salt, x, seed) lands below p in
// [0, 1), so the error rate over uniformly drawn seeds is exactly p.
class CalibratedDecider final : public RandomizedDecider {
 public:
  using Truth = std::function<bool(InputWord)>;

  // Default ground truth is the parity of the symbol sum.
  explicit CalibratedDecider(double p, std::uint64_t salt = 0, Truth truth = {});

  bool decide(InputWord x, std::uint64_t seed) const override;
  bool truth(InputWord x) const override { return truth_(x); }
  double error_bound() const override { return p_; }

 private:
  double p_;
  std::uint64_t salt_;
  Truth truth_;
};

// k seeds, k odd so a majority always exists.
class SeedBundle {
 public:
  explicit SeedBundle(std::vector<std::uint64_t> seeds);
  const std::vector<std::uint64_t>& seeds() const noexcept { return seeds_; }
  std::size_t k() const noexcept { return seeds_.size(); }

  friend bool operator==(const SeedBundle&, const SeedBundle&) = default;

 private:
  std::vector<std::uint64_t> seeds_;
};

bool majority_vote(const RandomizedDecider& d, const SeedBundle& b, InputWord x);

// exp(-2 k (1/2 - p)^2): Hoeffding bound on the majority being wrong.
double hoeffding_bound(double p, std::size_t k);

// Smallest odd k with hoeffding_bound(p, k) <= delta. Requires 0 <= p < 1/2 and
// 0 < delta < 1 (delta = 1 is accepted and gives 1).
std::size_t hoeffding_k(double p, double delta);

// Odd k satisfying k >= (n ln(vocab) + ln(1/delta_all)) / (2 (1/2 - p)^2), the
// union bound over all vocab^n inputs. p = 0 needs no replication: k = 1.
std::size_t union_bound_k(double p, std::size_t n, std::size_t vocab_size, double delta_all);

inline constexpr std::uint64_t kDefaultInputBudget = std::uint64_t{1} << 20;

struct SeedSearchResult {
  bool success = false;
  std::size_t k = 0;
  std::size_t attempts = 0;
  std::vector<std::uint64_t> failures_per_attempt;  // wrong inputs per attempt
  std::vector<std::uint64_t> bundle;                // empty on failure
};

// Draws bundles of union_bound_k seeds from an mt19937_64 stream seeded with
// rng_seed and checks each against every one of the vocab^n inputs, returning
// the first bundle that is right everywhere. Throws CapacityError when vocab^n
// exceeds input_budget.
SeedSearchResult find_universal_seeds(const RandomizedDecider& d, std::size_t n,
                                      std::size_t vocab_size, double delta_all,
                                      std::uint64_t rng_seed, std::size_t max_attempts,
                                      std::uint64_t input_budget = kDefaultInputBudget);

// Number of length-n inputs on which the bundle's majority is wrong.
std::uint64_t count_bundle_errors(const RandomizedDecider& d, const SeedBundle& b, std::size_t n,
                                  std::size_t vocab_size);

// Mixed-radix decoding of index into a length-n word.
void decode_input(std::uint64_t index, std::size_t vocab_size, std::span<Symbol> out);

}  // namespace serialbench::derand

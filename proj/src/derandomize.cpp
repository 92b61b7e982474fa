#include "serialbench/derandomize.hpp"

#include <cmath>
#include <numeric>

#include "serialbench/error.hpp"
#include "serialbench/rng.hpp"

namespace serialbench::derand {

namespace {

bool parity_truth(InputWord x) {
  return std::accumulate(x.begin(), x.end(), std::uint64_t{0}) % 2 == 1;
}

std::size_t round_up_odd(double v) {
  auto k = static_cast<std::size_t>(std::max(1.0, std::ceil(v)));
  if (k % 2 == 0) ++k;
  return k;
}

void check_p(double p) {
  if (!(p >= 0.0 && p < 0.5)) throw ValidationError("error bound p must satisfy 0 <= p < 1/2");
}

std::uint64_t input_count(std::size_t n, std::size_t vocab, std::uint64_t budget) {
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (total > budget / vocab) {
      throw CapacityError(std::to_string(vocab) + "^" + std::to_string(n) +
                          " inputs exceed the budget of " + std::to_string(budget));
    }
    total *= vocab;
  }
  if (total > budget) throw CapacityError("input count exceeds budget");
  return total;
}

}  // namespace

CalibratedDecider::CalibratedDecider(double p, std::uint64_t salt, Truth truth)
    : p_(p), salt_(salt), truth_(truth ? std::move(truth) : Truth(parity_truth)) {
  check_p(p);
}

bool CalibratedDecider::decide(InputWord x, std::uint64_t seed) const {
  std::uint64_t h = hash_combine(salt_, x.size());
  for (Symbol s : x) h = hash_combine(h, s);
  h = hash_combine(h, seed);
  const bool flip = unit_interval(h) < p_;
  return truth_(x) != flip;
}

SeedBundle::SeedBundle(std::vector<std::uint64_t> seeds) : seeds_(std::move(seeds)) {
  if (seeds_.size() % 2 == 0) {
    throw ValidationError("seed bundle needs an odd number of seeds, got " +
                          std::to_string(seeds_.size()));
  }
}

bool majority_vote(const RandomizedDecider& d, const SeedBundle& b, InputWord x) {
  std::size_t ones = 0;
  for (std::uint64_t s : b.seeds()) ones += d.decide(x, s) ? 1 : 0;
  return 2 * ones > b.k();
}

double hoeffding_bound(double p, std::size_t k) {
  const double gap = 0.5 - p;
  return std::exp(-2.0 * static_cast<double>(k) * gap * gap);
}

std::size_t hoeffding_k(double p, double delta) {
  check_p(p);
  if (!(delta > 0.0 && delta <= 1.0)) throw ValidationError("delta must lie in (0, 1]");
  const double gap = 0.5 - p;
  std::size_t k = round_up_odd(std::log(1.0 / delta) / (2.0 * gap * gap));
  // The closed form can land one odd step off through rounding; settle it on
  // the bound itself.
  while (k > 1 && hoeffding_bound(p, k - 2) <= delta) k -= 2;
  while (hoeffding_bound(p, k) > delta) k += 2;
  return k;
}

std::size_t union_bound_k(double p, std::size_t n, std::size_t vocab_size, double delta_all) {
  check_p(p);
  if (vocab_size < 1) throw ValidationError("vocab_size must be >= 1");
  if (!(delta_all > 0.0 && delta_all < 1.0)) throw ValidationError("delta_all must lie in (0, 1)");
  if (p == 0.0) return 1;
  const double gap = 0.5 - p;
  const double need = (static_cast<double>(n) * std::log(static_cast<double>(vocab_size)) +
                       std::log(1.0 / delta_all)) /
                      (2.0 * gap * gap);
  return round_up_odd(need);
}

void decode_input(std::uint64_t index, std::size_t vocab_size, std::span<Symbol> out) {
  for (auto& s : out) {
    s = static_cast<Symbol>(index % vocab_size);
    index /= vocab_size;
  }
}

std::uint64_t count_bundle_errors(const RandomizedDecider& d, const SeedBundle& b, std::size_t n,
                                  std::size_t vocab_size) {
  const std::uint64_t total = input_count(n, vocab_size, kDefaultInputBudget);
  std::vector<Symbol> x(n);
  std::uint64_t wrong = 0;
  for (std::uint64_t i = 0; i < total; ++i) {
    decode_input(i, vocab_size, x);
    if (majority_vote(d, b, x) != d.truth(x)) ++wrong;
  }
  return wrong;
}

SeedSearchResult find_universal_seeds(const RandomizedDecider& d, std::size_t n,
                                      std::size_t vocab_size, double delta_all,
                                      std::uint64_t rng_seed, std::size_t max_attempts,
                                      std::uint64_t input_budget) {
  if (vocab_size < 1) throw ValidationError("vocab_size must be >= 1");
  const std::uint64_t total = input_count(n, vocab_size, input_budget);
  SeedSearchResult res;
  res.k = union_bound_k(d.error_bound(), n, vocab_size, delta_all);

  Rng rng(rng_seed);
  std::vector<Symbol> x(n);
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    std::vector<std::uint64_t> seeds(res.k);
    for (auto& s : seeds) s = rng.next();
    const SeedBundle bundle(std::move(seeds));

    // Inputs are checked independently; the loop does not stop at the first
    // miss so every attempt reports its full error count.
    std::uint64_t wrong = 0;
    for (std::uint64_t i = 0; i < total; ++i) {
      decode_input(i, vocab_size, x);
      if (majority_vote(d, bundle, x) != d.truth(x)) ++wrong;
    }
    ++res.attempts;
    res.failures_per_attempt.push_back(wrong);
    if (wrong == 0) {
      res.success = true;
      res.bundle = bundle.seeds();
      break;
    }
  }
  return res;
}

}  // namespace serialbench::derand

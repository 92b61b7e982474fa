#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "serialbench/cost_meter.hpp"

namespace serialbench::s5 {

// Permutation of {0,..,4}; images[i] is where i goes.
class Perm5 {
 public:
  Perm5() noexcept : images_{0, 1, 2, 3, 4} {}
  // Throws ValidationError unless images is a bijection on {0..4}.
  explicit Perm5(std::array<std::uint8_t, 5> images);

  static Perm5 identity() noexcept { return Perm5(); }
  // "10234" is the transposition (0 1).
  static Perm5 from_string(std::string_view s);
  std::string to_string() const;

  std::uint8_t operator()(std::uint8_t i) const { return images_.at(i); }
  const std::array<std::uint8_t, 5>& images() const noexcept { return images_; }

  Perm5 inverse() const noexcept;
  bool is_even() const noexcept;
  // Position of this permutation in the lexicographic order of all 120.
  int rank() const noexcept;

  friend bool operator==(const Perm5&, const Perm5&) = default;
  friend auto operator<=>(const Perm5&, const Perm5&) = default;

 private:
  std::array<std::uint8_t, 5> images_;
};

// (a o b)(i) = a(b(i)).
Perm5 compose(const Perm5& a, const Perm5& b) noexcept;

using Word = std::vector<Perm5>;

// Left-to-right product w[0] o w[1] o ... o w[n-1]; work = depth = n - 1.
Perm5 fold_serial(const Word& w, CostMeter& m);

// Balanced pairwise product. An odd element at the end of a level is carried
// up unchanged, so work = n - 1 and depth = ceil(log2 n).
Perm5 fold_tree(const Word& w, CostMeter& m);

// Orders of S5, [S5,S5], [[S5,S5],[S5,S5]], ... up to and including the first
// repeated term.
std::vector<std::size_t> derived_series();

// The groups themselves, as sorted element lists, in the same order.
std::vector<std::vector<Perm5>> derived_series_groups();

// All 120 elements in lexicographic order.
std::vector<Perm5> all_perms();

Word random_word(std::uint64_t seed, std::size_t n);

// One 5-digit image string per line.
std::string write_word(const Word& w);
Word parse_word(std::string_view text);

// log10 of 120^n, the row count of a lookup table mapping every length-n word
// to its product.
double memo_table_log10(std::size_t n) noexcept;

}  // namespace serialbench::s5

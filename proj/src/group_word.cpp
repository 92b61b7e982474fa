#include "serialbench/group_word.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "serialbench/error.hpp"
#include "serialbench/rng.hpp"

namespace serialbench::s5 {

Perm5::Perm5(std::array<std::uint8_t, 5> images) : images_(images) {
  std::array<bool, 5> hit{};
  for (auto v : images_) {
    if (v > 4 || hit[v]) throw ValidationError("not a permutation of {0..4}");
    hit[v] = true;
  }
}

Perm5 Perm5::from_string(std::string_view s) {
  if (s.size() != 5) throw ValidationError("permutation must have 5 digits, got '" + std::string(s) + "'");
  std::array<std::uint8_t, 5> im{};
  for (std::size_t i = 0; i < 5; ++i) {
    if (s[i] < '0' || s[i] > '4') {
      throw ValidationError("permutation digits must be 0..4, got '" + std::string(s) + "'");
    }
    im[i] = static_cast<std::uint8_t>(s[i] - '0');
  }
  return Perm5(im);
}

std::string Perm5::to_string() const {
  std::string s(5, '0');
  for (std::size_t i = 0; i < 5; ++i) s[i] = static_cast<char>('0' + images_[i]);
  return s;
}

Perm5 Perm5::inverse() const noexcept {
  Perm5 out;
  for (std::uint8_t i = 0; i < 5; ++i) out.images_[images_[i]] = i;
  return out;
}

bool Perm5::is_even() const noexcept {
  int inversions = 0;
  for (int i = 0; i < 5; ++i) {
    for (int j = i + 1; j < 5; ++j) inversions += images_[i] > images_[j];
  }
  return inversions % 2 == 0;
}

int Perm5::rank() const noexcept {
  static constexpr int kFactorial[] = {24, 6, 2, 1, 1};
  int r = 0;
  for (int i = 0; i < 5; ++i) {
    int smaller = 0;
    for (int j = i + 1; j < 5; ++j) smaller += images_[j] < images_[i];
    r += smaller * kFactorial[i];
  }
  return r;
}

Perm5 compose(const Perm5& a, const Perm5& b) noexcept {
  std::array<std::uint8_t, 5> im{};
  for (std::uint8_t i = 0; i < 5; ++i) im[i] = a.images()[b.images()[i]];
  return Perm5(im);
}

Perm5 fold_serial(const Word& w, CostMeter& m) {
  if (w.empty()) throw ValidationError("word must be non-empty");
  Perm5 acc = w.front();
  for (std::size_t i = 1; i < w.size(); ++i) acc = compose(acc, w[i]);
  m.charge(w.size() - 1, w.size() - 1);
  return acc;
}

Perm5 fold_tree(const Word& w, CostMeter& m) {
  if (w.empty()) throw ValidationError("word must be non-empty");
  Word level = w;
  std::uint64_t work = 0;
  std::uint64_t rounds = 0;
  while (level.size() > 1) {
    Word next;
    next.reserve((level.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < level.size(); i += 2) {
      next.push_back(compose(level[i], level[i + 1]));
      ++work;
    }
    if (level.size() % 2 == 1) next.push_back(level.back());
    level = std::move(next);
    ++rounds;
  }
  m.charge(work, rounds);
  return level.front();
}

std::vector<Perm5> all_perms() {
  std::array<std::uint8_t, 5> im{0, 1, 2, 3, 4};
  std::vector<Perm5> out;
  do {
    out.emplace_back(im);
  } while (std::next_permutation(im.begin(), im.end()));
  return out;
}

namespace {

// Subgroup generated by gens: closure under right multiplication by generators
// (enough in a finite group).
std::vector<Perm5> generated_subgroup(const std::vector<Perm5>& gens) {
  std::array<bool, 120> in{};
  std::vector<Perm5> members{Perm5::identity()};
  in[Perm5::identity().rank()] = true;
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (const Perm5& g : gens) {
      const Perm5 p = compose(members[i], g);
      if (!in[p.rank()]) {
        in[p.rank()] = true;
        members.push_back(p);
      }
    }
  }
  std::sort(members.begin(), members.end());
  return members;
}

std::vector<Perm5> commutator_subgroup(const std::vector<Perm5>& group) {
  std::set<Perm5> commutators;
  for (const Perm5& a : group) {
    for (const Perm5& b : group) {
      commutators.insert(compose(compose(a, b), compose(a.inverse(), b.inverse())));
    }
  }
  return generated_subgroup({commutators.begin(), commutators.end()});
}

}  // namespace

std::vector<std::vector<Perm5>> derived_series_groups() {
  std::vector<std::vector<Perm5>> series{all_perms()};
  for (;;) {
    auto next = commutator_subgroup(series.back());
    const bool stable = next == series.back();
    series.push_back(std::move(next));
    if (stable) break;
  }
  return series;
}

std::vector<std::size_t> derived_series() {
  std::vector<std::size_t> orders;
  for (const auto& g : derived_series_groups()) orders.push_back(g.size());
  return orders;
}

Word random_word(std::uint64_t seed, std::size_t n) {
  static const std::vector<Perm5> kAll = all_perms();
  Rng rng(seed);
  Word w;
  w.reserve(n);
  for (std::size_t i = 0; i < n; ++i) w.push_back(kAll[rng.below(kAll.size())]);
  return w;
}

std::string write_word(const Word& w) {
  std::string out;
  out.reserve(w.size() * 6);
  for (const Perm5& p : w) {
    out += p.to_string();
    out += '\n';
  }
  return out;
}

Word parse_word(std::string_view text) {
  Word w;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    try {
      w.push_back(Perm5::from_string(line));
    } catch (const ValidationError& e) {
      throw ParseError(line_no, e.what());
    }
  }
  if (w.empty()) throw ParseError(line_no, "word must contain at least one permutation");
  return w;
}

double memo_table_log10(std::size_t n) noexcept {
  return static_cast<double>(n) * std::log10(120.0);
}

}  // namespace serialbench::s5

#pragma once

// Bit-parallel truth tables over n <= 20 variables: bit p of the table is the
// function value on input pattern p (variable i = bit i of p).

#include <bit>
#include <cstdint>
#include <optional>
#include <vector>

#include "plcsynth/core.hpp"

namespace plcsynth::detail {

class TruthTable {
public:
  TruthTable() = default;
  TruthTable(unsigned nvars, bool value) : nvars_(nvars), words_(word_count(nvars), value ? ~0ULL : 0ULL) {
    trim();
  }

  static TruthTable variable(unsigned nvars, unsigned i) {
    static constexpr std::uint64_t kMasks[6] = {
        0xAAAAAAAAAAAAAAAAULL, 0xCCCCCCCCCCCCCCCCULL, 0xF0F0F0F0F0F0F0F0ULL,
        0xFF00FF00FF00FF00ULL, 0xFFFF0000FFFF0000ULL, 0xFFFFFFFF00000000ULL};
    TruthTable t(nvars, false);
    for (std::size_t w = 0; w < t.words_.size(); ++w) {
      if (i < 6)
        t.words_[w] = kMasks[i];
      else
        t.words_[w] = ((w >> (i - 6)) & 1U) != 0 ? ~0ULL : 0ULL;
    }
    t.trim();
    return t;
  }

  unsigned nvars() const { return nvars_; }
  std::uint64_t patterns() const { return 1ULL << nvars_; }

  bool get(std::uint64_t p) const { return ((words_[p >> 6] >> (p & 63U)) & 1U) != 0; }
  void set(std::uint64_t p, bool v) {
    if (v)
      words_[p >> 6] |= 1ULL << (p & 63U);
    else
      words_[p >> 6] &= ~(1ULL << (p & 63U));
  }

  bool any() const {
    for (auto w : words_)
      if (w != 0) return true;
    return false;
  }
  bool all() const { return !(~*this).any(); }

  std::optional<std::uint64_t> first_set() const {
    for (std::size_t w = 0; w < words_.size(); ++w)
      if (words_[w] != 0) return w * 64 + static_cast<std::uint64_t>(std::countr_zero(words_[w]));
    return std::nullopt;
  }

  /// Table of p -> f(p XOR 2^i).
  TruthTable flip(unsigned i) const {
    TruthTable r = *this;
    if (i < 6) {
      const unsigned s = 1U << i;
      const std::uint64_t m = variable(6, i).words_[0];
      for (auto &w : r.words_) w = ((w & m) >> s) | ((w & ~m) << s);
    } else {
      const std::size_t stride = std::size_t{1} << (i - 6);
      for (std::size_t w = 0; w < r.words_.size(); ++w) r.words_[w] = words_[w ^ stride];
    }
    r.trim();
    return r;
  }

  TruthTable operator~() const {
    TruthTable r = *this;
    for (auto &w : r.words_) w = ~w;
    r.trim();
    return r;
  }
  TruthTable &operator&=(const TruthTable &o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }
  TruthTable &operator|=(const TruthTable &o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  TruthTable &operator^=(const TruthTable &o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= o.words_[i];
    return *this;
  }
  friend TruthTable operator&(TruthTable a, const TruthTable &b) { return a &= b; }
  friend TruthTable operator|(TruthTable a, const TruthTable &b) { return a |= b; }
  friend TruthTable operator^(TruthTable a, const TruthTable &b) { return a ^= b; }
  friend bool operator==(const TruthTable &, const TruthTable &) = default;

private:
  static std::size_t word_count(unsigned n) { return n <= 6 ? 1 : std::size_t{1} << (n - 6); }
  void trim() {
    if (nvars_ < 6) words_[0] &= (1ULL << (1U << nvars_)) - 1;
  }

  unsigned nvars_ = 0;
  std::vector<std::uint64_t> words_{0};
};

template <class Lookup>
TruthTable eval_table(const Expr &e, unsigned nvars, Lookup &&lookup) {
  switch (e.kind()) {
  case ExprKind::Const: return TruthTable(nvars, e.value());
  case ExprKind::Var: return lookup(e.name());
  case ExprKind::Not: return ~eval_table(e.operand(), nvars, lookup);
  case ExprKind::And: return eval_table(e.lhs(), nvars, lookup) & eval_table(e.rhs(), nvars, lookup);
  case ExprKind::Or: return eval_table(e.lhs(), nvars, lookup) | eval_table(e.rhs(), nvars, lookup);
  case ExprKind::Xor: return eval_table(e.lhs(), nvars, lookup) ^ eval_table(e.rhs(), nvars, lookup);
  }
  return TruthTable(nvars, false);
}

} // namespace plcsynth::detail

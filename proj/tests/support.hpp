#pragma once

// Random generators and brute-force oracles shared by the unit suites and
// the acceptance binary. Nothing here calls the engine.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "plcsynth/core.hpp"
#include "plcsynth/sat.hpp"
#include "plcsynth/spec.hpp"

namespace plcsynth::oracle {

using Rng = std::mt19937_64;

inline int pick(Rng &rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline bool coin(Rng &rng) { return pick(rng, 0, 1) == 1; }

inline std::vector<Identifier> names(const std::string &prefix, int n) {
  std::vector<Identifier> out;
  for (int i = 0; i < n; ++i)
    out.emplace_back(prefix + std::to_string(i));
  return out;
}

inline Expr random_expr(Rng &rng, const std::vector<Identifier> &leaves, int depth) {
  if (depth == 0 || leaves.empty() || pick(rng, 0, 3) == 0) {
    if (leaves.empty() || pick(rng, 0, 9) == 0)
      return Expr::constant(coin(rng));
    return Expr::var(leaves[pick(rng, 0, static_cast<int>(leaves.size()) - 1)]);
  }
  switch (pick(rng, 0, 3)) {
  case 0: return Expr::negate(random_expr(rng, leaves, depth - 1));
  case 1: return Expr::conj(random_expr(rng, leaves, depth - 1), random_expr(rng, leaves, depth - 1));
  case 2: return Expr::disj(random_expr(rng, leaves, depth - 1), random_expr(rng, leaves, depth - 1));
  default:
    return Expr::exclusive(random_expr(rng, leaves, depth - 1), random_expr(rng, leaves, depth - 1));
  }
}

struct BlockShape {
  int inputs = 3;
  int outputs = 1;
  int states = 0;
  int temps = 0;
  int statements = 3;
  int depth = 3;
};

// Statements write temps, outputs and states; right-hand sides read inputs,
// states and whatever temps or outputs were already written.
inline Block random_block(Rng &rng, const BlockShape &shape, Lang lang = Lang::ST) {
  Block b{"Rand", {}, {}, lang};
  auto in = names("i", shape.inputs), out = names("o", shape.outputs),
       st = names("s", shape.states), tmp = names("t", shape.temps);
  for (auto &n : in) b.interface.add({n, Direction::Input});
  for (auto &n : out) b.interface.add({n, Direction::Output});
  for (auto &n : st) b.interface.add({n, Direction::State});
  for (auto &n : tmp) b.interface.add({n, Direction::Temp});
  std::vector<Identifier> targets;
  targets.insert(targets.end(), out.begin(), out.end());
  targets.insert(targets.end(), st.begin(), st.end());
  targets.insert(targets.end(), tmp.begin(), tmp.end());
  std::vector<Identifier> readable = in;
  readable.insert(readable.end(), st.begin(), st.end());
  std::set<Identifier> written;
  for (int s = 0; s < shape.statements; ++s) {
    Identifier t = targets[pick(rng, 0, static_cast<int>(targets.size()) - 1)];
    Expr rhs = random_expr(rng, readable, pick(rng, 1, shape.depth));
    b.body.push_back({t, rhs});
    if (written.insert(t).second &&
        b.interface.find(t)->direction != Direction::State)
      readable.push_back(t);
  }
  return b;
}

/// The block's interface without temps, as a constraint list declares it.
inline BlockInterface externals(const BlockInterface &i) {
  BlockInterface out;
  for (const auto &d : i.decls())
    if (d.direction != Direction::Temp)
      out.add(d);
  return out;
}

/// Every pair of input patterns over two cycles, from every initial state.
/// Outputs, final states and per-cycle outputs must agree.
inline bool same_behavior_2cycles(const Block &a, const Block &b) {
  const auto in = a.interface.inputs();
  const auto st = a.interface.states();
  const std::uint64_t ni = 1ULL << in.size(), ns = 1ULL << st.size();
  for (std::uint64_t s0 = 0; s0 < ns; ++s0)
    for (std::uint64_t p = 0; p < ni; ++p)
      for (std::uint64_t q = 0; q < ni; ++q) {
        std::vector<Assignment> trace{pattern_assignment(in, p), pattern_assignment(in, q)};
        const Assignment init = pattern_assignment(st, s0);
        if (simulate(a, trace, init) != simulate(b, trace, init))
          return false;
      }
  return true;
}

/// Exhaustive satisfiability of a CNF over its declared variables.
inline std::optional<std::vector<bool>> brute_force_sat(const sat::CnfFormula &f) {
  if (f.has_empty_clause())
    return std::nullopt;
  const std::uint32_t n = f.num_vars();
  for (std::uint64_t m = 0; m < (1ULL << n); ++m) {
    bool ok = true;
    for (const auto &c : f.clauses()) {
      bool sat = false;
      for (auto l : c)
        if ((((m >> (l.var().index - 1)) & 1U) != 0) != l.negated()) {
          sat = true;
          break;
        }
      if (!sat) {
        ok = false;
        break;
      }
    }
    if (ok) {
      std::vector<bool> model(n + 1);
      for (std::uint32_t v = 1; v <= n; ++v)
        model[v] = ((m >> (v - 1)) & 1U) != 0;
      return model;
    }
  }
  return std::nullopt;
}

inline sat::CnfFormula random_3cnf(Rng &rng, int vars, int clauses) {
  sat::CnfFormula f;
  f.reserve_vars(static_cast<std::uint32_t>(vars));
  for (int c = 0; c < clauses; ++c) {
    std::vector<sat::Lit> cl;
    for (int k = 0; k < 3; ++k)
      cl.emplace_back(sat::Var{static_cast<std::uint32_t>(pick(rng, 1, vars))}, coin(rng));
    f.add_clause(cl);
  }
  return f;
}

inline bool model_satisfies(const sat::CnfFormula &f, const sat::SatResult &r) {
  for (const auto &c : f.clauses())
    if (std::none_of(c.begin(), c.end(), [&](sat::Lit l) { return r.value(l); }))
      return false;
  return true;
}

// Truth tables over at most 3 variables packed in one byte (bit p is the
// value at pattern p).
struct PartialTable {
  std::uint8_t care = 0;
  std::uint8_t value = 0;
  bool accepts(std::uint8_t f) const { return ((f ^ value) & care) == 0; }
};

inline std::uint8_t var_table(int i) {
  std::uint8_t t = 0;
  for (int p = 0; p < 8; ++p)
    if ((p >> i) & 1)
      t |= static_cast<std::uint8_t>(1U << p);
  return t;
}

namespace detail {

inline bool extend_search(std::vector<std::uint8_t> &pool, std::size_t fixed, int budget,
                          const PartialTable &want,
                          std::unordered_set<std::string> &seen) {
  // One more node: try every operator over the pool.
  auto candidates = [&](auto &&visit) {
    for (std::size_t x = 0; x < pool.size(); ++x) {
      if (visit(static_cast<std::uint8_t>(~pool[x])))
        return true;
      for (std::size_t y = x + 1; y < pool.size(); ++y)
        if (visit(pool[x] & pool[y]) || visit(pool[x] | pool[y]) || visit(pool[x] ^ pool[y]))
          return true;
    }
    return false;
  };
  if (budget == 1)
    return candidates([&](std::uint8_t f) { return want.accepts(f); });
  return candidates([&](std::uint8_t f) {
    if (want.accepts(f))
      return true;
    if (std::find(pool.begin(), pool.end(), f) != pool.end())
      return false;
    pool.push_back(f);
    std::string key(pool.begin() + static_cast<std::ptrdiff_t>(fixed), pool.end());
    std::sort(key.begin(), key.end());
    bool found = false;
    if (seen.insert(key).second)
      found = extend_search(pool, fixed, budget - 1, want, seen);
    pool.pop_back();
    return found;
  });
}

} // namespace detail

/// Whether some straight-line program with at most `nodes` operator nodes
/// (NOT, AND, OR, XOR over inputs, constants and earlier nodes) computes a
/// function the table accepts. Zero nodes means a bare input or constant.
inline bool exists_program(int nvars, const PartialTable &want, int nodes) {
  std::vector<std::uint8_t> pool{0x00, 0xFF};
  for (int i = 0; i < nvars; ++i)
    pool.push_back(var_table(i));
  if (std::any_of(pool.begin(), pool.end(), [&](std::uint8_t f) { return want.accepts(f); }))
    return true;
  if (nodes == 0)
    return false;
  std::unordered_set<std::string> seen;
  return detail::extend_search(pool, pool.size(), nodes, want, seen);
}

/// The block's single output as a table over its first three inputs.
inline std::uint8_t block_table(const Block &b) {
  const auto in = b.interface.inputs();
  const auto out = b.interface.outputs().at(0);
  std::uint8_t t = 0;
  for (std::uint64_t p = 0; p < 8; ++p)
    if (run_cycle(b, default_state(b.interface), pattern_assignment(in, p)).outputs.get(out))
      t |= static_cast<std::uint8_t>(1U << p);
  return t;
}

/// Constraint list with one row per cared-for pattern of a 3-input table.
inline ConstraintList table_list(const PartialTable &t) {
  ConstraintList l{"T", Mode::Generate, {}, {}};
  for (const char *n : {"a", "b", "c"})
    l.interface.add({n, Direction::Input});
  l.interface.add({"y", Direction::Output});
  const auto in = l.interface.inputs();
  for (int p = 0; p < 8; ++p) {
    if (((t.care >> p) & 1) == 0)
      continue;
    TruthTableRow row;
    for (int i = 0; i < 3; ++i)
      row.inputs[in[i]] = ((p >> i) & 1) ? TriValue::True : TriValue::False;
    row.outputs["y"] = ((t.value >> p) & 1) ? TriValue::True : TriValue::False;
    l.constraints.emplace_back(std::move(row));
  }
  return l;
}

/// Textbook two-pass sample standard deviation.
inline double sample_stddev(const std::vector<double> &xs) {
  long double mean = 0;
  for (double x : xs)
    mean += x;
  mean /= static_cast<long double>(xs.size());
  long double ss = 0;
  for (double x : xs)
    ss += (x - mean) * (x - mean);
  return static_cast<double>(std::sqrt(ss / static_cast<long double>(xs.size() - 1)));
}

} // namespace plcsynth::oracle

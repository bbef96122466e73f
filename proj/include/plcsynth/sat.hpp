#pragma once

// Propositional decision procedure: CNF formulas, Tseitin encoding of
// Boolean expressions, and a CDCL solver with assumptions.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "plcsynth/core.hpp"

namespace plcsynth::sat {

/// 1-based variable index.
struct Var {
  std::uint32_t index = 0;

  friend auto operator<=>(const Var &, const Var &) = default;
};

class Lit {
public:
  Lit() = default;
  Lit(Var v, bool negated) : code_(2 * v.index + (negated ? 1U : 0U)) {}

  static Lit positive(Var v) { return Lit(v, false); }
  static Lit from_dimacs(int value);

  Var var() const { return Var{code_ >> 1}; }
  bool negated() const { return (code_ & 1U) != 0; }
  std::uint32_t code() const { return code_; }
  int dimacs() const { return negated() ? -static_cast<int>(var().index) : static_cast<int>(var().index); }

  Lit operator~() const {
    Lit l;
    l.code_ = code_ ^ 1U;
    return l;
  }

  friend auto operator<=>(const Lit &, const Lit &) = default;

private:
  std::uint32_t code_ = 0;
};

using Clause = std::vector<Lit>;

/// Clause set over variables 1..num_vars. Adding an empty clause marks the
/// formula unsatisfiable instead of storing it.
class CnfFormula {
public:
  Var new_var() { return Var{++num_vars_}; }
  void reserve_vars(std::uint32_t n) { num_vars_ = std::max(num_vars_, n); }

  void add_clause(std::span<const Lit> lits);
  void add_clause(std::initializer_list<Lit> lits) {
    add_clause(std::span<const Lit>(lits.begin(), lits.size()));
  }

  std::uint32_t num_vars() const { return num_vars_; }
  const std::vector<Clause> &clauses() const { return clauses_; }
  bool has_empty_clause() const { return empty_clause_; }

private:
  std::uint32_t num_vars_ = 0;
  std::vector<Clause> clauses_;
  bool empty_clause_ = false;
};

std::string to_dimacs(const CnfFormula &f);

class SatResult {
public:
  static SatResult sat(std::vector<bool> model) { return SatResult(true, std::move(model)); }
  static SatResult unsat() { return SatResult(false, {}); }

  bool is_sat() const { return sat_; }
  bool value(Var v) const { return model_.at(v.index); }
  bool value(Lit l) const { return value(l.var()) != l.negated(); }
  /// Index 0 is unused.
  const std::vector<bool> &model() const { return model_; }

  friend bool operator==(const SatResult &, const SatResult &) = default;

private:
  SatResult(bool sat, std::vector<bool> model) : sat_(sat), model_(std::move(model)) {}
  bool sat_;
  std::vector<bool> model_;
};

/// Appends Tseitin definitions to a formula. Gate helpers fold constants and
/// trivial operands, so literals may be returned without fresh variables.
class TseitinEncoder {
public:
  explicit TseitinEncoder(CnfFormula &f) : f_(f) {}

  Lit true_lit();
  Lit false_lit() { return ~true_lit(); }
  Lit constant(bool v) { return v ? true_lit() : false_lit(); }

  Lit land(Lit a, Lit b);
  Lit lor(Lit a, Lit b) { return ~land(~a, ~b); }
  Lit lxor(Lit a, Lit b);
  Lit land(std::span<const Lit> ls);
  Lit lor(std::span<const Lit> ls);

  template <class Lookup>
  Lit encode(const Expr &e, Lookup &&lookup) {
    switch (e.kind()) {
    case ExprKind::Const: return constant(e.value());
    case ExprKind::Var: return lookup(e.name());
    case ExprKind::Not: return ~encode(e.operand(), lookup);
    case ExprKind::And: return land(encode(e.lhs(), lookup), encode(e.rhs(), lookup));
    case ExprKind::Or: return lor(encode(e.lhs(), lookup), encode(e.rhs(), lookup));
    case ExprKind::Xor: return lxor(encode(e.lhs(), lookup), encode(e.rhs(), lookup));
    }
    return false_lit();
  }

  CnfFormula &formula() { return f_; }

private:
  bool is_const(Lit l) const { return true_.has_value() && l.var() == true_->var(); }

  CnfFormula &f_;
  std::optional<Lit> true_;
};

struct TseitinResult {
  CnfFormula formula;
  Lit root;
};

/// Equisatisfiable encoding of `root`; asserting `root` constrains the
/// expression to true. Throws UnboundVariable for names missing in the map.
TseitinResult tseitin(const Expr &root, const std::map<Identifier, Var> &var_map);

struct SolverOptions {
  std::uint64_t seed = 0;
  /// Luby restarts; the engine turns them on.
  bool restarts = false;
};

struct SolverStats {
  std::uint64_t decisions = 0;
  std::uint64_t propagations = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t learned = 0;
};

/// Incremental CDCL solver (first-UIP learning, watched literals, VSIDS with
/// phase saving). Before any conflict the decision order is by lowest index
/// with polarity false; a nonzero seed flips the initial polarity of a
/// seed-determined subset of variables. Not thread-safe; use one instance
/// per execution context.
class Solver {
public:
  explicit Solver(SolverOptions opts = {});
  ~Solver();
  Solver(Solver &&) noexcept;
  Solver &operator=(Solver &&) noexcept;

  Var new_var();
  void reserve_vars(std::uint32_t n);
  std::uint32_t num_vars() const;

  void add_clause(std::span<const Lit> lits);
  void add_clause(std::initializer_list<Lit> lits) {
    add_clause(std::span<const Lit>(lits.begin(), lits.size()));
  }
  /// Add the clauses of `f` that were not yet added by a previous call with
  /// the same growing formula.
  void sync(const CnfFormula &f);

  SatResult solve(std::span<const Lit> assumptions = {});
  SatResult solve(std::initializer_list<Lit> assumptions) {
    return solve(std::span<const Lit>(assumptions.begin(), assumptions.size()));
  }

  const SolverStats &stats() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

SatResult solve(const CnfFormula &f, std::span<const Lit> assumptions = {}, std::uint64_t seed = 0);

} // namespace plcsynth::sat

#pragma once

// Domain model for PLC blocks: interface declarations, Boolean expression
// trees, straight-line statement bodies, and the reference scan-cycle
// simulator every other module is checked against.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "plcsynth/error.hpp"

namespace plcsynth {

class Identifier {
public:
  static constexpr std::size_t kMaxLength = 64;

  explicit Identifier(std::string text);
  Identifier(const char *text) : Identifier(std::string(text)) {}

  static bool is_valid(std::string_view text);

  const std::string &str() const { return text_; }

  friend bool operator==(const Identifier &, const Identifier &) = default;
  friend auto operator<=>(const Identifier &, const Identifier &) = default;

private:
  std::string text_;
};

enum class Direction : std::uint8_t { Input, Output, State, Temp };
enum class DataType : std::uint8_t { Bool };
enum class Lang : std::uint8_t { ST, IL };

std::string_view to_string(Direction d);
std::string_view to_string(Lang l);

struct VarDecl {
  Identifier name;
  Direction direction;
  DataType dtype = DataType::Bool;

  friend bool operator==(const VarDecl &, const VarDecl &) = default;
};

/// Ordered variable declarations. Declarations are kept grouped by
/// direction (inputs, outputs, state, temps); order within a group is the
/// order of insertion.
class BlockInterface {
public:
  BlockInterface() = default;
  explicit BlockInterface(std::vector<VarDecl> decls);

  void add(VarDecl decl);

  const std::vector<VarDecl> &decls() const { return decls_; }
  const VarDecl *find(const Identifier &name) const;
  bool contains(const Identifier &name) const { return find(name) != nullptr; }

  std::vector<Identifier> names(Direction d) const;
  std::vector<Identifier> inputs() const { return names(Direction::Input); }
  std::vector<Identifier> outputs() const { return names(Direction::Output); }
  std::vector<Identifier> states() const { return names(Direction::State); }
  std::vector<Identifier> temps() const { return names(Direction::Temp); }

  /// Same inputs, outputs and state variables regardless of order; temps
  /// are internal and ignored.
  bool same_externals(const BlockInterface &other) const;

  friend bool operator==(const BlockInterface &, const BlockInterface &) = default;

private:
  std::vector<VarDecl> decls_;
};

enum class ExprKind : std::uint8_t { Const, Var, Not, And, Or, Xor };

/// Immutable Boolean expression tree with value semantics. Nodes are shared
/// between copies.
class Expr {
public:
  static constexpr std::size_t kMaxDepth = 64;

  static Expr constant(bool value);
  static Expr var(Identifier name);
  static Expr negate(Expr operand);
  static Expr binary(ExprKind kind, Expr lhs, Expr rhs);
  static Expr conj(Expr lhs, Expr rhs) { return binary(ExprKind::And, std::move(lhs), std::move(rhs)); }
  static Expr disj(Expr lhs, Expr rhs) { return binary(ExprKind::Or, std::move(lhs), std::move(rhs)); }
  static Expr exclusive(Expr lhs, Expr rhs) { return binary(ExprKind::Xor, std::move(lhs), std::move(rhs)); }

  ExprKind kind() const;
  bool is_leaf() const { return kind() == ExprKind::Const || kind() == ExprKind::Var; }
  bool is_binary() const;

  bool value() const;                ///< Const only.
  const Identifier &name() const;    ///< Var only.
  const Expr &operand() const;       ///< Not only.
  const Expr &lhs() const;           ///< binary only.
  const Expr &rhs() const;           ///< binary only.

  std::size_t size() const;
  std::size_t depth() const;

  void collect_vars(std::set<Identifier> &out) const;
  std::set<Identifier> vars() const;

  friend bool operator==(const Expr &a, const Expr &b);

private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Conjunction of a list; the empty conjunction is TRUE.
Expr conj_all(std::span<const Expr> terms);
/// Disjunction of a list; the empty disjunction is FALSE.
Expr disj_all(std::span<const Expr> terms);

/// Replace variables by expressions (missing names stay untouched).
Expr substitute(const Expr &e, const std::map<Identifier, Expr> &bindings);
Expr rename(const Expr &e, const std::map<Identifier, Identifier> &renaming);

struct Statement {
  Identifier target;
  Expr rhs;

  friend bool operator==(const Statement &, const Statement &) = default;
};

struct Block {
  Identifier name;
  BlockInterface interface;
  std::vector<Statement> body;
  Lang lang = Lang::ST;

  friend bool operator==(const Block &, const Block &) = default;
};

/// Number of operator nodes in the body, but at least 1 for a nonempty
/// body. This is the block's size in synthesis slots.
std::size_t operator_count(const Block &block);

/// Static well-formedness: every variable resolves, no statement targets an
/// input, and every temp is written before it is read.
/// Throws TypeError or UnassignedTemp.
void check_block(const Block &block);

/// Valuation over an explicit set of names.
class Assignment {
public:
  Assignment() = default;
  Assignment(std::initializer_list<std::pair<const Identifier, bool>> init) : values_(init) {}

  void set(const Identifier &name, bool value) { values_[name] = value; }
  bool get(const Identifier &name) const;
  std::optional<bool> find(const Identifier &name) const;
  bool contains(const Identifier &name) const { return values_.count(name) != 0; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  /// Space-separated `name=0|1` pairs in name order.
  std::string to_string() const;

  friend bool operator==(const Assignment &, const Assignment &) = default;
  friend auto operator<=>(const Assignment &, const Assignment &) = default;

private:
  std::map<Identifier, bool> values_;
};

bool eval_expr(const Expr &expr, const Assignment &env);

struct CycleResult {
  Assignment outputs;
  Assignment next_state;
};

CycleResult run_cycle(const Block &block, const Assignment &state, const Assignment &inputs);

/// Final environment of one scan cycle: inputs, outputs, state after the
/// cycle and every temp that was written.
Assignment run_cycle_env(const Block &block, const Assignment &state, const Assignment &inputs);

struct TraceCycle {
  Assignment inputs;
  Assignment outputs;
  Assignment state_after;

  friend bool operator==(const TraceCycle &, const TraceCycle &) = default;
};

struct Trace {
  std::vector<TraceCycle> cycles;

  friend bool operator==(const Trace &, const Trace &) = default;
};

Trace simulate(const Block &block, std::span<const Assignment> input_trace, const Assignment &init_state);

/// All-false valuation of the block's state variables.
Assignment default_state(const BlockInterface &iface);

/// Valuation of `names` taken from the bits of `pattern` (bit i -> names[i]).
Assignment pattern_assignment(std::span<const Identifier> names, std::uint64_t pattern);

} // namespace plcsynth

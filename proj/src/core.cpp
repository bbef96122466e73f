#include "plcsynth/core.hpp"

#include <algorithm>
#include <sstream>
#include <variant>

namespace plcsynth {

// ---------------------------------------------------------------------------
// Identifier

Identifier::Identifier(std::string text) : text_(std::move(text)) {
  if (!is_valid(text_))
    throw InvalidIdentifier(text_);
}

bool Identifier::is_valid(std::string_view text) {
  if (text.empty() || text.size() > kMaxLength)
    return false;
  auto alpha = [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
  };
  if (!alpha(text[0]))
    return false;
  return std::all_of(text.begin() + 1, text.end(), [&](char c) {
    return alpha(c) || (c >= '0' && c <= '9');
  });
}

std::string_view to_string(Direction d) {
  switch (d) {
  case Direction::Input: return "input";
  case Direction::Output: return "output";
  case Direction::State: return "state";
  case Direction::Temp: return "temp";
  }
  return "?";
}

std::string_view to_string(Lang l) { return l == Lang::ST ? "ST" : "IL"; }

// ---------------------------------------------------------------------------
// BlockInterface

BlockInterface::BlockInterface(std::vector<VarDecl> decls) {
  for (auto &d : decls)
    add(std::move(d));
}

void BlockInterface::add(VarDecl decl) {
  if (contains(decl.name))
    throw TypeError("duplicate declaration of '" + decl.name.str() + "'");
  auto pos = std::find_if(decls_.begin(), decls_.end(), [&](const VarDecl &d) {
    return d.direction > decl.direction;
  });
  decls_.insert(pos, std::move(decl));
}

const VarDecl *BlockInterface::find(const Identifier &name) const {
  for (const auto &d : decls_)
    if (d.name == name)
      return &d;
  return nullptr;
}

std::vector<Identifier> BlockInterface::names(Direction dir) const {
  std::vector<Identifier> out;
  for (const auto &d : decls_)
    if (d.direction == dir)
      out.push_back(d.name);
  return out;
}

bool BlockInterface::same_externals(const BlockInterface &other) const {
  auto externals = [](const BlockInterface &i) {
    std::set<std::pair<Identifier, Direction>> s;
    for (const auto &d : i.decls())
      if (d.direction != Direction::Temp)
        s.emplace(d.name, d.direction);
    return s;
  };
  return externals(*this) == externals(other);
}

// ---------------------------------------------------------------------------
// Expr

struct Expr::Node {
  ExprKind kind;
  bool value = false;
  std::optional<Identifier> name;
  std::vector<Expr> children;
  std::size_t size = 1;
  std::size_t depth = 1;
};

Expr Expr::constant(bool value) {
  static const Expr t(std::make_shared<const Node>(Node{ExprKind::Const, true, {}, {}}));
  static const Expr f(std::make_shared<const Node>(Node{ExprKind::Const, false, {}, {}}));
  return value ? t : f;
}

Expr Expr::var(Identifier name) {
  return Expr(std::make_shared<const Node>(Node{ExprKind::Var, false, std::move(name), {}}));
}

Expr Expr::negate(Expr operand) {
  Node n{ExprKind::Not, false, {}, {}};
  n.size = operand.size() + 1;
  n.depth = operand.depth() + 1;
  if (n.depth > kMaxDepth)
    throw TypeError("expression nesting exceeds " + std::to_string(kMaxDepth));
  n.children.push_back(std::move(operand));
  return Expr(std::make_shared<const Node>(std::move(n)));
}

Expr Expr::binary(ExprKind kind, Expr lhs, Expr rhs) {
  if (kind != ExprKind::And && kind != ExprKind::Or && kind != ExprKind::Xor)
    throw std::invalid_argument("Expr::binary: not a binary operator");
  Node n{kind, false, {}, {}};
  n.size = lhs.size() + rhs.size() + 1;
  n.depth = std::max(lhs.depth(), rhs.depth()) + 1;
  if (n.depth > kMaxDepth)
    throw TypeError("expression nesting exceeds " + std::to_string(kMaxDepth));
  n.children.push_back(std::move(lhs));
  n.children.push_back(std::move(rhs));
  return Expr(std::make_shared<const Node>(std::move(n)));
}

ExprKind Expr::kind() const { return node_->kind; }
bool Expr::is_binary() const {
  auto k = kind();
  return k == ExprKind::And || k == ExprKind::Or || k == ExprKind::Xor;
}
bool Expr::value() const { return node_->value; }
const Identifier &Expr::name() const { return *node_->name; }
const Expr &Expr::operand() const { return node_->children.at(0); }
const Expr &Expr::lhs() const { return node_->children.at(0); }
const Expr &Expr::rhs() const { return node_->children.at(1); }
std::size_t Expr::size() const { return node_->size; }
std::size_t Expr::depth() const { return node_->depth; }

void Expr::collect_vars(std::set<Identifier> &out) const {
  if (kind() == ExprKind::Var)
    out.insert(name());
  for (const auto &c : node_->children)
    c.collect_vars(out);
}

std::set<Identifier> Expr::vars() const {
  std::set<Identifier> s;
  collect_vars(s);
  return s;
}

bool operator==(const Expr &a, const Expr &b) {
  if (a.node_ == b.node_)
    return true;
  if (a.kind() != b.kind() || a.size() != b.size())
    return false;
  switch (a.kind()) {
  case ExprKind::Const: return a.value() == b.value();
  case ExprKind::Var: return a.name() == b.name();
  case ExprKind::Not: return a.operand() == b.operand();
  default: return a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
}

Expr conj_all(std::span<const Expr> terms) {
  if (terms.empty())
    return Expr::constant(true);
  Expr acc = terms[0];
  for (std::size_t i = 1; i < terms.size(); ++i)
    acc = Expr::conj(acc, terms[i]);
  return acc;
}

Expr disj_all(std::span<const Expr> terms) {
  if (terms.empty())
    return Expr::constant(false);
  Expr acc = terms[0];
  for (std::size_t i = 1; i < terms.size(); ++i)
    acc = Expr::disj(acc, terms[i]);
  return acc;
}

Expr substitute(const Expr &e, const std::map<Identifier, Expr> &bindings) {
  switch (e.kind()) {
  case ExprKind::Const: return e;
  case ExprKind::Var: {
    auto it = bindings.find(e.name());
    return it == bindings.end() ? e : it->second;
  }
  case ExprKind::Not: return Expr::negate(substitute(e.operand(), bindings));
  default:
    return Expr::binary(e.kind(), substitute(e.lhs(), bindings), substitute(e.rhs(), bindings));
  }
}

Expr rename(const Expr &e, const std::map<Identifier, Identifier> &renaming) {
  std::map<Identifier, Expr> bindings;
  for (const auto &[from, to] : renaming)
    bindings.emplace(from, Expr::var(to));
  return substitute(e, bindings);
}

// ---------------------------------------------------------------------------
// Block checks

namespace {

std::size_t count_operators(const Expr &e) {
  switch (e.kind()) {
  case ExprKind::Const:
  case ExprKind::Var: return 0;
  case ExprKind::Not: return 1 + count_operators(e.operand());
  default: return 1 + count_operators(e.lhs()) + count_operators(e.rhs());
  }
}

} // namespace

std::size_t operator_count(const Block &block) {
  std::size_t n = 0;
  for (const auto &s : block.body)
    n += count_operators(s.rhs);
  if (n == 0 && !block.body.empty())
    n = 1;
  return n;
}

void check_block(const Block &block) {
  std::set<Identifier> written;
  for (const auto &stmt : block.body) {
    for (const auto &v : stmt.rhs.vars()) {
      const VarDecl *d = block.interface.find(v);
      if (!d)
        throw TypeError("undeclared variable '" + v.str() + "'");
      if (d->direction == Direction::Temp && !written.count(v))
        throw UnassignedTemp(v.str());
    }
    const VarDecl *t = block.interface.find(stmt.target);
    if (!t)
      throw TypeError("undeclared variable '" + stmt.target.str() + "'");
    if (t->direction == Direction::Input)
      throw TypeError("assignment to input '" + stmt.target.str() + "'");
    written.insert(stmt.target);
  }
}

// ---------------------------------------------------------------------------
// Assignment and evaluation

bool Assignment::get(const Identifier &name) const {
  auto it = values_.find(name);
  if (it == values_.end())
    throw UnboundVariable(name.str());
  return it->second;
}

std::optional<bool> Assignment::find(const Identifier &name) const {
  auto it = values_.find(name);
  if (it == values_.end())
    return std::nullopt;
  return it->second;
}

std::string Assignment::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (const auto &[k, v] : values_) {
    if (!first)
      os << ' ';
    first = false;
    os << k.str() << '=' << (v ? 1 : 0);
  }
  return os.str();
}

bool eval_expr(const Expr &expr, const Assignment &env) {
  switch (expr.kind()) {
  case ExprKind::Const: return expr.value();
  case ExprKind::Var: return env.get(expr.name());
  case ExprKind::Not: return !eval_expr(expr.operand(), env);
  case ExprKind::And: return eval_expr(expr.lhs(), env) && eval_expr(expr.rhs(), env);
  case ExprKind::Or: return eval_expr(expr.lhs(), env) || eval_expr(expr.rhs(), env);
  case ExprKind::Xor: return eval_expr(expr.lhs(), env) != eval_expr(expr.rhs(), env);
  }
  return false;
}

namespace {

void require_covers(const BlockInterface &iface, Direction dir, const Assignment &a) {
  for (const auto &d : iface.decls())
    if (d.direction == dir && !a.contains(d.name))
      throw UnboundVariable(d.name.str());
  for (const auto &[name, v] : a) {
    const VarDecl *d = iface.find(name);
    if (!d || d->direction != dir)
      throw TypeError("'" + name.str() + "' is not a " + std::string(to_string(dir)) +
                      " variable of the block");
  }
}

} // namespace

Assignment run_cycle_env(const Block &block, const Assignment &state, const Assignment &inputs) {
  require_covers(block.interface, Direction::State, state);
  require_covers(block.interface, Direction::Input, inputs);

  Assignment env;
  for (const auto &[k, v] : inputs)
    env.set(k, v);
  for (const auto &[k, v] : state)
    env.set(k, v);
  for (const auto &o : block.interface.outputs())
    env.set(o, false);

  for (const auto &stmt : block.body) {
    for (const auto &v : stmt.rhs.vars()) {
      if (env.contains(v))
        continue;
      const VarDecl *d = block.interface.find(v);
      if (d && d->direction == Direction::Temp)
        throw UnassignedTemp(v.str());
      throw UnboundVariable(v.str());
    }
    env.set(stmt.target, eval_expr(stmt.rhs, env));
  }
  return env;
}

CycleResult run_cycle(const Block &block, const Assignment &state, const Assignment &inputs) {
  Assignment env = run_cycle_env(block, state, inputs);
  CycleResult r;
  for (const auto &o : block.interface.outputs())
    r.outputs.set(o, env.get(o));
  for (const auto &s : block.interface.states())
    r.next_state.set(s, env.get(s));
  return r;
}

Trace simulate(const Block &block, std::span<const Assignment> input_trace,
               const Assignment &init_state) {
  Trace trace;
  Assignment state = init_state;
  for (std::size_t i = 0; i < input_trace.size(); ++i) {
    CycleResult r;
    try {
      r = run_cycle(block, state, input_trace[i]);
    } catch (const UnassignedTemp &e) {
      throw UnassignedTemp(e.name(), static_cast<long>(i));
    }
    trace.cycles.push_back({input_trace[i], r.outputs, r.next_state});
    state = std::move(r.next_state);
  }
  return trace;
}

Assignment default_state(const BlockInterface &iface) {
  Assignment a;
  for (const auto &s : iface.states())
    a.set(s, false);
  return a;
}

Assignment pattern_assignment(std::span<const Identifier> names, std::uint64_t pattern) {
  Assignment a;
  for (std::size_t i = 0; i < names.size(); ++i)
    a.set(names[i], ((pattern >> i) & 1U) != 0);
  return a;
}

} // namespace plcsynth

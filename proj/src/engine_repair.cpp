#include <algorithm>
#include <chrono>
#include <set>

#include "engine_internal.hpp"
#include "plcsynth/lang.hpp"

namespace plcsynth {

using sat::Lit;

namespace {

BlockInterface externals_of(const BlockInterface &iface) {
  BlockInterface out;
  for (const auto &d : iface.decls())
    if (d.direction != Direction::Temp) out.add(d);
  return out;
}

void require_combinational(const Block &block, std::string_view op) {
  if (!block.interface.states().empty())
    throw TypeError(std::string(op) + " needs a combinational block; '" + block.name.str() + "' has state");
}

// Sequential counter: out[j] is forced true when at least j+1 of xs hold.
std::vector<Lit> at_least_outputs(sat::CnfFormula &f, const std::vector<Lit> &xs) {
  std::vector<Lit> prev;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::vector<Lit> cur(i + 1);
    for (std::size_t j = 0; j <= i; ++j) {
      cur[j] = Lit::positive(f.new_var());
      if (j == 0) f.add_clause({~xs[i], cur[0]});
      if (j < prev.size()) f.add_clause({~prev[j], cur[j]});
      if (j >= 1 && j - 1 < prev.size()) f.add_clause({~xs[i], ~prev[j - 1], cur[j]});
    }
    prev = std::move(cur);
  }
  return prev;
}

enum class NodeShape { Leaf, Unary, Binary };

struct LeafOption {
  enum Kind { Input, Const, Original } kind;
  std::size_t input = 0;
  bool value = false;
};

struct Node {
  NodeShape shape;
  std::vector<std::size_t> children;
  std::vector<LeafOption> options;  // leaves only
  std::size_t original = 0;         // label index of the unedited node
  std::optional<Identifier> name;   // leaf reading a non-input variable
  std::vector<Lit> label;
  Lit neg;
  Lit changed;
};

struct Decoded {
  Block block;
  int changed = 0;
};

// Edits that keep the shape of every expression tree: each node may swap
// its operator (or leaf) and may be wrapped in a negation.
class RepairLearner {
public:
  RepairLearner(const Block &block, const std::vector<Identifier> &inputs, std::uint64_t seed)
      : block_(block), inputs_(inputs), solver_(sat::SolverOptions{seed, true}) {
    for (const auto &st : block.body) roots_.push_back(build(st.rhs));
    std::vector<Lit> changed;
    std::vector<Lit> negs;
    for (auto &n : nodes_) {
      changed.push_back(n.changed);
      negs.push_back(n.neg);
    }
    at_least_changed_ = at_least_outputs(f_, changed);
    at_least_neg_ = at_least_outputs(f_, negs);
  }

  std::size_t size() const { return nodes_.size(); }

  void add(const detail::CegisExample &ex) {
    std::map<Identifier, Lit> env;
    for (const auto &i : inputs_) env[i] = enc_.constant(ex.inputs.get(i));
    for (const auto &o : block_.interface.outputs()) env[o] = enc_.false_lit();
    for (std::size_t s = 0; s < block_.body.size(); ++s) env[block_.body[s].target] = value(roots_[s], ex, env);
    detail::add_residual(enc_, ex.residual, [&](const Identifier &name) { return env.at(name); });
  }

  std::optional<Decoded> next(std::size_t max_changed, std::size_t max_neg) {
    solver_.sync(f_);
    std::vector<Lit> assume;
    if (max_changed < at_least_changed_.size()) assume.push_back(~at_least_changed_[max_changed]);
    if (max_neg < at_least_neg_.size()) assume.push_back(~at_least_neg_[max_neg]);
    auto res = solver_.solve(assume);
    if (!res.is_sat()) return std::nullopt;
    Decoded d{block_, 0};
    for (std::size_t s = 0; s < block_.body.size(); ++s) d.block.body[s].rhs = decode(roots_[s], res, d.changed);
    return d;
  }

private:
  Lit fresh() { return Lit::positive(f_.new_var()); }

  std::size_t build(const Expr &e) {
    Node n;
    switch (e.kind()) {
    case ExprKind::Const:
    case ExprKind::Var: {
      n.shape = NodeShape::Leaf;
      for (std::size_t i = 0; i < inputs_.size(); ++i) n.options.push_back({LeafOption::Input, i, false});
      n.options.push_back({LeafOption::Const, 0, false});
      n.options.push_back({LeafOption::Const, 0, true});
      if (e.kind() == ExprKind::Const) {
        n.original = inputs_.size() + (e.value() ? 1 : 0);
      } else {
        auto it = std::find(inputs_.begin(), inputs_.end(), e.name());
        if (it != inputs_.end()) {
          n.original = static_cast<std::size_t>(it - inputs_.begin());
        } else {
          n.options.push_back({LeafOption::Original, 0, false});
          n.original = n.options.size() - 1;
          n.name = e.name();
        }
      }
      n.label.resize(n.options.size());
      break;
    }
    case ExprKind::Not:
      n.shape = NodeShape::Unary;
      n.children.push_back(build(e.operand()));
      n.label.resize(2);  // NOT, pass-through
      n.original = 0;
      break;
    default:
      n.shape = NodeShape::Binary;
      n.children.push_back(build(e.lhs()));
      n.children.push_back(build(e.rhs()));
      n.label.resize(3);  // AND, OR, XOR
      n.original = e.kind() == ExprKind::And ? 0 : e.kind() == ExprKind::Or ? 1 : 2;
      break;
    }
    for (auto &l : n.label) l = fresh();
    n.neg = fresh();
    n.changed = fresh();
    f_.add_clause(std::span<const Lit>(n.label));
    for (std::size_t i = 0; i < n.label.size(); ++i)
      for (std::size_t j = i + 1; j < n.label.size(); ++j) f_.add_clause({~n.label[i], ~n.label[j]});
    f_.add_clause({n.changed, n.label[n.original]});
    f_.add_clause({n.changed, ~n.neg});
    nodes_.push_back(std::move(n));
    return nodes_.size() - 1;
  }

  Lit value(std::size_t id, const detail::CegisExample &ex, const std::map<Identifier, Lit> &env) {
    const Node &n = nodes_[id];
    Lit r = fresh();
    auto equal_if = [&](Lit sel, Lit v) {
      f_.add_clause({~sel, ~r, v});
      f_.add_clause({~sel, r, ~v});
    };
    switch (n.shape) {
    case NodeShape::Leaf:
      for (std::size_t o = 0; o < n.options.size(); ++o) {
        const auto &opt = n.options[o];
        if (opt.kind == LeafOption::Input)
          equal_if(n.label[o], enc_.constant(ex.inputs.get(inputs_[opt.input])));
        else if (opt.kind == LeafOption::Const)
          equal_if(n.label[o], enc_.constant(opt.value));
        else
          equal_if(n.label[o], env.at(*n.name));
      }
      break;
    case NodeShape::Unary: {
      Lit c = value(n.children[0], ex, env);
      equal_if(n.label[0], ~c);
      equal_if(n.label[1], c);
      break;
    }
    case NodeShape::Binary: {
      Lit a = value(n.children[0], ex, env);
      Lit b = value(n.children[1], ex, env);
      equal_if(n.label[0], enc_.land(a, b));
      equal_if(n.label[1], enc_.lor(a, b));
      equal_if(n.label[2], enc_.lxor(a, b));
      break;
    }
    }
    return enc_.lxor(r, n.neg);
  }

  Expr decode(std::size_t id, const sat::SatResult &res, int &changed) const {
    const Node &n = nodes_[id];
    std::size_t label = 0;
    for (std::size_t i = 0; i < n.label.size(); ++i)
      if (res.value(n.label[i])) label = i;
    const bool neg = res.value(n.neg);
    if (label != n.original || neg) ++changed;
    Expr e = Expr::constant(false);
    switch (n.shape) {
    case NodeShape::Leaf: {
      const auto &opt = n.options[label];
      if (opt.kind == LeafOption::Input) e = Expr::var(inputs_[opt.input]);
      else if (opt.kind == LeafOption::Const) e = Expr::constant(opt.value);
      else e = Expr::var(*n.name);
      break;
    }
    case NodeShape::Unary: {
      Expr c = decode(n.children[0], res, changed);
      e = label == 0 ? Expr::negate(c) : c;
      break;
    }
    case NodeShape::Binary: {
      Expr a = decode(n.children[0], res, changed);
      Expr b = decode(n.children[1], res, changed);
      static constexpr ExprKind kinds[] = {ExprKind::And, ExprKind::Or, ExprKind::Xor};
      e = Expr::binary(kinds[label], a, b);
      break;
    }
    }
    return neg ? Expr::negate(e) : e;
  }

  const Block &block_;
  std::vector<Identifier> inputs_;
  sat::CnfFormula f_;
  sat::TseitinEncoder enc_{f_};
  sat::Solver solver_;
  std::vector<Node> nodes_;
  std::vector<std::size_t> roots_;
  std::vector<Lit> at_least_changed_;
  std::vector<Lit> at_least_neg_;
};

Expr balanced_disj(std::span<const Expr> terms) {
  if (terms.empty()) return Expr::constant(false);
  if (terms.size() == 1) return terms[0];
  const std::size_t mid = terms.size() / 2;
  return Expr::disj(balanced_disj(terms.first(mid)), balanced_disj(terms.subspan(mid)));
}

std::size_t dag_operators(const Expr &e) {
  std::set<std::string> seen;
  auto walk = [&](auto &&self, const Expr &x) -> void {
    if (x.is_leaf()) return;
    if (!seen.insert(format_st_expression(x)).second) return;
    if (x.kind() == ExprKind::Not) {
      self(self, x.operand());
    } else {
      self(self, x.lhs());
      self(self, x.rhs());
    }
  };
  walk(walk, e);
  return seen.size();
}

} // namespace

SynthesisResult repair(const Block &block, const SpecFormula &spec, const SynthConfig &cfg) {
  const auto start = std::chrono::steady_clock::now();
  if (!block.interface.same_externals(spec.interface))
    throw TypeError("block '" + block.name.str() + "' and constraints have different interfaces");
  check_block(block);
  require_combinational(block, "repair");
  if (cfg.max_slots < 1) throw TypeError("max_slots must be at least 1");

  const BlockInterface externals = externals_of(block.interface);
  detail::CegisOracle oracle(externals, obligations_of(spec), cfg);
  SynthesisResult result;
  result.block = block;
  result.slots_used = static_cast<int>(operator_count(block));

  auto first = oracle.find_violation(block);
  if (!first) {
    result.wall_time = std::chrono::steady_clock::now() - start;
    return result;
  }
  oracle.check_feasible();

  CegisRun run;
  run.outputs = externals.outputs();
  if (cfg.edit_penalty && !block.body.empty()) {
    RepairLearner learner(block, oracle.inputs(), detail::seed_for(cfg.seed, block.name.str()));
    std::set<Assignment> seen{first->inputs};
    learner.add(*first);
    int examples = 1;
    const std::size_t total = learner.size();
    for (std::size_t k = 1; k <= total; ++k) {
      for (std::size_t w = 0; w <= k; ++w) {
        while (auto cand = learner.next(k, w)) {
          ++run.iterations;
          auto ex = oracle.find_violation(cand->block);
          if (!ex) {
            run.counterexamples = examples;
            run.slots = static_cast<int>(operator_count(cand->block));
            run.wall_time = std::chrono::steady_clock::now() - start;
            result.block = std::move(cand->block);
            result.nodes_changed = cand->changed;
            result.iterations = run.iterations;
            result.counterexamples_used = run.counterexamples;
            result.slots_used = run.slots;
            result.runs.push_back(run);
            detail::assert_meets(result.block, spec, cfg);
            result.wall_time = std::chrono::steady_clock::now() - start;
            return result;
          }
          if (ex->residual.kind() == ExprKind::Const && !ex->residual.value())
            throw Unsatisfiable("unsatisfiable: no output values meet the constraints for inputs " +
                                ex->inputs.to_string());
          if (!seen.insert(ex->inputs).second)
            throw InternalError("counterexample repeated: " + ex->inputs.to_string());
          learner.add(*ex);
          ++examples;
        }
      }
    }
    run.counterexamples = examples;
  }

  // No shape-preserving edit works: resynthesize from the constraints.
  SynthesisResult fresh = synthesize(externals, spec, cfg, block.name);
  fresh.block.lang = block.lang;
  fresh.iterations += run.iterations;
  fresh.counterexamples_used += run.counterexamples;
  fresh.nodes_changed = static_cast<int>(std::max<std::size_t>(1, [&] {
    std::size_t n = 0;
    for (const auto &st : block.body) n += st.rhs.size();
    return n;
  }()));
  if (run.iterations > 0) fresh.runs.insert(fresh.runs.begin(), run);
  fresh.wall_time = std::chrono::steady_clock::now() - start;
  return fresh;
}

SynthesisResult simplify(const Block &block, const SynthConfig &cfg) {
  const auto start = std::chrono::steady_clock::now();
  check_block(block);
  require_combinational(block, "simplify");
  if (cfg.max_slots < 1) throw TypeError("max_slots must be at least 1");

  const BlockInterface externals = externals_of(block.interface);
  const auto functions = output_functions(block);
  const SpecFormula spec = functional_spec(externals, functions);

  SynthesisResult result;
  result.block = Block{block.name, externals, {}, block.lang};
  auto keep_original = [&] {
    SynthesisResult orig;
    orig.block = block;
    orig.slots_used = static_cast<int>(operator_count(block));
    orig.iterations = result.iterations;
    orig.counterexamples_used = result.counterexamples_used;
    orig.runs = result.runs;
    orig.wall_time = std::chrono::steady_clock::now() - start;
    return orig;
  };

  for (const auto &o : externals.outputs()) {
    const Expr fn = functions.at(o);
    const Expr folded = detail::partial_eval(fn, [](const Identifier &) { return std::optional<bool>(); });
    if (folded.kind() == ExprKind::Const && !folded.value()) continue;
    SpecFormula sub;
    sub.interface = externals;
    sub.obligations[o] = spec.obligations.at(o);
    detail::CegisOracle oracle(externals, obligations_of(sub), cfg);
    const int bound = std::min(cfg.max_slots, static_cast<int>(std::max<std::size_t>(1, dag_operators(fn))));
    const auto essential = oracle.essential_inputs(o);
    const int min_slots = std::max(1, static_cast<int>(essential.size()) - 1);
    try {
      auto g = detail::synthesize_group(oracle, {o}, min_slots, bound, detail::seed_for(cfg.seed, o.str()));
      auto body = detail::program_statements(g.program, oracle.inputs(), {o}, result.block.interface);
      result.block.body.insert(result.block.body.end(), body.begin(), body.end());
      result.iterations += g.run.iterations;
      result.counterexamples_used += g.run.counterexamples;
      result.slots_used += g.run.slots;
      result.runs.push_back(std::move(g.run));
    } catch (const SizeBoundExceeded &) {
      return keep_original();
    }
  }
  if (operator_count(result.block) > operator_count(block)) return keep_original();
  detail::assert_meets(result.block, spec, cfg);
  result.wall_time = std::chrono::steady_clock::now() - start;
  return result;
}

SynthesisResult extend(const Block &block, const ConstraintList &extra, const SynthConfig &cfg) {
  check_block(block);
  require_combinational(block, "extend");
  const BlockInterface externals = externals_of(block.interface);
  if (!extra.interface.decls().empty() && !extra.interface.same_externals(externals))
    throw TypeError("extra constraints declare a different interface than block '" + block.name.str() + "'");
  ConstraintList typed = extra;
  typed.interface = externals;
  const SpecFormula added = compile_spec(typed);
  detail::CegisOracle(externals, obligations_of(added), cfg).check_feasible();

  // Original behavior wherever the new constraints say nothing about an
  // output; the new constraints everywhere else.
  SpecFormula combined = added;
  const auto functions = output_functions(block);
  for (const auto &o : externals.outputs()) {
    std::vector<Expr> guards;
    if (auto it = added.obligations.find(o); it != added.obligations.end())
      for (const auto &imp : it->second) guards.push_back(imp.guard);
    const Expr free = Expr::negate(balanced_disj(guards));
    const Expr fn = functions.at(o);
    const std::string origin = "original behavior of " + o.str();
    combined.obligations[o].push_back({Expr::conj(free, fn), true, extra.constraints.size(), origin});
    combined.obligations[o].push_back(
        {Expr::conj(free, Expr::negate(fn)), false, extra.constraints.size(), origin});
  }
  return repair(block, combined, cfg);
}

} // namespace plcsynth

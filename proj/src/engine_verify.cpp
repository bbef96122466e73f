#include <sstream>

#include "engine_internal.hpp"

namespace plcsynth {

using sat::Lit;
using detail::TruthTable;

namespace detail {

Expr partial_eval(const Expr &e, const std::function<std::optional<bool>(const Identifier &)> &lookup) {
  switch (e.kind()) {
  case ExprKind::Const: return e;
  case ExprKind::Var: {
    auto v = lookup(e.name());
    return v ? Expr::constant(*v) : e;
  }
  case ExprKind::Not: {
    Expr a = partial_eval(e.operand(), lookup);
    if (a.kind() == ExprKind::Const) return Expr::constant(!a.value());
    if (a.kind() == ExprKind::Not) return a.operand();
    return Expr::negate(a);
  }
  default: break;
  }
  Expr a = partial_eval(e.lhs(), lookup);
  Expr b = partial_eval(e.rhs(), lookup);
  const bool ca = a.kind() == ExprKind::Const;
  const bool cb = b.kind() == ExprKind::Const;
  if (ca && cb) {
    switch (e.kind()) {
    case ExprKind::And: return Expr::constant(a.value() && b.value());
    case ExprKind::Or: return Expr::constant(a.value() || b.value());
    default: return Expr::constant(a.value() != b.value());
    }
  }
  if (ca || cb) {
    const bool k = ca ? a.value() : b.value();
    const Expr &other = ca ? b : a;
    switch (e.kind()) {
    case ExprKind::And: return k ? other : Expr::constant(false);
    case ExprKind::Or: return k ? Expr::constant(true) : other;
    default: return k ? Expr::negate(other) : other;
    }
  }
  return Expr::binary(e.kind(), a, b);
}

std::uint64_t seed_for(std::uint64_t seed, const std::string &key) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : key) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::uint64_t z = seed ^ h;
  if (seed == 0) return 0;
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return (z ^ (z >> 31)) | 1U;
}

std::map<Identifier, TruthTable> block_tables(const Block &block, const std::vector<Identifier> &inputs) {
  const auto n = static_cast<unsigned>(inputs.size());
  std::map<Identifier, TruthTable> env;
  for (unsigned i = 0; i < n; ++i) env[inputs[i]] = TruthTable::variable(n, i);
  for (const auto &s : block.interface.states()) env[s] = TruthTable(n, false);
  for (const auto &o : block.interface.outputs()) env[o] = TruthTable(n, false);
  auto lookup = [&](const Identifier &name) -> const TruthTable & {
    auto it = env.find(name);
    if (it == env.end()) throw UnassignedTemp(name.str());
    return it->second;
  };
  for (const auto &st : block.body) env[st.target] = eval_table(st.rhs, n, lookup);
  return env;
}

namespace {

struct Unrolled {
  std::map<Identifier, Lit> init;
  std::vector<std::map<Identifier, Lit>> inputs;
};

std::map<Identifier, Lit> encode_cycle(sat::TseitinEncoder &enc, const Block &block,
                                       const std::map<Identifier, Lit> &state,
                                       const std::map<Identifier, Lit> &inputs) {
  std::map<Identifier, Lit> env = state;
  for (const auto &[k, v] : inputs) env[k] = v;
  for (const auto &o : block.interface.outputs()) env[o] = enc.false_lit();
  auto lookup = [&](const Identifier &name) {
    auto it = env.find(name);
    if (it == env.end()) throw UnassignedTemp(name.str());
    return it->second;
  };
  for (const auto &st : block.body) {
    Lit l = enc.encode(st.rhs, lookup);
    env[st.target] = l;
  }
  return env;
}

Counterexample decode(const sat::SatResult &res, const Unrolled &u, std::size_t cycle) {
  Counterexample cex;
  for (const auto &[k, l] : u.init) cex.init_state.set(k, res.value(l));
  for (std::size_t c = 0; c <= cycle; ++c) {
    Assignment a;
    for (const auto &[k, l] : u.inputs[c]) a.set(k, res.value(l));
    cex.input_cycles.push_back(std::move(a));
  }
  cex.cycle_index = cycle;
  return cex;
}

Assignment state_before(const Block &block, const Counterexample &cex) {
  if (cex.cycle_index == 0) return cex.init_state;
  Trace t = simulate(block, std::span(cex.input_cycles.data(), cex.cycle_index), cex.init_state);
  return t.cycles.back().state_after;
}

void require_cycles(const SynthConfig &cfg) {
  if (cfg.unwind_cycles < 1) throw TypeError("unwind_cycles must be at least 1");
}

} // namespace

VerifyResult verify_obligations(const Block &block, const std::vector<Obligation> &obligations,
                                const SynthConfig &cfg) {
  require_cycles(cfg);
  sat::CnfFormula f;
  sat::TseitinEncoder enc(f);
  sat::Solver solver(sat::SolverOptions{cfg.seed, true});

  Unrolled u;
  for (const auto &s : block.interface.states())
    u.init[s] = cfg.symbolic_init ? Lit::positive(f.new_var()) : enc.false_lit();
  std::map<Identifier, Lit> state = u.init;

  for (int c = 0; c < cfg.unwind_cycles; ++c) {
    std::map<Identifier, Lit> in;
    for (const auto &i : block.interface.inputs()) in[i] = Lit::positive(f.new_var());
    u.inputs.push_back(in);
    auto env = encode_cycle(enc, block, state, in);
    auto lookup = [&](const Identifier &name) {
      auto it = env.find(name);
      if (it == env.end()) throw UnboundVariable(name.str());
      return it->second;
    };
    std::vector<Lit> bad;
    for (const auto &o : obligations) bad.push_back(~enc.encode(o.formula, lookup));
    Lit viol = enc.lor(bad);
    for (auto &[k, l] : state) l = env.at(k);

    if (viol == enc.false_lit()) continue;
    solver.sync(f);
    const Lit assume[] = {viol};
    auto res = solver.solve(assume);
    if (!res.is_sat()) continue;

    Counterexample cex = decode(res, u, static_cast<std::size_t>(c));
    Assignment env_c = run_cycle_env(block, state_before(block, cex), cex.input_cycles.back());
    for (const auto &o : obligations) {
      if (!eval_expr(o.formula, env_c)) {
        cex.violated = o.description;
        return VerifyResult::violated(std::move(cex));
      }
    }
    throw InternalError("counterexample does not replay in simulation");
  }
  return VerifyResult::verified(cfg.unwind_cycles);
}

} // namespace detail

VerifyResult verify(const Block &block, const SpecFormula &spec, const SynthConfig &cfg) {
  if (!block.interface.same_externals(spec.interface))
    throw TypeError("block '" + block.name.str() + "' and constraints have different interfaces");
  check_block(block);
  return detail::verify_obligations(block, obligations_of(spec), cfg);
}

VerifyResult equivalent(const Block &a, const Block &b, const SynthConfig &cfg) {
  if (!a.interface.same_externals(b.interface))
    throw TypeError("blocks '" + a.name.str() + "' and '" + b.name.str() + "' have different interfaces");
  check_block(a);
  check_block(b);
  if (cfg.unwind_cycles < 1) throw TypeError("unwind_cycles must be at least 1");

  sat::CnfFormula f;
  sat::TseitinEncoder enc(f);
  sat::Solver solver(sat::SolverOptions{cfg.seed, true});

  detail::Unrolled u;
  for (const auto &s : a.interface.states())
    u.init[s] = cfg.symbolic_init ? Lit::positive(f.new_var()) : enc.false_lit();
  std::map<Identifier, Lit> sa = u.init;
  std::map<Identifier, Lit> sb = u.init;
  const auto outputs = a.interface.outputs();

  for (int c = 0; c < cfg.unwind_cycles; ++c) {
    std::map<Identifier, Lit> in;
    for (const auto &i : a.interface.inputs()) in[i] = Lit::positive(f.new_var());
    u.inputs.push_back(in);
    auto ea = detail::encode_cycle(enc, a, sa, in);
    auto eb = detail::encode_cycle(enc, b, sb, in);
    std::vector<Lit> diff;
    for (const auto &o : outputs) diff.push_back(enc.lxor(ea.at(o), eb.at(o)));
    Lit viol = enc.lor(diff);
    for (auto &[k, l] : sa) l = ea.at(k);
    for (auto &[k, l] : sb) l = eb.at(k);

    if (viol == enc.false_lit()) continue;
    solver.sync(f);
    const Lit assume[] = {viol};
    auto res = solver.solve(assume);
    if (!res.is_sat()) continue;

    Counterexample cex = detail::decode(res, u, static_cast<std::size_t>(c));
    auto ra = run_cycle(a, detail::state_before(a, cex), cex.input_cycles.back());
    auto rb = run_cycle(b, detail::state_before(b, cex), cex.input_cycles.back());
    for (const auto &o : outputs) {
      const bool va = ra.outputs.get(o);
      const bool vb = rb.outputs.get(o);
      if (va != vb) {
        cex.violated = "output " + o.str() + " differs (" + a.name.str() + "=" + (va ? "1" : "0") + ", " +
                       b.name.str() + "=" + (vb ? "1" : "0") + ")";
        return VerifyResult::violated(std::move(cex));
      }
    }
    throw InternalError("distinguishing input does not replay in simulation");
  }
  return VerifyResult::verified(cfg.unwind_cycles);
}

std::map<Identifier, Expr> output_functions(const Block &block) {
  check_block(block);
  std::map<Identifier, Expr> env;
  for (const auto &i : block.interface.inputs()) env.emplace(i, Expr::var(i));
  for (const auto &s : block.interface.states()) env.emplace(s, Expr::var(s));
  for (const auto &o : block.interface.outputs()) env.insert_or_assign(o, Expr::constant(false));
  for (const auto &st : block.body) env.insert_or_assign(st.target, substitute(st.rhs, env));
  std::map<Identifier, Expr> out;
  for (const auto &o : block.interface.outputs()) out.emplace(o, env.at(o));
  return out;
}

SpecFormula functional_spec(const BlockInterface &iface, const std::map<Identifier, Expr> &functions) {
  SpecFormula spec;
  for (const auto &d : iface.decls())
    if (d.direction != Direction::Temp) spec.interface.add(d);
  std::size_t index = 0;
  for (const auto &o : spec.interface.outputs()) {
    auto it = functions.find(o);
    Expr fn = it == functions.end() ? Expr::constant(false) : it->second;
    std::string origin = "behavior of " + o.str();
    spec.obligations[o].push_back({fn, true, index, origin});
    spec.obligations[o].push_back({Expr::negate(fn), false, index, origin});
    ++index;
  }
  return spec;
}

std::string format_counterexample(const Counterexample &cex) {
  std::ostringstream os;
  bool any_init = false;
  for (const auto &[k, v] : cex.init_state) any_init = any_init || v;
  if (any_init) os << "init: " << cex.init_state.to_string() << "\n";
  for (std::size_t i = 0; i < cex.input_cycles.size(); ++i) {
    os << "cycle " << i << ":";
    const auto text = cex.input_cycles[i].to_string();
    if (!text.empty()) os << " " << text;
    os << "\n";
  }
  os << "violated: " << cex.violated << "\n";
  return os.str();
}

} // namespace plcsynth

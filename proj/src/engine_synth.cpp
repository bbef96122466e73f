#include <algorithm>
#include <array>
#include <chrono>
#include <numeric>
#include <set>

#include "engine_internal.hpp"

namespace plcsynth {

using sat::Lit;
using detail::TruthTable;

namespace detail {

namespace {

Expr balanced(ExprKind kind, std::span<const Expr> terms) {
  if (terms.size() == 1) return terms[0];
  const std::size_t mid = terms.size() / 2;
  return Expr::binary(kind, balanced(kind, terms.first(mid)), balanced(kind, terms.subspan(mid)));
}

bool mentions_other_output(const Expr &e, const BlockInterface &iface, const Identifier &output) {
  for (const auto &v : e.vars()) {
    const VarDecl *d = iface.find(v);
    if (d && d->direction == Direction::Output && v != output) return true;
  }
  return false;
}

} // namespace

CegisOracle::CegisOracle(BlockInterface iface, std::vector<Obligation> obligations, const SynthConfig &cfg)
    : iface_(std::move(iface)), obligations_(std::move(obligations)), cfg_(cfg), inputs_(iface_.inputs()),
      exhaustive_(inputs_.size() <= std::min<std::size_t>(cfg.exhaustive_limit, 20)) {
  std::set<Identifier> mentioned;
  for (const auto &o : obligations_) o.formula.collect_vars(mentioned);
  for (const auto &o : iface_.outputs())
    if (mentioned.count(o)) outputs_.push_back(o);
  if (exhaustive_) {
    const auto n = static_cast<unsigned>(inputs_.size());
    for (unsigned i = 0; i < n; ++i) input_tables_[inputs_[i]] = TruthTable::variable(n, i);
  }
}

CegisExample CegisOracle::example(const Assignment &inputs) const {
  std::vector<Expr> terms;
  for (const auto &o : obligations_) {
    Expr r = partial_eval(o.formula, [&](const Identifier &name) -> std::optional<bool> {
      if (auto v = inputs.find(name)) return v;
      const VarDecl *d = iface_.find(name);
      if (d && d->direction == Direction::State) return false;
      return std::nullopt;
    });
    if (r.kind() == ExprKind::Const) {
      if (r.value()) continue;
      return {inputs, Expr::constant(false)};
    }
    if (std::find(terms.begin(), terms.end(), r) == terms.end()) terms.push_back(std::move(r));
  }
  if (terms.empty()) return {inputs, Expr::constant(true)};
  return {inputs, balanced(ExprKind::And, terms)};
}

void CegisOracle::check_feasible() const {
  const std::size_t k = outputs_.size();
  auto fail = [&](const Assignment &x) {
    throw Unsatisfiable("unsatisfiable: no output values meet the constraints for inputs " +
                        (x.empty() ? std::string("(none)") : x.to_string()));
  };
  if (exhaustive_) {
    if (k > 10) return;
    const auto n = static_cast<unsigned>(inputs_.size());
    TruthTable feasible(n, false);
    for (std::uint64_t c = 0; c < (1ULL << k); ++c) {
      TruthTable ok(n, true);
      std::map<Identifier, TruthTable> outs;
      for (std::size_t i = 0; i < k; ++i) outs[outputs_[i]] = TruthTable(n, ((c >> i) & 1U) != 0);
      auto lookup = [&](const Identifier &name) {
        if (auto it = input_tables_.find(name); it != input_tables_.end()) return it->second;
        if (auto it = outs.find(name); it != outs.end()) return it->second;
        return TruthTable(n, false);
      };
      for (const auto &o : obligations_) ok &= eval_table(o.formula, n, lookup);
      feasible |= ok;
    }
    if (auto p = (~feasible).first_set()) fail(pattern_assignment(inputs_, *p));
    return;
  }
  if (k > 4) return;
  sat::CnfFormula f;
  sat::TseitinEncoder enc(f);
  std::map<Identifier, Lit> in;
  for (const auto &i : inputs_) in[i] = Lit::positive(f.new_var());
  for (std::uint64_t c = 0; c < (1ULL << k); ++c) {
    std::vector<Lit> oks;
    for (const auto &o : obligations_)
      oks.push_back(enc.encode(o.formula, [&](const Identifier &name) {
        if (auto it = in.find(name); it != in.end()) return it->second;
        for (std::size_t i = 0; i < k; ++i)
          if (outputs_[i] == name) return enc.constant(((c >> i) & 1U) != 0);
        return enc.false_lit();
      }));
    f.add_clause({~enc.land(oks)});
  }
  auto res = sat::solve(f, {}, cfg_.seed);
  if (res.is_sat()) {
    Assignment x;
    for (const auto &[name, l] : in) x.set(name, res.value(l));
    fail(x);
  }
}

std::optional<CegisExample> CegisOracle::find_violation(const Block &candidate) const {
  if (exhaustive_) {
    const auto n = static_cast<unsigned>(inputs_.size());
    auto env = block_tables(candidate, inputs_);
    TruthTable bad(n, false);
    auto lookup = [&](const Identifier &name) -> const TruthTable & { return env.at(name); };
    for (const auto &o : obligations_) bad |= ~eval_table(o.formula, n, lookup);
    if (auto p = bad.first_set()) return example(pattern_assignment(inputs_, *p));
    return std::nullopt;
  }
  SynthConfig one = cfg_;
  one.unwind_cycles = 1;
  one.symbolic_init = false;
  auto r = verify_obligations(candidate, obligations_, one);
  if (r.is_verified()) return std::nullopt;
  return example(r.counterexample().input_cycles.at(0));
}

std::vector<int> CegisOracle::essential_inputs(const Identifier &output) const {
  std::vector<int> out;
  if (!exhaustive_) return out;
  for (const auto &o : obligations_)
    if (mentions_other_output(o.formula, iface_, output)) return out;
  const auto n = static_cast<unsigned>(inputs_.size());
  auto allowed = [&](bool value) {
    TruthTable ok(n, true);
    auto lookup = [&](const Identifier &name) {
      if (auto it = input_tables_.find(name); it != input_tables_.end()) return it->second;
      if (name == output) return TruthTable(n, value);
      return TruthTable(n, false);
    };
    for (const auto &o : obligations_) ok &= eval_table(o.formula, n, lookup);
    return ok;
  };
  const TruthTable a1 = allowed(true);
  const TruthTable a0 = allowed(false);
  const TruthTable forced1 = a1 & ~a0;
  const TruthTable forced0 = a0 & ~a1;
  for (unsigned i = 0; i < n; ++i)
    if ((forced1 & forced0.flip(i)).any()) out.push_back(static_cast<int>(i));
  return out;
}

void add_residual(sat::TseitinEncoder &enc, const Expr &residual,
                  const std::function<sat::Lit(const Identifier &)> &output_lit) {
  Lit root = enc.encode(residual, output_lit);
  enc.formula().add_clause({root});
}

namespace {

enum : int { kInput = 0, kConst, kNot, kAnd, kOr, kXor, kKinds };

// Selector variables of a straight-line program with a fixed number of
// slots, plus one copy of the program's semantics per counterexample.
class SlotLearner {
public:
  SlotLearner(int n, int slots, int outputs, const std::vector<int> &essential, std::uint64_t seed)
      : n_(n), slots_(slots), outputs_(outputs), solver_(sat::SolverOptions{seed, true}) {
    for (int j = 0; j < slots; ++j) {
      Sel s;
      for (auto &k : s.kind) k = fresh();
      s.op1.resize(static_cast<std::size_t>(n + j));
      s.op2.resize(static_cast<std::size_t>(n + j));
      for (auto &l : s.op1) l = fresh();
      for (auto &l : s.op2) l = fresh();
      s.cval = fresh();
      sel_.push_back(std::move(s));
    }
    if (outputs > 1) {
      outsel_.resize(static_cast<std::size_t>(outputs));
      for (auto &row : outsel_) {
        row.resize(static_cast<std::size_t>(slots));
        for (auto &l : row) l = fresh();
      }
    }
    constrain(essential);
  }

  void add(const CegisExample &ex, const std::vector<Identifier> &inputs, const std::vector<Identifier> &outputs) {
    std::vector<bool> x;
    for (const auto &i : inputs) x.push_back(ex.inputs.get(i));
    std::vector<Lit> v(static_cast<std::size_t>(slots_));
    for (int j = 0; j < slots_; ++j) {
      const Sel &s = sel_[static_cast<std::size_t>(j)];
      Lit vj = fresh();
      Lit a = fresh();
      Lit b = fresh();
      bind_operand(s.op1, a, x, v);
      bind_operand(s.op2, b, x, v);
      const auto &k = s.kind;
      clause({~k[kInput], vj, ~a});
      clause({~k[kInput], ~vj, a});
      clause({~k[kConst], vj, ~s.cval});
      clause({~k[kConst], ~vj, s.cval});
      clause({~k[kNot], vj, a});
      clause({~k[kNot], ~vj, ~a});
      clause({~k[kAnd], ~vj, a});
      clause({~k[kAnd], ~vj, b});
      clause({~k[kAnd], vj, ~a, ~b});
      clause({~k[kOr], vj, ~a});
      clause({~k[kOr], vj, ~b});
      clause({~k[kOr], ~vj, a, b});
      clause({~k[kXor], ~vj, a, b});
      clause({~k[kXor], ~vj, ~a, ~b});
      clause({~k[kXor], vj, ~a, b});
      clause({~k[kXor], vj, a, ~b});
      v[static_cast<std::size_t>(j)] = vj;
    }
    std::map<Identifier, Lit> out;
    if (outputs_ == 1) {
      out[outputs.at(0)] = v.back();
    } else {
      for (int o = 0; o < outputs_; ++o) {
        Lit y = fresh();
        for (int j = 0; j < slots_; ++j) {
          Lit s = outsel_[static_cast<std::size_t>(o)][static_cast<std::size_t>(j)];
          clause({~s, ~y, v[static_cast<std::size_t>(j)]});
          clause({~s, y, ~v[static_cast<std::size_t>(j)]});
        }
        out[outputs.at(static_cast<std::size_t>(o))] = y;
      }
    }
    add_residual(enc_, ex.residual, [&](const Identifier &name) {
      auto it = out.find(name);
      if (it == out.end()) throw InternalError("residual mentions '" + name.str() + "' outside the group");
      return it->second;
    });
  }

  std::optional<SlotProgram> next() {
    solver_.sync(f_);
    auto res = solver_.solve();
    if (!res.is_sat()) return std::nullopt;
    SlotProgram p;
    p.num_inputs = n_;
    for (const auto &s : sel_) {
      Slot slot;
      for (int k = 0; k < kKinds; ++k)
        if (res.value(s.kind[static_cast<std::size_t>(k)])) slot.kind = static_cast<SlotKind>(k);
      for (std::size_t i = 0; i < s.op1.size(); ++i) {
        if (res.value(s.op1[i])) slot.lhs = static_cast<int>(i);
        if (res.value(s.op2[i])) slot.rhs = static_cast<int>(i);
      }
      slot.value = slot.kind == SlotKind::Const && res.value(s.cval);
      if (slot.kind == SlotKind::Const) slot.lhs = -1;
      p.slots.push_back(slot);
    }
    if (outputs_ == 1) {
      p.outputs.push_back(slots_ - 1);
    } else {
      for (const auto &row : outsel_)
        for (int j = 0; j < slots_; ++j)
          if (res.value(row[static_cast<std::size_t>(j)])) p.outputs.push_back(j);
    }
    return p;
  }

private:
  struct Sel {
    std::array<Lit, kKinds> kind;
    std::vector<Lit> op1;
    std::vector<Lit> op2;
    Lit cval;
  };

  Lit fresh() { return Lit::positive(f_.new_var()); }
  void clause(std::initializer_list<Lit> c) { f_.add_clause(c); }
  void clause(const std::vector<Lit> &c) { f_.add_clause(std::span<const Lit>(c)); }

  void exactly_one(const std::vector<Lit> &ls) {
    clause(ls);
    at_most_one(ls);
  }
  void at_most_one(const std::vector<Lit> &ls) {
    for (std::size_t i = 0; i < ls.size(); ++i)
      for (std::size_t j = i + 1; j < ls.size(); ++j) clause({~ls[i], ~ls[j]});
  }

  void bind_operand(const std::vector<Lit> &sel, Lit operand, const std::vector<bool> &x, const std::vector<Lit> &v) {
    for (std::size_t s = 0; s < sel.size(); ++s) {
      if (s < static_cast<std::size_t>(n_)) {
        clause({~sel[s], x[s] ? operand : ~operand});
      } else {
        Lit src = v[s - static_cast<std::size_t>(n_)];
        clause({~sel[s], ~operand, src});
        clause({~sel[s], operand, ~src});
      }
    }
  }

  void constrain(const std::vector<int> &essential) {
    const auto n = static_cast<std::size_t>(n_);
    const bool single = outputs_ == 1;
    for (int jj = 0; jj < slots_; ++jj) {
      const auto j = static_cast<std::size_t>(jj);
      const Sel &s = sel_[j];
      const auto &k = s.kind;
      exactly_one(std::vector<Lit>(k.begin(), k.end()));
      if (single && slots_ >= 2) {
        clause({~k[kInput]});
        clause({~k[kConst]});
      }
      // First operand: one for every kind except CONST, and an input for INPUT.
      at_most_one(s.op1);
      std::vector<Lit> any1(s.op1);
      any1.push_back(k[kConst]);
      clause(any1);
      for (std::size_t src = 0; src < s.op1.size(); ++src) {
        clause({~k[kConst], ~s.op1[src]});
        if (src >= n) clause({~k[kInput], ~s.op1[src]});
      }
      // Second operand only for binary kinds, and above the first one.
      at_most_one(s.op2);
      for (int bk : {kAnd, kOr, kXor}) {
        std::vector<Lit> any2(s.op2);
        any2.push_back(~k[static_cast<std::size_t>(bk)]);
        clause(any2);
      }
      for (std::size_t src = 0; src < s.op2.size(); ++src) {
        for (int uk : {kInput, kConst, kNot}) clause({~k[static_cast<std::size_t>(uk)], ~s.op2[src]});
        std::vector<Lit> below{~s.op2[src]};
        for (std::size_t t = 0; t < src; ++t) below.push_back(s.op1[t]);
        clause(below);
      }
      for (std::size_t t = 0; t < j; ++t) {
        const auto &kt = sel_[t].kind;
        clause({~k[kNot], ~s.op1[n + t], ~kt[kNot]});
        for (int leaf : {kInput, kConst}) {
          clause({~kt[static_cast<std::size_t>(leaf)], ~s.op1[n + t]});
          clause({~kt[static_cast<std::size_t>(leaf)], ~s.op2[n + t]});
        }
      }
    }
    // Every slot feeds a later slot or an output.
    for (int tt = 0; tt < slots_; ++tt) {
      const auto t = static_cast<std::size_t>(tt);
      if (single && tt == slots_ - 1) continue;
      std::vector<Lit> used;
      for (std::size_t j = t + 1; j < static_cast<std::size_t>(slots_); ++j) {
        used.push_back(sel_[j].op1[n + t]);
        used.push_back(sel_[j].op2[n + t]);
      }
      for (const auto &row : outsel_) used.push_back(row[t]);
      clause(used);
    }
    for (const auto &row : outsel_) exactly_one(row);
    for (int i : essential) {
      std::vector<Lit> reads;
      for (const auto &s : sel_) {
        reads.push_back(s.op1[static_cast<std::size_t>(i)]);
        reads.push_back(s.op2[static_cast<std::size_t>(i)]);
      }
      clause(reads);
    }
  }

  int n_;
  int slots_;
  int outputs_;
  sat::CnfFormula f_;
  sat::TseitinEncoder enc_{f_};
  sat::Solver solver_;
  std::vector<Sel> sel_;
  std::vector<std::vector<Lit>> outsel_;
};

Identifier fresh_temp(const std::string &base, std::size_t slot, const BlockInterface &iface) {
  for (std::size_t attempt = 0;; ++attempt) {
    std::string text = base + "_t" + std::to_string(slot) + (attempt ? "_" + std::to_string(attempt) : "");
    if (!Identifier::is_valid(text)) text = "t" + std::to_string(slot) + "_" + std::to_string(attempt);
    Identifier id(text);
    if (!iface.contains(id)) return id;
  }
}

} // namespace

std::size_t program_size(const SlotProgram &program) { return program.slots.size(); }

std::vector<Statement> program_statements(const SlotProgram &program, const std::vector<Identifier> &inputs,
                                          const std::vector<Identifier> &outputs, BlockInterface &iface) {
  const int n = program.num_inputs;
  const std::size_t L = program.slots.size();
  std::vector<int> refs(L, 0);
  for (const auto &s : program.slots) {
    if (s.kind == SlotKind::Input || s.kind == SlotKind::Const) continue;
    if (s.lhs >= n) ++refs[static_cast<std::size_t>(s.lhs - n)];
    if (s.rhs >= n) ++refs[static_cast<std::size_t>(s.rhs - n)];
  }
  std::vector<std::optional<Identifier>> name(L);
  for (std::size_t o = 0; o < program.outputs.size(); ++o) {
    const auto j = static_cast<std::size_t>(program.outputs[o]);
    if (!name[j]) name[j] = outputs[o];
  }
  for (std::size_t j = 0; j < L; ++j) {
    if (!name[j] && refs[j] >= 2) {
      Identifier t = fresh_temp(outputs.front().str(), j, iface);
      iface.add({t, Direction::Temp, DataType::Bool});
      name[j] = t;
    }
  }

  std::vector<Expr> inline_expr(L, Expr::constant(false));
  auto operand = [&](int src) -> Expr {
    if (src < n) return Expr::var(inputs[static_cast<std::size_t>(src)]);
    const auto t = static_cast<std::size_t>(src - n);
    return name[t] ? Expr::var(*name[t]) : inline_expr[t];
  };
  std::vector<Statement> body;
  for (std::size_t j = 0; j < L; ++j) {
    const Slot &s = program.slots[j];
    Expr e = Expr::constant(s.value);
    switch (s.kind) {
    case SlotKind::Input: e = operand(s.lhs); break;
    case SlotKind::Const: break;
    case SlotKind::Not: e = Expr::negate(operand(s.lhs)); break;
    case SlotKind::And: e = Expr::conj(operand(s.lhs), operand(s.rhs)); break;
    case SlotKind::Or: e = Expr::disj(operand(s.lhs), operand(s.rhs)); break;
    case SlotKind::Xor: e = Expr::exclusive(operand(s.lhs), operand(s.rhs)); break;
    }
    inline_expr[j] = e;
    if (name[j]) body.push_back({*name[j], e});
  }
  for (std::size_t o = 0; o < program.outputs.size(); ++o) {
    const auto j = static_cast<std::size_t>(program.outputs[o]);
    if (*name[j] != outputs[o]) body.push_back({outputs[o], Expr::var(*name[j])});
  }
  return body;
}

GroupResult synthesize_group(const CegisOracle &oracle, const std::vector<Identifier> &outputs, int min_slots,
                             int max_slots, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  GroupResult result;
  result.run.outputs = outputs;
  std::vector<int> essential;
  if (outputs.size() == 1) essential = oracle.essential_inputs(outputs.front());

  std::vector<CegisExample> examples;
  std::set<Assignment> seen;
  BlockInterface base;
  for (const auto &i : oracle.inputs()) base.add({i, Direction::Input, DataType::Bool});
  for (const auto &o : outputs) base.add({o, Direction::Output, DataType::Bool});

  const int n = static_cast<int>(oracle.inputs().size());
  for (int slots = std::max(1, min_slots); slots <= max_slots; ++slots) {
    SlotLearner learner(n, slots, static_cast<int>(outputs.size()), essential, seed);
    for (const auto &ex : examples) learner.add(ex, oracle.inputs(), outputs);
    while (auto program = learner.next()) {
      ++result.run.iterations;
      Block candidate{"Candidate", base, {}, Lang::ST};
      candidate.body = program_statements(*program, oracle.inputs(), outputs, candidate.interface);
      auto ex = oracle.find_violation(candidate);
      if (!ex) {
        result.program = std::move(*program);
        result.run.slots = slots;
        result.run.counterexamples = static_cast<int>(examples.size());
        result.run.wall_time = std::chrono::steady_clock::now() - start;
        return result;
      }
      if (ex->residual.kind() == ExprKind::Const && !ex->residual.value())
        throw Unsatisfiable("unsatisfiable: no output values meet the constraints for inputs " +
                            ex->inputs.to_string());
      if (!seen.insert(ex->inputs).second)
        throw InternalError("counterexample repeated: " + ex->inputs.to_string());
      learner.add(*ex, oracle.inputs(), outputs);
      examples.push_back(std::move(*ex));
    }
  }
  throw SizeBoundExceeded(max_slots);
}

} // namespace detail

namespace {

void check_synthesis_input(const BlockInterface &iface, const SpecFormula &spec, const SynthConfig &cfg) {
  if (cfg.max_slots < 1) throw TypeError("max_slots must be at least 1");
  if (cfg.unwind_cycles != 1) throw TypeError("synthesis is combinational: unwind_cycles must be 1");
  if (!iface.states().empty()) throw TypeError("synthesis of blocks with state variables is not supported");
  for (const auto &o : obligations_of(spec)) {
    for (const auto &v : o.formula.vars()) {
      const VarDecl *d = iface.find(v);
      if (!d || d->direction == Direction::Temp)
        throw TypeError("constraints reference '" + v.str() + "' outside the interface");
    }
  }
}

// Outputs that must be synthesized together because an assertion relates
// them; unconstrained outputs are left out.
std::vector<std::vector<Identifier>> output_groups(const BlockInterface &iface, const SpecFormula &spec,
                                                   bool per_output) {
  const auto outputs = iface.outputs();
  std::vector<std::size_t> parent(outputs.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> root = [&](std::size_t i) {
    return parent[i] == i ? i : parent[i] = root(parent[i]);
  };
  auto index = [&](const Identifier &o) {
    return static_cast<std::size_t>(std::find(outputs.begin(), outputs.end(), o) - outputs.begin());
  };
  std::vector<bool> constrained(outputs.size(), false);
  for (const auto &[o, imps] : spec.obligations)
    if (!imps.empty() && iface.contains(o)) constrained[index(o)] = true;
  for (const auto &a : spec.assertions) {
    std::vector<std::size_t> touched;
    for (const auto &v : a.expr.vars()) {
      const VarDecl *d = iface.find(v);
      if (d && d->direction == Direction::Output) touched.push_back(index(v));
    }
    for (auto t : touched) constrained[t] = true;
    for (std::size_t i = 1; i < touched.size(); ++i) parent[root(touched[i])] = root(touched[0]);
  }
  std::vector<std::vector<Identifier>> groups;
  std::map<std::size_t, std::size_t> slot_of_root;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    if (!constrained[i]) continue;
    const std::size_t r = per_output ? root(i) : 0;
    auto [it, fresh] = slot_of_root.emplace(r, groups.size());
    if (fresh) groups.emplace_back();
    groups[it->second].push_back(outputs[i]);
  }
  return groups;
}

SpecFormula restrict_spec(const SpecFormula &spec, const std::vector<Identifier> &outputs) {
  SpecFormula sub;
  sub.interface = spec.interface;
  const std::set<Identifier> keep(outputs.begin(), outputs.end());
  for (const auto &[o, imps] : spec.obligations)
    if (keep.count(o)) sub.obligations[o] = imps;
  for (const auto &a : spec.assertions) {
    bool other = false;
    bool mine = false;
    for (const auto &v : a.expr.vars()) {
      const VarDecl *d = spec.interface.find(v);
      if (d && d->direction == Direction::Output) (keep.count(v) ? mine : other) = true;
    }
    if (mine || !other) sub.assertions.push_back(a);
  }
  return sub;
}

std::string join(const std::vector<Identifier> &names) {
  std::string s;
  for (const auto &n : names) s += (s.empty() ? "" : ",") + n.str();
  return s;
}

} // namespace

namespace detail {

// Confirms the assembled block against the whole spec before it is handed
// out; failing here means the engine is broken.
void assert_meets(const Block &block, const SpecFormula &spec, const SynthConfig &cfg) {
  SynthConfig one = cfg;
  one.unwind_cycles = 1;
  one.symbolic_init = false;
  BlockInterface externals;
  for (const auto &d : block.interface.decls())
    if (d.direction != Direction::Temp) externals.add(d);
  CegisOracle oracle(externals, obligations_of(spec), one);
  if (auto ex = oracle.find_violation(block))
    throw InternalError("result violates the constraints at " + ex->inputs.to_string());
}

} // namespace detail

SynthesisResult synthesize(const BlockInterface &iface_in, const SpecFormula &spec, const SynthConfig &cfg,
                           const Identifier &name) {
  const auto start = std::chrono::steady_clock::now();
  BlockInterface iface;
  for (const auto &d : iface_in.decls())
    if (d.direction != Direction::Temp) iface.add(d);
  check_synthesis_input(iface, spec, cfg);

  SynthesisResult result;
  result.block = Block{name, iface, {}, Lang::ST};
  auto groups = output_groups(iface, spec, cfg.per_output);

  if (groups.empty() && !spec.assertions.empty()) {
    detail::CegisOracle oracle(iface, obligations_of(spec), cfg);
    oracle.check_feasible();
  }
  for (const auto &group : groups) {
    const SpecFormula sub = restrict_spec(spec, group);
    detail::CegisOracle oracle(iface, obligations_of(sub), cfg);
    oracle.check_feasible();
    int min_slots = 1;
    if (group.size() == 1) {
      const auto essential = oracle.essential_inputs(group.front());
      min_slots = std::max(1, static_cast<int>(essential.size()) - 1);
    }
    const auto seed = detail::seed_for(cfg.seed, join(group));
    auto g = detail::synthesize_group(oracle, group, min_slots, cfg.max_slots, seed);
    auto body = detail::program_statements(g.program, oracle.inputs(), group, result.block.interface);
    result.block.body.insert(result.block.body.end(), body.begin(), body.end());
    result.iterations += g.run.iterations;
    result.counterexamples_used += g.run.counterexamples;
    result.slots_used += g.run.slots;
    result.runs.push_back(std::move(g.run));
  }
  detail::assert_meets(result.block, spec, cfg);
  result.wall_time = std::chrono::steady_clock::now() - start;
  return result;
}

SynthesisResult synthesize(const ConstraintList &list, const SynthConfig &cfg) {
  return synthesize(list.interface, compile_spec(list), cfg, list.block_name);
}

} // namespace plcsynth

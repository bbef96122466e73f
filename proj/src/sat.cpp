#include "plcsynth/sat.hpp"

#include <algorithm>
#include <sstream>

namespace plcsynth::sat {

Lit Lit::from_dimacs(int value) {
  if (value == 0)
    throw std::invalid_argument("DIMACS literal 0");
  return Lit(Var{static_cast<std::uint32_t>(value < 0 ? -value : value)}, value < 0);
}

void CnfFormula::add_clause(std::span<const Lit> lits) {
  if (lits.empty()) {
    empty_clause_ = true;
    return;
  }
  for (Lit l : lits)
    if (l.var().index == 0 || l.var().index > num_vars_)
      throw std::out_of_range("literal references undeclared variable " +
                              std::to_string(l.var().index));
  clauses_.emplace_back(lits.begin(), lits.end());
}

std::string to_dimacs(const CnfFormula &f) {
  std::ostringstream os;
  std::size_t n = f.clauses().size() + (f.has_empty_clause() ? 1 : 0);
  os << "p cnf " << f.num_vars() << ' ' << n << '\n';
  for (const auto &c : f.clauses()) {
    for (Lit l : c)
      os << l.dimacs() << ' ';
    os << "0\n";
  }
  if (f.has_empty_clause())
    os << "0\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Tseitin

Lit TseitinEncoder::true_lit() {
  if (!true_) {
    Var v = f_.new_var();
    true_ = Lit::positive(v);
    f_.add_clause({*true_});
  }
  return *true_;
}

Lit TseitinEncoder::land(Lit a, Lit b) {
  if (is_const(a))
    return a == *true_ ? b : a;
  if (is_const(b))
    return b == *true_ ? a : b;
  if (a == b)
    return a;
  if (a == ~b)
    return false_lit();
  Lit x = Lit::positive(f_.new_var());
  f_.add_clause({~x, a});
  f_.add_clause({~x, b});
  f_.add_clause({x, ~a, ~b});
  return x;
}

Lit TseitinEncoder::lxor(Lit a, Lit b) {
  if (is_const(a))
    return a == *true_ ? ~b : b;
  if (is_const(b))
    return b == *true_ ? ~a : a;
  if (a == b)
    return false_lit();
  if (a == ~b)
    return true_lit();
  Lit x = Lit::positive(f_.new_var());
  f_.add_clause({~x, a, b});
  f_.add_clause({~x, ~a, ~b});
  f_.add_clause({x, ~a, b});
  f_.add_clause({x, a, ~b});
  return x;
}

Lit TseitinEncoder::land(std::span<const Lit> ls) {
  std::vector<Lit> keep;
  for (Lit l : ls) {
    if (is_const(l)) {
      if (l == *true_)
        continue;
      return l;
    }
    keep.push_back(l);
  }
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  for (std::size_t i = 1; i < keep.size(); ++i)
    if (keep[i].var() == keep[i - 1].var())
      return false_lit();
  if (keep.empty())
    return true_lit();
  if (keep.size() == 1)
    return keep[0];
  Lit x = Lit::positive(f_.new_var());
  std::vector<Lit> big{x};
  for (Lit l : keep) {
    f_.add_clause({~x, l});
    big.push_back(~l);
  }
  f_.add_clause(big);
  return x;
}

Lit TseitinEncoder::lor(std::span<const Lit> ls) {
  std::vector<Lit> neg;
  neg.reserve(ls.size());
  for (Lit l : ls)
    neg.push_back(~l);
  return ~land(neg);
}

TseitinResult tseitin(const Expr &root, const std::map<Identifier, Var> &var_map) {
  TseitinResult r;
  for (const auto &[name, v] : var_map)
    r.formula.reserve_vars(v.index);
  TseitinEncoder enc(r.formula);
  r.root = enc.encode(root, [&](const Identifier &name) {
    auto it = var_map.find(name);
    if (it == var_map.end())
      throw UnboundVariable(name.str());
    return Lit::positive(it->second);
  });
  return r;
}

// ---------------------------------------------------------------------------
// CDCL solver

namespace {

constexpr int kNoReason = -1;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double luby(double y, int x) {
  int size = 1, seq = 0;
  for (; size < x + 1; seq++, size = 2 * size + 1) {
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    seq--;
    x = x % size;
  }
  double r = 1;
  for (int i = 0; i < seq; ++i)
    r *= y;
  return r;
}

} // namespace

struct Solver::Impl {
  struct ClauseData {
    std::vector<Lit> lits;
    bool learnt;
  };

  SolverOptions opts;
  SolverStats stats;
  std::uint32_t nvars = 0;
  bool ok = true;

  std::vector<ClauseData> clauses;
  std::vector<Clause> originals;
  std::vector<std::vector<std::uint32_t>> watches; // by literal code
  std::vector<std::int8_t> assign;                 // by var: 0 undef, 1 true, -1 false
  std::vector<int> level;
  std::vector<int> reason;
  std::vector<bool> phase_true;
  std::vector<char> seen;
  std::vector<Lit> trail;
  std::vector<std::size_t> trail_lim;
  std::size_t qhead = 0;
  std::vector<double> activity;
  double var_inc = 1.0;
  std::vector<std::uint32_t> heap;
  std::vector<int> heap_pos;
  std::size_t synced = 0;

  std::int8_t value(Lit l) const {
    std::int8_t a = assign[l.var().index];
    return l.negated() ? static_cast<std::int8_t>(-a) : a;
  }

  int decision_level() const { return static_cast<int>(trail_lim.size()); }

  void grow(std::uint32_t n) {
    if (n <= nvars)
      return;
    const std::uint32_t first = nvars + 1;
    nvars = n;
    assign.resize(n + 1, 0);
    level.resize(n + 1, 0);
    reason.resize(n + 1, kNoReason);
    seen.resize(n + 1, 0);
    watches.resize(2 * (n + 1));
    phase_true.resize(n + 1, false);
    activity.resize(n + 1, 0.0);
    heap_pos.resize(n + 1, -1);
    for (std::uint32_t v = first; v <= n; ++v) {
      phase_true[v] = opts.seed != 0 && (splitmix64(opts.seed * 0x100000001b3ULL + v) & 3U) == 0;
      heap_insert(v);
    }
  }

  // Decision order: highest activity first, lowest index on ties.
  bool before(std::uint32_t a, std::uint32_t b) const {
    return activity[a] > activity[b] || (activity[a] == activity[b] && a < b);
  }

  void heap_up(std::size_t i) {
    const std::uint32_t v = heap[i];
    while (i > 0) {
      const std::size_t parent = (i - 1) / 2;
      if (!before(v, heap[parent]))
        break;
      heap[i] = heap[parent];
      heap_pos[heap[i]] = static_cast<int>(i);
      i = parent;
    }
    heap[i] = v;
    heap_pos[v] = static_cast<int>(i);
  }

  void heap_down(std::size_t i) {
    const std::uint32_t v = heap[i];
    for (;;) {
      std::size_t child = 2 * i + 1;
      if (child >= heap.size())
        break;
      if (child + 1 < heap.size() && before(heap[child + 1], heap[child]))
        ++child;
      if (!before(heap[child], v))
        break;
      heap[i] = heap[child];
      heap_pos[heap[i]] = static_cast<int>(i);
      i = child;
    }
    heap[i] = v;
    heap_pos[v] = static_cast<int>(i);
  }

  void heap_insert(std::uint32_t v) {
    if (heap_pos[v] >= 0)
      return;
    heap.push_back(v);
    heap_up(heap.size() - 1);
  }

  std::uint32_t heap_pop() {
    const std::uint32_t top = heap.front();
    heap_pos[top] = -1;
    heap.front() = heap.back();
    heap.pop_back();
    if (!heap.empty()) {
      heap_pos[heap.front()] = 0;
      heap_down(0);
    }
    return top;
  }

  void bump(std::uint32_t v) {
    activity[v] += var_inc;
    if (activity[v] > 1e100) {
      for (auto &a : activity)
        a *= 1e-100;
      var_inc *= 1e-100;
    }
    if (heap_pos[v] >= 0)
      heap_up(static_cast<std::size_t>(heap_pos[v]));
  }

  void enqueue(Lit l, int why) {
    Var v = l.var();
    assign[v.index] = l.negated() ? -1 : 1;
    level[v.index] = decision_level();
    reason[v.index] = why;
    trail.push_back(l);
  }

  void backtrack(int lvl) {
    if (decision_level() <= lvl)
      return;
    for (std::size_t i = trail.size(); i > trail_lim[static_cast<std::size_t>(lvl)]; --i) {
      std::uint32_t v = trail[i - 1].var().index;
      phase_true[v] = assign[v] > 0;
      assign[v] = 0;
      reason[v] = kNoReason;
      heap_insert(v);
    }
    trail.resize(trail_lim[static_cast<std::size_t>(lvl)]);
    trail_lim.resize(static_cast<std::size_t>(lvl));
    qhead = trail.size();
  }

  void attach(std::uint32_t ci) {
    const auto &c = clauses[ci].lits;
    watches[c[0].code()].push_back(ci);
    watches[c[1].code()].push_back(ci);
  }

  void add_clause(std::span<const Lit> in) {
    for (Lit l : in)
      if (l.var().index == 0 || l.var().index > nvars)
        throw std::out_of_range("literal references undeclared variable " +
                                std::to_string(l.var().index));
    originals.emplace_back(in.begin(), in.end());
    if (!ok)
      return;
    backtrack(0);
    std::vector<Lit> c(in.begin(), in.end());
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    std::vector<Lit> kept;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (i + 1 < c.size() && c[i + 1] == ~c[i])
        return; // tautology
      std::int8_t v = value(c[i]);
      if (v > 0)
        return; // satisfied at level 0
      if (v == 0)
        kept.push_back(c[i]);
    }
    if (kept.empty()) {
      ok = false;
      return;
    }
    if (kept.size() == 1) {
      enqueue(kept[0], kNoReason);
      if (propagate() >= 0)
        ok = false;
      return;
    }
    clauses.push_back({std::move(kept), false});
    attach(static_cast<std::uint32_t>(clauses.size() - 1));
  }

  int propagate() {
    while (qhead < trail.size()) {
      Lit p = trail[qhead++];
      Lit falsified = ~p;
      auto &ws = watches[falsified.code()];
      std::size_t i = 0, j = 0;
      while (i < ws.size()) {
        std::uint32_t ci = ws[i++];
        auto &c = clauses[ci].lits;
        if (c[0] == falsified)
          std::swap(c[0], c[1]);
        if (value(c[0]) > 0) {
          ws[j++] = ci;
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < c.size(); ++k) {
          if (value(c[k]) >= 0) {
            std::swap(c[1], c[k]);
            watches[c[1].code()].push_back(ci);
            moved = true;
            break;
          }
        }
        if (moved)
          continue;
        ws[j++] = ci;
        if (value(c[0]) < 0) {
          while (i < ws.size())
            ws[j++] = ws[i++];
          ws.resize(j);
          qhead = trail.size();
          return static_cast<int>(ci);
        }
        ++stats.propagations;
        enqueue(c[0], static_cast<int>(ci));
      }
      ws.resize(j);
    }
    return -1;
  }

  // First-UIP conflict analysis. Returns the backjump level.
  int analyze(int confl, std::vector<Lit> &learnt) {
    learnt.assign(1, Lit());
    int path = 0;
    bool have_p = false;
    Lit p;
    std::size_t idx = trail.size();
    int ci = confl;
    do {
      const auto &c = clauses[static_cast<std::size_t>(ci)].lits;
      for (std::size_t j = have_p ? 1 : 0; j < c.size(); ++j) {
        std::uint32_t v = c[j].var().index;
        if (seen[v] || level[v] == 0)
          continue;
        seen[v] = 1;
        bump(v);
        if (level[v] >= decision_level())
          ++path;
        else
          learnt.push_back(c[j]);
      }
      while (!seen[trail[idx - 1].var().index])
        --idx;
      p = trail[--idx];
      have_p = true;
      ci = reason[p.var().index];
      seen[p.var().index] = 0;
      --path;
    } while (path > 0);
    learnt[0] = ~p;

    int bt = 0;
    std::size_t max_i = 1;
    for (std::size_t i = 1; i < learnt.size(); ++i) {
      int l = level[learnt[i].var().index];
      if (l > bt) {
        bt = l;
        max_i = i;
      }
    }
    if (learnt.size() > 1)
      std::swap(learnt[1], learnt[max_i]);
    for (Lit l : learnt)
      seen[l.var().index] = 0;
    return bt;
  }

  std::uint32_t pick_branch() {
    while (!heap.empty()) {
      std::uint32_t v = heap_pop();
      if (assign[v] == 0)
        return v;
    }
    return 0;
  }

  void check_model(const std::vector<bool> &model, std::span<const Lit> assumptions) const {
    auto holds = [&](Lit l) { return model[l.var().index] != l.negated(); };
    for (const auto &c : originals)
      if (std::none_of(c.begin(), c.end(), holds))
        throw InternalError("SAT model violates an input clause");
    for (Lit a : assumptions)
      if (!holds(a))
        throw InternalError("SAT model violates an assumption");
  }

  SatResult solve(std::span<const Lit> assumptions) {
    for (Lit a : assumptions)
      if (a.var().index == 0 || a.var().index > nvars)
        throw std::out_of_range("assumption references undeclared variable");
    backtrack(0);
    if (!ok)
      return SatResult::unsat();
    if (propagate() >= 0) {
      ok = false;
      return SatResult::unsat();
    }
    std::vector<Lit> learnt;
    std::uint64_t restart_budget = 100, since_restart = 0;
    int restart_count = 0;
    for (;;) {
      int confl = propagate();
      if (confl >= 0) {
        ++stats.conflicts;
        ++since_restart;
        if (decision_level() == 0) {
          ok = false;
          return SatResult::unsat();
        }
        int bt = analyze(confl, learnt);
        backtrack(bt);
        if (learnt.size() == 1) {
          enqueue(learnt[0], kNoReason);
        } else {
          clauses.push_back({learnt, true});
          auto ci = static_cast<std::uint32_t>(clauses.size() - 1);
          attach(ci);
          enqueue(learnt[0], static_cast<int>(ci));
        }
        ++stats.learned;
        var_inc /= 0.95;
        if (opts.restarts && since_restart >= restart_budget) {
          backtrack(0);
          since_restart = 0;
          restart_budget = static_cast<std::uint64_t>(100 * luby(2, ++restart_count));
        }
        continue;
      }

      std::optional<Lit> next;
      while (static_cast<std::size_t>(decision_level()) < assumptions.size()) {
        Lit a = assumptions[static_cast<std::size_t>(decision_level())];
        std::int8_t v = value(a);
        if (v > 0) {
          trail_lim.push_back(trail.size());
        } else if (v < 0) {
          backtrack(0);
          return SatResult::unsat();
        } else {
          next = a;
          break;
        }
      }
      if (!next) {
        std::uint32_t v = pick_branch();
        if (v == 0) {
          std::vector<bool> model(nvars + 1, false);
          for (std::uint32_t i = 1; i <= nvars; ++i)
            model[i] = assign[i] > 0;
          check_model(model, assumptions);
          backtrack(0);
          return SatResult::sat(std::move(model));
        }
        next = Lit(Var{v}, !phase_true[v]);
      }
      ++stats.decisions;
      trail_lim.push_back(trail.size());
      enqueue(*next, kNoReason);
    }
  }
};

Solver::Solver(SolverOptions opts) : impl_(std::make_unique<Impl>()) { impl_->opts = opts; }
Solver::~Solver() = default;
Solver::Solver(Solver &&) noexcept = default;
Solver &Solver::operator=(Solver &&) noexcept = default;

Var Solver::new_var() {
  impl_->grow(impl_->nvars + 1);
  return Var{impl_->nvars};
}

void Solver::reserve_vars(std::uint32_t n) { impl_->grow(n); }
std::uint32_t Solver::num_vars() const { return impl_->nvars; }

void Solver::add_clause(std::span<const Lit> lits) { impl_->add_clause(lits); }

void Solver::sync(const CnfFormula &f) {
  impl_->grow(f.num_vars());
  const auto &cs = f.clauses();
  for (; impl_->synced < cs.size(); ++impl_->synced)
    impl_->add_clause(cs[impl_->synced]);
  if (f.has_empty_clause())
    impl_->ok = false;
}

SatResult Solver::solve(std::span<const Lit> assumptions) { return impl_->solve(assumptions); }
const SolverStats &Solver::stats() const { return impl_->stats; }

SatResult solve(const CnfFormula &f, std::span<const Lit> assumptions, std::uint64_t seed) {
  Solver s(SolverOptions{seed});
  s.sync(f);
  return s.solve(assumptions);
}

} // namespace plcsynth::sat

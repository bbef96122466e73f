#include <gtest/gtest.h>

#include "plcsynth/core.hpp"
#include "support.hpp"

using namespace plcsynth;
using plcsynth::oracle::Rng;

namespace {

Expr v(const char *n) { return Expr::var(n); }

Block make_block(std::vector<VarDecl> decls, std::vector<Statement> body) {
  return Block{"B", BlockInterface(std::move(decls)), std::move(body), Lang::ST};
}

Block latch() {
  return make_block({{"a", Direction::Input}, {"y", Direction::Output}, {"s", Direction::State}},
                    {{"s", Expr::disj(v("s"), v("a"))}, {"y", v("s")}});
}

} // namespace

TEST(Identifier, RejectsBadNames) {
  EXPECT_THROW(Identifier("1abc"), InvalidIdentifier);
  EXPECT_THROW(Identifier(""), InvalidIdentifier);
  EXPECT_THROW(Identifier(std::string(65, 'a')), InvalidIdentifier);
  EXPECT_NO_THROW(Identifier(std::string(64, 'a')));
  EXPECT_NO_THROW(Identifier("_x1"));
}

TEST(EvalExpr, Examples) {
  EXPECT_FALSE(eval_expr(Expr::conj(v("a"), v("b")), {{"a", true}, {"b", false}}));
  EXPECT_TRUE(eval_expr(Expr::negate(Expr::constant(false)), {}));
  EXPECT_FALSE(eval_expr(Expr::exclusive(v("a"), v("a")), {{"a", true}}));
}

TEST(EvalExpr, UnboundVariable) {
  EXPECT_THROW(eval_expr(v("q"), {{"a", true}}), UnboundVariable);
}

TEST(EvalExpr, DoubleNegationProperty) {
  Rng rng(11);
  const auto leaves = oracle::names("x", 4);
  for (int k = 0; k < 200; ++k) {
    Expr e = oracle::random_expr(rng, leaves, 5);
    for (std::uint64_t p = 0; p < 16; ++p) {
      const Assignment env = pattern_assignment(leaves, p);
      ASSERT_EQ(eval_expr(Expr::negate(Expr::negate(e)), env), eval_expr(e, env));
    }
  }
}

TEST(Expr, DepthLimit) {
  Expr e = v("a");
  for (std::size_t i = 1; i < Expr::kMaxDepth; ++i)
    e = Expr::negate(e);
  EXPECT_EQ(e.depth(), Expr::kMaxDepth);
  EXPECT_THROW(Expr::negate(e), TypeError);
}

TEST(RunCycle, Examples) {
  Block and_block = make_block({{"a", Direction::Input}, {"b", Direction::Input}, {"y", Direction::Output}},
                               {{"y", Expr::conj(v("a"), v("b"))}});
  auto r = run_cycle(and_block, {}, {{"a", true}, {"b", true}});
  EXPECT_TRUE(r.outputs.get("y"));
  EXPECT_TRUE(r.next_state.empty());

  Block seq = make_block({{"a", Direction::Input}, {"y", Direction::Output}, {"t", Direction::Temp}},
                         {{"t", v("a")}, {"y", Expr::negate(v("t"))}});
  EXPECT_TRUE(run_cycle(seq, {}, {{"a", false}}).outputs.get("y"));

  auto l = run_cycle(latch(), {{"s", false}}, {{"a", true}});
  EXPECT_TRUE(l.next_state.get("s"));
}

TEST(RunCycle, UnassignedTemp) {
  Block b = make_block({{"a", Direction::Input}, {"y", Direction::Output}, {"t", Direction::Temp}},
                       {{"y", v("t")}, {"t", v("a")}});
  EXPECT_THROW(run_cycle(b, {}, {{"a", true}}), UnassignedTemp);
  EXPECT_THROW(check_block(b), UnassignedTemp);
}

TEST(RunCycle, UnassignedOutputIsFalse) {
  Block b = make_block({{"a", Direction::Input}, {"y", Direction::Output}, {"z", Direction::Output}},
                       {{"y", v("a")}});
  auto r = run_cycle(b, {}, {{"a", true}});
  EXPECT_TRUE(r.outputs.get("y"));
  EXPECT_FALSE(r.outputs.get("z"));
}

TEST(Simulate, LatchTrace) {
  std::vector<Assignment> in{{{"a", false}}, {{"a", true}}, {{"a", false}}};
  Trace t = simulate(latch(), in, {{"s", false}});
  ASSERT_EQ(t.cycles.size(), 3u);
  EXPECT_FALSE(t.cycles[0].outputs.get("y"));
  EXPECT_TRUE(t.cycles[1].outputs.get("y"));
  EXPECT_TRUE(t.cycles[2].outputs.get("y"));
}

TEST(Simulate, EmptyBodyIsAllFalse) {
  Block b = make_block({{"a", Direction::Input}, {"y", Direction::Output}, {"z", Direction::Output}}, {});
  std::vector<Assignment> in{{{"a", true}}, {{"a", false}}};
  for (const auto &c : simulate(b, in, {}).cycles) {
    EXPECT_FALSE(c.outputs.get("y"));
    EXPECT_FALSE(c.outputs.get("z"));
  }
}

TEST(Simulate, OneCycleMatchesRunCycle) {
  Rng rng(3);
  for (int k = 0; k < 50; ++k) {
    Block b = oracle::random_block(rng, {3, 2, 1, 1, 5, 3});
    const auto in = b.interface.inputs();
    for (std::uint64_t p = 0; p < 8; ++p) {
      const Assignment x = pattern_assignment(in, p);
      const Assignment s = default_state(b.interface);
      auto r = run_cycle(b, s, x);
      auto t = simulate(b, std::vector<Assignment>{x}, s);
      ASSERT_EQ(t.cycles.at(0).outputs, r.outputs);
      ASSERT_EQ(t.cycles.at(0).state_after, r.next_state);
    }
  }
}

TEST(Simulate, CycleCompositionProperty) {
  Rng rng(5);
  for (int k = 0; k < 100; ++k) {
    Block b = oracle::random_block(rng, {2, 2, 2, 1, 6, 3});
    const auto in = b.interface.inputs();
    std::vector<Assignment> t1, t2;
    for (int c = 0; c < 3; ++c)
      t1.push_back(pattern_assignment(in, static_cast<std::uint64_t>(oracle::pick(rng, 0, 3))));
    for (int c = 0; c < 2; ++c)
      t2.push_back(pattern_assignment(in, static_cast<std::uint64_t>(oracle::pick(rng, 0, 3))));
    const Assignment s0 = pattern_assignment(b.interface.states(), static_cast<std::uint64_t>(oracle::pick(rng, 0, 3)));
    std::vector<Assignment> both = t1;
    both.insert(both.end(), t2.begin(), t2.end());
    Trace whole = simulate(b, both, s0);
    Trace first = simulate(b, t1, s0);
    Trace second = simulate(b, t2, first.cycles.back().state_after);
    first.cycles.insert(first.cycles.end(), second.cycles.begin(), second.cycles.end());
    ASSERT_EQ(whole, first);
  }
}

TEST(RunCycle, DeterministicProperty) {
  Rng rng(8);
  for (int k = 0; k < 50; ++k) {
    Block b = oracle::random_block(rng, {3, 2, 1, 2, 6, 3});
    const Assignment x = pattern_assignment(b.interface.inputs(), 5);
    const Assignment s = pattern_assignment(b.interface.states(), 1);
    auto r1 = run_cycle(b, s, x), r2 = run_cycle(b, s, x);
    ASSERT_EQ(r1.outputs, r2.outputs);
    ASSERT_EQ(r1.next_state, r2.next_state);
  }
}

// Stateless blocks: the second cycle's outputs ignore the first cycle.
TEST(Simulate, StatelessOutputsDependOnCurrentCycleOnly) {
  Rng rng(13);
  for (int k = 0; k < 30; ++k) {
    const int n = oracle::pick(rng, 1, 5);
    Block b = oracle::random_block(rng, {n, 2, 0, 2, 6, 3});
    const auto in = b.interface.inputs();
    const std::uint64_t np = 1ULL << n;
    for (std::uint64_t q = 0; q < np; ++q) {
      const Assignment x = pattern_assignment(in, q);
      const Assignment expected = run_cycle(b, {}, x).outputs;
      for (std::uint64_t p = 0; p < np; ++p) {
        Trace t = simulate(b, std::vector<Assignment>{pattern_assignment(in, p), x}, {});
        ASSERT_EQ(t.cycles[1].outputs, expected);
      }
    }
  }
}

TEST(CheckBlock, RejectsInputTargetsAndUndeclared) {
  EXPECT_THROW(check_block(make_block({{"a", Direction::Input}, {"y", Direction::Output}}, {{"a", v("y")}})),
               TypeError);
  EXPECT_THROW(check_block(make_block({{"a", Direction::Input}, {"y", Direction::Output}}, {{"y", v("q")}})),
               TypeError);
}

TEST(OperatorCount, CountsOperatorNodes) {
  Block b = make_block({{"a", Direction::Input}, {"b", Direction::Input}, {"y", Direction::Output}},
                       {{"y", Expr::disj(Expr::conj(v("a"), v("b")), Expr::conj(v("a"), Expr::negate(v("b"))))}});
  EXPECT_EQ(operator_count(b), 4u);
  Block copy = make_block({{"a", Direction::Input}, {"y", Direction::Output}}, {{"y", v("a")}});
  EXPECT_EQ(operator_count(copy), 1u);
}

#include "plcsynth/bench.hpp"

#include <cmath>

namespace plcsynth {

BenchStats stats(std::span<const Millis> samples) {
  if (samples.size() < 2)
    throw InsufficientSamples("standard deviation needs at least 2 samples, got " +
                              std::to_string(samples.size()));
  BenchStats s;
  s.n = samples.size();
  s.samples.assign(samples.begin(), samples.end());
  double sum = 0;
  for (auto x : samples)
    sum += x.count();
  const double mean = sum / static_cast<double>(s.n);
  double sq = 0;
  for (auto x : samples)
    sq += (x.count() - mean) * (x.count() - mean);
  s.mean = Millis(mean);
  s.stddev = Millis(std::sqrt(sq / static_cast<double>(s.n - 1)));
  return s;
}

std::string_view to_string(Scenario s) {
  switch (s) {
  case Scenario::Magnet: return "magnet";
  case Scenario::Row: return "row";
  case Scenario::SignalLight: return "signal-light";
  }
  return "magnet";
}

std::optional<Scenario> parse_scenario(std::string_view text) {
  for (Scenario s : {Scenario::Magnet, Scenario::Row, Scenario::SignalLight})
    if (to_string(s) == text)
      return s;
  return std::nullopt;
}

ConstraintList table_constraints(const Identifier &block, const BlockInterface &iface,
                                 const std::map<Identifier, Expr> &rules) {
  ConstraintList list{block, Mode::Generate, iface, {}};
  const auto inputs = iface.inputs();
  for (std::uint64_t p = 0; p < (1ULL << inputs.size()); ++p) {
    const Assignment x = pattern_assignment(inputs, p);
    TruthTableRow row;
    for (const auto &[name, v] : x)
      row.inputs[name] = v ? TriValue::True : TriValue::False;
    for (const auto &o : iface.outputs())
      row.outputs[o] = eval_expr(rules.at(o), x) ? TriValue::True : TriValue::False;
    list.constraints.emplace_back(std::move(row));
  }
  return list;
}

namespace {

Expr v(const std::string &name) { return Expr::var(Identifier(name)); }

Expr magnet_rule(const Expr &left, const Expr &right, const Expr &ahead) {
  return Expr::disj(Expr::conj(left, right), Expr::negate(ahead));
}

} // namespace

ScenarioSpec scenario_spec(Scenario s) {
  BlockInterface iface;
  std::map<Identifier, Expr> rules;
  Identifier name("Magnet");
  switch (s) {
  case Scenario::Magnet:
    for (int i = 1; i <= 4; ++i)
      iface.add({Identifier("s" + std::to_string(i)), Direction::Input});
    iface.add({"m2", Direction::Output});
    rules.emplace("m2", magnet_rule(v("s2"), v("s3"), v("s4")));
    break;
  case Scenario::Row:
    name = Identifier("Row");
    for (int i = 1; i <= 4; ++i)
      iface.add({Identifier("s" + std::to_string(i)), Direction::Input});
    for (int k = 1; k <= 3; ++k)
      iface.add({Identifier("m" + std::to_string(k)), Direction::Output});
    rules.emplace("m1", magnet_rule(v("s1"), v("s2"), v("s3")));
    rules.emplace("m2", magnet_rule(v("s2"), v("s3"), v("s4")));
    rules.emplace("m3", magnet_rule(v("s3"), v("s4"), Expr::constant(true)));
    break;
  case Scenario::SignalLight: {
    name = Identifier("SignalLight");
    std::vector<Expr> causes;
    for (int i = 1; i <= 4; ++i) {
      Identifier id("upper_full" + std::to_string(i));
      iface.add({id, Direction::Input});
      causes.push_back(Expr::var(id));
    }
    for (int i = 1; i <= 4; ++i) {
      Identifier id("lower_empty" + std::to_string(i));
      iface.add({id, Direction::Input});
      causes.push_back(Expr::var(id));
    }
    iface.add({"light", Direction::Output});
    rules.emplace("light", disj_all(causes));
    break;
  }
  }
  ConstraintList list = table_constraints(name, iface, rules);
  return {s, std::move(rules), std::move(list)};
}

bool matches_rules(const Block &block, const std::map<Identifier, Expr> &rules) {
  const auto inputs = block.interface.inputs();
  const Assignment state = default_state(block.interface);
  for (std::uint64_t p = 0; p < (1ULL << inputs.size()); ++p) {
    const Assignment x = pattern_assignment(inputs, p);
    const CycleResult r = run_cycle(block, state, x);
    for (const auto &[o, rule] : rules)
      if (r.outputs.get(o) != eval_expr(rule, x))
        return false;
  }
  return true;
}

BenchReport bench_run(Scenario s, int repeats, const SynthConfig &cfg) {
  if (repeats < 2)
    throw InsufficientSamples("bench needs at least 2 repeats, got " + std::to_string(repeats));
  const ScenarioSpec spec = scenario_spec(s);
  const SpecFormula formula = compile_spec(spec.constraints);
  BenchReport report{s, {}, {}, {"Synthesized", {}, {}, Lang::ST}};
  std::vector<Millis> samples;
  for (int i = 0; i < repeats; ++i) {
    SynthConfig run_cfg = cfg;
    run_cfg.seed = cfg.seed + static_cast<std::uint64_t>(i);
    const auto start = std::chrono::steady_clock::now();
    SynthesisResult r =
        synthesize(spec.constraints.interface, formula, run_cfg, spec.constraints.block_name);
    const Millis elapsed = std::chrono::steady_clock::now() - start;
    if (!matches_rules(r.block, spec.rules))
      throw InternalError("benchmark program for " + std::string(to_string(s)) + " (seed " +
                          std::to_string(run_cfg.seed) + ") does not match its table");
    report.repeats.push_back(
        {run_cfg.seed, elapsed, r.synthesis_calls(), r.slots_used, r.iterations});
    samples.push_back(elapsed);
    report.last_block = std::move(r.block);
  }
  report.stats = stats(samples);
  return report;
}

} // namespace plcsynth

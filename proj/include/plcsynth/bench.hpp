#pragma once

// The warehouse benchmark: scenario constraint lists built from their rules,
// repeated seeded synthesis, and timing statistics.

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "plcsynth/engine.hpp"

namespace plcsynth {

using Millis = std::chrono::duration<double, std::milli>;

struct BenchStats {
  std::size_t n = 0;
  std::vector<Millis> samples;
  Millis mean{};
  /// Sample standard deviation (N-1 in the denominator).
  Millis stddev{};
};

/// Throws InsufficientSamples for fewer than two samples.
BenchStats stats(std::span<const Millis> samples);

enum class Scenario : std::uint8_t { Magnet, Row, SignalLight };

std::string_view to_string(Scenario s);
std::optional<Scenario> parse_scenario(std::string_view text);

struct ScenarioSpec {
  Scenario name;
  /// Output rules over the inputs; the constraint list is their full truth
  /// table.
  std::map<Identifier, Expr> rules;
  ConstraintList constraints;
};

/// Magnet: the middle magnet of a row, m2 = (s2 AND s3) OR NOT s4 over s1..s4.
/// Row: m_k = (s_k AND s_k+1) OR NOT s_k+2 for k = 1..3, where the slot past
/// the end counts as occupied. Signal light: lit when any upper row is full
/// or any lower row is empty.
ScenarioSpec scenario_spec(Scenario s);

/// Truth-table constraint list of the given rules over all input patterns.
ConstraintList table_constraints(const Identifier &block, const BlockInterface &iface,
                                 const std::map<Identifier, Expr> &rules);

struct BenchRepeat {
  std::uint64_t seed = 0;
  Millis time{};
  int synthesis_calls = 0;
  int slots = 0;
  int iterations = 0;
};

struct BenchReport {
  Scenario scenario;
  std::vector<BenchRepeat> repeats;
  BenchStats stats;
  Block last_block{"Synthesized", {}, {}, Lang::ST};
};

/// Synthesize the scenario `repeats` times with seeds cfg.seed, cfg.seed+1,
/// ...; every program is checked against the whole table before timings are
/// reported (InternalError on a mismatch).
BenchReport bench_run(Scenario s, int repeats, const SynthConfig &cfg = {});

/// True when the block reproduces every row of the rules' truth table.
bool matches_rules(const Block &block, const std::map<Identifier, Expr> &rules);

} // namespace plcsynth

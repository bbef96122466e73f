#pragma once

// Bounded verification of blocks against spec formulas, and the
// counterexample-guided synthesis loop behind generate / repair / simplify /
// extend.

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "plcsynth/core.hpp"
#include "plcsynth/spec.hpp"

namespace plcsynth {

struct SynthConfig {
  std::uint64_t seed = 0;
  int max_slots = 31;
  /// One independent CEGIS run per output variable.
  bool per_output = true;
  int unwind_cycles = 1;
  bool symbolic_init = false;
  /// Repair and extend: prefer the fewest changed nodes of the original
  /// code. When false the block is resynthesized from the constraints.
  bool edit_penalty = true;
  /// Up to this many inputs, CEGIS verifies candidates by enumerating every
  /// input pattern; above it, the SAT-based bounded check is used.
  std::size_t exhaustive_limit = 12;
};

struct Counterexample {
  Assignment init_state;
  std::vector<Assignment> input_cycles;
  std::string violated;
  std::size_t cycle_index = 0;

  friend bool operator==(const Counterexample &, const Counterexample &) = default;
};

class VerifyResult {
public:
  static VerifyResult verified(int bound) { return VerifyResult(bound, std::nullopt); }
  static VerifyResult violated(Counterexample cex) { return VerifyResult(0, std::move(cex)); }

  bool is_verified() const { return !cex_.has_value(); }
  int bound() const { return bound_; }
  const Counterexample &counterexample() const { return cex_.value(); }

private:
  VerifyResult(int bound, std::optional<Counterexample> cex) : bound_(bound), cex_(std::move(cex)) {}
  int bound_;
  std::optional<Counterexample> cex_;
};

/// Operator of one slot in a straight-line candidate program. Operands index
/// the inputs first (0..n-1) and then earlier slots (n..n+j-1).
enum class SlotKind : std::uint8_t { Input, Const, Not, And, Or, Xor };

struct Slot {
  SlotKind kind = SlotKind::Const;
  int lhs = -1;
  int rhs = -1;
  bool value = false;

  friend bool operator==(const Slot &, const Slot &) = default;
};

struct SlotProgram {
  int num_inputs = 0;
  std::vector<Slot> slots;
  /// Slot index computing each output.
  std::vector<int> outputs;

  friend bool operator==(const SlotProgram &, const SlotProgram &) = default;
};

/// Statistics of one independent CEGIS run (one output, or one group of
/// outputs synthesized jointly).
struct CegisRun {
  std::vector<Identifier> outputs;
  int slots = 0;
  int iterations = 0;
  int counterexamples = 0;
  std::chrono::duration<double> wall_time{};
};

struct SynthesisResult {
  Block block{"Synthesized", {}, {}, Lang::ST};
  int iterations = 0;
  int counterexamples_used = 0;
  int slots_used = 0;
  std::chrono::duration<double> wall_time{};
  /// Repair and extend: nodes of the original code that were changed.
  int nodes_changed = 0;
  std::vector<CegisRun> runs;

  int synthesis_calls() const { return static_cast<int>(runs.size()); }
};

VerifyResult verify(const Block &block, const SpecFormula &spec, const SynthConfig &cfg = {});

SynthesisResult synthesize(const BlockInterface &iface, const SpecFormula &spec,
                           const SynthConfig &cfg = {}, const Identifier &name = "Synthesized");
SynthesisResult synthesize(const ConstraintList &list, const SynthConfig &cfg = {});

SynthesisResult repair(const Block &block, const SpecFormula &spec, const SynthConfig &cfg = {});

SynthesisResult simplify(const Block &block, const SynthConfig &cfg = {});

SynthesisResult extend(const Block &block, const ConstraintList &extra, const SynthConfig &cfg = {});

VerifyResult equivalent(const Block &a, const Block &b, const SynthConfig &cfg = {});

/// Each output of a combinational block as an expression over its inputs
/// (and state variables); unassigned outputs are FALSE.
std::map<Identifier, Expr> output_functions(const Block &block);

/// Spec demanding that each output equals the given function.
SpecFormula functional_spec(const BlockInterface &iface, const std::map<Identifier, Expr> &functions);

/// Render a counterexample: `cycle <i>: name=v ...` per cycle, then
/// `violated: <description>`. An `init:` line precedes the cycles when the
/// initial state is not all-false.
std::string format_counterexample(const Counterexample &cex);

} // namespace plcsynth

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "plcsynth/engine.hpp"
#include "plcsynth/sat.hpp"
#include "truth_table.hpp"

namespace plcsynth::detail {

/// Fold an expression under a partial valuation; names without a value stay
/// symbolic.
Expr partial_eval(const Expr &e, const std::function<std::optional<bool>(const Identifier &)> &lookup);

std::uint64_t seed_for(std::uint64_t seed, const std::string &key);

/// Final environment tables of a block run once on every input pattern.
/// State variables read their initial value (false).
std::map<Identifier, TruthTable> block_tables(const Block &block, const std::vector<Identifier> &inputs);

/// Bounded check of a block against explicit obligations.
VerifyResult verify_obligations(const Block &block, const std::vector<Obligation> &obligations,
                                const SynthConfig &cfg);

/// Input pattern found by a CEGIS verifier, with the obligations partially
/// evaluated at that pattern (formulas over outputs only).
struct CegisExample {
  Assignment inputs;
  Expr residual;
};

/// Verification side of a CEGIS loop over a combinational problem.
class CegisOracle {
public:
  CegisOracle(BlockInterface iface, std::vector<Obligation> obligations, const SynthConfig &cfg);

  const std::vector<Identifier> &inputs() const { return inputs_; }
  const std::vector<Identifier> &outputs() const { return outputs_; }
  bool exhaustive() const { return exhaustive_; }

  /// Throws Unsatisfiable when some input pattern admits no output values.
  void check_feasible() const;

  /// First violating input pattern of a candidate, or nothing.
  std::optional<CegisExample> find_violation(const Block &candidate) const;

  CegisExample example(const Assignment &inputs) const;

  /// Inputs whose value decides the given output somewhere (exhaustive mode
  /// only; empty otherwise).
  std::vector<int> essential_inputs(const Identifier &output) const;

private:
  BlockInterface iface_;
  std::vector<Obligation> obligations_;
  SynthConfig cfg_;
  std::vector<Identifier> inputs_;
  std::vector<Identifier> outputs_;
  bool exhaustive_;
  std::map<Identifier, TruthTable> input_tables_;
};

/// Constrain outputs so that the residual holds.
void add_residual(sat::TseitinEncoder &enc, const Expr &residual,
                  const std::function<sat::Lit(const Identifier &)> &output_lit);

/// Per-output CEGIS over the slot template, iterating slot counts from
/// `min_slots` to `max_slots`.
struct GroupResult {
  SlotProgram program;
  CegisRun run;
};

GroupResult synthesize_group(const CegisOracle &oracle, const std::vector<Identifier> &outputs, int min_slots,
                             int max_slots, std::uint64_t seed);

/// Statements computing the group's outputs from a slot program. Slots used
/// more than once become temps named after the first output.
std::vector<Statement> program_statements(const SlotProgram &program, const std::vector<Identifier> &inputs,
                                          const std::vector<Identifier> &outputs, BlockInterface &iface);

std::size_t program_size(const SlotProgram &program);

/// Throws InternalError unless the block meets its constraints on every input.
void assert_meets(const Block &block, const SpecFormula &spec, const SynthConfig &cfg);

} // namespace plcsynth::detail

#pragma once

// Constraint lists: the user-facing description of what a block must do.
// A list mixes truth-table rows, cause-and-effect columns and free-form
// assertions, and compiles into a SpecFormula the engine can check.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "plcsynth/core.hpp"

namespace plcsynth {

enum class TriValue : std::uint8_t { False, True, DontCare };

struct TruthTableRow {
  std::map<Identifier, TriValue> inputs;
  std::map<Identifier, TriValue> outputs;

  friend bool operator==(const TruthTableRow &, const TruthTableRow &) = default;
};

enum class Combinator : std::uint8_t { Any, All };
enum class CauseMark : std::uint8_t { Blank, Mark, NegMark };

struct CauseEffectColumn {
  Identifier output;
  Combinator combinator = Combinator::Any;
  std::map<Identifier, CauseMark> cells;

  friend bool operator==(const CauseEffectColumn &, const CauseEffectColumn &) = default;
};

struct Assertion {
  Expr expr;

  friend bool operator==(const Assertion &, const Assertion &) = default;
};

using Constraint = std::variant<TruthTableRow, CauseEffectColumn, Assertion>;

enum class Mode : std::uint8_t { Generate, Verify, Repair, Simplify, Extend, Translate };

std::string_view to_string(Mode m);
std::optional<Mode> parse_mode(std::string_view text);

struct ConstraintList {
  Identifier block_name;
  Mode mode = Mode::Generate;
  BlockInterface interface;
  std::vector<Constraint> constraints;

  friend bool operator==(const ConstraintList &, const ConstraintList &) = default;
};

/// Throws TypeError when a constraint references names outside the
/// interface, uses them in the wrong role, or is degenerate.
void validate(const ConstraintList &list);

/// Required output value under a guard over inputs (and state).
struct Implication {
  Expr guard;
  bool value;
  std::size_t constraint_index;
  std::string origin;

  friend bool operator==(const Implication &, const Implication &) = default;
};

struct GlobalAssertion {
  Expr expr;
  std::size_t constraint_index;
  std::string origin;

  friend bool operator==(const GlobalAssertion &, const GlobalAssertion &) = default;
};

struct SpecFormula {
  BlockInterface interface;
  std::map<Identifier, std::vector<Implication>> obligations;
  std::vector<GlobalAssertion> assertions;

  bool empty() const;
};

/// One formula that must hold over the end-of-cycle environment.
struct Obligation {
  Expr formula;
  std::string description;
};

/// Flatten a spec into must-hold formulas: per output in interface order,
/// then the global assertions.
std::vector<Obligation> obligations_of(const SpecFormula &spec);

SpecFormula compile_spec(const ConstraintList &list);

struct Conflict {
  std::size_t first;
  std::size_t second;
  Identifier output;
  Assignment witness;
};

struct ConsistencyReport {
  std::vector<Conflict> conflicts;
  bool consistent() const { return conflicts.empty(); }
};

ConsistencyReport check_consistency(const ConstraintList &list);

ConstraintList instantiate_template(const ConstraintList &tmpl,
                                    const std::map<Identifier, Identifier> &renaming);

/// XML persistence. Parse errors and schema violations raise SchemaError
/// with the offending line; file problems raise IoError.
ConstraintList parse_constraints_xml(const std::string &xml);
std::string format_constraints_xml(const ConstraintList &list);
ConstraintList load_constraints(const std::filesystem::path &path);
void save_constraints(const ConstraintList &list, const std::filesystem::path &path);

} // namespace plcsynth

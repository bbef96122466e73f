#pragma once

// Batch front end over block files (.st / .il) and constraint lists (.xml).
// Exit codes: 0 success or verified, 1 violated / unsatisfiable / conflicts,
// 2 usage, parse or schema error, 3 size bound exceeded or internal error.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "plcsynth/core.hpp"
#include "plcsynth/spec.hpp"

namespace plcsynth {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kViolated = 1;
inline constexpr int kUsage = 2;
inline constexpr int kFailure = 3;
} // namespace exit_code

/// Language of a block file by extension: `.il` is IL, anything else ST.
Lang lang_of(const std::filesystem::path &path);

Block load_block(const std::filesystem::path &path);
void save_block(const Block &block, const std::filesystem::path &path, Lang lang);

/// A project directory: `blocks/*.st|*.il` and `constraints/*.xml`.
struct ProjectLayout {
  std::filesystem::path root;
  std::map<Identifier, std::filesystem::path> blocks;
  std::map<std::filesystem::path, ConstraintList> constraints;

  /// Throws TypeError when two files define the same block or a constraint
  /// list names a block that does not exist.
  static ProjectLayout load(const std::filesystem::path &root);
};

/// Run one subcommand; `args` excludes the program name. Never throws.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace plcsynth

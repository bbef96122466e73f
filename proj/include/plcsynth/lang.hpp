#pragma once

// Concrete syntax for the Structured Text (ST) and Instruction List (IL)
// subsets, and translation between them.
//
// Both languages share the same block frame:
//
//   FUNCTION_BLOCK name
//   VAR_INPUT a : BOOL; END_VAR      (also VAR_OUTPUT, VAR for state, VAR_TEMP)
//   BEGIN
//     ... statements or instructions ...
//   END_FUNCTION_BLOCK
//
// ST operator precedence is NOT > AND > XOR > OR; binary operators are left
// associative.

#include <string>
#include <string_view>

#include "plcsynth/core.hpp"

namespace plcsynth {

Block parse_st(std::string_view text);
Block parse_il(std::string_view text);
Block parse_block(std::string_view text, Lang lang);

/// Parse a standalone ST expression and check its variables against
/// `iface` (every name must be declared there).
Expr parse_st_expression(std::string_view text, const BlockInterface &iface);

/// Canonical ST rendering of an expression with the minimal parentheses.
std::string format_st_expression(const Expr &e);

std::string emit(const Block &block, Lang target);

Block translate(const Block &block, Lang target);

} // namespace plcsynth

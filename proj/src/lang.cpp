#include "plcsynth/lang.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>
#include <sstream>

namespace plcsynth {

namespace {

enum class Tok { Ident, Assign, Colon, Semi, LParen, RParen, Newline, End };

struct Token {
  Tok kind;
  std::string text;
  SourceSpan span;
};

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto &c : out)
    c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

constexpr std::array kReserved = {
    "FUNCTION_BLOCK", "END_FUNCTION_BLOCK", "VAR_INPUT", "VAR_OUTPUT", "VAR",
    "VAR_TEMP",       "END_VAR",            "BEGIN",     "BOOL",       "AND",
    "OR",             "XOR",                "NOT",       "TRUE",       "FALSE"};

bool is_reserved(std::string_view word) {
  auto u = upper(word);
  return std::find(kReserved.begin(), kReserved.end(), u) != kReserved.end();
}

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> toks;
  std::size_t line = 1, col = 1, i = 0;
  auto span = [&](std::size_t len) { return SourceSpan{line, col, len}; };
  auto advance = [&](std::size_t n) {
    i += n;
    col += n;
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == '\n') {
      toks.push_back({Tok::Newline, "\n", span(1)});
      ++i;
      ++line;
      col = 1;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      while (i < text.size() && text[i] != '\n')
        advance(1);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
        ++j;
      toks.push_back({Tok::Ident, std::string(text.substr(i, j - i)), span(j - i)});
      advance(j - i);
      continue;
    }
    if (c == ':' && i + 1 < text.size() && text[i + 1] == '=') {
      toks.push_back({Tok::Assign, ":=", span(2)});
      advance(2);
      continue;
    }
    Tok k;
    switch (c) {
    case ':': k = Tok::Colon; break;
    case ';': k = Tok::Semi; break;
    case '(': k = Tok::LParen; break;
    case ')': k = Tok::RParen; break;
    default:
      throw ParseError(span(1), std::string("unexpected character '") + c + "'");
    }
    toks.push_back({k, std::string(1, c), span(1)});
    advance(1);
  }
  toks.push_back({Tok::End, "", SourceSpan{line, col, 0}});
  return toks;
}

std::string describe(const Token &t) {
  switch (t.kind) {
  case Tok::End: return "end of input";
  case Tok::Newline: return "end of line";
  default: return "'" + t.text + "'";
  }
}

class Parser {
public:
  explicit Parser(std::string_view text) : toks_(lex(text)) {}

  Block parse(Lang lang) {
    Block block{parse_header(), {}, {}, lang};
    block.interface = iface_;
    expect_keyword("BEGIN");
    if (lang == Lang::ST)
      parse_st_body(block);
    else
      parse_il_body(block);
    expect_keyword("END_FUNCTION_BLOCK");
    skip_newlines();
    if (peek().kind != Tok::End)
      fail(peek(), "trailing input after END_FUNCTION_BLOCK", {"end of input"});
    check_block(block);
    return block;
  }

  Expr parse_standalone_expression(const BlockInterface &iface) {
    iface_ = iface;
    Expr e = parse_expr(0);
    skip_newlines();
    if (peek().kind != Tok::End)
      fail(peek(), "unexpected " + describe(peek()) + " after expression", {"end of input"});
    return e;
  }

private:
  [[noreturn]] void fail(const Token &t, const std::string &msg,
                         std::vector<std::string> expected = {}) {
    throw ParseError(t.span, msg, std::move(expected));
  }

  const Token &peek() const { return toks_[pos_]; }
  const Token &next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  void skip_newlines() {
    while (peek().kind == Tok::Newline)
      ++pos_;
  }

  bool at_keyword(std::string_view kw) {
    skip_newlines();
    return peek().kind == Tok::Ident && upper(peek().text) == kw;
  }

  void expect_keyword(std::string_view kw) {
    skip_newlines();
    if (!at_keyword(kw))
      fail(peek(), "expected " + std::string(kw) + ", found " + describe(peek()),
           {std::string(kw)});
    next();
  }

  const Token &expect(Tok kind, const std::string &what) {
    skip_newlines();
    if (peek().kind != kind)
      fail(peek(), "expected " + what + ", found " + describe(peek()), {what});
    return next();
  }

  Identifier expect_identifier() {
    skip_newlines();
    const Token &t = peek();
    if (t.kind != Tok::Ident || is_reserved(t.text))
      fail(t, "expected identifier, found " + describe(t), {"identifier"});
    if (!Identifier::is_valid(t.text))
      fail(t, "identifier longer than " + std::to_string(Identifier::kMaxLength) +
                  " characters");
    next();
    return Identifier(t.text);
  }

  Identifier parse_header() {
    expect_keyword("FUNCTION_BLOCK");
    Identifier name = expect_identifier();
    for (;;) {
      std::optional<Direction> dir;
      if (at_keyword("VAR_INPUT"))
        dir = Direction::Input;
      else if (at_keyword("VAR_OUTPUT"))
        dir = Direction::Output;
      else if (at_keyword("VAR_TEMP"))
        dir = Direction::Temp;
      else if (at_keyword("VAR"))
        dir = Direction::State;
      if (!dir)
        break;
      next();
      while (!at_keyword("END_VAR")) {
        const Token &at = peek();
        Identifier v = expect_identifier();
        expect(Tok::Colon, "':'");
        expect_keyword("BOOL");
        expect(Tok::Semi, "';'");
        if (iface_.contains(v))
          throw TypeError(span_prefix(at) + "duplicate declaration of '" + v.str() + "'");
        iface_.add(VarDecl{v, *dir});
      }
      next();
    }
    return name;
  }

  static std::string span_prefix(const Token &t) {
    return std::to_string(t.span.line) + ":" + std::to_string(t.span.column) + ": ";
  }

  Expr resolve(const Token &t) {
    if (!Identifier::is_valid(t.text))
      fail(t, "invalid identifier '" + t.text + "'");
    const VarDecl *d = iface_.find(Identifier(t.text));
    if (!d)
      throw TypeError(span_prefix(t) + "undeclared variable '" + t.text + "'");
    return Expr::var(d->name);
  }

  Identifier resolve_target(const Token &t) {
    if (!Identifier::is_valid(t.text))
      fail(t, "invalid identifier '" + t.text + "'");
    const VarDecl *d = iface_.find(Identifier(t.text));
    if (!d)
      throw TypeError(span_prefix(t) + "undeclared variable '" + t.text + "'");
    if (d->direction == Direction::Input)
      throw TypeError(span_prefix(t) + "assignment to input '" + t.text + "'");
    return d->name;
  }

  // ---- ST

  void parse_st_body(Block &block) {
    while (!at_keyword("END_FUNCTION_BLOCK")) {
      skip_newlines();
      const Token &target_tok = peek();
      expect_identifier();
      Identifier target = resolve_target(target_tok);
      expect(Tok::Assign, "':='");
      Expr rhs = parse_expr(0);
      expect(Tok::Semi, "';'");
      block.body.push_back({target, std::move(rhs)});
    }
  }

  static int binary_precedence(std::string_view kw) {
    if (kw == "OR") return 1;
    if (kw == "XOR") return 2;
    if (kw == "AND") return 3;
    return 0;
  }

  static ExprKind binary_kind(int prec) {
    return prec == 1 ? ExprKind::Or : prec == 2 ? ExprKind::Xor : ExprKind::And;
  }

  // expr := xorterm (OR xorterm)*, xorterm := andterm (XOR andterm)*, ...
  Expr parse_expr(std::size_t depth, int min_prec = 1) {
    if (depth > Expr::kMaxDepth)
      fail(peek(), "expression nesting exceeds " + std::to_string(Expr::kMaxDepth));
    if (min_prec > 3)
      return parse_unary(depth);
    Expr lhs = parse_expr(depth + 1, min_prec + 1);
    for (;;) {
      skip_newlines();
      if (peek().kind != Tok::Ident || binary_precedence(upper(peek().text)) != min_prec)
        return lhs;
      next();
      Expr rhs = parse_expr(depth + 1, min_prec + 1);
      lhs = Expr::binary(binary_kind(min_prec), std::move(lhs), std::move(rhs));
    }
  }

  Expr parse_unary(std::size_t depth) {
    if (depth > Expr::kMaxDepth)
      fail(peek(), "expression nesting exceeds " + std::to_string(Expr::kMaxDepth));
    skip_newlines();
    const Token &t = peek();
    if (t.kind == Tok::LParen) {
      next();
      Expr e = parse_expr(depth + 1);
      expect(Tok::RParen, "')'");
      return e;
    }
    if (t.kind == Tok::Ident) {
      auto u = upper(t.text);
      if (u == "NOT") {
        next();
        return Expr::negate(parse_unary(depth + 1));
      }
      if (u == "TRUE" || u == "FALSE") {
        next();
        return Expr::constant(u == "TRUE");
      }
      if (!is_reserved(t.text)) {
        next();
        return resolve(t);
      }
    }
    fail(t, "expected operand, found " + describe(t),
         {"'('", "NOT", "TRUE", "FALSE", "identifier"});
  }

  // ---- IL

  struct Frame {
    ExprKind op;
    bool negated;
    Expr saved;
  };

  static std::optional<std::pair<ExprKind, bool>> combiner(const std::string &mn) {
    if (mn == "AND") return std::pair{ExprKind::And, false};
    if (mn == "ANDN") return std::pair{ExprKind::And, true};
    if (mn == "OR") return std::pair{ExprKind::Or, false};
    if (mn == "ORN") return std::pair{ExprKind::Or, true};
    if (mn == "XOR") return std::pair{ExprKind::Xor, false};
    if (mn == "XORN") return std::pair{ExprKind::Xor, true};
    return std::nullopt;
  }

  Expr il_operand() {
    const Token &t = peek();
    if (t.kind != Tok::Ident)
      fail(t, "expected operand, found " + describe(t), {"identifier", "TRUE", "FALSE"});
    next();
    auto u = upper(t.text);
    if (u == "TRUE" || u == "FALSE")
      return Expr::constant(u == "TRUE");
    if (is_reserved(t.text))
      fail(t, "expected operand, found " + describe(t), {"identifier", "TRUE", "FALSE"});
    return resolve(t);
  }

  void end_of_line() {
    if (peek().kind != Tok::Newline && peek().kind != Tok::End)
      fail(peek(), "expected end of line, found " + describe(peek()), {"end of line"});
  }

  void parse_il_body(Block &block) {
    std::optional<Expr> acc;
    std::vector<Frame> stack;
    std::optional<Token> open_paren;
    for (;;) {
      skip_newlines();
      if (at_keyword("END_FUNCTION_BLOCK"))
        break;
      const Token instr = peek();
      if (instr.kind == Tok::RParen) {
        next();
        if (stack.empty())
          throw UnbalancedParen(instr.span, "')' without an open deferred group");
        if (!acc)
          throw AccumulatorUndefined(instr.span, "deferred group closed with no value loaded");
        Frame f = std::move(stack.back());
        stack.pop_back();
        Expr rhs = f.negated ? Expr::negate(*acc) : *acc;
        acc = Expr::binary(f.op, std::move(f.saved), std::move(rhs));
        end_of_line();
        continue;
      }
      if (instr.kind != Tok::Ident)
        fail(instr, "expected instruction, found " + describe(instr), {"instruction"});
      next();
      std::string mn = upper(instr.text);
      if (mn == "LD" || mn == "LDN") {
        Expr v = il_operand();
        acc = mn == "LDN" ? Expr::negate(std::move(v)) : std::move(v);
      } else if (mn == "NOT") {
        if (!acc)
          throw AccumulatorUndefined(instr.span, "NOT before any LD");
        acc = Expr::negate(*acc);
      } else if (mn == "ST") {
        if (!acc)
          throw AccumulatorUndefined(instr.span, "ST before any LD");
        if (!stack.empty())
          throw UnbalancedParen(instr.span, "ST inside an open deferred group");
        const Token target_tok = peek();
        if (target_tok.kind != Tok::Ident || is_reserved(target_tok.text))
          fail(target_tok, "expected identifier, found " + describe(target_tok), {"identifier"});
        next();
        Identifier target = resolve_target(target_tok);
        block.body.push_back({target, *acc});
        // The accumulator keeps its value, which now lives in `target`.
        acc = Expr::var(target);
      } else if (auto comb = combiner(mn)) {
        if (!acc)
          throw AccumulatorUndefined(instr.span, instr.text + " before any LD");
        if (peek().kind == Tok::LParen) {
          next();
          stack.push_back({comb->first, comb->second, *acc});
          if (!open_paren)
            open_paren = instr;
          acc.reset();
          if (peek().kind == Tok::Ident)
            acc = il_operand();
        } else {
          Expr v = il_operand();
          if (comb->second)
            v = Expr::negate(std::move(v));
          acc = Expr::binary(comb->first, *acc, std::move(v));
        }
      } else {
        fail(instr, "unknown instruction '" + instr.text + "'",
             {"LD", "LDN", "AND", "ANDN", "OR", "ORN", "XOR", "XORN", "NOT", "ST", "')'"});
      }
      if (stack.empty())
        open_paren.reset();
      end_of_line();
    }
    if (!stack.empty())
      throw UnbalancedParen(open_paren ? open_paren->span : peek().span,
                            "deferred group is never closed");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  BlockInterface iface_;
};

// ---- emission

int precedence(const Expr &e) {
  switch (e.kind()) {
  case ExprKind::Or: return 1;
  case ExprKind::Xor: return 2;
  case ExprKind::And: return 3;
  case ExprKind::Not: return 4;
  default: return 5;
  }
}

std::string_view keyword(ExprKind k) {
  switch (k) {
  case ExprKind::And: return "AND";
  case ExprKind::Or: return "OR";
  case ExprKind::Xor: return "XOR";
  default: return "NOT";
  }
}

void format_expr(std::ostream &os, const Expr &e, int required) {
  bool parens = precedence(e) < required;
  if (parens)
    os << '(';
  switch (e.kind()) {
  case ExprKind::Const: os << (e.value() ? "TRUE" : "FALSE"); break;
  case ExprKind::Var: os << e.name().str(); break;
  case ExprKind::Not:
    os << "NOT ";
    format_expr(os, e.operand(), 4);
    break;
  default: {
    int p = precedence(e);
    format_expr(os, e.lhs(), p);
    os << ' ' << keyword(e.kind()) << ' ';
    format_expr(os, e.rhs(), p + 1);
  }
  }
  if (parens)
    os << ')';
}

void emit_header(std::ostream &os, const Block &block) {
  os << "FUNCTION_BLOCK " << block.name.str() << '\n';
  constexpr std::pair<Direction, const char *> sections[] = {
      {Direction::Input, "VAR_INPUT"},
      {Direction::Output, "VAR_OUTPUT"},
      {Direction::State, "VAR"},
      {Direction::Temp, "VAR_TEMP"}};
  for (const auto &[dir, kw] : sections) {
    auto names = block.interface.names(dir);
    if (names.empty())
      continue;
    os << kw << '\n';
    for (const auto &n : names)
      os << "  " << n.str() << " : BOOL;\n";
    os << "END_VAR\n";
  }
  os << "BEGIN\n";
}

std::string leaf_operand(const Expr &e) {
  return e.kind() == ExprKind::Const ? (e.value() ? "TRUE" : "FALSE") : e.name().str();
}

// Post-order accumulator compilation; right operands that are not leaves go
// into a deferred group.
void compile_il(std::ostream &os, const Expr &e, int indent) {
  std::string pad(static_cast<std::size_t>(indent), ' ');
  switch (e.kind()) {
  case ExprKind::Const:
  case ExprKind::Var: os << pad << "LD " << leaf_operand(e) << '\n'; return;
  case ExprKind::Not:
    if (e.operand().is_leaf()) {
      os << pad << "LDN " << leaf_operand(e.operand()) << '\n';
    } else {
      compile_il(os, e.operand(), indent);
      os << pad << "NOT\n";
    }
    return;
  default:
    compile_il(os, e.lhs(), indent);
    if (e.rhs().is_leaf()) {
      os << pad << keyword(e.kind()) << ' ' << leaf_operand(e.rhs()) << '\n';
    } else {
      os << pad << keyword(e.kind()) << "(\n";
      compile_il(os, e.rhs(), indent + 2);
      os << pad << ")\n";
    }
  }
}

} // namespace

Block parse_st(std::string_view text) { return Parser(text).parse(Lang::ST); }
Block parse_il(std::string_view text) { return Parser(text).parse(Lang::IL); }

Block parse_block(std::string_view text, Lang lang) {
  return lang == Lang::ST ? parse_st(text) : parse_il(text);
}

Expr parse_st_expression(std::string_view text, const BlockInterface &iface) {
  return Parser(text).parse_standalone_expression(iface);
}

std::string format_st_expression(const Expr &e) {
  std::ostringstream os;
  format_expr(os, e, 0);
  return os.str();
}

std::string emit(const Block &block, Lang target) {
  std::ostringstream os;
  emit_header(os, block);
  for (const auto &stmt : block.body) {
    if (target == Lang::ST) {
      os << "  " << stmt.target.str() << " := ";
      format_expr(os, stmt.rhs, 0);
      os << ";\n";
    } else {
      compile_il(os, stmt.rhs, 2);
      os << "  ST " << stmt.target.str() << '\n';
    }
  }
  os << "END_FUNCTION_BLOCK\n";
  return os.str();
}

Block translate(const Block &block, Lang target) {
  return parse_block(emit(block, target), target);
}

} // namespace plcsynth

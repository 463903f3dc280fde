#pragma once

// Assertion checker for a SystemVerilog property subset:
//   property <id>; [@(edge clk)] [disable iff (expr)] seq (|->||=>) seq; endproperty
//   [label:] assert property ( [@(edge clk)] [disable iff (expr)] seq | <id> );
// plus a canonical renderer used as the normalizer.

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stellar/error.hpp"
#include "stellar/lexer.hpp"
#include "stellar/rtl_parser.hpp"
#include "stellar/rtl_print.hpp"

namespace stellar {

enum class ViolationKind {
  Empty,
  InvalidToken,
  UnbalancedDelimiter,
  EventControlInExpression,
  MissingImplication,
  UnexpectedToken,
};

inline std::string_view to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::Empty: return "empty";
    case ViolationKind::InvalidToken: return "invalid token";
    case ViolationKind::UnbalancedDelimiter: return "unbalanced delimiter";
    case ViolationKind::EventControlInExpression: return "event control in expression";
    case ViolationKind::MissingImplication: return "missing implication";
    case ViolationKind::UnexpectedToken: return "unexpected token";
  }
  return "unexpected token";
}

struct SyntaxViolation {
  ViolationKind kind = ViolationKind::UnexpectedToken;
  std::size_t line = 1;
  std::size_t column = 1;
  std::string reason;

  std::string message() const {
    return std::string(to_string(kind)) + " at " + std::to_string(line) + ":" +
           std::to_string(column) + ": " + reason;
  }
};

class SvaSyntaxError : public Error {
 public:
  explicit SvaSyntaxError(SyntaxViolation v) : Error("SyntaxViolation", v.message()), v_(std::move(v)) {}
  const SyntaxViolation& violation() const noexcept { return v_; }

 private:
  SyntaxViolation v_;
};

struct ClockSpec {
  Edge edge = Edge::Posedge;
  std::string signal;
};

struct SvaStatement {
  enum class Kind { Property, Assert, Assume, Cover };
  Kind kind = Kind::Property;
  std::string name;  // property name or statement label
  std::optional<ClockSpec> clock;
  ExprPtr disable;
  ExprPtr body;
};

struct SvaUnit {
  std::vector<SvaStatement> statements;
};

inline bool is_implication(const Expr& e) {
  const auto* b = std::get_if<Binary>(&e.node);
  return b && (b->op == "|->" || b->op == "|=>");
}

namespace detail {

inline bool valid_utf8(std::string_view s) {
  for (std::size_t i = 0; i < s.size();) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t n = 0;
    if (c >= 0x80) {
      if ((c >> 5) == 0x6) n = 1;
      else if ((c >> 4) == 0xe) n = 2;
      else if ((c >> 3) == 0x1e) n = 3;
      else return false;
    }
    if (i + n >= s.size() && n > 0) return false;
    for (std::size_t k = 1; k <= n; ++k)
      if ((static_cast<unsigned char>(s[i + k]) >> 6) != 0x2) return false;
    i += n + 1;
  }
  return true;
}

class SvaReader {
 public:
  SvaReader(std::string_view text, std::vector<Token> toks) : text_(text), toks_(std::move(toks)) {}

  SvaUnit read() {
    SvaUnit unit;
    while (!at_end()) unit.statements.push_back(statement());
    if (unit.statements.empty()) fail(ViolationKind::Empty, cur(), "no property or assertion");
    return unit;
  }

 private:
  const Token& cur() const { return toks_[pos_]; }
  bool at_end() const { return cur().kind == TokenKind::End; }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }

  [[noreturn]] static void fail(ViolationKind k, const Token& t, std::string reason) {
    throw SvaSyntaxError({k, t.line, t.column, std::move(reason)});
  }
  void expect_op(std::string_view op) {
    if (!cur().is_op(op)) fail(ViolationKind::UnexpectedToken, cur(), "expected '" + std::string(op) + "'" + found());
    next();
  }
  void expect_kw(std::string_view kw) {
    if (!cur().is_kw(kw)) fail(ViolationKind::UnexpectedToken, cur(), "expected '" + std::string(kw) + "'" + found());
    next();
  }
  std::string expect_ident() {
    if (cur().kind != TokenKind::Identifier) fail(ViolationKind::UnexpectedToken, cur(), "expected identifier" + found());
    return next().text;
  }
  std::string found() const {
    return cur().kind == TokenKind::End ? " at end of input" : ", found '" + cur().text + "'";
  }

  SvaStatement statement() {
    SvaStatement st;
    if (cur().is_kw("property")) {
      next();
      st.name = expect_ident();
      expect_op(";");
      prefix(st);
      const std::size_t begin = pos_;
      std::size_t depth = 0;
      while (!at_end() && !(depth == 0 && cur().is_op(";"))) {
        if (cur().is_kw("endproperty")) break;
        if (cur().is_op("(") || cur().is_op("[") || cur().is_op("{")) ++depth;
        if (cur().is_op(")") || cur().is_op("]") || cur().is_op("}")) --depth;
        next();
      }
      st.body = expression(begin, pos_);
      expect_op(";");
      expect_kw("endproperty");
      if (cur().is_op(":")) {
        next();
        expect_ident();
      }
      if (!is_implication(*st.body))
        fail(ViolationKind::MissingImplication, toks_[begin], "property body has no top-level |-> or |=>");
      return st;
    }
    if (cur().kind == TokenKind::Identifier) {
      st.name = next().text;
      expect_op(":");
    }
    if (cur().is_kw("assert")) st.kind = SvaStatement::Kind::Assert;
    else if (cur().is_kw("assume")) st.kind = SvaStatement::Kind::Assume;
    else if (cur().is_kw("cover")) st.kind = SvaStatement::Kind::Cover;
    else fail(ViolationKind::UnexpectedToken, cur(), "expected 'property' or 'assert'" + found());
    next();
    expect_kw("property");
    const Token& open = cur();
    expect_op("(");
    prefix(st);
    const std::size_t begin = pos_;
    std::size_t depth = 0;
    while (!at_end() && !(depth == 0 && cur().is_op(")"))) {
      if (cur().is_op("(") || cur().is_op("[") || cur().is_op("{")) ++depth;
      if (cur().is_op(")") || cur().is_op("]") || cur().is_op("}")) --depth;
      next();
    }
    if (at_end()) fail(ViolationKind::UnbalancedDelimiter, open, "unbalanced '('");
    st.body = expression(begin, pos_);
    expect_op(")");
    expect_op(";");
    const bool named_reference = std::holds_alternative<Ident>(st.body->node) && !st.clock && !st.disable;
    if (!named_reference && !is_implication(*st.body))
      fail(ViolationKind::MissingImplication, toks_[begin], "assertion body has no top-level |-> or |=>");
    return st;
  }

  void prefix(SvaStatement& st) {
    if (cur().is_op("@")) {
      next();
      expect_op("(");
      ClockSpec clk;
      if (cur().is_kw("posedge")) {
        next();
      } else if (cur().is_kw("negedge")) {
        clk.edge = Edge::Negedge;
        next();
      } else {
        clk.edge = Edge::Level;
      }
      clk.signal = expect_ident();
      expect_op(")");
      st.clock = clk;
    }
    if (cur().is_kw("disable")) {
      next();
      expect_kw("iff");
      expect_op("(");
      const std::size_t begin = pos_;
      std::size_t depth = 0;
      while (!at_end() && !(depth == 0 && cur().is_op(")"))) {
        if (cur().is_op("(")) ++depth;
        if (cur().is_op(")")) --depth;
        next();
      }
      st.disable = expression(begin, pos_);
      expect_op(")");
    }
  }

  // Parses tokens [begin, end) as one expression.
  ExprPtr expression(std::size_t begin, std::size_t end) {
    const Token& first = toks_[begin];
    if (begin == end) fail(ViolationKind::UnexpectedToken, first, "expected an expression" + found());
    const std::size_t from = first.offset;
    const std::size_t to = toks_[end - 1].end_offset();
    try {
      return parse_expression(text_.substr(from, to - from), LexMode::Sva);
    } catch (const EventControlInExpression& e) {
      fail_relative(ViolationKind::EventControlInExpression, first, e);
    } catch (const ParseError& e) {
      fail_relative(ViolationKind::UnexpectedToken, first, e);
    }
  }

  [[noreturn]] static void fail_relative(ViolationKind k, const Token& base, const ParseError& e) {
    const std::size_t line = base.line + e.line() - 1;
    const std::size_t column = e.line() == 1 ? base.column + e.column() - 1 : e.column();
    throw SvaSyntaxError({k, line, column, e.detail()});
  }

  std::string_view text_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

inline void check_delimiters(const std::vector<Token>& toks) {
  std::vector<const Token*> stack;
  auto closer_for = [](std::string_view open) { return open == "(" ? ")" : open == "[" ? "]" : "}"; };
  for (const auto& t : toks) {
    if (t.kind != TokenKind::Operator) continue;
    if (t.text == "(" || t.text == "[" || t.text == "{") {
      stack.push_back(&t);
    } else if (t.text == ")" || t.text == "]" || t.text == "}") {
      if (stack.empty())
        throw SvaSyntaxError({ViolationKind::UnbalancedDelimiter, t.line, t.column, "unmatched '" + t.text + "'"});
      if (closer_for(stack.back()->text) != t.text)
        throw SvaSyntaxError({ViolationKind::UnbalancedDelimiter, t.line, t.column,
                              "'" + t.text + "' closes '" + stack.back()->text + "'"});
      stack.pop_back();
    }
  }
  if (!stack.empty()) {
    const Token& t = *stack.back();
    throw SvaSyntaxError({ViolationKind::UnbalancedDelimiter, t.line, t.column, "unclosed '" + t.text + "'"});
  }
}

}  // namespace detail

// Throws SvaSyntaxError on any violation; InvalidArgument on non-UTF-8 input.
inline SvaUnit parse_sva(std::string_view text) {
  if (!detail::valid_utf8(text)) throw InvalidArgument("assertion text is not valid UTF-8");
  std::vector<Token> toks;
  try {
    toks = tokenize(text, LexMode::Sva);
  } catch (const ParseError& e) {
    throw SvaSyntaxError({ViolationKind::InvalidToken, e.line(), e.column(), e.detail()});
  }
  if (toks.size() == 1) throw SvaSyntaxError({ViolationKind::Empty, 1, 1, "no property or assertion"});
  detail::check_delimiters(toks);
  return detail::SvaReader(text, std::move(toks)).read();
}

inline std::optional<SyntaxViolation> check_sva_syntax(std::string_view text) {
  try {
    parse_sva(text);
  } catch (const SvaSyntaxError& e) {
    return e.violation();
  }
  return std::nullopt;
}

inline std::string render_sva(const SvaUnit& unit) {
  std::string out;
  for (const auto& st : unit.statements) {
    std::string prefix;
    if (st.clock) {
      prefix += "@(";
      if (st.clock->edge == Edge::Posedge) prefix += "posedge ";
      if (st.clock->edge == Edge::Negedge) prefix += "negedge ";
      prefix += st.clock->signal + ") ";
    }
    if (st.disable) prefix += "disable iff (" + to_verilog(*st.disable) + ") ";
    const std::string body = prefix + to_verilog(*st.body);
    switch (st.kind) {
      case SvaStatement::Kind::Property:
        out += "property " + st.name + ";\n  " + body + ";\nendproperty\n";
        break;
      default: {
        const char* kw = st.kind == SvaStatement::Kind::Assert ? "assert"
                         : st.kind == SvaStatement::Kind::Assume ? "assume" : "cover";
        if (!st.name.empty()) out += st.name + ": ";
        out += std::string(kw) + " property (" + body + ");\n";
      }
    }
  }
  return out;
}

// Canonical text: one statement per line, single spaces around binary
// operators, redundant parentheses dropped. Idempotent.
inline std::string normalize_sva(std::string_view text) { return render_sva(parse_sva(text)); }

// Left operands of the top-level implication of every statement that has one.
inline std::vector<ExprPtr> antecedents(const SvaUnit& unit) {
  std::vector<ExprPtr> out;
  for (const auto& st : unit.statements)
    if (is_implication(*st.body)) out.push_back(std::get<Binary>(st.body->node).lhs);
  return out;
}

}  // namespace stellar

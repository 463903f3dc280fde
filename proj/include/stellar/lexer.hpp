#pragma once

#include <array>
#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "stellar/error.hpp"

namespace stellar {

enum class TokenKind { Identifier, Keyword, Number, SystemName, Operator, End };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  std::size_t offset = 0;  // byte offset of the first character
  std::size_t line = 1;
  std::size_t column = 1;

  std::size_t end_offset() const { return offset + text.size(); }
  bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
  bool is_op(std::string_view t) const { return kind == TokenKind::Operator && text == t; }
  bool is_kw(std::string_view t) const { return kind == TokenKind::Keyword && text == t; }
};

// Verilog mode admits the RTL subset; Sva mode adds `|->`, `|=>`, `##`,
// `$name` and the property keywords.
enum class LexMode { Verilog, Sva };

namespace detail {

inline constexpr std::array<std::string_view, 29> kVerilogKeywords = {
    "module", "endmodule", "input",   "output",      "inout",        "wire",
    "reg",    "logic",     "always",  "always_ff",   "always_comb",  "always_latch",
    "begin",  "end",       "if",      "else",        "case",         "casez",
    "casex",  "endcase",   "default", "posedge",     "negedge",      "or",
    "assign", "signed",    "unique",  "priority",    "edge"};

// Reserved words outside the supported subset. Seeing one is a parse error,
// never an identifier.
inline constexpr std::array<std::string_view, 26> kUnsupportedKeywords = {
    "generate", "endgenerate", "for",      "while",     "repeat",   "forever",
    "function", "endfunction", "task",     "endtask",   "initial",  "parameter",
    "localparam", "genvar",    "integer",  "fork",      "join",     "wait",
    "defparam", "specify",     "endspecify", "primitive", "table",  "supply0",
    "supply1",  "tri"};

inline constexpr std::array<std::string_view, 9> kSvaKeywords = {
    "property", "endproperty", "assert", "disable", "iff", "cover", "assume", "sequence",
    "endsequence"};

template <std::size_t N>
constexpr bool contains(const std::array<std::string_view, N>& a, std::string_view s) {
  for (auto v : a)
    if (v == s) return true;
  return false;
}

}  // namespace detail

inline bool is_verilog_keyword(std::string_view s) {
  return detail::contains(detail::kVerilogKeywords, s) ||
         detail::contains(detail::kUnsupportedKeywords, s);
}

inline bool is_reserved_word(std::string_view s) {
  return is_verilog_keyword(s) || detail::contains(detail::kSvaKeywords, s);
}

class Lexer {
 public:
  Lexer(std::string_view text, LexMode mode) : text_(text), mode_(mode) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space_and_comments();
      Token t;
      t.offset = pos_;
      t.line = line_;
      t.column = column();
      if (pos_ >= text_.size()) {
        t.kind = TokenKind::End;
        out.push_back(std::move(t));
        return out;
      }
      lex_one(t);
      out.push_back(std::move(t));
    }
  }

 private:
  std::size_t column() const { return pos_ - line_start_ + 1; }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line_, column(), msg); }

  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && pos_ < text_.size(); ++i) {
      if (text_[pos_] == '\n') {
        ++line_;
        line_start_ = pos_ + 1;
      }
      ++pos_;
    }
  }

  void skip_space_and_comments() {
    for (;;) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (pos_ < text_.size() && peek() != '\n') advance();
      } else if (c == '/' && peek(1) == '*') {
        const std::size_t l = line_, col = column();
        advance(2);
        while (pos_ < text_.size() && !(peek() == '*' && peek(1) == '/')) advance();
        if (pos_ >= text_.size()) throw ParseError(l, col, "unterminated block comment");
        advance(2);
      } else if (c == '`' && mode_ == LexMode::Verilog) {
        // Compiler directives (`timescale, `default_nettype) carry no structure.
        while (pos_ < text_.size() && peek() != '\n') advance();
      } else {
        return;
      }
    }
  }

  static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
  }
  static bool based_digit(char c) {
    return std::isxdigit(static_cast<unsigned char>(c)) || c == 'x' || c == 'X' || c == 'z' ||
           c == 'Z' || c == '?' || c == '_';
  }

  void lex_based_tail(Token& t) {
    // at the apostrophe
    std::size_t start = pos_;
    advance();
    if (peek() == 's' || peek() == 'S') advance();
    char b = static_cast<char>(std::tolower(static_cast<unsigned char>(peek())));
    if (b != 'b' && b != 'o' && b != 'd' && b != 'h') fail("malformed based literal");
    advance();
    while (peek() == ' ' || peek() == '\t') advance();
    if (!based_digit(peek())) fail("based literal has no digits");
    while (based_digit(peek())) advance();
    t.text += std::string(text_.substr(start, pos_ - start));
  }

  void lex_one(Token& t) {
    const char c = peek();
    if (static_cast<unsigned char>(c) >= 0x80) fail("non-ASCII character outside a comment");
    if (ident_start(c)) {
      std::size_t start = pos_;
      while (ident_char(peek())) advance();
      t.text = std::string(text_.substr(start, pos_ - start));
      if (detail::contains(detail::kVerilogKeywords, t.text) ||
          detail::contains(detail::kUnsupportedKeywords, t.text) ||
          (mode_ == LexMode::Sva && detail::contains(detail::kSvaKeywords, t.text))) {
        t.kind = TokenKind::Keyword;
      } else {
        t.kind = TokenKind::Identifier;
      }
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '_') advance();
      t.kind = TokenKind::Number;
      t.text = std::string(text_.substr(start, pos_ - start));
      if (peek() == '\'') lex_based_tail(t);
      return;
    }
    if (c == '\'') {
      t.kind = TokenKind::Number;
      lex_based_tail(t);
      return;
    }
    if (c == '$') {
      if (mode_ != LexMode::Sva) fail("system names are not supported in RTL");
      std::size_t start = pos_;
      advance();
      while (ident_char(peek())) advance();
      t.kind = TokenKind::SystemName;
      t.text = std::string(text_.substr(start, pos_ - start));
      return;
    }
    if (c == '\\') fail("escaped identifiers are not supported");

    static constexpr std::array<std::string_view, 3> three = {"===", "!==", "|->"};
    static constexpr std::array<std::string_view, 1> three_sva = {"|=>"};
    static constexpr std::array<std::string_view, 8> two = {"==", "!=", "<=", ">=",
                                                             "&&", "||", "<<", ">>"};
    auto try_ops = [&](auto const& list, bool enabled) {
      if (!enabled) return false;
      for (auto op : list) {
        if (text_.substr(pos_, op.size()) == op) {
          if (op == "|->" && mode_ != LexMode::Sva) continue;
          t.kind = TokenKind::Operator;
          t.text = std::string(op);
          advance(op.size());
          return true;
        }
      }
      return false;
    };
    if (try_ops(three, true) || try_ops(three_sva, mode_ == LexMode::Sva)) return;
    if (mode_ == LexMode::Sva && c == '#' && peek(1) == '#') {
      t.kind = TokenKind::Operator;
      t.text = "##";
      advance(2);
      return;
    }
    if (try_ops(two, true)) return;
    static constexpr std::string_view singles = "()[]{};,:@*?=<>!~-+/%&|^.#";
    if (singles.find(c) != std::string_view::npos) {
      if (c == '#' && mode_ != LexMode::Sva) fail("delay control '#' is not supported");
      t.kind = TokenKind::Operator;
      t.text = std::string(1, c);
      advance();
      return;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string_view text_;
  LexMode mode_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t line_start_ = 0;
};

inline std::vector<Token> tokenize(std::string_view text, LexMode mode = LexMode::Verilog) {
  return Lexer(text, mode).run();
}

}  // namespace stellar

#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stellar/error.hpp"
#include "stellar/lexer.hpp"
#include "stellar/rtl_ast.hpp"
#include "stellar/rtl_print.hpp"

namespace stellar {

struct ParseOptions {
  std::size_t max_bytes = 4u << 20;
  std::string source_name = "<input>";
};

// Raised when an event control (`@...`) shows up inside an expression. The
// assertion checker reports it as its own violation class.
class EventControlInExpression : public ParseError {
 public:
  using ParseError::ParseError;
};

namespace detail {

inline Literal parse_literal_text(std::string_view text) {
  Literal lit;
  const auto tick = text.find('\'');
  auto strip = [](std::string_view s) {
    std::string out;
    for (char c : s)
      if (c != '_' && c != ' ' && c != '\t') out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
  };
  if (tick == std::string_view::npos) {
    lit.digits = strip(text);
    return lit;
  }
  lit.based = true;
  if (tick > 0) lit.width = static_cast<unsigned>(std::stoul(strip(text.substr(0, tick))));
  std::size_t i = tick + 1;
  if (text[i] == 's' || text[i] == 'S') {
    lit.is_signed = true;
    ++i;
  }
  switch (std::tolower(static_cast<unsigned char>(text[i]))) {
    case 'b': lit.base = Base::Bin; break;
    case 'o': lit.base = Base::Oct; break;
    case 'h': lit.base = Base::Hex; break;
    default: lit.base = Base::Dec; break;
  }
  lit.digits = strip(text.substr(i + 1));
  return lit;
}

inline bool is_unary_op(std::string_view op) {
  return op == "!" || op == "~" || op == "-" || op == "&" || op == "|" || op == "^";
}

class Parser {
 public:
  Parser(std::string_view text, LexMode mode) : text_(text), mode_(mode), toks_(tokenize(text, mode)) {}

  // --- design units -------------------------------------------------------

  SourceUnit parse_unit(const std::string& name) {
    SourceUnit unit;
    unit.source_name = name;
    while (!at_end()) {
      if (!cur().is_kw("module")) fail_here("expected 'module'");
      unit.modules.push_back(parse_module());
    }
    return unit;
  }

  AlwaysBlock parse_single_always() {
    if (!is_always_kw(cur())) fail_here("expected an always block");
    AlwaysBlock b = parse_always();
    if (!at_end()) fail_here("unexpected text after always block");
    return b;
  }

  ExprPtr parse_single_expression() {
    ExprPtr e = parse_expr(0);
    if (!at_end()) fail_here("unexpected text after expression");
    return e;
  }

  // --- expressions --------------------------------------------------------

  ExprPtr parse_expr(int min_prec) {
    ExprPtr lhs = parse_unary();
    for (;;) {
      const Token& t = cur();
      if (t.kind != TokenKind::Operator) {
        if (t.kind == TokenKind::Keyword || t.kind == TokenKind::End) break;
        fail_here("expected an operator, found '" + t.text + "'");
      }
      if (t.text == "?") {
        if (2 < min_prec) break;
        next();
        ExprPtr then_e = parse_expr(2);
        expect_op(":");
        ExprPtr else_e = parse_expr(2);
        lhs = make_expr(Ternary{lhs, then_e, else_e});
        continue;
      }
      if (t.text == "@") event_control_fail();
      if (t.text == "##") {
        if (1 < min_prec) break;
        std::string op = parse_delay();
        ExprPtr rhs = parse_expr(2);
        lhs = make_expr(Binary{op, lhs, rhs});
        continue;
      }
      const int p = binary_precedence(t.text);
      if (p < 0 || p == 1 || p == 2) break;
      if ((t.text == "|->" || t.text == "|=>") && mode_ != LexMode::Sva) break;
      if (p < min_prec) break;
      std::string op = t.text;
      next();
      ExprPtr rhs = parse_expr(p == 0 ? 0 : p + 1);
      lhs = make_expr(Binary{op, lhs, rhs});
    }
    return lhs;
  }

  // --- statements ---------------------------------------------------------

  StmtPtr parse_stmt() {
    const Token& t = cur();
    if (t.is_op(";")) {
      next();
      return make_stmt(Block{});
    }
    if (t.kind == TokenKind::Keyword) {
      if (t.text == "begin") return parse_block();
      if (t.text == "if") return parse_if();
      if (t.text == "unique" || t.text == "priority") {
        next();
        if (cur().is_kw("if")) return parse_if();
        if (is_case_kw(cur())) return parse_case();
        fail_here("expected 'if' or 'case'");
      }
      if (is_case_kw(t)) return parse_case();
      unsupported_or_unexpected(t);
    }
    ExprPtr lhs = parse_lvalue();
    if (cur().is_op("=")) {
      next();
      ExprPtr rhs = parse_expr(2);
      expect_op(";");
      return make_stmt(BlockingAssign{lhs, rhs});
    }
    if (cur().is_op("<=")) {
      next();
      ExprPtr rhs = parse_expr(2);
      expect_op(";");
      return make_stmt(NonBlockingAssign{lhs, rhs});
    }
    fail_here("expected '=' or '<=' in assignment");
  }

 private:
  // --- token helpers ------------------------------------------------------

  const Token& cur() const { return toks_[pos_]; }
  const Token& peek(std::size_t n = 1) const {
    return toks_[std::min(pos_ + n, toks_.size() - 1)];
  }
  bool at_end() const { return cur().kind == TokenKind::End; }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }

  [[noreturn]] void fail_at(const Token& t, const std::string& msg) const {
    throw ParseError(t.line, t.column, msg);
  }
  [[noreturn]] void fail_here(const std::string& msg) const {
    const Token& t = cur();
    fail_at(t, t.kind == TokenKind::End ? msg + " (at end of input)" : msg + " (found '" + t.text + "')");
  }
  [[noreturn]] void event_control_fail() const {
    throw EventControlInExpression(cur().line, cur().column, "event control inside expression");
  }

  [[noreturn]] void unsupported_or_unexpected(const Token& t) const {
    if (contains(kUnsupportedKeywords, t.text))
      fail_at(t, "unsupported construct '" + t.text + "'");
    fail_at(t, "unexpected keyword '" + t.text + "'");
  }

  void expect_op(std::string_view op) {
    if (!cur().is_op(op)) fail_here("expected '" + std::string(op) + "'");
    next();
  }
  void expect_kw(std::string_view kw) {
    if (!cur().is_kw(kw)) fail_here("expected '" + std::string(kw) + "'");
    next();
  }

  // Closes a delimiter opened at `open`; reports the opener when unmatched.
  void expect_close(const Token& open, std::string_view close) {
    if (cur().is_op(close)) {
      next();
      return;
    }
    std::string found = at_end() ? "end of input" : "'" + cur().text + "'";
    throw ParseError(open.line, open.column,
                     "unbalanced '" + open.text + "': expected '" + std::string(close) +
                         "' before " + found);
  }

  std::string expect_ident() {
    if (cur().kind != TokenKind::Identifier) {
      if (cur().kind == TokenKind::Keyword) unsupported_or_unexpected(cur());
      fail_here("expected identifier");
    }
    return next().text;
  }

  static bool is_case_kw(const Token& t) {
    return t.is_kw("case") || t.is_kw("casez") || t.is_kw("casex");
  }
  static bool is_always_kw(const Token& t) {
    return t.is_kw("always") || t.is_kw("always_ff") || t.is_kw("always_comb") ||
           t.is_kw("always_latch");
  }

  // --- expressions --------------------------------------------------------

  std::string parse_delay() {
    next();  // ##
    std::string op = "##";
    if (cur().kind == TokenKind::Number) {
      op += next().text;
    } else if (cur().is_op("[")) {
      const Token open = next();
      if (cur().kind != TokenKind::Number) fail_here("expected delay bound");
      op += "[" + next().text;
      expect_op(":");
      if (cur().kind == TokenKind::Number) {
        op += ":" + next().text;
      } else if (cur().kind == TokenKind::SystemName && cur().text == "$") {
        op += ":$";
        next();
      } else {
        fail_here("expected delay bound");
      }
      expect_close(open, "]");
      op += "]";
    } else {
      fail_here("expected delay value after '##'");
    }
    return op;
  }

  ExprPtr parse_unary() {
    const Token& t = cur();
    if (t.kind == TokenKind::Operator) {
      if (is_unary_op(t.text)) {
        std::string op = next().text;
        return make_expr(Unary{op, parse_unary()});
      }
      if (t.text == "##" && mode_ == LexMode::Sva) {
        std::string op = parse_delay();
        return make_expr(Unary{op, parse_expr(2)});
      }
      if (t.text == "@") event_control_fail();
    }
    return parse_postfix(parse_primary());
  }

  ExprPtr parse_postfix(ExprPtr base) {
    while (cur().is_op("[")) {
      const Token open = next();
      ExprPtr msb = parse_expr(2);
      ExprPtr lsb;
      if (cur().is_op(":")) {
        next();
        lsb = parse_expr(2);
      }
      expect_close(open, "]");
      base = make_expr(Select{base, msb, lsb});
    }
    return base;
  }

  ExprPtr parse_primary() {
    const Token& t = cur();
    switch (t.kind) {
      case TokenKind::Identifier:
        return ident(next().text);
      case TokenKind::Number:
        return make_expr(parse_literal_text(next().text));
      case TokenKind::SystemName: {
        std::string name = next().text;
        Call call{name, {}};
        if (cur().is_op("(")) {
          const Token open = next();
          if (!cur().is_op(")")) {
            call.args.push_back(parse_expr(2));
            while (cur().is_op(",")) {
              next();
              call.args.push_back(parse_expr(2));
            }
          }
          expect_close(open, ")");
        }
        return make_expr(std::move(call));
      }
      case TokenKind::Operator:
        if (t.text == "(") {
          const Token open = next();
          ExprPtr e = parse_expr(0);
          expect_close(open, ")");
          return e;
        }
        if (t.text == "{") {
          const Token open = next();
          Concat c;
          c.parts.push_back(parse_expr(2));
          if (cur().is_op("{")) fail_here("replication is not supported");
          while (cur().is_op(",")) {
            next();
            c.parts.push_back(parse_expr(2));
          }
          expect_close(open, "}");
          return make_expr(std::move(c));
        }
        if (t.text == "@") event_control_fail();
        if (t.text == ")" || t.text == "]" || t.text == "}")
          fail_here("unbalanced '" + t.text + "'");
        fail_here("expected an expression");
      case TokenKind::Keyword:
        unsupported_or_unexpected(t);
      case TokenKind::End:
        fail_here("expected an expression");
    }
    fail_here("expected an expression");
  }

  static bool valid_lvalue(const Expr& e) {
    if (std::holds_alternative<Ident>(e.node)) return true;
    if (const auto* s = std::get_if<Select>(&e.node)) return valid_lvalue(*s->base);
    if (const auto* c = std::get_if<Concat>(&e.node)) {
      for (const auto& p : c->parts)
        if (!valid_lvalue(*p)) return false;
      return true;
    }
    return false;
  }

  ExprPtr parse_lvalue() {
    const Token& start = cur();
    if (start.kind != TokenKind::Identifier && !start.is_op("{"))
      fail_here("expected a statement");
    ExprPtr e = parse_postfix(parse_primary());
    if (!valid_lvalue(*e)) fail_at(start, "invalid assignment target");
    return e;
  }

  // --- statements ---------------------------------------------------------

  StmtPtr parse_block() {
    next();  // begin
    if (cur().is_op(":")) {
      next();
      expect_ident();
    }
    Block b;
    while (!cur().is_kw("end")) {
      if (at_end()) fail_here("missing 'end'");
      b.stmts.push_back(parse_stmt());
    }
    next();
    if (cur().is_op(":")) {
      next();
      expect_ident();
    }
    return make_stmt(std::move(b));
  }

  StmtPtr parse_if() {
    next();  // if
    if (!cur().is_op("(")) fail_here("expected '(' after 'if'");
    const Token open = next();
    ExprPtr cond = parse_expr(2);
    expect_close(open, ")");
    StmtPtr then_s = parse_stmt();
    StmtPtr else_s;
    if (cur().is_kw("else")) {
      next();
      else_s = parse_stmt();
    }
    return make_stmt(If{cond, then_s, else_s});
  }

  StmtPtr parse_case() {
    const Token& kw = next();
    Case c;
    c.kind = kw.text == "case" ? CaseKind::Case : kw.text == "casez" ? CaseKind::Casez : CaseKind::Casex;
    if (!cur().is_op("(")) fail_here("expected '(' after '" + kw.text + "'");
    const Token open = next();
    c.subject = parse_expr(2);
    expect_close(open, ")");
    while (!cur().is_kw("endcase")) {
      if (at_end()) fail_here("missing 'endcase'");
      if (cur().is_kw("default")) {
        if (c.default_stmt) fail_here("duplicate default item");
        next();
        if (cur().is_op(":")) next();
        c.default_stmt = parse_stmt();
        continue;
      }
      CaseItem item;
      item.labels.push_back(parse_expr(2));
      while (cur().is_op(",")) {
        next();
        item.labels.push_back(parse_expr(2));
      }
      expect_op(":");
      item.body = parse_stmt();
      c.items.push_back(std::move(item));
    }
    const Token& end_kw = cur();
    if (c.items.empty() && !c.default_stmt) fail_at(end_kw, "case statement has no items");
    next();
    return make_stmt(std::move(c));
  }

  // --- modules ------------------------------------------------------------

  std::optional<Range> parse_range() {
    if (!cur().is_op("[")) return std::nullopt;
    const Token open = next();
    auto bound = [&]() -> long {
      bool neg = false;
      if (cur().is_op("-")) {
        neg = true;
        next();
      }
      if (cur().kind != TokenKind::Number || cur().text.find('\'') != std::string::npos)
        fail_here("range bounds must be integer constants");
      long v = std::stol(next().text);
      return neg ? -v : v;
    };
    Range r;
    r.msb = bound();
    expect_op(":");
    r.lsb = bound();
    expect_close(open, "]");
    return r;
  }

  std::optional<NetKind> parse_net_kind() {
    if (cur().is_kw("wire")) return next(), NetKind::Wire;
    if (cur().is_kw("reg")) return next(), NetKind::Reg;
    if (cur().is_kw("logic")) return next(), NetKind::Logic;
    return std::nullopt;
  }

  bool parse_signed() {
    if (cur().is_kw("signed")) {
      next();
      return true;
    }
    return false;
  }

  static std::optional<Direction> direction_of(const Token& t) {
    if (t.is_kw("input")) return Direction::Input;
    if (t.is_kw("output")) return Direction::Output;
    if (t.is_kw("inout")) return Direction::Inout;
    return std::nullopt;
  }

  struct ModuleState {
    ModuleDecl mod;
    bool ansi = false;
    std::vector<std::string> header_names;   // non-ANSI port list
    std::map<std::string, std::size_t> port_index;
    std::map<std::string, std::size_t> net_index;
  };

  void add_port(ModuleState& st, PortDecl p, const Token& at) {
    if (st.port_index.count(p.name)) fail_at(at, "duplicate port '" + p.name + "'");
    st.port_index[p.name] = st.mod.ports.size();
    st.mod.ports.push_back(std::move(p));
  }

  ModuleDecl parse_module() {
    const Token& kw = next();  // module
    ModuleState st;
    st.mod.span.begin = kw.offset;
    st.mod.name = expect_ident();
    if (cur().is_op("(")) {
      const Token open = next();
      if (!cur().is_op(")")) {
        if (direction_of(cur())) {
          st.ansi = true;
          parse_ansi_ports(st);
        } else {
          st.header_names.push_back(expect_ident());
          while (cur().is_op(",")) {
            next();
            st.header_names.push_back(expect_ident());
          }
        }
      }
      expect_close(open, ")");
    }
    expect_op(";");
    while (!cur().is_kw("endmodule")) {
      if (at_end()) fail_here("missing 'endmodule'");
      parse_module_item(st);
    }
    st.mod.span.end = next().end_offset();

    if (!st.ansi) {
      // Reorder ports to header order; every header name needs a direction.
      std::vector<PortDecl> ordered;
      for (const auto& n : st.header_names) {
        auto it = st.port_index.find(n);
        if (it == st.port_index.end())
          fail_at(kw, "port '" + n + "' of module '" + st.mod.name + "' has no direction declaration");
        ordered.push_back(st.mod.ports[it->second]);
      }
      st.mod.ports = std::move(ordered);
    }
    return std::move(st.mod);
  }

  void parse_ansi_ports(ModuleState& st) {
    PortDecl proto;
    for (;;) {
      const Token at = cur();
      if (auto d = direction_of(cur())) {
        next();
        proto = PortDecl{};
        proto.direction = *d;
        proto.kind = parse_net_kind();
        proto.is_signed = parse_signed();
        proto.range = parse_range();
      }
      PortDecl p = proto;
      p.name = expect_ident();
      add_port(st, std::move(p), at);
      if (!cur().is_op(",")) break;
      next();
    }
  }

  void parse_module_item(ModuleState& st) {
    const Token& t = cur();
    if (auto d = direction_of(t)) {
      if (st.ansi) fail_at(t, "port declaration in body of a module with an ANSI header");
      const Token at = next();
      PortDecl proto;
      proto.direction = *d;
      proto.kind = parse_net_kind();
      proto.is_signed = parse_signed();
      proto.range = parse_range();
      for (;;) {
        PortDecl p = proto;
        p.name = expect_ident();
        if (std::find(st.header_names.begin(), st.header_names.end(), p.name) == st.header_names.end())
          fail_at(at, "'" + p.name + "' is not in the port list");
        if (auto it = st.net_index.find(p.name); it != st.net_index.end())
          fail_at(at, "port '" + p.name + "' declared after its net declaration");
        add_port(st, std::move(p), at);
        if (!cur().is_op(",")) break;
        next();
      }
      expect_op(";");
      return;
    }
    if (t.is_kw("wire") || t.is_kw("reg") || t.is_kw("logic")) {
      const Token at = t;
      NetKind kind = *parse_net_kind();
      bool is_signed = parse_signed();
      std::optional<Range> range = parse_range();
      for (;;) {
        std::string name = expect_ident();
        if (auto it = st.port_index.find(name); it != st.port_index.end()) {
          PortDecl& p = st.mod.ports[it->second];
          if (st.ansi || p.kind) fail_at(at, "duplicate declaration of '" + name + "'");
          if (range && p.range && !(*range == *p.range))
            fail_at(at, "conflicting range for '" + name + "'");
          p.kind = kind;
          p.is_signed = p.is_signed || is_signed;
          if (!p.range) p.range = range;
        } else {
          if (st.net_index.count(name)) fail_at(at, "duplicate declaration of '" + name + "'");
          st.net_index[name] = st.mod.nets.size();
          st.mod.nets.push_back(NetDecl{name, kind, is_signed, range});
        }
        if (cur().is_op("=")) {
          next();
          st.mod.continuous_assigns.push_back(ContinuousAssign{ident(name), parse_expr(2)});
        }
        if (!cur().is_op(",")) break;
        next();
      }
      expect_op(";");
      return;
    }
    if (t.is_kw("assign")) {
      next();
      for (;;) {
        ExprPtr lhs = parse_lvalue();
        expect_op("=");
        st.mod.continuous_assigns.push_back(ContinuousAssign{lhs, parse_expr(2)});
        if (!cur().is_op(",")) break;
        next();
      }
      expect_op(";");
      return;
    }
    if (is_always_kw(t)) {
      st.mod.always_blocks.push_back(parse_always());
      return;
    }
    if (t.kind == TokenKind::Keyword) unsupported_or_unexpected(t);
    if (t.kind == TokenKind::Identifier && peek().kind == TokenKind::Identifier)
      fail_at(t, "module instantiation is not supported");
    fail_here("unexpected module item");
  }

  AlwaysBlock parse_always() {
    const Token& kw = next();
    AlwaysBlock b;
    b.span.begin = kw.offset;
    if (kw.text == "always_comb" || kw.text == "always_latch") {
      b.kind = kw.text == "always_comb" ? AlwaysKind::AlwaysComb : AlwaysKind::AlwaysLatch;
      b.sensitivity.entries.push_back({Edge::Star, ""});
    } else {
      b.kind = kw.text == "always_ff" ? AlwaysKind::AlwaysFf : AlwaysKind::Always;
      b.sensitivity = parse_sensitivity();
      if (b.kind == AlwaysKind::AlwaysFf) {
        for (const auto& e : b.sensitivity.entries)
          if (e.edge != Edge::Posedge && e.edge != Edge::Negedge)
            fail_at(kw, "always_ff requires edge-triggered events");
      }
    }
    b.body = parse_stmt();
    b.span.end = toks_[pos_ - 1].end_offset();
    return b;
  }

  SensitivityList parse_sensitivity() {
    if (!cur().is_op("@")) fail_here("expected '@' sensitivity list");
    next();
    SensitivityList s;
    if (cur().is_op("*")) {
      next();
      s.entries.push_back({Edge::Star, ""});
      return s;
    }
    if (!cur().is_op("(")) fail_here("expected '(' after '@'");
    const Token open = next();
    if (cur().is_op("*")) {
      next();
      expect_close(open, ")");
      s.entries.push_back({Edge::Star, ""});
      return s;
    }
    for (;;) {
      Edge edge = Edge::Level;
      if (cur().is_kw("posedge")) {
        edge = Edge::Posedge;
        next();
      } else if (cur().is_kw("negedge")) {
        edge = Edge::Negedge;
        next();
      }
      s.entries.push_back({edge, expect_ident()});
      if (cur().is_kw("or") || cur().is_op(",")) {
        next();
        continue;
      }
      break;
    }
    expect_close(open, ")");
    return s;
  }

  std::string_view text_;
  LexMode mode_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline SourceUnit parse_source(std::string_view text, const ParseOptions& options = {}) {
  if (text.size() > options.max_bytes)
    throw ParseError(1, 1, "input of " + std::to_string(text.size()) + " bytes exceeds the " +
                               std::to_string(options.max_bytes) + "-byte limit");
  SourceUnit unit = detail::Parser(text, LexMode::Verilog).parse_unit(options.source_name);
  return unit;
}

// Parses a standalone always block, e.g. an RtlBlock's rtl_text.
inline AlwaysBlock parse_always(std::string_view text) {
  return detail::Parser(text, LexMode::Verilog).parse_single_always();
}

inline ExprPtr parse_expression(std::string_view text, LexMode mode = LexMode::Verilog) {
  return detail::Parser(text, mode).parse_single_expression();
}

// One RtlBlock per always block, in source order. `text` must be the exact
// source `unit` was parsed from; block text is sliced from it.
inline std::vector<RtlBlock> extract_blocks(const SourceUnit& unit, std::string_view text) {
  std::vector<RtlBlock> out;
  for (const auto& mod : unit.modules) {
    std::map<std::string, const PortDecl*> ports;
    std::map<std::string, const NetDecl*> nets;
    for (const auto& p : mod.ports) ports[p.name] = &p;
    for (const auto& n : mod.nets) nets[n.name] = &n;

    for (std::size_t i = 0; i < mod.always_blocks.size(); ++i) {
      const AlwaysBlock& ab = mod.always_blocks[i];
      const auto ids = block_identifiers(ab);
      for (const auto& id : ids)
        if (!ports.count(id) && !nets.count(id)) throw MissingDeclaration(id);

      RtlBlock rb;
      rb.module_name = mod.name;
      rb.index = i;
      rb.block = ab;
      auto used = [&](const std::string& n) {
        return std::find(ids.begin(), ids.end(), n) != ids.end();
      };
      for (const auto& p : mod.ports) {
        if (!used(p.name)) continue;
        rb.local_context += to_verilog(p) + "\n";
        rb.port_names.push_back(p.name);
      }
      for (const auto& n : mod.nets)
        if (used(n.name)) rb.local_context += to_verilog(n) + "\n";
      rb.rtl_text = std::string(text.substr(ab.span.begin, ab.span.size()));
      out.push_back(std::move(rb));
    }
  }
  return out;
}

// Wraps a block and its local context into a module that parses on its own.
inline std::string standalone_module(const RtlBlock& b) {
  std::string out = "module " + b.module_name;
  if (!b.port_names.empty()) {
    out += "(";
    for (std::size_t i = 0; i < b.port_names.size(); ++i) {
      if (i) out += ", ";
      out += b.port_names[i];
    }
    out += ")";
  }
  out += ";\n";
  std::size_t start = 0;
  while (start < b.local_context.size()) {
    auto nl = b.local_context.find('\n', start);
    if (nl == std::string::npos) nl = b.local_context.size();
    out += "  " + b.local_context.substr(start, nl - start) + "\n";
    start = nl + 1;
  }
  out += b.rtl_text + "\nendmodule\n";
  return out;
}

// Parses a module source expected to hold exactly one always block.
inline RtlBlock parse_single_block(std::string_view module_text) {
  SourceUnit unit = parse_source(module_text);
  auto blocks = extract_blocks(unit, module_text);
  if (blocks.size() != 1)
    throw InvalidArgument("expected exactly one always block, found " + std::to_string(blocks.size()));
  return std::move(blocks.front());
}

}  // namespace stellar

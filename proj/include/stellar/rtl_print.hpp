#pragma once

#include <string>
#include <string_view>
#include <type_traits>

#include "stellar/rtl_ast.hpp"

namespace stellar {

// Binding strength of operators, larger binds tighter. Delay and implication
// only occur in assertions.
inline int binary_precedence(std::string_view op) {
  if (op == "|->" || op == "|=>") return 0;
  if (op.starts_with("##")) return 1;
  if (op == "?:") return 2;
  if (op == "||") return 3;
  if (op == "&&") return 4;
  if (op == "|") return 5;
  if (op == "^") return 6;
  if (op == "&") return 7;
  if (op == "==" || op == "!=" || op == "===" || op == "!==") return 8;
  if (op == "<" || op == "<=" || op == ">" || op == ">=") return 9;
  if (op == "<<" || op == ">>") return 10;
  if (op == "+" || op == "-") return 11;
  if (op == "*" || op == "/" || op == "%") return 12;
  return -1;
}

inline constexpr int kUnaryPrecedence = 13;
inline constexpr int kPrimaryPrecedence = 14;

inline int precedence(const Expr& e) {
  if (const auto* b = std::get_if<Binary>(&e.node)) return binary_precedence(b->op);
  if (std::holds_alternative<Ternary>(e.node)) return 2;
  if (const auto* u = std::get_if<Unary>(&e.node))
    return u->op.starts_with("##") ? 1 : kUnaryPrecedence;
  return kPrimaryPrecedence;
}

inline std::string to_verilog(const Literal& lit) {
  std::string out;
  if (lit.width) out += std::to_string(*lit.width);
  if (lit.based) {
    out += '\'';
    if (lit.is_signed) out += 's';
    switch (lit.base) {
      case Base::Bin: out += 'b'; break;
      case Base::Oct: out += 'o'; break;
      case Base::Dec: out += 'd'; break;
      case Base::Hex: out += 'h'; break;
    }
  }
  out += lit.digits;
  return out;
}

std::string to_verilog(const Expr& e);

namespace detail {

inline std::string wrap_if(const Expr& e, bool parens) {
  std::string s = to_verilog(e);
  return parens ? "(" + s + ")" : s;
}

inline std::string join_exprs(const std::vector<ExprPtr>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ", ";
    out += to_verilog(*parts[i]);
  }
  return out;
}

}  // namespace detail

inline std::string to_verilog(const Expr& e) {
  return std::visit(
      [&](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Ident>) {
          return x.name;
        } else if constexpr (std::is_same_v<T, Literal>) {
          return to_verilog(x);
        } else if constexpr (std::is_same_v<T, Unary>) {
          if (x.op.starts_with("##")) {
            return x.op + " " + detail::wrap_if(*x.operand, precedence(*x.operand) <= 1);
          }
          return x.op + detail::wrap_if(*x.operand, precedence(*x.operand) <= kUnaryPrecedence);
        } else if constexpr (std::is_same_v<T, Binary>) {
          const int p = binary_precedence(x.op);
          return detail::wrap_if(*x.lhs, precedence(*x.lhs) < p) + " " + x.op + " " +
                 detail::wrap_if(*x.rhs, precedence(*x.rhs) <= p);
        } else if constexpr (std::is_same_v<T, Ternary>) {
          return detail::wrap_if(*x.cond, precedence(*x.cond) <= 2) + " ? " +
                 detail::wrap_if(*x.then_expr, precedence(*x.then_expr) <= 2) + " : " +
                 detail::wrap_if(*x.else_expr, precedence(*x.else_expr) < 2);
        } else if constexpr (std::is_same_v<T, Concat>) {
          return "{" + detail::join_exprs(x.parts) + "}";
        } else if constexpr (std::is_same_v<T, Select>) {
          std::string s = detail::wrap_if(*x.base, precedence(*x.base) < kPrimaryPrecedence) +
                          "[" + to_verilog(*x.msb);
          if (x.lsb) s += ":" + to_verilog(*x.lsb);
          return s + "]";
        } else {
          return x.name + "(" + detail::join_exprs(x.args) + ")";
        }
      },
      e.node);
}

inline std::string to_verilog(const SensitivityList& sens) {
  if (sens.entries.size() == 1 && sens.entries[0].edge == Edge::Star) return "@(*)";
  std::string out = "@(";
  for (std::size_t i = 0; i < sens.entries.size(); ++i) {
    const auto& en = sens.entries[i];
    if (i) out += " or ";
    if (en.edge == Edge::Posedge) out += "posedge ";
    if (en.edge == Edge::Negedge) out += "negedge ";
    out += en.signal;
  }
  return out + ")";
}

namespace detail {

inline void print_stmt(const Stmt& s, int indent, std::string& out, bool inline_head);

inline void pad(std::string& out, int indent) { out.append(static_cast<std::size_t>(indent) * 2, ' '); }

// True when an else attached after `s` would bind to a nested if inside it.
inline bool dangling(const Stmt& s) {
  const auto* i = std::get_if<If>(&s.node);
  if (!i) return false;
  if (!i->else_stmt) return true;
  return dangling(*i->else_stmt);
}

// Prints a branch body. Blocks open on the current line; other statements
// move to the next line, indented.
inline void print_branch(const Stmt& s, int indent, std::string& out) {
  if (std::holds_alternative<Block>(s.node)) {
    out += ' ';
    print_stmt(s, indent, out, true);
  } else {
    out += '\n';
    print_stmt(s, indent + 1, out, false);
  }
}

inline void print_stmt(const Stmt& s, int indent, std::string& out, bool inline_head) {
  if (!inline_head) pad(out, indent);
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Block>) {
          out += "begin\n";
          for (const auto& c : x.stmts) {
            print_stmt(*c, indent + 1, out, false);
            out += '\n';
          }
          pad(out, indent);
          out += "end";
        } else if constexpr (std::is_same_v<T, If>) {
          out += "if (" + to_verilog(*x.cond) + ")";
          if (x.else_stmt && dangling(*x.then_stmt)) {
            out += " ";
            print_stmt(*make_stmt(Block{{x.then_stmt}}), indent, out, true);
          } else {
            print_branch(*x.then_stmt, indent, out);
          }
          if (x.else_stmt) {
            out += '\n';
            pad(out, indent);
            out += "else";
            if (std::holds_alternative<If>(x.else_stmt->node)) {
              out += ' ';
              print_stmt(*x.else_stmt, indent, out, true);
            } else {
              print_branch(*x.else_stmt, indent, out);
            }
          }
        } else if constexpr (std::is_same_v<T, Case>) {
          out += x.kind == CaseKind::Case ? "case" : x.kind == CaseKind::Casez ? "casez" : "casex";
          out += " (" + to_verilog(*x.subject) + ")\n";
          for (const auto& item : x.items) {
            pad(out, indent + 1);
            out += join_exprs(item.labels) + ":";
            print_branch(*item.body, indent + 1, out);
            out += '\n';
          }
          if (x.default_stmt) {
            pad(out, indent + 1);
            out += "default:";
            print_branch(*x.default_stmt, indent + 1, out);
            out += '\n';
          }
          pad(out, indent);
          out += "endcase";
        } else if constexpr (std::is_same_v<T, BlockingAssign>) {
          out += to_verilog(*x.lhs) + " = " + to_verilog(*x.rhs) + ";";
        } else {
          out += to_verilog(*x.lhs) + " <= " + to_verilog(*x.rhs) + ";";
        }
      },
      s.node);
}

}  // namespace detail

inline std::string to_verilog(const Stmt& s, int indent = 0) {
  std::string out;
  detail::print_stmt(s, indent, out, false);
  return out;
}

inline std::string to_verilog(const AlwaysBlock& b, int indent = 0) {
  std::string out;
  detail::pad(out, indent);
  switch (b.kind) {
    case AlwaysKind::AlwaysComb: out += "always_comb"; break;
    case AlwaysKind::AlwaysLatch: out += "always_latch"; break;
    case AlwaysKind::AlwaysFf: out += "always_ff " + to_verilog(b.sensitivity); break;
    case AlwaysKind::Always: out += "always " + to_verilog(b.sensitivity); break;
  }
  detail::print_branch(*b.body, indent, out);
  return out;
}

inline std::string_view to_string(Direction d) {
  return d == Direction::Input ? "input" : d == Direction::Output ? "output" : "inout";
}

inline std::string_view to_string(NetKind k) {
  return k == NetKind::Wire ? "wire" : k == NetKind::Reg ? "reg" : "logic";
}

namespace detail {
inline std::string range_text(const std::optional<Range>& r) {
  if (!r) return "";
  return "[" + std::to_string(r->msb) + ":" + std::to_string(r->lsb) + "] ";
}
}  // namespace detail

inline std::string to_verilog(const PortDecl& p) {
  std::string out(to_string(p.direction));
  out += ' ';
  if (p.kind) (out += to_string(*p.kind)) += ' ';
  if (p.is_signed) out += "signed ";
  out += detail::range_text(p.range) + p.name + ";";
  return out;
}

inline std::string to_verilog(const NetDecl& n) {
  std::string out(to_string(n.kind));
  out += ' ';
  if (n.is_signed) out += "signed ";
  out += detail::range_text(n.range) + n.name + ";";
  return out;
}

}  // namespace stellar

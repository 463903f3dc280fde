#pragma once

#include <map>
#include <string>
#include <string_view>
#include <type_traits>

#include "stellar/lexer.hpp"
#include "stellar/rtl_ast.hpp"
#include "stellar/rtl_print.hpp"

namespace stellar {

using RenameMap = std::map<std::string, std::string>;

inline ExprPtr rename(const ExprPtr& e, const RenameMap& m);

namespace detail {
inline std::vector<ExprPtr> rename_all(const std::vector<ExprPtr>& v, const RenameMap& m) {
  std::vector<ExprPtr> out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(rename(x, m));
  return out;
}
}  // namespace detail

// Rebuilds `e` with identifiers substituted per `m`; unmapped names stay.
inline ExprPtr rename(const ExprPtr& e, const RenameMap& m) {
  if (!e) return e;
  return std::visit(
      [&](const auto& x) -> ExprPtr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Ident>) {
          auto it = m.find(x.name);
          return it == m.end() ? e : ident(it->second);
        } else if constexpr (std::is_same_v<T, Literal>) {
          return e;
        } else if constexpr (std::is_same_v<T, Unary>) {
          return make_expr(Unary{x.op, rename(x.operand, m)});
        } else if constexpr (std::is_same_v<T, Binary>) {
          return make_expr(Binary{x.op, rename(x.lhs, m), rename(x.rhs, m)});
        } else if constexpr (std::is_same_v<T, Ternary>) {
          return make_expr(Ternary{rename(x.cond, m), rename(x.then_expr, m), rename(x.else_expr, m)});
        } else if constexpr (std::is_same_v<T, Concat>) {
          return make_expr(Concat{detail::rename_all(x.parts, m)});
        } else if constexpr (std::is_same_v<T, Select>) {
          return make_expr(Select{rename(x.base, m), rename(x.msb, m), rename(x.lsb, m)});
        } else {
          return make_expr(Call{x.name, detail::rename_all(x.args, m)});
        }
      },
      e->node);
}

inline StmtPtr rename(const StmtPtr& s, const RenameMap& m) {
  if (!s) return s;
  return std::visit(
      [&](const auto& x) -> StmtPtr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Block>) {
          Block b;
          for (const auto& c : x.stmts) b.stmts.push_back(rename(c, m));
          return make_stmt(std::move(b));
        } else if constexpr (std::is_same_v<T, If>) {
          return make_stmt(If{rename(x.cond, m), rename(x.then_stmt, m), rename(x.else_stmt, m)});
        } else if constexpr (std::is_same_v<T, Case>) {
          Case c{x.kind, rename(x.subject, m), {}, rename(x.default_stmt, m)};
          for (const auto& item : x.items)
            c.items.push_back(CaseItem{detail::rename_all(item.labels, m), rename(item.body, m)});
          return make_stmt(std::move(c));
        } else {
          return make_stmt(T{rename(x.lhs, m), rename(x.rhs, m)});
        }
      },
      s->node);
}

inline AlwaysBlock rename(const AlwaysBlock& b, const RenameMap& m) {
  AlwaysBlock out = b;
  for (auto& e : out.sensitivity.entries) {
    if (auto it = m.find(e.signal); it != m.end()) e.signal = it->second;
  }
  out.body = rename(b.body, m);
  return out;
}

// Text of the block after renaming identifiers to v0, v1, ... in order of
// first occurrence. Two blocks have equal keys exactly when their ASTs are
// equal up to a bijective renaming.
inline std::string normalized_key(const AlwaysBlock& b) {
  RenameMap m;
  const auto ids = block_identifiers(b);
  for (std::size_t i = 0; i < ids.size(); ++i) m[ids[i]] = "v" + std::to_string(i);
  AlwaysBlock n = rename(b, m);
  n.kind = AlwaysKind::Always;
  return to_verilog(n);
}

// Substitutes identifier tokens in source text, leaving comments, spacing
// and everything else byte-for-byte intact.
inline std::string rename_text(std::string_view text, const RenameMap& m,
                               LexMode mode = LexMode::Verilog) {
  std::string out;
  std::size_t copied = 0;
  for (const auto& t : tokenize(text, mode)) {
    if (t.kind != TokenKind::Identifier) continue;
    auto it = m.find(t.text);
    if (it == m.end()) continue;
    out.append(text.substr(copied, t.offset - copied));
    out += it->second;
    copied = t.end_offset();
  }
  out.append(text.substr(copied));
  return out;
}

}  // namespace stellar

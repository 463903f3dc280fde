#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "stellar/error.hpp"
#include "stellar/rtl_ast.hpp"
#include "stellar/rtl_print.hpp"

namespace stellar {

inline constexpr std::uint64_t kMaxPathCount = std::uint64_t{1} << 31;

struct PathLiteral {
  ExprPtr guard;
  bool polarity = true;
};

// An assignment executed along a path, in program order.
struct PathEffect {
  bool blocking = false;
  ExprPtr lhs;
  ExprPtr rhs;
};

struct PathCond {
  std::vector<PathLiteral> literals;
  std::vector<PathEffect> effects;
  std::string description;  // conjunction of the literals as an expression
};

struct PathSet {
  std::uint64_t count = 1;
  std::vector<PathCond> paths;
  bool truncated = false;
};

struct PathOptions {
  std::size_t cap = 4096;
};

namespace detail {

inline std::uint64_t checked(std::uint64_t v) {
  if (v > kMaxPathCount) throw PathExplosion();
  return v;
}

inline ExprPtr case_match(const Case& c, const CaseItem& item) {
  ExprPtr out;
  for (const auto& label : item.labels) {
    ExprPtr eq = make_expr(Binary{"==", c.subject, label});
    out = out ? make_expr(Binary{"||", out, eq}) : eq;
  }
  return out;
}

struct PartialPath {
  std::vector<PathLiteral> literals;
  std::vector<PathEffect> effects;
};

using PathList = std::vector<PartialPath>;

inline PathList concat_paths(const PathList& a, const PathList& b, std::size_t cap) {
  PathList out;
  for (const auto& x : a) {
    for (const auto& y : b) {
      if (out.size() >= cap) return out;
      PartialPath p = x;
      p.literals.insert(p.literals.end(), y.literals.begin(), y.literals.end());
      p.effects.insert(p.effects.end(), y.effects.begin(), y.effects.end());
      out.push_back(std::move(p));
    }
  }
  return out;
}

inline PathList prefixed(const PathList& paths, const std::vector<PathLiteral>& prefix) {
  PathList out;
  out.reserve(paths.size());
  for (const auto& p : paths) {
    PartialPath q;
    q.literals = prefix;
    q.literals.insert(q.literals.end(), p.literals.begin(), p.literals.end());
    q.effects = p.effects;
    out.push_back(std::move(q));
  }
  return out;
}

inline void append_capped(PathList& into, PathList from, std::size_t cap) {
  for (auto& p : from) {
    if (into.size() >= cap) return;
    into.push_back(std::move(p));
  }
}

// Enumerates at most `cap` paths, in then-before-else / item order.
inline PathList enumerate(const Stmt& s, std::size_t cap) {
  return std::visit(
      [&](const auto& x) -> PathList {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Block>) {
          PathList acc{PartialPath{}};
          for (const auto& c : x.stmts) acc = concat_paths(acc, enumerate(*c, cap), cap);
          return acc;
        } else if constexpr (std::is_same_v<T, If>) {
          PathList out = prefixed(enumerate(*x.then_stmt, cap), {{x.cond, true}});
          PathList tail = x.else_stmt ? enumerate(*x.else_stmt, cap) : PathList{PartialPath{}};
          append_capped(out, prefixed(tail, {{x.cond, false}}), cap);
          return out;
        } else if constexpr (std::is_same_v<T, Case>) {
          PathList out;
          std::vector<PathLiteral> negations;
          for (const auto& item : x.items) {
            append_capped(out, prefixed(enumerate(*item.body, cap), {{case_match(x, item), true}}), cap);
            for (const auto& label : item.labels)
              negations.push_back({make_expr(Binary{"==", x.subject, label}), false});
          }
          PathList tail = x.default_stmt ? enumerate(*x.default_stmt, cap) : PathList{PartialPath{}};
          append_capped(out, prefixed(tail, negations), cap);
          return out;
        } else {
          PartialPath p;
          p.effects.push_back({std::is_same_v<T, BlockingAssign>, x.lhs, x.rhs});
          return {p};
        }
      },
      s.node);
}

}  // namespace detail

// Exact number of syntactic execution paths:
//   assignment 1; block: product; if: then + (else or 1);
//   case: sum of items + (default or 1).
inline std::uint64_t path_count(const Stmt& s) {
  using detail::checked;
  return std::visit(
      [&](const auto& x) -> std::uint64_t {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Block>) {
          std::uint64_t n = 1;
          for (const auto& c : x.stmts) n = checked(n * path_count(*c));
          return n;
        } else if constexpr (std::is_same_v<T, If>) {
          return checked(path_count(*x.then_stmt) + (x.else_stmt ? path_count(*x.else_stmt) : 1));
        } else if constexpr (std::is_same_v<T, Case>) {
          std::uint64_t n = x.default_stmt ? path_count(*x.default_stmt) : 1;
          for (const auto& item : x.items) n = checked(n + path_count(*item.body));
          return n;
        } else {
          return 1;
        }
      },
      s.node);
}

// Conjunction of a path's literals; a literal-free path is `1'b1`.
inline ExprPtr path_condition(const std::vector<PathLiteral>& literals) {
  ExprPtr out;
  for (const auto& lit : literals) {
    ExprPtr e = lit.polarity ? lit.guard : make_expr(Unary{"!", lit.guard});
    out = out ? make_expr(Binary{"&&", out, e}) : e;
  }
  if (!out) out = make_expr(Literal{1u, Base::Bin, "1", true, false});
  return out;
}

inline PathSet count_paths(const Stmt& body, const PathOptions& options = {}) {
  PathSet set;
  set.count = path_count(body);
  set.truncated = set.count > options.cap;
  for (auto& p : detail::enumerate(body, options.cap)) {
    PathCond pc;
    pc.literals = std::move(p.literals);
    pc.effects = std::move(p.effects);
    pc.description = to_verilog(*path_condition(pc.literals));
    set.paths.push_back(std::move(pc));
  }
  return set;
}

inline std::vector<PathCond> enumerate_path_conditions(const Stmt& body,
                                                       const PathOptions& options = {}) {
  PathSet set = count_paths(body, options);
  if (set.truncated)
    throw InvalidArgument("path enumeration truncated at " + std::to_string(options.cap) +
                          " of " + std::to_string(set.count) + " paths");
  return std::move(set.paths);
}

}  // namespace stellar

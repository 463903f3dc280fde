#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "stellar/error.hpp"
#include "stellar/rtl_ast.hpp"
#include "stellar/rtl_print.hpp"
#include "stellar/rtl_transform.hpp"

namespace stellar {

enum class ContextTag { Async, SyncPosedge, SyncNegedge, SyncBoth, Comb };

inline std::string_view to_string(ContextTag t) {
  switch (t) {
    case ContextTag::Async: return "ASYNC";
    case ContextTag::SyncPosedge: return "SYNC_POSEDGE";
    case ContextTag::SyncNegedge: return "SYNC_NEGEDGE";
    case ContextTag::SyncBoth: return "SYNC_BOTH";
    case ContextTag::Comb: return "COMB";
  }
  return "COMB";
}

inline std::optional<ContextTag> context_tag_from_string(std::string_view s) {
  for (auto t : {ContextTag::Async, ContextTag::SyncPosedge, ContextTag::SyncNegedge,
                 ContextTag::SyncBoth, ContextTag::Comb})
    if (to_string(t) == s) return t;
  return std::nullopt;
}

// Timing class of a block, read from its sensitivity list alone.
//   star or level-only              -> COMB
//   edges on one signal, one kind   -> SYNC_POSEDGE / SYNC_NEGEDGE
//   both edges of one signal        -> SYNC_BOTH
//   edges on two or more signals,
//   or an edge plus a level entry   -> ASYNC
inline ContextTag context_tag(const SensitivityList& sens) {
  std::set<std::string> edge_signals;
  bool pos = false, neg = false, level = false;
  for (const auto& e : sens.entries) {
    switch (e.edge) {
      case Edge::Posedge: pos = true; edge_signals.insert(e.signal); break;
      case Edge::Negedge: neg = true; edge_signals.insert(e.signal); break;
      case Edge::Level: level = true; break;
      case Edge::Star: level = true; break;
    }
  }
  if (edge_signals.empty()) return ContextTag::Comb;
  if (edge_signals.size() > 1 || level) return ContextTag::Async;
  if (pos && neg) return ContextTag::SyncBoth;
  return pos ? ContextTag::SyncPosedge : ContextTag::SyncNegedge;
}

struct Fingerprint {
  ContextTag tag = ContextTag::Comb;
  std::string body;
  std::string full;

  bool operator==(const Fingerprint& o) const { return full == o.full; }
};

namespace detail {

using OpCounts = std::map<std::string, int>;

inline std::string op_key(const Unary& u) {
  if (u.op == "!" || u.op == "~") return u.op;
  return "u" + u.op;
}

inline void count_ops(const Expr& e, OpCounts& ops) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Unary>) {
          ++ops[op_key(x)];
          count_ops(*x.operand, ops);
        } else if constexpr (std::is_same_v<T, Binary>) {
          ++ops[x.op];
          count_ops(*x.lhs, ops);
          count_ops(*x.rhs, ops);
        } else if constexpr (std::is_same_v<T, Ternary>) {
          ++ops["?:"];
          count_ops(*x.cond, ops);
          count_ops(*x.then_expr, ops);
          count_ops(*x.else_expr, ops);
        } else if constexpr (std::is_same_v<T, Concat>) {
          ++ops["{}"];
          for (const auto& p : x.parts) count_ops(*p, ops);
        } else if constexpr (std::is_same_v<T, Select>) {
          ++ops[x.lsb ? "[:]" : "[]"];
          count_ops(*x.base, ops);
          count_ops(*x.msb, ops);
          if (x.lsb) count_ops(*x.lsb, ops);
        } else if constexpr (std::is_same_v<T, Call>) {
          for (const auto& p : x.args) count_ops(*p, ops);
        }
      },
      e.node);
}

inline int op_rank(const std::string& key) {
  if (key == "{}" || key == "[]" || key == "[:]") return kPrimaryPrecedence;
  if (key == "!" || key == "~" || key.starts_with("u")) return kUnaryPrecedence;
  return binary_precedence(key);
}

// Operators listed tightest-binding first, ties in byte order.
inline std::string render_ops(const OpCounts& ops) {
  std::vector<std::pair<std::string, int>> v(ops.begin(), ops.end());
  std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
    const int ra = op_rank(a.first), rb = op_rank(b.first);
    if (ra != rb) return ra > rb;
    return a.first < b.first;
  });
  std::string out = "{";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += v[i].first + ":" + std::to_string(v[i].second);
  }
  return out + "}";
}

struct Run {
  int nb = 0;
  int b = 0;
  OpCounts ops;
};

inline std::string render_run(const Run& r) {
  return "block(nb_asgn:" + std::to_string(r.nb) + ",b_asgn:" + std::to_string(r.b) +
         ",ops:" + render_ops(r.ops) + ")";
}

inline void merge(OpCounts& into, const OpCounts& from) {
  for (const auto& [k, v] : from) into[k] += v;
}

// Strips begin/end wrappers around a single statement.
inline const Stmt& unwrap(const Stmt& s) {
  const Stmt* p = &s;
  while (const auto* b = std::get_if<Block>(&p->node)) {
    if (b->stmts.size() != 1) break;
    p = b->stmts.front().get();
  }
  return *p;
}

// Flattens nested blocks into a list of assignments and conditionals.
inline void flatten(const Stmt& s, std::vector<const Stmt*>& out) {
  if (const auto* b = std::get_if<Block>(&s.node)) {
    for (const auto& c : b->stmts) flatten(*c, out);
  } else {
    out.push_back(&s);
  }
}

inline bool is_assignment(const Stmt& s) {
  return std::holds_alternative<BlockingAssign>(s.node) ||
         std::holds_alternative<NonBlockingAssign>(s.node);
}

inline int conditional_depth(const Stmt& s);

inline int chain_depth(const If& head) {
  int inner = 0;
  const If* cur = &head;
  for (;;) {
    inner = std::max(inner, conditional_depth(*cur->then_stmt));
    if (!cur->else_stmt) break;
    const Stmt& e = unwrap(*cur->else_stmt);
    if (const auto* next = std::get_if<If>(&e.node)) {
      cur = next;
      continue;
    }
    inner = std::max(inner, conditional_depth(e));
    break;
  }
  return 1 + inner;
}

inline int conditional_depth(const Stmt& s) {
  if (const auto* b = std::get_if<Block>(&s.node)) {
    int d = 0;
    for (const auto& c : b->stmts) d = std::max(d, conditional_depth(*c));
    return d;
  }
  if (const auto* i = std::get_if<If>(&s.node)) return chain_depth(*i);
  if (const auto* c = std::get_if<Case>(&s.node)) {
    int inner = 0;
    for (const auto& item : c->items) inner = std::max(inner, conditional_depth(*item.body));
    if (c->default_stmt) inner = std::max(inner, conditional_depth(*c->default_stmt));
    return 1 + inner;
  }
  return 0;
}

inline std::string stmt_sig(const Stmt& s, const OpCounts& guard);

inline std::string if_sig(const If& head) {
  std::vector<const If*> chain{&head};
  const Stmt* final_else = nullptr;
  for (;;) {
    const If* cur = chain.back();
    if (!cur->else_stmt) break;
    const Stmt& e = unwrap(*cur->else_stmt);
    if (const auto* next = std::get_if<If>(&e.node)) {
      chain.push_back(next);
      continue;
    }
    final_else = &e;
    break;
  }
  std::string out = "if(dpth:" + std::to_string(chain_depth(head)) +
                    ",brnch:" + std::to_string(chain.size() + 1) + ")";
  for (std::size_t i = 0; i < chain.size(); ++i) {
    OpCounts guard;
    count_ops(*chain[i]->cond, guard);
    out += i == 0 ? "[then:" : "[elif:";
    out += stmt_sig(*chain[i]->then_stmt, guard) + "]";
  }
  out += "[else:";
  if (final_else) out += stmt_sig(*final_else, {});
  return out + "]";
}

inline std::string case_sig(const Case& c) {
  OpCounts subject_ops;
  count_ops(*c.subject, subject_ops);
  std::string out = "case(items:" + std::to_string(c.items.size()) +
                    ",dflt:" + (c.default_stmt ? "1" : "0") + ")";
  for (const auto& item : c.items) {
    OpCounts guard = subject_ops;
    for (const auto& l : item.labels) count_ops(*l, guard);
    out += "[item:" + stmt_sig(*item.body, guard) + "]";
  }
  out += "[default:";
  if (c.default_stmt) out += stmt_sig(*c.default_stmt, {});
  return out + "]";
}

// Signature of a statement sequence. Consecutive assignments fold into one
// block(...) run; guard operators of the enclosing branch are charged to the
// leading run, which is created when the branch opens with a conditional.
inline std::string stmt_sig(const Stmt& s, const OpCounts& guard) {
  std::vector<const Stmt*> flat;
  flatten(s, flat);

  std::vector<std::string> parts;
  Run run;
  bool in_run = false;
  bool guard_charged = false;
  auto close_run = [&] {
    if (!in_run) return;
    parts.push_back(render_run(run));
    run = Run{};
    in_run = false;
  };
  for (const Stmt* st : flat) {
    if (is_assignment(*st)) {
      if (!in_run) {
        in_run = true;
        if (!guard_charged) {
          merge(run.ops, guard);
          guard_charged = true;
        }
      }
      std::visit(
          [&](const auto& a) {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, BlockingAssign>) {
              ++run.b;
              count_ops(*a.lhs, run.ops);
              count_ops(*a.rhs, run.ops);
            } else if constexpr (std::is_same_v<T, NonBlockingAssign>) {
              ++run.nb;
              count_ops(*a.lhs, run.ops);
              count_ops(*a.rhs, run.ops);
            }
          },
          st->node);
      continue;
    }
    close_run();
    if (!guard_charged) {
      guard_charged = true;
      if (!guard.empty()) {
        Run lead;
        lead.ops = guard;
        parts.push_back(render_run(lead));
      }
    }
    if (const auto* i = std::get_if<If>(&st->node)) parts.push_back(if_sig(*i));
    if (const auto* c = std::get_if<Case>(&st->node)) parts.push_back(case_sig(*c));
  }
  close_run();
  if (parts.empty()) {
    Run empty;
    empty.ops = guard;
    return render_run(empty);
  }
  if (parts.size() == 1) return parts.front();
  std::string out = "seq(n:" + std::to_string(parts.size()) + ")";
  for (const auto& p : parts) out += "[" + p + "]";
  return out;
}

}  // namespace detail

inline Fingerprint fingerprint(const AlwaysBlock& block) {
  Fingerprint fp;
  fp.tag = context_tag(block.sensitivity);
  fp.body = detail::stmt_sig(*block.body, {});
  fp.full = std::string(to_string(fp.tag)) + "::" + fp.body;
  return fp;
}

inline Fingerprint fingerprint(const RtlBlock& block) { return fingerprint(block.block); }

// Fraction of blocks whose fingerprint is shared with at least one block that
// is not the same AST up to renaming.
inline double collision_rate(std::span<const Fingerprint> fingerprints,
                             std::span<const std::string> normalized_keys) {
  if (fingerprints.size() != normalized_keys.size())
    throw InvalidArgument("collision_rate: fingerprint and key counts differ");
  if (fingerprints.empty()) throw InvalidArgument("collision_rate: empty corpus");
  std::unordered_map<std::string, std::set<std::string>> keys_by_fp;
  for (std::size_t i = 0; i < fingerprints.size(); ++i)
    keys_by_fp[fingerprints[i].full].insert(normalized_keys[i]);
  std::size_t colliding = 0;
  for (const auto& fp : fingerprints)
    if (keys_by_fp[fp.full].size() > 1) ++colliding;
  return static_cast<double>(colliding) / static_cast<double>(fingerprints.size());
}

inline double collision_rate(std::span<const AlwaysBlock> blocks) {
  std::vector<Fingerprint> fps;
  std::vector<std::string> keys;
  fps.reserve(blocks.size());
  keys.reserve(blocks.size());
  for (const auto& b : blocks) {
    fps.push_back(fingerprint(b));
    keys.push_back(normalized_key(b));
  }
  return collision_rate(fps, keys);
}

}  // namespace stellar

#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace stellar {

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class Base { Bin, Oct, Dec, Hex };

struct Ident {
  std::string name;
};

// `based` is false for plain decimal literals such as `3`.
struct Literal {
  std::optional<unsigned> width;
  Base base = Base::Dec;
  std::string digits;  // lower case, underscores removed; may contain x/z/?
  bool based = false;
  bool is_signed = false;
};

struct Unary {
  std::string op;
  ExprPtr operand;
};

struct Binary {
  std::string op;
  ExprPtr lhs;
  ExprPtr rhs;
};

struct Ternary {
  ExprPtr cond;
  ExprPtr then_expr;
  ExprPtr else_expr;
};

struct Concat {
  std::vector<ExprPtr> parts;
};

// Bit select when `lsb` is null, part select otherwise.
struct Select {
  ExprPtr base;
  ExprPtr msb;
  ExprPtr lsb;
};

// System function call; only produced when parsing assertions.
struct Call {
  std::string name;
  std::vector<ExprPtr> args;
};

struct Expr {
  std::variant<Ident, Literal, Unary, Binary, Ternary, Concat, Select, Call> node;
};

template <class T>
ExprPtr make_expr(T node) {
  return std::make_shared<const Expr>(Expr{std::move(node)});
}

inline ExprPtr ident(std::string name) { return make_expr(Ident{std::move(name)}); }

// ---------------------------------------------------------------------------
// Statements
// ---------------------------------------------------------------------------

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

struct Block {
  std::vector<StmtPtr> stmts;
};

// else-if chains are right-nested: `else_stmt` holds the next If directly.
struct If {
  ExprPtr cond;
  StmtPtr then_stmt;
  StmtPtr else_stmt;  // null when absent
};

enum class CaseKind { Case, Casez, Casex };

struct CaseItem {
  std::vector<ExprPtr> labels;
  StmtPtr body;
};

struct Case {
  CaseKind kind = CaseKind::Case;
  ExprPtr subject;
  std::vector<CaseItem> items;
  StmtPtr default_stmt;  // null when absent
};

struct BlockingAssign {
  ExprPtr lhs;
  ExprPtr rhs;
};

struct NonBlockingAssign {
  ExprPtr lhs;
  ExprPtr rhs;
};

struct Stmt {
  std::variant<Block, If, Case, BlockingAssign, NonBlockingAssign> node;
};

template <class T>
StmtPtr make_stmt(T node) {
  return std::make_shared<const Stmt>(Stmt{std::move(node)});
}

// ---------------------------------------------------------------------------
// Declarations and design units
// ---------------------------------------------------------------------------

enum class Direction { Input, Output, Inout };
enum class NetKind { Wire, Reg, Logic };

struct Range {
  long msb = 0;
  long lsb = 0;
  unsigned width() const {
    return static_cast<unsigned>((msb > lsb ? msb - lsb : lsb - msb) + 1);
  }
  bool operator==(const Range&) const = default;
};

struct PortDecl {
  std::string name;
  Direction direction = Direction::Input;
  std::optional<NetKind> kind;
  bool is_signed = false;
  std::optional<Range> range;
  unsigned width() const { return range ? range->width() : 1u; }
};

struct NetDecl {
  std::string name;
  NetKind kind = NetKind::Wire;
  bool is_signed = false;
  std::optional<Range> range;
  unsigned width() const { return range ? range->width() : 1u; }
};

struct ContinuousAssign {
  ExprPtr lhs;
  ExprPtr rhs;
};

enum class Edge { Posedge, Negedge, Level, Star };

struct SensitivityEntry {
  Edge edge = Edge::Star;
  std::string signal;  // empty for Star
  bool operator==(const SensitivityEntry&) const = default;
};

struct SensitivityList {
  std::vector<SensitivityEntry> entries;
  bool operator==(const SensitivityList&) const = default;
};

enum class AlwaysKind { Always, AlwaysFf, AlwaysComb, AlwaysLatch };

struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
};

struct AlwaysBlock {
  AlwaysKind kind = AlwaysKind::Always;
  SensitivityList sensitivity;
  StmtPtr body;
  Span span;
};

struct ModuleDecl {
  std::string name;
  std::vector<PortDecl> ports;
  std::vector<NetDecl> nets;
  std::vector<AlwaysBlock> always_blocks;
  std::vector<ContinuousAssign> continuous_assigns;
  Span span;
};

struct SourceUnit {
  std::string source_name;
  std::vector<ModuleDecl> modules;
};

// An always block cut out of its module together with the declarations it
// needs to stand alone.
struct RtlBlock {
  std::string module_name;
  std::size_t index = 0;  // position among the module's always blocks
  AlwaysBlock block;
  std::string local_context;
  std::string rtl_text;
  std::vector<std::string> port_names;  // referenced ports, module order
};

// ---------------------------------------------------------------------------
// Structural equality (spans ignored)
// ---------------------------------------------------------------------------

bool equal(const Expr& a, const Expr& b);
bool equal(const Stmt& a, const Stmt& b);

inline bool equal(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return equal(*a, *b);
}

inline bool equal(const StmtPtr& a, const StmtPtr& b) {
  if (!a || !b) return !a && !b;
  return equal(*a, *b);
}

template <class P>
bool equal_seq(const std::vector<P>& a, const std::vector<P>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!equal(a[i], b[i])) return false;
  return true;
}

inline bool equal(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, Ident>) {
          return x.name == y.name;
        } else if constexpr (std::is_same_v<T, Literal>) {
          return x.width == y.width && x.base == y.base && x.digits == y.digits &&
                 x.based == y.based && x.is_signed == y.is_signed;
        } else if constexpr (std::is_same_v<T, Unary>) {
          return x.op == y.op && equal(x.operand, y.operand);
        } else if constexpr (std::is_same_v<T, Binary>) {
          return x.op == y.op && equal(x.lhs, y.lhs) && equal(x.rhs, y.rhs);
        } else if constexpr (std::is_same_v<T, Ternary>) {
          return equal(x.cond, y.cond) && equal(x.then_expr, y.then_expr) &&
                 equal(x.else_expr, y.else_expr);
        } else if constexpr (std::is_same_v<T, Concat>) {
          return equal_seq(x.parts, y.parts);
        } else if constexpr (std::is_same_v<T, Select>) {
          return equal(x.base, y.base) && equal(x.msb, y.msb) && equal(x.lsb, y.lsb);
        } else {
          return x.name == y.name && equal_seq(x.args, y.args);
        }
      },
      a.node);
}

inline bool equal(const Stmt& a, const Stmt& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, Block>) {
          return equal_seq(x.stmts, y.stmts);
        } else if constexpr (std::is_same_v<T, If>) {
          return equal(x.cond, y.cond) && equal(x.then_stmt, y.then_stmt) &&
                 equal(x.else_stmt, y.else_stmt);
        } else if constexpr (std::is_same_v<T, Case>) {
          if (x.kind != y.kind || !equal(x.subject, y.subject) ||
              x.items.size() != y.items.size() || !equal(x.default_stmt, y.default_stmt))
            return false;
          for (std::size_t i = 0; i < x.items.size(); ++i) {
            if (!equal_seq(x.items[i].labels, y.items[i].labels) ||
                !equal(x.items[i].body, y.items[i].body))
              return false;
          }
          return true;
        } else {
          return equal(x.lhs, y.lhs) && equal(x.rhs, y.rhs);
        }
      },
      a.node);
}

// ---------------------------------------------------------------------------
// Identifier walks
// ---------------------------------------------------------------------------

// Appends identifiers in first-occurrence order, skipping duplicates.
inline void collect_identifiers(const Expr& e, std::vector<std::string>& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Ident>) {
          for (const auto& s : out)
            if (s == x.name) return;
          out.push_back(x.name);
        } else if constexpr (std::is_same_v<T, Unary>) {
          collect_identifiers(*x.operand, out);
        } else if constexpr (std::is_same_v<T, Binary>) {
          collect_identifiers(*x.lhs, out);
          collect_identifiers(*x.rhs, out);
        } else if constexpr (std::is_same_v<T, Ternary>) {
          collect_identifiers(*x.cond, out);
          collect_identifiers(*x.then_expr, out);
          collect_identifiers(*x.else_expr, out);
        } else if constexpr (std::is_same_v<T, Concat>) {
          for (const auto& p : x.parts) collect_identifiers(*p, out);
        } else if constexpr (std::is_same_v<T, Select>) {
          collect_identifiers(*x.base, out);
          collect_identifiers(*x.msb, out);
          if (x.lsb) collect_identifiers(*x.lsb, out);
        } else if constexpr (std::is_same_v<T, Call>) {
          for (const auto& p : x.args) collect_identifiers(*p, out);
        }
      },
      e.node);
}

inline void collect_identifiers(const Stmt& s, std::vector<std::string>& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Block>) {
          for (const auto& c : x.stmts) collect_identifiers(*c, out);
        } else if constexpr (std::is_same_v<T, If>) {
          collect_identifiers(*x.cond, out);
          collect_identifiers(*x.then_stmt, out);
          if (x.else_stmt) collect_identifiers(*x.else_stmt, out);
        } else if constexpr (std::is_same_v<T, Case>) {
          collect_identifiers(*x.subject, out);
          for (const auto& item : x.items) {
            for (const auto& l : item.labels) collect_identifiers(*l, out);
            collect_identifiers(*item.body, out);
          }
          if (x.default_stmt) collect_identifiers(*x.default_stmt, out);
        } else {
          collect_identifiers(*x.lhs, out);
          collect_identifiers(*x.rhs, out);
        }
      },
      s.node);
}

// Identifiers of an always block: sensitivity list first, then the body.
inline std::vector<std::string> block_identifiers(const AlwaysBlock& b) {
  std::vector<std::string> out;
  for (const auto& e : b.sensitivity.entries) {
    if (e.edge == Edge::Star) continue;
    bool seen = false;
    for (const auto& s : out) seen = seen || s == e.signal;
    if (!seen) out.push_back(e.signal);
  }
  if (b.body) collect_identifiers(*b.body, out);
  return out;
}

}  // namespace stellar

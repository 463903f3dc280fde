#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "stellar/detail/hash.hpp"
#include "stellar/detail/names.hpp"
#include "stellar/detail/parallel.hpp"
#include "stellar/detail/random.hpp"
#include "stellar/embed.hpp"
#include "stellar/error.hpp"
#include "stellar/fingerprint.hpp"
#include "stellar/path_sva.hpp"
#include "stellar/pathcount.hpp"
#include "stellar/rtl_parser.hpp"
#include "stellar/sva.hpp"

namespace stellar {

enum class ControlKind { IfElse, Case, Mixed, None };
enum class Timing { Sync, Async };

inline std::string_view to_string(ControlKind k) {
  switch (k) {
    case ControlKind::IfElse: return "if_else";
    case ControlKind::Case: return "case";
    case ControlKind::Mixed: return "mixed";
    case ControlKind::None: return "none";
  }
  return "none";
}

inline std::optional<ControlKind> control_kind_from_string(std::string_view s) {
  for (auto k : {ControlKind::IfElse, ControlKind::Case, ControlKind::Mixed, ControlKind::None})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

inline std::string_view to_string(Timing t) { return t == Timing::Sync ? "sync" : "async"; }

inline Timing timing_of(ContextTag t) { return t == ContextTag::Async ? Timing::Async : Timing::Sync; }

namespace detail {
inline void scan_control(const Stmt& s, bool& has_if, bool& has_case) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Block>) {
          for (const auto& c : x.stmts) scan_control(*c, has_if, has_case);
        } else if constexpr (std::is_same_v<T, If>) {
          has_if = true;
          scan_control(*x.then_stmt, has_if, has_case);
          if (x.else_stmt) scan_control(*x.else_stmt, has_if, has_case);
        } else if constexpr (std::is_same_v<T, Case>) {
          has_case = true;
          for (const auto& item : x.items) scan_control(*item.body, has_if, has_case);
          if (x.default_stmt) scan_control(*x.default_stmt, has_if, has_case);
        }
      },
      s.node);
}
}  // namespace detail

inline ControlKind control_kind(const Stmt& body) {
  bool has_if = false, has_case = false;
  detail::scan_control(body, has_if, has_case);
  if (has_if && has_case) return ControlKind::Mixed;
  if (has_if) return ControlKind::IfElse;
  if (has_case) return ControlKind::Case;
  return ControlKind::None;
}

inline constexpr int kMaxPathBucket = 8;

struct StratumKey {
  int path_bucket = 1;  // exact path count, 8 means "8 or more"
  Timing timing = Timing::Sync;
  ControlKind control_kind = ControlKind::None;

  auto operator<=>(const StratumKey&) const = default;

  std::string to_string() const {
    return std::to_string(path_bucket) + (path_bucket == kMaxPathBucket ? "+" : "") + "/" +
           std::string(stellar::to_string(timing)) + "/" + std::string(stellar::to_string(control_kind));
  }
};

inline int path_bucket(std::uint64_t paths) {
  return static_cast<int>(std::min<std::uint64_t>(paths, kMaxPathBucket));
}

struct KbEntry {
  std::string id;
  std::string rtl_text;
  std::string sva_text;
  Fingerprint fingerprint;
  std::uint64_t path_count = 1;
  ContextTag context_tag = ContextTag::Comb;
  ControlKind control_kind = ControlKind::None;
  std::optional<Embedding> embedding;  // kept in the index file, not in JSONL

  StratumKey stratum() const { return {path_bucket(path_count), timing_of(context_tag), control_kind}; }
};

struct RawPair {
  std::optional<std::string> id;
  std::string rtl;
  std::string sva;
};

struct Rejection {
  std::size_t position = 0;  // index in the input sequence
  RawPair pair;
  std::string reason;
  std::optional<ViolationKind> violation;
};

struct CurateResult {
  std::vector<KbEntry> kb;
  std::vector<Rejection> rejected;
};

inline std::string content_id(std::string_view rtl, std::string_view sva) {
  std::uint64_t h = detail::fnv1a(rtl);
  h = detail::fnv1a_step(h, 0);
  h = detail::fnv1a(sva, h);
  char buf[24];
  std::snprintf(buf, sizeof buf, "kb-%012llx", static_cast<unsigned long long>(h & 0xffffffffffffull));
  return buf;
}

// Derives every computed field from rtl/sva. Throws on invalid input.
inline KbEntry make_entry(const RawPair& pair) {
  RtlBlock block = parse_single_block(pair.rtl);
  KbEntry e;
  e.id = pair.id.value_or(content_id(pair.rtl, pair.sva));
  e.rtl_text = pair.rtl;
  e.sva_text = normalize_sva(pair.sva);
  e.fingerprint = fingerprint(block);
  e.path_count = path_count(*block.block.body);
  e.context_tag = e.fingerprint.tag;
  e.control_kind = control_kind(*block.block.body);
  return e;
}

// Re-derives the computed fields and reports the first mismatch, if any.
inline std::optional<std::string> revalidate(const KbEntry& e) {
  KbEntry fresh;
  try {
    fresh = make_entry({e.id, e.rtl_text, e.sva_text});
  } catch (const std::exception& ex) {
    return std::string("does not re-validate: ") + ex.what();
  }
  if (fresh.sva_text != e.sva_text) return "sva is not normalized";
  if (fresh.fingerprint.full != e.fingerprint.full) return "fingerprint mismatch";
  if (fresh.path_count != e.path_count) return "path_count mismatch";
  if (fresh.context_tag != e.context_tag) return "context_tag mismatch";
  if (fresh.control_kind != e.control_kind) return "control_kind mismatch";
  return std::nullopt;
}

// Validates each pair, keeps the good ones (normalized, with computed
// fields), and records the rest with a reason. Input order is preserved on
// both sides; a repeated id is rejected as a duplicate.
inline CurateResult curate(const std::vector<RawPair>& pairs, std::size_t jobs = 0) {
  struct Outcome {
    std::optional<KbEntry> entry;
    std::string reason;
    std::optional<ViolationKind> violation;
  };
  auto outcomes = detail::parallel_map(pairs.size(), jobs, [&](std::size_t i) {
    Outcome o;
    const RawPair& p = pairs[i];
    if (auto v = check_sva_syntax(p.sva)) {
      o.reason = "sva: " + v->message();
      o.violation = v->kind;
      return o;
    }
    try {
      o.entry = make_entry(p);
    } catch (const std::exception& ex) {
      o.reason = std::string("rtl: ") + ex.what();
    }
    return o;
  });
  CurateResult out;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto& o = outcomes[i];
    if (o.entry && !ids.insert(o.entry->id).second) {
      o.reason = "duplicate id '" + o.entry->id + "'";
      o.entry.reset();
    }
    if (o.entry) out.kb.push_back(std::move(*o.entry));
    else out.rejected.push_back({i, pairs[i], o.reason, o.violation});
  }
  return out;
}

struct SplitResult {
  std::vector<KbEntry> knowledge;
  std::vector<KbEntry> query;
};

// 2:1 split inside every stratum. A stratum of n sends (2n+1)/3 entries to
// the knowledge side, so singletons stay on the knowledge side. Both halves
// keep input order.
inline SplitResult stratified_split(const std::vector<KbEntry>& kb, std::uint64_t seed) {
  if (kb.empty()) throw InvalidArgument("stratified_split: knowledge base is empty");
  std::map<StratumKey, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < kb.size(); ++i) strata[kb[i].stratum()].push_back(i);
  std::vector<bool> to_knowledge(kb.size(), false);
  for (auto& [key, members] : strata) {
    std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) { return kb[a].id < kb[b].id; });
    detail::Rng rng(seed ^ detail::fnv1a(key.to_string()));
    rng.shuffle(members);
    const std::size_t keep = (2 * members.size() + 1) / 3;
    for (std::size_t j = 0; j < keep; ++j) to_knowledge[members[j]] = true;
  }
  SplitResult out;
  for (std::size_t i = 0; i < kb.size(); ++i) (to_knowledge[i] ? out.knowledge : out.query).push_back(kb[i]);
  return out;
}

// --- JSON Lines ------------------------------------------------------------

inline nlohmann::json to_json(const KbEntry& e) {
  return {{"id", e.id},
          {"rtl", e.rtl_text},
          {"sva", e.sva_text},
          {"fingerprint", e.fingerprint.full},
          {"path_count", e.path_count},
          {"context_tag", std::string(to_string(e.context_tag))},
          {"control_kind", std::string(to_string(e.control_kind))}};
}

inline void write_jsonl(std::ostream& out, const std::vector<KbEntry>& kb) {
  for (const auto& e : kb) out << to_json(e).dump() << '\n';
}

inline KbEntry entry_from_json(const nlohmann::json& j) {
  KbEntry e;
  e.id = j.at("id").get<std::string>();
  e.rtl_text = j.at("rtl").get<std::string>();
  e.sva_text = j.at("sva").get<std::string>();
  e.path_count = j.at("path_count").get<std::uint64_t>();
  const auto tag = context_tag_from_string(j.at("context_tag").get<std::string>());
  const auto kind = control_kind_from_string(j.at("control_kind").get<std::string>());
  if (!tag || !kind) throw InvalidArgument("entry '" + e.id + "': unknown context_tag or control_kind");
  e.context_tag = *tag;
  e.control_kind = *kind;
  e.fingerprint.tag = *tag;
  e.fingerprint.full = j.at("fingerprint").get<std::string>();
  const auto sep = e.fingerprint.full.find("::");
  e.fingerprint.body = sep == std::string::npos ? e.fingerprint.full : e.fingerprint.full.substr(sep + 2);
  return e;
}

// Reads a curated KB. Every entry is re-validated against its RTL and SVA.
inline std::vector<KbEntry> read_kb(std::istream& in) {
  std::vector<KbEntry> kb;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    KbEntry e;
    try {
      e = entry_from_json(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& ex) {
      throw InvalidArgument("kb line " + std::to_string(lineno) + ": " + ex.what());
    }
    if (auto why = revalidate(e)) throw InvalidArgument("kb line " + std::to_string(lineno) + ": " + *why);
    kb.push_back(std::move(e));
  }
  return kb;
}

struct RawLine {
  std::size_t line = 0;
  std::optional<RawPair> pair;
  std::string error;
};

// Reads any JSONL with at least {rtl, sva}; malformed lines come back with
// an error instead of aborting the read.
inline std::vector<RawLine> read_raw_pairs(std::istream& in) {
  std::vector<RawLine> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    RawLine r;
    r.line = lineno;
    try {
      const auto j = nlohmann::json::parse(line);
      RawPair p;
      p.rtl = j.at("rtl").get<std::string>();
      p.sva = j.at("sva").get<std::string>();
      if (j.contains("id")) p.id = j.at("id").get<std::string>();
      r.pair = std::move(p);
    } catch (const nlohmann::json::exception& ex) {
      r.error = ex.what();
    }
    out.push_back(std::move(r));
  }
  return out;
}

inline nlohmann::json to_json(const RawPair& p) {
  nlohmann::json j{{"rtl", p.rtl}, {"sva", p.sva}};
  if (p.id) j["id"] = *p.id;
  return j;
}

// --- synthetic corpus --------------------------------------------------------

namespace detail {

// Builds one module with a single always block whose body has an exact,
// requested number of execution paths and control kind.
class SyntheticBlock {
 public:
  SyntheticBlock(Rng& rng, bool clocked) : rng_(rng), clocked_(clocked) {
    const int conds = rng_.range(2, 4), datas = rng_.range(2, 4), outs = rng_.range(1, 3);
    for (int i = 0; i < conds; ++i) cond_.push_back(fresh_signal_name(rng_, taken_));
    for (int i = 0; i < datas; ++i) data_.push_back(fresh_signal_name(rng_, taken_));
    for (int i = 0; i < outs; ++i) out_.push_back(fresh_signal_name(rng_, taken_));
  }

  StmtPtr body(int paths, ControlKind kind) {
    switch (kind) {
      case ControlKind::None: return run();
      case ControlKind::IfElse: return if_paths(paths, 3);
      case ControlKind::Case: return case_paths(paths, 2);
      case ControlKind::Mixed: return mixed_paths(paths);
    }
    return run();
  }

  StmtPtr reset_wrapped(StmtPtr rest, const std::string& rst) {
    Block reset;
    for (const auto& o : out_)
      reset.stmts.push_back(assign(ident(o), make_expr(Literal{8u, Base::Dec, "0", true, false})));
    return make_stmt(If{make_expr(Unary{"!", ident(rst)}), make_stmt(std::move(reset)), rest});
  }

  std::string module_text(const std::string& name, const SensitivityList& sens, const StmtPtr& body) {
    std::set<std::string> used;
    AlwaysBlock ab{AlwaysKind::Always, sens, body, {}};
    for (const auto& id : block_identifiers(ab)) used.insert(id);
    std::string ports;
    auto add = [&](const std::string& decl) { ports += (ports.empty() ? "  " : ",\n  ") + decl; };
    for (const auto& e : sens.entries)
      if (!e.signal.empty() && !inputs_.count(e.signal)) {
        add("input " + e.signal);
        inputs_.insert(e.signal);
      }
    for (const auto& c : cond_)
      if (used.count(c)) add("input " + c);
    for (const auto& [s, w] : subjects_)
      if (used.count(s)) add("input [" + std::to_string(w - 1) + ":0] " + s);
    for (const auto& d : data_)
      if (used.count(d)) add("input [7:0] " + d);
    for (const auto& o : out_)
      if (used.count(o)) add("output reg [7:0] " + o);
    return "module " + name + " (\n" + ports + "\n);\n" + indent(to_verilog(ab)) + "endmodule\n";
  }

  std::string clock_name() { return pick_unique({"clk", "clk_i", "sys_clk", "fast_clk_" + std::to_string(rng_.below(20))}); }
  std::string reset_name() { return pick_unique({"rst_n", "reset_n", "rst_ni", "arst_n"}); }

 private:
  std::string pick_unique(std::vector<std::string> options) {
    for (;;) {
      std::string n = rng_.pick(options);
      if (taken_.insert(n).second) return n;
      options.push_back(fresh_signal_name(rng_, taken_));
    }
  }

  static std::string indent(const std::string& text) {
    std::string out;
    std::size_t start = 0;
    while (start < text.size()) {
      auto nl = text.find('\n', start);
      if (nl == std::string::npos) nl = text.size();
      out += "  " + text.substr(start, nl - start) + "\n";
      start = nl + 1;
    }
    return out;
  }

  StmtPtr assign(ExprPtr lhs, ExprPtr rhs) {
    if (clocked_) return make_stmt(NonBlockingAssign{std::move(lhs), std::move(rhs)});
    return make_stmt(BlockingAssign{std::move(lhs), std::move(rhs)});
  }

  ExprPtr operand() {
    switch (rng_.range(0, 5)) {
      case 0: return make_expr(Literal{8u, Base::Dec, std::to_string(rng_.below(256)), true, false});
      case 1: return ident(rng_.pick(out_));
      default: return ident(rng_.pick(data_));
    }
  }

  ExprPtr value(int depth) {
    if (depth <= 0 || rng_.chance(0.35)) return operand();
    static const std::vector<std::string> ops{"+", "-", "&", "|", "^", "<<", ">>", "*"};
    switch (rng_.range(0, 7)) {
      case 0: return make_expr(Unary{"~", value(depth - 1)});
      case 1: return make_expr(Ternary{cond_expr(0), value(depth - 1), value(depth - 1)});
      case 2: return make_expr(Select{ident(rng_.pick(data_)), make_expr(Literal{{}, Base::Dec, "3", false, false}),
                                      make_expr(Literal{{}, Base::Dec, "0", false, false})});
      default: return make_expr(Binary{rng_.pick(ops), value(depth - 1), value(depth - 1)});
    }
  }

  ExprPtr cond_expr(int depth) {
    switch (rng_.range(0, depth > 0 ? 6 : 3)) {
      case 0: return ident(rng_.pick(cond_));
      case 1: return make_expr(Unary{"!", ident(rng_.pick(cond_))});
      case 2: return make_expr(Binary{"==", ident(rng_.pick(data_)),
                                      make_expr(Literal{8u, Base::Hex, hex(rng_.below(256)), true, false})});
      case 3: return make_expr(Binary{rng_.chance(0.5) ? ">" : "<", ident(rng_.pick(data_)), ident(rng_.pick(out_))});
      case 4: return make_expr(Binary{"&&", cond_expr(depth - 1), cond_expr(depth - 1)});
      case 5: return make_expr(Binary{"||", cond_expr(depth - 1), cond_expr(depth - 1)});
      default: return make_expr(Binary{"!=", ident(rng_.pick(out_)), ident(rng_.pick(data_))});
    }
  }

  static std::string hex(std::uint64_t v) {
    char b[8];
    std::snprintf(b, sizeof b, "%02llx", static_cast<unsigned long long>(v));
    return b;
  }

  // One to three assignments: a single execution path.
  StmtPtr run() {
    Block b;
    const int n = rng_.range(1, 3);
    for (int i = 0; i < n; ++i) b.stmts.push_back(assign(ident(rng_.pick(out_)), value(2)));
    return n == 1 ? b.stmts.front() : make_stmt(std::move(b));
  }

  // Optionally surrounds a statement with straight-line assignments.
  StmtPtr padded(StmtPtr s) {
    if (!rng_.chance(0.3)) return s;
    Block b;
    if (rng_.chance(0.5)) b.stmts.push_back(assign(ident(rng_.pick(out_)), value(1)));
    b.stmts.push_back(std::move(s));
    if (b.stmts.size() == 1 || rng_.chance(0.5)) b.stmts.push_back(assign(ident(rng_.pick(out_)), value(1)));
    return make_stmt(std::move(b));
  }

  StmtPtr if_paths(int paths, int depth) {
    if (paths <= 1) return run();
    if (depth <= 0) {
      // flat else-if chain with (paths - 1) conditions
      StmtPtr tail = run();
      for (int i = 0; i < paths - 1; ++i) tail = make_stmt(If{cond_expr(1), run(), tail});
      return tail;
    }
    std::vector<int> factors;
    for (int a = 2; a * a <= paths; ++a)
      if (paths % a == 0) factors.push_back(a);
    const int choice = rng_.range(0, factors.empty() ? 2 : 3);
    if (choice == 3) {
      const int a = rng_.pick(factors);
      Block b;
      b.stmts.push_back(if_paths(a, depth - 1));
      b.stmts.push_back(if_paths(paths / a, depth - 1));
      return padded(make_stmt(std::move(b)));
    }
    if (choice == 0) {
      // if without else: then side carries paths - 1
      return padded(make_stmt(If{cond_expr(1), wrap(if_paths(paths - 1, depth - 1)), nullptr}));
    }
    if (choice == 1 && paths >= 3) {
      // else-if chain: split into k >= 3 arms
      const int arms = rng_.range(3, std::min(paths, 5));
      std::vector<int> share(arms, 1);
      for (int left = paths - arms; left > 0; --left) ++share[rng_.below(arms)];
      StmtPtr tail = if_paths(share.back(), depth - 1);
      for (int i = arms - 2; i >= 0; --i) tail = make_stmt(If{cond_expr(1), wrap(if_paths(share[i], depth - 1)), tail});
      return padded(tail);
    }
    const int left = rng_.range(1, paths - 1);
    return padded(make_stmt(If{cond_expr(1), wrap(if_paths(left, depth - 1)), if_paths(paths - left, depth - 1)}));
  }

  // Keeps an else from binding to a nested if when printed.
  static StmtPtr wrap(StmtPtr s) {
    if (std::holds_alternative<If>(s->node)) return make_stmt(Block{{s}});
    return s;
  }

  ExprPtr subject(int items) {
    int width = 2;
    while ((1 << width) < items + 1) ++width;
    std::string name = fresh_signal_name(rng_, taken_);
    subjects_[name] = width;
    return ident(name);
  }

  StmtPtr case_paths(int paths, int depth) {
    if (paths <= 1) return run();
    const bool has_default = rng_.chance(0.6);
    // items + (default or implicit default) = paths, with nested cases when deep enough
    int arms = paths;
    std::vector<int> share;
    if (depth > 0 && paths >= 4 && rng_.chance(0.3)) {
      arms = rng_.range(2, paths - 1);
      share.assign(arms, 1);
      for (int left = paths - arms; left > 0; --left) ++share[rng_.below(arms - (has_default ? 0 : 1))];
    } else {
      share.assign(arms, 1);
    }
    const int items = arms - 1;
    Case c;
    c.kind = rng_.chance(0.15) ? CaseKind::Casez : CaseKind::Case;
    c.subject = subject(items + 1);
    const int width = subjects_[std::get<Ident>(c.subject->node).name];
    std::vector<int> values(1 << width);
    for (int i = 0; i < static_cast<int>(values.size()); ++i) values[i] = i;
    rng_.shuffle(values);
    for (int i = 0; i < items; ++i) {
      CaseItem item;
      item.labels.push_back(make_expr(Literal{static_cast<unsigned>(width), Base::Dec, std::to_string(values[i]), true, false}));
      item.body = case_paths(share[i], depth - 1);
      c.items.push_back(std::move(item));
    }
    if (has_default) c.default_stmt = case_paths(share.back(), depth - 1);
    return padded(make_stmt(std::move(c)));
  }

  StmtPtr mixed_paths(int paths) {
    if (paths < 3) throw UnsatisfiableStratum("mixed control needs at least 3 paths");
    switch (rng_.range(0, paths >= 4 && paths % 2 == 0 ? 2 : 1)) {
      case 0: {
        const int in_case = rng_.range(2, paths - 1);
        return make_stmt(If{cond_expr(1), wrap(case_paths(in_case, 1)), if_paths(paths - in_case, 1)});
      }
      case 1: {
        // case whose first item holds an if; the other arms are one path each
        const int in_if = rng_.range(2, paths - 1);
        const int items = paths - in_if;  // plus one default arm, explicit or implicit
        Case c;
        c.subject = subject(items + 1);
        const auto width = static_cast<unsigned>(subjects_[std::get<Ident>(c.subject->node).name]);
        c.items.push_back({{make_expr(Literal{width, Base::Dec, "0", true, false})}, if_paths(in_if, 1)});
        for (int i = 1; i < items; ++i)
          c.items.push_back({{make_expr(Literal{width, Base::Dec, std::to_string(i), true, false})}, run()});
        if (rng_.chance(0.5)) c.default_stmt = run();
        return make_stmt(std::move(c));
      }
      default: {
        Block b;
        b.stmts.push_back(if_paths(2, 1));
        b.stmts.push_back(case_paths(paths / 2, 1));
        return make_stmt(std::move(b));
      }
    }
  }

  Rng& rng_;
  bool clocked_;
  std::set<std::string> taken_;
  std::set<std::string> inputs_;
  std::vector<std::string> cond_, data_, out_;
  std::map<std::string, int> subjects_;
};

}  // namespace detail

inline void check_satisfiable(const StratumKey& key) {
  if (key.path_bucket < 1 || key.path_bucket > kMaxPathBucket)
    throw UnsatisfiableStratum("path bucket " + std::to_string(key.path_bucket) + " is out of range");
  if (key.control_kind == ControlKind::None && key.path_bucket != 1)
    throw UnsatisfiableStratum(key.to_string() + ": straight-line code has exactly one path");
  if (key.control_kind != ControlKind::None && key.path_bucket == 1)
    throw UnsatisfiableStratum(key.to_string() + ": any conditional yields at least two paths");
  if (key.control_kind == ControlKind::Mixed && key.path_bucket < 3)
    throw UnsatisfiableStratum(key.to_string() + ": if plus case yields at least three paths");
}

struct SyntheticOptions {
  int max_paths = 8;  // paths drawn for the "8+" bucket are in [8, max_paths]
};

// One (rtl, sva) pair per requested slot; the SVA has one template property
// per execution path. Deterministic in (spec, seed).
inline std::vector<RawPair> generate_synthetic_corpus(const std::vector<std::pair<StratumKey, int>>& spec,
                                                      std::uint64_t seed, const SyntheticOptions& options = {}) {
  for (const auto& [key, count] : spec) check_satisfiable(key);
  detail::Rng rng(seed);
  std::vector<RawPair> out;
  int serial = 0;
  for (const auto& [key, count] : spec) {
    for (int n = 0; n < count; ++n) {
      const int paths = key.path_bucket == kMaxPathBucket ? rng.range(kMaxPathBucket, std::max(kMaxPathBucket, options.max_paths))
                                                          : key.path_bucket;
      // The builders are exact; the re-check guards against a drift between
      // them and the classifiers.
      for (int attempt = 0;; ++attempt) {
        const bool async = key.timing == Timing::Async;
        const bool clocked = async || rng.chance(0.7);
        detail::SyntheticBlock b(rng, clocked);
        SensitivityList sens;
        StmtPtr body;
        if (async) {
          const std::string clk = b.clock_name(), rst = b.reset_name();
          sens.entries = {{Edge::Posedge, clk}, {Edge::Negedge, rst}};
          const bool can_wrap = key.control_kind == ControlKind::IfElse ? paths >= 2
                                : key.control_kind == ControlKind::Mixed ? paths >= 3 : false;
          if (can_wrap && rng.chance(0.7)) {
            const ControlKind inner = key.control_kind == ControlKind::Mixed ? ControlKind::Case : ControlKind::IfElse;
            body = b.reset_wrapped(b.body(paths - 1, inner), rst);
          } else {
            body = b.body(paths, key.control_kind);
          }
        } else if (clocked) {
          sens.entries = {{rng.chance(0.85) ? Edge::Posedge : Edge::Negedge, b.clock_name()}};
          body = b.body(paths, key.control_kind);
        } else {
          sens.entries = {{Edge::Star, ""}};
          body = b.body(paths, key.control_kind);
        }
        if (!std::holds_alternative<Block>(body->node)) body = make_stmt(Block{{body}});
        const std::string name = "m_" + std::to_string(serial);
        RawPair p;
        p.rtl = b.module_text(name, sens, body);
        const RtlBlock rb = parse_single_block(p.rtl);
        const StratumKey got{path_bucket(path_count(*rb.block.body)), timing_of(fingerprint(rb).tag),
                             control_kind(*rb.block.body)};
        if (got != key) {
          if (attempt > 50) throw UnsatisfiableStratum("generator could not reach stratum " + key.to_string());
          continue;
        }
        std::string sva;
        for (const auto& prop : path_assertions(rb.block, "p_" + name)) sva += prop;
        p.sva = sva;
        out.push_back(std::move(p));
        ++serial;
        break;
      }
    }
  }
  return out;
}

// Every satisfiable stratum key, in a fixed order.
inline std::vector<StratumKey> satisfiable_strata() {
  std::vector<StratumKey> out;
  for (int p = 1; p <= kMaxPathBucket; ++p)
    for (auto t : {Timing::Sync, Timing::Async})
      for (auto k : {ControlKind::IfElse, ControlKind::Case, ControlKind::Mixed, ControlKind::None}) {
        StratumKey key{p, t, k};
        try {
          check_satisfiable(key);
          out.push_back(key);
        } catch (const UnsatisfiableStratum&) {
        }
      }
  return out;
}

// Spreads `total` slots evenly over every satisfiable stratum.
inline std::vector<std::pair<StratumKey, int>> uniform_spec(int total) {
  const auto keys = satisfiable_strata();
  std::vector<std::pair<StratumKey, int>> spec;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const int n = total / static_cast<int>(keys.size()) + (static_cast<int>(i) < total % static_cast<int>(keys.size()) ? 1 : 0);
    if (n > 0) spec.emplace_back(keys[i], n);
  }
  return spec;
}

}  // namespace stellar

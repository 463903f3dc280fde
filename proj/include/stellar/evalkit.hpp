#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
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
#include "stellar/fingerprint.hpp"
#include "stellar/kb.hpp"
#include "stellar/pathcount.hpp"
#include "stellar/pipeline.hpp"
#include "stellar/rtl_transform.hpp"
#include "stellar/sva.hpp"
#include "stellar/vindex.hpp"

namespace stellar {

inline constexpr int kReportSchemaVersion = 1;

// --- identifier renaming -----------------------------------------------------

namespace detail {

inline std::set<std::string> identifier_tokens(std::string_view text) {
  std::set<std::string> out;
  for (const auto& t : tokenize(text)) {
    if (t.kind == TokenKind::Identifier) out.insert(t.text);
  }
  return out;
}

inline std::size_t rename_count(double fraction, std::size_t n) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw InvalidArgument("rename fraction must be in [0, 1]");
  // the epsilon keeps 0.3 * 10 at 3 rather than 4
  return std::min(n, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9)));
}

}  // namespace detail

// Picks ceil(fraction * |ids|) identifiers uniformly and maps each to a fresh
// name that collides with nothing in `taken`.
inline RenameMap choose_renames(const std::vector<std::string>& ids, double fraction, std::uint64_t seed,
                                std::set<std::string> taken) {
  const std::size_t n = detail::rename_count(fraction, ids.size());
  detail::Rng rng(seed);
  std::vector<std::string> order = ids;
  rng.shuffle(order);
  taken.insert(ids.begin(), ids.end());
  RenameMap m;
  for (std::size_t i = 0; i < n; ++i) m[order[i]] = detail::fresh_signal_name(rng, taken);
  return m;
}

struct RenamedBlock {
  RtlBlock block;
  RenameMap map;
};

inline RenamedBlock rename_identifiers_with_map(const RtlBlock& b, double fraction, std::uint64_t seed) {
  auto taken = detail::identifier_tokens(standalone_module(b));
  taken.insert(b.module_name);
  RenamedBlock out;
  out.map = choose_renames(block_identifiers(b.block), fraction, seed, std::move(taken));
  out.block = b;
  out.block.block = rename(b.block, out.map);
  out.block.rtl_text = rename_text(b.rtl_text, out.map);
  out.block.local_context = rename_text(b.local_context, out.map);
  for (auto& p : out.block.port_names)
    if (auto it = out.map.find(p); it != out.map.end()) p = it->second;
  return out;
}

inline RtlBlock rename_identifiers(const RtlBlock& b, double fraction, std::uint64_t seed) {
  return rename_identifiers_with_map(b, fraction, seed).block;
}

// Same renaming applied to a whole single-block module source.
inline std::string rename_module_text(std::string_view module_text, double fraction, std::uint64_t seed) {
  const RtlBlock b = parse_single_block(module_text);
  auto taken = detail::identifier_tokens(module_text);
  return rename_text(module_text, choose_renames(block_identifiers(b.block), fraction, seed, std::move(taken)));
}

// --- ranking metrics ---------------------------------------------------------

struct Ranking {
  std::vector<std::string> ranked;  // best first
  std::set<std::string> relevant;
};

namespace detail {

inline void check_rankings(std::span<const Ranking> rankings, std::size_t n) {
  if (rankings.empty()) throw EmptyRankings();
  if (n == 0) throw InvalidArgument("N must be at least 1");
}

// 1-based rank of the first relevant id within the top n, or 0.
inline std::size_t first_relevant(const Ranking& r, std::size_t n) {
  for (std::size_t i = 0; i < r.ranked.size() && i < n; ++i)
    if (r.relevant.count(r.ranked[i])) return i + 1;
  return 0;
}

}  // namespace detail

inline double recall_at_n(std::span<const Ranking> rankings, std::size_t n) {
  detail::check_rankings(rankings, n);
  std::size_t hits = 0;
  for (const auto& r : rankings) hits += detail::first_relevant(r, n) > 0;
  return static_cast<double>(hits) / static_cast<double>(rankings.size());
}

inline double mrr_at_n(std::span<const Ranking> rankings, std::size_t n) {
  detail::check_rankings(rankings, n);
  double sum = 0.0;
  for (const auto& r : rankings)
    if (auto rank = detail::first_relevant(r, n)) sum += 1.0 / static_cast<double>(rank);
  return sum / static_cast<double>(rankings.size());
}

// Binary gain, log2(rank + 1) discount, normalized by the ideal ordering.
inline double ndcg_at_n(std::span<const Ranking> rankings, std::size_t n) {
  detail::check_rankings(rankings, n);
  double sum = 0.0;
  for (const auto& r : rankings) {
    double dcg = 0.0, idcg = 0.0;
    for (std::size_t i = 0; i < r.ranked.size() && i < n; ++i)
      if (r.relevant.count(r.ranked[i])) dcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
    for (std::size_t i = 0; i < r.relevant.size() && i < n; ++i) idcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
    if (idcg > 0.0) sum += dcg / idcg;
  }
  return sum / static_cast<double>(rankings.size());
}

// --- text similarity -----------------------------------------------------------

// Words (identifiers, numbers, sized literals, system names) and operators as
// single tokens; whitespace is dropped.
inline std::vector<std::string> bleu_tokens(std::string_view text) {
  static const char* const kOps[] = {"|->", "|=>", "===", "!==", "<<<", ">>>", "##", "==", "!=", "<=", ">=",
                                     "&&",  "||",  "<<",  ">>",  "~&",  "~|",  "~^", "^~", "**"};
  auto word = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$' || c == '\''; };
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (word(c)) {
      std::size_t j = i;
      while (j < text.size() && word(text[j])) ++j;
      out.emplace_back(text.substr(i, j - i));
      i = j;
      continue;
    }
    std::string_view op = text.substr(i, 1);
    for (const char* o : kOps)
      if (text.compare(i, std::strlen(o), o) == 0) {
        op = text.substr(i, std::strlen(o));
        break;
      }
    out.emplace_back(op);
    i += op.size();
  }
  return out;
}

inline constexpr double kBleuEpsilon = 1e-9;

// BLEU-4 with uniform weights and the standard brevity penalty. A zero match
// count at some order contributes epsilon / total instead of zero. Orders the
// candidate is too short to have are left out and the weights renormalized.
inline double bleu(std::string_view candidate, std::string_view reference) {
  const auto c = bleu_tokens(candidate), r = bleu_tokens(reference);
  if (c.empty() || r.empty()) throw EmptyText();
  double log_sum = 0.0;
  int orders = 0;
  for (std::size_t n = 1; n <= 4; ++n) {
    if (c.size() < n) break;
    std::map<std::vector<std::string>, int> ref_counts, cand_counts;
    for (std::size_t i = 0; i + n <= r.size(); ++i) ++ref_counts[{r.begin() + i, r.begin() + i + n}];
    for (std::size_t i = 0; i + n <= c.size(); ++i) ++cand_counts[{c.begin() + i, c.begin() + i + n}];
    int matched = 0;
    for (const auto& [gram, count] : cand_counts) {
      auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) matched += std::min(count, it->second);
    }
    const double total = static_cast<double>(c.size() - n + 1);
    log_sum += std::log(matched > 0 ? matched / total : kBleuEpsilon / total);
    ++orders;
  }
  const double bp = c.size() >= r.size() ? 1.0 : std::exp(1.0 - static_cast<double>(r.size()) / static_cast<double>(c.size()));
  return std::clamp(bp * std::exp(log_sum / orders), 0.0, 1.0);
}

// Cosine of the provider's embeddings. With a transformer-backed remote
// provider this is the usual sentence-embedding similarity.
inline double semantic_similarity(const std::string& candidate, const std::string& reference, EmbeddingProvider& provider) {
  return cosine(provider.embed(candidate), provider.embed(reference));
}

// --- path coverage -------------------------------------------------------------

inline constexpr std::size_t kMaxTruthTableAtoms = 16;

namespace detail {

inline bool is_connective(const Expr& e) {
  if (const auto* b = std::get_if<Binary>(&e.node)) return b->op == "&&" || b->op == "||";
  if (const auto* u = std::get_if<Unary>(&e.node)) return u->op == "!";
  return false;
}

// Known truth value of a literal without x/z/? digits.
inline std::optional<bool> constant_value(const Expr& e) {
  const auto* lit = std::get_if<Literal>(&e.node);
  if (!lit || lit->digits.find_first_of("xz?") != std::string::npos) return std::nullopt;
  return lit->digits.find_first_not_of('0') != std::string::npos;
}

inline void collect_atoms(const Expr& e, std::vector<std::string>& atoms) {
  if (is_connective(e)) {
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Binary>) {
            collect_atoms(*x.lhs, atoms);
            collect_atoms(*x.rhs, atoms);
          } else if constexpr (std::is_same_v<T, Unary>) {
            collect_atoms(*x.operand, atoms);
          }
        },
        e.node);
    return;
  }
  if (constant_value(e)) return;
  std::string key = to_verilog(e);
  if (std::find(atoms.begin(), atoms.end(), key) == atoms.end()) atoms.push_back(std::move(key));
}

inline bool eval_bool(const Expr& e, const std::vector<std::string>& atoms, std::uint32_t assignment) {
  if (const auto* b = std::get_if<Binary>(&e.node); b && (b->op == "&&" || b->op == "||")) {
    const bool l = eval_bool(*b->lhs, atoms, assignment);
    return b->op == "&&" ? l && eval_bool(*b->rhs, atoms, assignment) : l || eval_bool(*b->rhs, atoms, assignment);
  }
  if (const auto* u = std::get_if<Unary>(&e.node); u && u->op == "!") return !eval_bool(*u->operand, atoms, assignment);
  if (auto v = constant_value(e)) return *v;
  const auto idx = std::find(atoms.begin(), atoms.end(), to_verilog(e)) - atoms.begin();
  return (assignment >> idx) & 1u;
}

// nullopt when the pair has more atoms than a truth table allows.
inline std::optional<bool> equivalent(const Expr& a, const Expr& b) {
  std::vector<std::string> atoms;
  collect_atoms(a, atoms);
  collect_atoms(b, atoms);
  if (atoms.size() > kMaxTruthTableAtoms) return std::nullopt;
  for (std::uint32_t m = 0; m < (1u << atoms.size()); ++m)
    if (eval_bool(a, atoms, m) != eval_bool(b, atoms, m)) return false;
  return true;
}

}  // namespace detail

struct CoverageResult {
  bool covered = false;
  std::vector<bool> per_path;
  bool approximate = false;  // some comparison fell back to structural equality
  std::size_t valid_assertions = 0;
};

// A path is covered when some valid assertion's antecedent is logically
// equivalent to its path condition.
inline CoverageResult path_coverage(std::span<const std::string> svas, const AlwaysBlock& target,
                                    const PathOptions& options = {}) {
  std::vector<ExprPtr> lhs;
  CoverageResult r;
  for (const auto& text : svas) {
    try {
      auto unit = parse_sva(text);
      ++r.valid_assertions;
      for (auto& a : antecedents(unit)) lhs.push_back(std::move(a));
    } catch (const Error&) {
    }
  }
  const auto paths = enumerate_path_conditions(*target.body, options);
  r.per_path.assign(paths.size(), false);
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const ExprPtr cond = path_condition(paths[i].literals);
    for (const auto& a : lhs) {
      auto eq = detail::equivalent(*a, *cond);
      if (!eq) {
        r.approximate = true;
        eq = to_verilog(*a) == to_verilog(*cond);
      }
      if (*eq) {
        r.per_path[i] = true;
        break;
      }
    }
  }
  r.covered = std::all_of(r.per_path.begin(), r.per_path.end(), [](bool b) { return b; });
  return r;
}

inline CoverageResult path_coverage(std::span<const std::string> svas, const RtlBlock& target,
                                    const PathOptions& options = {}) {
  return path_coverage(svas, target.block, options);
}

// --- retrieval experiment ------------------------------------------------------

enum class Retriever { Structural, SemanticBaseline };

inline std::string_view to_string(Retriever r) { return r == Retriever::Structural ? "structural" : "semantic"; }

struct RetrievalEvalConfig {
  std::vector<std::size_t> n_values{3, 5, 7, 10};
  double rename_fraction = 0.30;
  std::size_t sample_size = 100;
  std::uint64_t seed = 0;
  double tag_penalty = 2.0;
  std::size_t nlist = 0;   // > 0 searches an IVF index with `nprobe`
  std::size_t nprobe = 4;
  std::size_t jobs = 0;

  void validate() const {
    if (n_values.empty()) throw InvalidArgument("n_values is empty");
    for (std::size_t i = 0; i < n_values.size(); ++i)
      if (n_values[i] == 0 || (i > 0 && n_values[i] <= n_values[i - 1]))
        throw InvalidArgument("n_values must be positive and ascending");
    detail::rename_count(rename_fraction, 0);
    if (sample_size == 0) throw InvalidArgument("sample_size must be at least 1");
  }
};

struct MetricTable {
  std::map<std::size_t, double> recall, mrr, ndcg;
};

inline MetricTable metric_table(std::span<const Ranking> rankings, std::span<const std::size_t> n_values) {
  MetricTable t;
  for (auto n : n_values) {
    t.recall[n] = recall_at_n(rankings, n);
    t.mrr[n] = mrr_at_n(rankings, n);
    t.ndcg[n] = ndcg_at_n(rankings, n);
  }
  return t;
}

struct RetrievalRow {
  std::string query_id;
  std::string variant;  // "exact" or "renamed"
  std::size_t rank = 0;  // 0 when outside the largest N
  std::string top_id;
};

struct RetrievalReport {
  std::string retriever;
  std::string provider;
  std::size_t kb_size = 0;
  std::size_t queries = 0;
  double rename_fraction = 0.0;
  MetricTable exact, renamed;
  std::vector<RetrievalRow> rows;
};

// Samples entries, queries each verbatim and after renaming against an index
// of the whole KB, with the original id as the single relevant item. The
// structural arm embeds fingerprints; the semantic arm embeds module text.
inline RetrievalReport run_retrieval_eval(std::span<const KbEntry> kb, const RetrievalEvalConfig& config,
                                          Retriever retriever, EmbeddingProvider& embedder) {
  config.validate();
  if (kb.empty()) throw EmptyIndex();
  const bool structural = retriever == Retriever::Structural;

  std::vector<std::string> keys;
  for (const auto& e : kb) keys.push_back(structural ? e.fingerprint.full : e.rtl_text);
  auto vectors = embedder.embed_batch(keys);
  std::vector<IndexEntry> entries;
  for (std::size_t i = 0; i < kb.size(); ++i) entries.push_back({kb[i].id, std::move(vectors[i]), kb[i].context_tag});
  const Index index = config.nlist ? build_approx(entries, std::min(config.nlist, kb.size()), config.seed) : build_exact(entries);

  std::vector<std::size_t> sample(kb.size());
  for (std::size_t i = 0; i < sample.size(); ++i) sample[i] = i;
  detail::Rng rng(config.seed);
  rng.shuffle(sample);
  sample.resize(std::min(config.sample_size, sample.size()));

  const std::size_t depth = config.n_values.back();
  struct QueryOut {
    Ranking exact, renamed;
  };
  auto search = [&](const std::string& text, std::optional<ContextTag> tag) {
    SearchOptions opts;
    opts.context_tag = tag;
    opts.tag_penalty = config.tag_penalty;
    const Embedding q = embedder.embed(text);
    auto hits = config.nlist ? index.search_approx(q, depth, config.nprobe, opts) : index.search_exact(q, depth, opts);
    std::vector<std::string> ids;
    for (auto& h : hits) ids.push_back(std::move(h.id));
    return ids;
  };
  auto outs = detail::parallel_map(sample.size(), config.jobs, [&](std::size_t qi) {
    const KbEntry& e = kb[sample[qi]];
    const std::string renamed_text =
        rename_module_text(e.rtl_text, config.rename_fraction, config.seed ^ detail::mix64(sample[qi] + 1));
    QueryOut o;
    o.exact.relevant = o.renamed.relevant = {e.id};
    if (structural) {
      const Fingerprint fp = fingerprint(parse_single_block(renamed_text));
      o.exact.ranked = search(e.fingerprint.full, e.context_tag);
      o.renamed.ranked = search(fp.full, fp.tag);
    } else {
      o.exact.ranked = search(e.rtl_text, std::nullopt);
      o.renamed.ranked = search(renamed_text, std::nullopt);
    }
    return o;
  });

  RetrievalReport rep;
  rep.retriever = std::string(to_string(retriever));
  rep.provider = embedder.id();
  rep.kb_size = kb.size();
  rep.queries = sample.size();
  rep.rename_fraction = config.rename_fraction;
  std::vector<Ranking> exact, renamed;
  for (std::size_t qi = 0; qi < outs.size(); ++qi) {
    const std::string& id = kb[sample[qi]].id;
    for (auto* r : {&outs[qi].exact, &outs[qi].renamed}) {
      const bool is_exact = r == &outs[qi].exact;
      rep.rows.push_back({id, is_exact ? "exact" : "renamed", detail::first_relevant(*r, depth),
                          r->ranked.empty() ? "" : r->ranked.front()});
      (is_exact ? exact : renamed).push_back(std::move(*r));
    }
  }
  rep.exact = metric_table(exact, config.n_values);
  rep.renamed = metric_table(renamed, config.n_values);
  return rep;
}

// --- generation experiment -----------------------------------------------------

struct GroupCoverage {
  std::size_t entries = 0;
  std::size_t covered = 0;
  double rate() const { return entries ? static_cast<double>(covered) / static_cast<double>(entries) : 0.0; }
};

struct GenerationRow {
  std::string id;
  std::uint64_t path_count = 0;
  std::size_t candidates = 0;
  std::size_t valid = 0;
  bool covered = false;
  bool approximate = false;
  double bleu = 0.0;
  double semantic = 0.0;
  std::vector<std::string> exemplar_ids;
  std::string error;  // non-empty when the entry failed
};

struct GenerationReport {
  std::string provider;
  std::size_t k = 0;
  std::size_t entries = 0;
  std::size_t failures = 0;
  std::size_t assertions = 0;
  std::size_t valid_assertions = 0;
  double syntax_pass_rate = 0.0;
  double bleu_mean = 0.0;
  double semantic_sim_mean = 0.0;
  double path_coverage = 0.0;
  std::map<int, GroupCoverage> coverage_by_paths;  // keyed by path bucket
  std::vector<GenerationRow> rows;
};

namespace detail {
inline std::string joined(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) out += with_newline(p);
  return out;
}
}  // namespace detail

// Runs the pipeline on every query entry. Syntax pass rate is pooled over
// all extracted assertions; coverage is averaged per path bucket and the
// buckets weighted by their share of entries. A failed entry counts as
// uncovered and scores zero.
inline GenerationReport run_generation_eval(std::span<const KbEntry> queries, const Pipeline& pipeline,
                                            EmbeddingProvider& similarity, std::size_t jobs = 0) {
  if (queries.empty()) throw InvalidArgument("generation eval needs at least one query entry");
  auto rows = detail::parallel_map(queries.size(), jobs, [&](std::size_t i) {
    const KbEntry& e = queries[i];
    GenerationRow row;
    row.id = e.id;
    row.path_count = e.path_count;
    try {
      const RtlBlock target = parse_single_block(e.rtl_text);
      const GenerationResult g = generate_for_block(pipeline, target);
      row.exemplar_ids = g.exemplar_ids;
      row.candidates = g.candidates.size();
      row.valid = g.accepted.size();
      const auto cov = path_coverage(g.accepted, target);
      row.covered = cov.covered;
      row.approximate = cov.approximate;
      const std::string text = detail::joined(g.accepted.empty() ? g.candidates : g.accepted);
      if (!bleu_tokens(text).empty()) {
        row.bleu = bleu(text, e.sva_text);
        row.semantic = semantic_similarity(text, e.sva_text, similarity);
      }
    } catch (const std::exception& ex) {
      row.error = ex.what();
    }
    return row;
  });

  GenerationReport rep;
  rep.provider = pipeline.llm ? pipeline.llm->id() : "";
  rep.k = pipeline.k;
  rep.entries = rows.size();
  double bleu_sum = 0.0, sim_sum = 0.0;
  for (const auto& r : rows) {
    rep.failures += !r.error.empty();
    rep.assertions += r.candidates;
    rep.valid_assertions += r.valid;
    bleu_sum += r.bleu;
    sim_sum += r.semantic;
    auto& g = rep.coverage_by_paths[path_bucket(r.path_count)];
    ++g.entries;
    g.covered += r.covered;
  }
  rep.syntax_pass_rate = rep.assertions ? static_cast<double>(rep.valid_assertions) / static_cast<double>(rep.assertions) : 0.0;
  rep.bleu_mean = bleu_sum / static_cast<double>(rows.size());
  rep.semantic_sim_mean = sim_sum / static_cast<double>(rows.size());
  for (const auto& [bucket, g] : rep.coverage_by_paths)
    rep.path_coverage += g.rate() * static_cast<double>(g.entries) / static_cast<double>(rows.size());
  rep.rows = std::move(rows);
  return rep;
}

// --- collision experiment -------------------------------------------------------

struct CollisionReport {
  std::size_t blocks = 0;
  std::size_t colliding = 0;
  double rate = 0.0;
  std::vector<std::pair<std::string, std::size_t>> worst;  // fingerprint, distinct blocks sharing it
};

// Draws synthetic blocks spread over every stratum until `count` structurally
// distinct ones (by rename-normalized AST) are collected, then measures how
// many share a fingerprint with a structurally different block.
inline CollisionReport run_collision_experiment(std::size_t count, std::uint64_t seed) {
  if (count == 0) throw InvalidArgument("collision experiment needs at least one block");
  std::set<std::string> seen;
  std::vector<Fingerprint> fps;
  std::vector<std::string> keys;
  for (std::uint64_t round = 0; fps.size() < count; ++round) {
    if (round > 1000) throw UnsatisfiableStratum("generator keeps repeating structures");
    for (const auto& pair : generate_synthetic_corpus(uniform_spec(static_cast<int>(count)), seed + round * 7919)) {
      const RtlBlock b = parse_single_block(pair.rtl);
      std::string key = normalized_key(b.block);
      if (!seen.insert(key).second) continue;
      fps.push_back(fingerprint(b));
      keys.push_back(std::move(key));
      if (fps.size() == count) break;
    }
  }
  CollisionReport rep;
  rep.blocks = fps.size();
  rep.rate = collision_rate(fps, keys);
  rep.colliding = static_cast<std::size_t>(std::llround(rep.rate * static_cast<double>(fps.size())));
  std::map<std::string, std::size_t> sharing;
  for (const auto& fp : fps) ++sharing[fp.full];
  for (const auto& [fp, n] : sharing)
    if (n > 1) rep.worst.emplace_back(fp, n);
  std::sort(rep.worst.begin(), rep.worst.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (rep.worst.size() > 10) rep.worst.resize(10);
  return rep;
}

// --- runtime sweep ------------------------------------------------------------------

struct RuntimeConfig {
  std::size_t start = 100, stop = 3000, step = 100;
  std::size_t queries = 20;
  std::size_t k = 5;
  std::size_t nlist = 32;
  std::size_t nprobe = 4;
  std::uint64_t seed = 0;
};

struct RuntimePoint {
  std::size_t size = 0;
  double raw_us = 0.0;
  double exact_us = 0.0;
  double approx_us = 0.0;
};

// Mean per-query latency of the three retrieval arms as the KB grows. Query
// embeddings are computed up front, so the embedding arms time search only.
inline std::vector<RuntimePoint> run_runtime_sweep(std::span<const KbEntry> corpus, EmbeddingProvider& embedder,
                                                   const RuntimeConfig& config) {
  if (config.step == 0 || config.start == 0 || config.start > config.stop || config.queries == 0)
    throw InvalidArgument("bad runtime sweep range");
  if (corpus.size() < config.stop) throw InvalidArgument("runtime sweep needs at least " + std::to_string(config.stop) + " entries");
  using clock = std::chrono::steady_clock;
  std::vector<std::string> fps;
  for (const auto& e : corpus) fps.push_back(e.fingerprint.full);
  auto vectors = embedder.embed_batch(fps);

  detail::Rng rng(config.seed);
  std::vector<std::size_t> qidx;
  for (std::size_t q = 0; q < config.queries; ++q) qidx.push_back(static_cast<std::size_t>(rng.below(corpus.size())));

  std::vector<RuntimePoint> out;
  for (std::size_t n = config.start; n <= config.stop; n += config.step) {
    std::vector<IndexEntry> entries;
    for (std::size_t i = 0; i < n; ++i) entries.push_back({corpus[i].id, vectors[i], corpus[i].context_tag});
    const Index exact = build_exact(entries);
    const Index approx = build_approx(entries, std::min(config.nlist, n), config.seed);
    const std::span<const std::string> raw(fps.data(), n);
    RuntimePoint p;
    p.size = n;
    auto time_us = [&](auto&& fn) {
      const auto t0 = clock::now();
      for (auto q : qidx) fn(q);
      return std::chrono::duration<double, std::micro>(clock::now() - t0).count() / static_cast<double>(qidx.size());
    };
    std::size_t sink = 0;
    p.raw_us = time_us([&](std::size_t q) { sink += search_rawstring(raw, fps[q], config.k).size(); });
    p.exact_us = time_us([&](std::size_t q) { sink += exact.search_exact(vectors[q], config.k).size(); });
    p.approx_us = time_us([&](std::size_t q) { sink += approx.search_approx(vectors[q], config.k, config.nprobe).size(); });
    if (sink == 0) throw Error("Internal", "runtime sweep produced no hits");
    out.push_back(p);
  }
  return out;
}

// --- report output -------------------------------------------------------------------

inline nlohmann::json to_json(const MetricTable& t) {
  nlohmann::json j;
  for (const auto& [name, m] : {std::pair{"recall", &t.recall}, std::pair{"mrr", &t.mrr}, std::pair{"ndcg", &t.ndcg}}) {
    nlohmann::json row = nlohmann::json::object();
    for (const auto& [n, v] : *m) row[std::to_string(n)] = v;
    j[name] = row;
  }
  return j;
}

inline nlohmann::json to_json(const RetrievalReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"query_id", row.query_id}, {"variant", row.variant}, {"rank", row.rank}, {"top_id", row.top_id}});
  return {{"schema_version", kReportSchemaVersion},
          {"kind", "retrieval"},
          {"retriever", r.retriever},
          {"provider", r.provider},
          {"kb_size", r.kb_size},
          {"queries", r.queries},
          {"rename_fraction", r.rename_fraction},
          {"exact", to_json(r.exact)},
          {"renamed", to_json(r.renamed)},
          {"rows", rows}};
}

inline nlohmann::json to_json(const GenerationReport& r) {
  nlohmann::json groups = nlohmann::json::object(), rows = nlohmann::json::array();
  for (const auto& [b, g] : r.coverage_by_paths)
    groups[std::to_string(b)] = {{"entries", g.entries}, {"covered", g.covered}, {"rate", g.rate()}};
  for (const auto& row : r.rows)
    rows.push_back({{"id", row.id},
                    {"path_count", row.path_count},
                    {"candidates", row.candidates},
                    {"valid", row.valid},
                    {"covered", row.covered},
                    {"approximate", row.approximate},
                    {"bleu", row.bleu},
                    {"semantic", row.semantic},
                    {"exemplar_ids", row.exemplar_ids},
                    {"error", row.error}});
  return {{"schema_version", kReportSchemaVersion},
          {"kind", "generation"},
          {"provider", r.provider},
          {"k", r.k},
          {"entries", r.entries},
          {"failures", r.failures},
          {"assertions", r.assertions},
          {"valid_assertions", r.valid_assertions},
          {"syntax_pass_rate", r.syntax_pass_rate},
          {"bleu_mean", r.bleu_mean},
          {"semantic_sim_mean", r.semantic_sim_mean},
          {"path_coverage", r.path_coverage},
          {"coverage_by_paths", groups},
          {"rows", rows}};
}

inline nlohmann::json to_json(const CollisionReport& r) {
  nlohmann::json worst = nlohmann::json::array();
  for (const auto& [fp, n] : r.worst) worst.push_back({{"fingerprint", fp}, {"blocks", n}});
  return {{"schema_version", kReportSchemaVersion}, {"kind", "collision"}, {"blocks", r.blocks},
          {"colliding", r.colliding}, {"rate", r.rate}, {"worst", worst}};
}

inline nlohmann::json to_json(const std::vector<RuntimePoint>& pts) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& p : pts)
    rows.push_back({{"size", p.size}, {"raw_us", p.raw_us}, {"exact_us", p.exact_us}, {"approx_us", p.approx_us}});
  return {{"schema_version", kReportSchemaVersion}, {"kind", "runtime"}, {"points", rows}};
}

namespace detail {
inline std::string fixed(double v, int digits = 3) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}
}  // namespace detail

// Text tables laid out like the usual retrieval and generation result tables.
inline void write_table(std::ostream& out, const std::vector<RetrievalReport>& reports) {
  if (reports.empty()) return;
  const auto& ns = reports.front().exact.recall;
  out << "retriever   case     ";
  for (const char* m : {"R", "MRR", "nDCG"})
    for (const auto& [n, v] : ns) out << (std::string(m) + "@" + std::to_string(n) + "          ").substr(0, 9);
  out << "\n";
  for (const auto& r : reports)
    for (const auto* t : {&r.exact, &r.renamed}) {
      out << (r.retriever + "            ").substr(0, 12) << (t == &r.exact ? "exact    " : "renamed  ");
      for (const auto* m : {&t->recall, &t->mrr, &t->ndcg})
        for (const auto& [n, v] : *m) out << detail::fixed(v) << "    ";
      out << "\n";
    }
}

inline void write_table(std::ostream& out, const GenerationReport& r) {
  out << "provider " << r.provider << ", k=" << r.k << ", entries " << r.entries << " (" << r.failures << " failed)\n";
  out << "syntax pass  " << detail::fixed(r.syntax_pass_rate) << "  (" << r.valid_assertions << "/" << r.assertions << ")\n";
  out << "BLEU         " << detail::fixed(r.bleu_mean) << "\n";
  out << "similarity   " << detail::fixed(r.semantic_sim_mean) << "\n";
  out << "path cover   " << detail::fixed(r.path_coverage) << "\n";
  out << "paths  entries  covered  rate\n";
  for (const auto& [b, g] : r.coverage_by_paths)
    out << (std::to_string(b) + (b == kMaxPathBucket ? "+" : "") + "      ").substr(0, 7)
        << (std::to_string(g.entries) + "         ").substr(0, 9) << (std::to_string(g.covered) + "         ").substr(0, 9)
        << detail::fixed(g.rate()) << "\n";
}

inline void write_table(std::ostream& out, const std::vector<RuntimePoint>& pts) {
  out << "size   raw_us       exact_us     approx_us\n";
  for (const auto& p : pts)
    out << (std::to_string(p.size) + "       ").substr(0, 7) << (detail::fixed(p.raw_us, 1) + "            ").substr(0, 13)
        << (detail::fixed(p.exact_us, 1) + "            ").substr(0, 13) << detail::fixed(p.approx_us, 1) << "\n";
}

inline void write_csv(std::ostream& out, const RetrievalReport& r) {
  out << "retriever,query_id,variant,rank,top_id\n";
  for (const auto& row : r.rows)
    out << r.retriever << ',' << row.query_id << ',' << row.variant << ',' << row.rank << ',' << row.top_id << '\n';
}

inline void write_csv(std::ostream& out, const GenerationReport& r) {
  out << "id,path_count,candidates,valid,covered,approximate,bleu,semantic,error\n";
  for (const auto& row : r.rows) {
    std::string err = row.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    out << row.id << ',' << row.path_count << ',' << row.candidates << ',' << row.valid << ',' << row.covered << ','
        << row.approximate << ',' << row.bleu << ',' << row.semantic << ',' << err << '\n';
  }
}

}  // namespace stellar

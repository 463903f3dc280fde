#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stellar/embed.hpp"
#include "stellar/kb.hpp"
#include "stellar/llm_gateway.hpp"
#include "stellar/promptkit.hpp"
#include "stellar/sva.hpp"
#include "stellar/vindex.hpp"

namespace stellar {

// Embeds every entry's fingerprint and indexes it under the entry id.
// nlist == 0 builds an exact-only index.
inline Index build_kb_index(std::span<const KbEntry> kb, EmbeddingProvider& embedder, std::size_t nlist = 0,
                            std::uint64_t seed = 0) {
  std::vector<std::string> keys;
  keys.reserve(kb.size());
  for (const auto& e : kb) keys.push_back(e.fingerprint.full);
  auto vectors = embedder.embed_batch(keys);
  std::vector<IndexEntry> entries;
  entries.reserve(kb.size());
  for (std::size_t i = 0; i < kb.size(); ++i) entries.push_back({kb[i].id, std::move(vectors[i]), kb[i].context_tag});
  return nlist == 0 ? build_exact(entries) : build_approx(entries, nlist, seed);
}

struct Pipeline {
  std::span<const KbEntry> knowledge;
  const Index* index = nullptr;  // may be null when k == 0
  EmbeddingProvider* embedder = nullptr;
  LlmProvider* llm = nullptr;
  GenerationConfig generation;
  std::size_t k = 3;
  PromptTemplate prompt_template;
  double tag_penalty = 2.0;
  std::optional<std::size_t> nprobe;  // set to search the IVF cells instead of scanning
};

struct GenerationResult {
  std::uint64_t path_count = 0;
  std::vector<std::string> exemplar_ids;
  std::string prompt;
  std::string raw;
  std::vector<std::string> candidates;  // spans extracted from the raw output
  std::vector<std::optional<SyntaxViolation>> verdicts;  // parallel to candidates
  std::vector<std::string> accepted;    // normalized, syntactically valid
  int retries = 0;
};

// Retrieve, count paths, build the prompt, complete, extract and check.
inline GenerationResult generate_for_block(const Pipeline& p, const RtlBlock& target) {
  if (!p.llm) throw InvalidArgument("pipeline has no LLM provider");
  std::vector<SearchHit> hits;
  if (p.k > 0) {
    if (!p.index || !p.embedder) throw InvalidArgument("retrieval needs an index and an embedding provider");
    const Fingerprint fp = fingerprint(target);
    const Embedding q = p.embedder->embed(fp.full);
    SearchOptions opts;
    opts.context_tag = fp.tag;
    opts.tag_penalty = p.tag_penalty;
    hits = p.nprobe ? p.index->search_approx(q, p.k, *p.nprobe, opts) : p.index->search_exact(q, p.k, opts);
  }
  const PromptBundle bundle = build_prompt(hits, p.knowledge, target, p.k, p.prompt_template);
  GenerationResult r;
  r.path_count = bundle.exec_path_count;
  for (const auto& e : bundle.exemplars) r.exemplar_ids.push_back(e.id);
  r.prompt = bundle.rendered;
  Completion c = complete(*p.llm, r.prompt, p.generation);
  r.raw = std::move(c.text);
  r.retries = c.retries;
  r.candidates = parse_llm_output(r.raw);
  for (const auto& cand : r.candidates) {
    std::optional<SyntaxViolation> v;
    try {
      v = check_sva_syntax(cand);
    } catch (const InvalidArgument& e) {
      v = SyntaxViolation{ViolationKind::InvalidToken, 1, 1, e.what()};
    }
    if (!v) r.accepted.push_back(normalize_sva(cand));
    r.verdicts.push_back(std::move(v));
  }
  return r;
}

}  // namespace stellar

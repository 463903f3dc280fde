// Acceptance run: one PASS/FAIL line per criterion. Thresholds and time
// budgets are pinned below. `acceptance --only N` runs a single criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "stellar/stellar.hpp"
#include "support/coverage_oracle.hpp"
#include "support/oracles.hpp"
#include "support/random_ast.hpp"

namespace {

using namespace stellar;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::vector<KbEntry> synthetic_kb(int total, std::uint64_t seed) {
  return curate(generate_synthetic_corpus(uniform_spec(total), seed)).kb;
}

const std::vector<KbEntry>& kb1500() {
  static const std::vector<KbEntry> kb = synthetic_kb(1500, 2024);
  return kb;
}

// --- 1 ------------------------------------------------------------------------

constexpr int kRenameBlocks = 500;

Outcome rename_invariance() {
  std::size_t cases = 0, same = 0;
  for (std::uint64_t s = 0; s < kRenameBlocks; ++s) {
    testing::RandomAst gen(s);
    RtlBlock b;
    b.module_name = "m";
    b.block = gen.always_block();
    const std::string fp = fingerprint(b).full;
    for (double f : {0.1, 0.3, 1.0}) {
      const RenamedBlock r = rename_identifiers_with_map(b, f, s * 31 + static_cast<std::uint64_t>(f * 10));
      std::set<std::string> targets;
      for (const auto& [from, to] : r.map) targets.insert(to);
      if (targets.size() != r.map.size()) return {false, "renaming is not a bijection at seed " + std::to_string(s)};
      ++cases;
      same += fingerprint(r.block).full == fp;
    }
  }
  return {same == cases, std::to_string(same) + "/" + std::to_string(cases) + " identical fingerprints"};
}

// --- 2 ------------------------------------------------------------------------

constexpr double kMaxCollisionRate = 0.02;

Outcome collision() {
  const auto rep = run_collision_experiment(1000, 17);
  return {rep.blocks == 1000 && rep.rate <= kMaxCollisionRate,
          "rate " + fmt(rep.rate * 100, 2) + "% over " + std::to_string(rep.blocks) + " distinct blocks (limit 2%)"};
}

// --- 3 ------------------------------------------------------------------------

constexpr double kMinStructuralRecall = 0.95;
constexpr double kMaxStructuralGap = 0.02;
constexpr double kMinSemanticDrop = 0.4;

Outcome retrieval() {
  HashEmbedder e;
  RetrievalEvalConfig cfg;
  cfg.sample_size = 100;
  cfg.rename_fraction = 0.3;
  cfg.seed = 5;
  const auto s = run_retrieval_eval(kb1500(), cfg, Retriever::Structural, e);
  const auto m = run_retrieval_eval(kb1500(), cfg, Retriever::SemanticBaseline, e);
  const double s0 = s.exact.recall.at(10), s30 = s.renamed.recall.at(10);
  const double m0 = m.exact.recall.at(10), m30 = m.renamed.recall.at(10);
  const bool ok_struct = s0 >= kMinStructuralRecall && s30 >= kMinStructuralRecall && std::abs(s0 - s30) <= kMaxStructuralGap;
  const bool ok_sem = m0 - m30 >= kMinSemanticDrop;
  std::string d = "kb " + std::to_string(s.kb_size) + "; structural R@10 " + fmt(s0) + " -> " + fmt(s30) + " (MRR@10 " +
                  fmt(s.exact.mrr.at(10)) + "/" + fmt(s.renamed.mrr.at(10)) + ", nDCG@10 " + fmt(s.exact.ndcg.at(10)) + "/" +
                  fmt(s.renamed.ndcg.at(10)) + "); semantic R@10 " + fmt(m0) + " -> " + fmt(m30) + " (drop " + fmt(m0 - m30) +
                  ", need >= 0.4)";
  if (!ok_sem) d += " [semantic-gap clause fails: the hash-trigram baseline is not fooled by renaming]";
  return {ok_struct && ok_sem, d};
}

// --- 4 ------------------------------------------------------------------------

Outcome path_oracle() {
  int agree = 0;
  for (std::uint64_t s = 0; s < 2000; ++s) {
    testing::RandomAst gen(s, testing::AstShape{4, 3});
    const AlwaysBlock b = gen.always_block();
    agree += path_count(*b.body) == testing::brute_force_paths(*b.body).size();
  }
  bool law = true;
  for (int k = 1; k <= 8; ++k) {
    Block seq;
    for (int i = 0; i < k; ++i)
      seq.stmts.push_back(make_stmt(If{ident("c" + std::to_string(i)),
                                       make_stmt(NonBlockingAssign{ident("q"), ident("d")}), nullptr}));
    const auto body = make_stmt(std::move(seq));
    law = law && path_count(*body) == (std::uint64_t{1} << k) && testing::brute_force_paths(*body).size() == (1u << k);
  }
  return {agree == 2000 && law, std::to_string(agree) + "/2000 agree with brute force; 2^k law " + (law ? "holds" : "broken")};
}

// --- 5 ------------------------------------------------------------------------

constexpr double kMinAnnRecall = 0.9;

Embedding random_unit(detail::Rng& rng, std::size_t dim) {
  Embedding e;
  e.provider_id = "acceptance";
  e.values.resize(dim);
  for (double& x : e.values) x = rng.normal();
  normalize(e.values);
  return e;
}

Outcome ann_fidelity() {
  detail::Rng rng(99);
  std::vector<IndexEntry> entries;
  for (int i = 0; i < 3000; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "v%04d", i);
    entries.push_back({id, random_unit(rng, kDefaultDim), ContextTag::Comb});
  }
  const Index idx = build_approx(entries, 32, 1);
  double recall = 0.0;
  bool identical = true;
  for (int q = 0; q < 100; ++q) {
    const Embedding query = random_unit(rng, kDefaultDim);
    const auto exact = idx.search_exact(query, 5);
    const auto approx = idx.search_approx(query, 5, 4);
    std::set<std::string> truth;
    for (const auto& h : exact) truth.insert(h.id);
    int hit = 0;
    for (const auto& h : approx) hit += truth.count(h.id) > 0;
    recall += hit / 5.0;
    const auto full = idx.search_approx(query, 5, 32);
    for (std::size_t i = 0; i < exact.size(); ++i)
      identical = identical && full.size() == exact.size() && full[i].id == exact[i].id && full[i].score == exact[i].score;
  }
  recall /= 100.0;
  return {recall >= kMinAnnRecall && identical,
          "recall@5 " + fmt(recall) + " (need >= 0.9) on 384-d uniform vectors; nprobe=nlist " +
              (identical ? "identical to exact" : "differs from exact")};
}

// --- 6 ------------------------------------------------------------------------

Outcome runtime_trend() {
  const auto corpus = synthetic_kb(3000, 77);
  if (corpus.size() < 3000) return {false, "corpus has only " + std::to_string(corpus.size()) + " entries"};
  HashEmbedder e;
  RuntimeConfig rc;
  const auto pts = run_runtime_sweep(corpus, e, rc);
  const auto& last = pts.back();
  return {last.size == 3000 && last.approx_us < last.exact_us && last.exact_us < last.raw_us,
          std::to_string(pts.size()) + " sizes; at 3000: approx " + fmt(last.approx_us, 1) + "us, exact " +
              fmt(last.exact_us, 1) + "us, raw " + fmt(last.raw_us, 1) + "us"};
}

// --- 7 ------------------------------------------------------------------------

const char* kStrayParenFixture =
    "property RXSynceotid;\n"
    "  (interrupt_control_14) != 7'b0110x11) )) |=> rx_14 == core_1;\n"
    "endproperty\n";

const char* kClockInExprFixture =
    "property SyncReseteotid;\n"
    "  (status_register_status_10) != 6'bxx0x0x &&\n"
    "  (status_register_status_10) != 7'b00x0001 &&\n"
    "  @(negedge fast_clk_8) (status_register_status_10) != 7'b1x1xxxx\n"
    "  |-> hw_4 == rx_5 && cfg_11 == sig_17;\n"
    "endproperty\n";

const std::string kRegRtl =
    "module r (input clk, input en, input [7:0] d, output reg [7:0] q);\n"
    "  always @(posedge clk) if (en) q <= d;\nendmodule\n";
const std::string kMuxRtl =
    "module mx (input [1:0] sel, input a, input b, output reg y);\n"
    "  always @(*) case (sel) 2'd0: y = a; default: y = b; endcase\nendmodule\n";
const std::string kRstRtl =
    "module ar (input clk, input rst_n, input [3:0] d, output reg [3:0] q);\n"
    "  always @(posedge clk or negedge rst_n) if (!rst_n) q <= 4'd0; else q <= d;\nendmodule\n";
const std::string kNegRtl =
    "module ng (input clk, input t, output reg q);\n  always @(negedge clk) if (t) q <= ~q;\nendmodule\n";

struct MicroCase {
  const char* id;
  std::string rtl, sva;
  bool accept;
  const char* reason_prefix;  // for rejections
  std::optional<ViolationKind> kind;
};

std::vector<MicroCase> micro_corpus() {
  using VK = ViolationKind;
  return {
      {"a01", kRegRtl, "property p;\n  @(posedge clk) en |=> q == $past(d);\nendproperty\n", true, "", {}},
      {"a02", kMuxRtl, "property p0; sel == 2'd0 |-> y == a; endproperty\nproperty p1; sel != 2'd0 |-> y == b; endproperty",
       true, "", {}},
      {"a03", kRegRtl, "chk: assert property (@(posedge clk) en |=> q == $past(d));", true, "", {}},
      {"a04", kRstRtl, "property p;\n  @(posedge clk) disable iff (!rst_n) 1'b1 |=> q == $past(d);\nendproperty\n", true,
       "", {}},
      {"a05", kRstRtl, "property r0;\n  @(posedge clk) !rst_n |=> q == 4'd0;\nendproperty\n", true, "", {}},
      {"a06", kRegRtl, "cover property (@(posedge clk) en |=> q == $past(d));", true, "", {}},
      {"a07", kRegRtl, "assume property (@(posedge clk) !en |=> q == $past(q));", true, "", {}},
      {"a08", kNegRtl, "property n;\n  @(negedge clk) t |=> q == !$past(q);\nendproperty\n", true, "", {}},
      {"a09", kRegRtl, "property p;\n  @(posedge clk) ((en) && (d != 8'hff)) |=> (q == $past(d));\nendproperty\n", true,
       "", {}},
      {"a10", kRegRtl, "property p;\n  @(posedge clk) $rose(en) |=> $stable(d) || q == $past(d);\nendproperty\n", true, "",
       {}},
      {"a11", kMuxRtl, "property p;\n  sel == 2'd0 |-> y == a;\nendproperty\n", true, "", {}},
      {"a12", kRegRtl, "property p;\n  @(posedge clk) en ##1 en |=> q == $past(d);\nendproperty\n", true, "", {}},
      {"r13", kRegRtl, kStrayParenFixture, false, "sva: ", VK::UnbalancedDelimiter},
      {"r14", kRegRtl, kClockInExprFixture, false, "sva: ", VK::EventControlInExpression},
      {"r15", kRegRtl, "   \n", false, "sva: ", VK::Empty},
      {"r16", kRegRtl, "property p;\n  `en |=> q;\nendproperty\n", false, "sva: ", VK::InvalidToken},
      {"r17", kRegRtl, "property p;\n  @(posedge clk) en && q;\nendproperty\n", false, "sva: ", VK::MissingImplication},
      {"r18", "module nb (input a, output b);\n  assign b = a;\nendmodule\n",
       "property p;\n  a |-> b;\nendproperty\n", false, "rtl: ", {}},
      {"r19", "module br (input clk, input a, output reg q);\n  always @(posedge clk) if (a q <= 1;\nendmodule\n",
       "property p;\n  a |=> q;\nendproperty\n", false, "rtl: ", {}},
      {"a01", kRegRtl, "property again;\n  @(posedge clk) !en |=> q == $past(q);\nendproperty\n", false, "duplicate id", {}},
  };
}

Outcome curation() {
  const auto v1 = check_sva_syntax(kStrayParenFixture), v2 = check_sva_syntax(kClockInExprFixture);
  const bool fixtures_ok = v1 && v1->kind == ViolationKind::UnbalancedDelimiter && v2 &&
                        v2->kind == ViolationKind::EventControlInExpression;
  const auto cases = micro_corpus();
  std::vector<RawPair> pairs;
  for (const auto& c : cases) pairs.push_back({std::string(c.id), c.rtl, c.sva});
  const CurateResult r = curate(pairs);
  std::vector<bool> accepted(cases.size(), true);
  std::vector<const Rejection*> rej(cases.size(), nullptr);
  for (const auto& x : r.rejected) {
    accepted[x.position] = false;
    rej[x.position] = &x;
  }
  std::string wrong;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& c = cases[i];
    bool ok = accepted[i] == c.accept;
    if (ok && !c.accept)
      ok = rej[i]->reason.starts_with(c.reason_prefix) && (!c.kind || rej[i]->violation == c.kind);
    if (!ok) wrong += std::string(" ") + c.id + "#" + std::to_string(i) + (rej[i] ? "(" + rej[i]->reason + ")" : "");
  }
  return {fixtures_ok && wrong.empty() && cases.size() == 20,
          std::string("defect fixtures ") + (fixtures_ok ? "rejected with the right class" : "misclassified") + "; " +
              std::to_string(r.kb.size()) + " accepted / " + std::to_string(r.rejected.size()) + " rejected of " +
              std::to_string(cases.size()) + (wrong.empty() ? ", partition exact" : ", mismatches:" + wrong)};
}

// --- 8 ------------------------------------------------------------------------

std::string if_chain_module(int paths) {
  std::string body;
  for (int i = 0; i + 1 < paths; ++i) body += (i ? " else if (c" : "if (c") + std::to_string(i) + ") q <= " + std::to_string(i) + ";";
  body += " else q <= 0;";
  std::string ports;
  for (int i = 0; i + 1 < paths; ++i) ports += ", input c" + std::to_string(i);
  return "module t (input clk" + ports + ", output reg [7:0] q);\n  always @(posedge clk) " + body + "\nendmodule\n";
}

std::size_t count_of(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

Outcome prompt_fidelity() {
  std::vector<std::pair<StratumKey, int>> spec{{{2, Timing::Sync, ControlKind::IfElse}, 6}};
  const auto kb = curate(generate_synthetic_corpus(spec, 3)).kb;
  std::vector<SearchHit> hits;
  for (std::size_t i = 0; i < kb.size(); ++i) hits.push_back({kb[i].id, 1.0 - 0.1 * static_cast<double>(i), i + 1});
  std::string bad;
  for (int paths : {2, 3, 5, 8}) {
    const RtlBlock target = parse_single_block(if_chain_module(paths));
    for (std::size_t k : {0u, 3u, 5u}) {
      const auto b = build_prompt(hits, kb, target, k);
      const std::string n = std::to_string(paths);
      const std::string sentence = "CRITICAL INSTRUCTION: Target code has " + n +
                                   " execution paths. You must generate exactly " + n + " assertions, one for each path.";
      std::size_t sections = 0;
      for (std::size_t i = 1; i <= 10; ++i) sections += count_of(b.rendered, "Example " + std::to_string(i) + " — RTL:\n");
      const bool ok = b.exec_path_count == static_cast<std::uint64_t>(paths) && count_of(b.rendered, sentence) == 1 &&
                      count_of(b.rendered, "CRITICAL INSTRUCTION") == 1 && sections == k &&
                      count_of(b.rendered, " — SVA:\n") == k;
      if (!ok) bad += " P=" + n + "/k=" + std::to_string(k);
    }
  }
  return {bad.empty(), bad.empty() ? "12 prompts correct (paths 2,3,5,8 x k 0,3,5)" : "wrong prompts:" + bad};
}

// --- 9 ------------------------------------------------------------------------

Outcome closed_loop() {
  auto split = stratified_split(synthetic_kb(630, 31), 31);
  detail::Rng rng(31);
  rng.shuffle(split.query);
  if (split.query.size() < 200) return {false, "query split has only " + std::to_string(split.query.size()) + " entries"};
  split.query.resize(200);

  HashEmbedder e;
  const Index idx = build_kb_index(split.knowledge, e);
  auto run = [&](const std::string& provider) {
    MockProvider llm(parse_mock_spec(provider, 8));
    Pipeline p;
    p.knowledge = split.knowledge;
    p.index = &idx;
    p.embedder = &e;
    p.llm = &llm;
    p.k = 3;
    return run_generation_eval(split.query, p, e);
  };
  const auto perfect = run("perfect");
  const auto garbled = run("garbled:1");
  const auto lossy = run("lossy:0.5");
  const auto& by = lossy.coverage_by_paths;
  if (!by.count(2) || !by.count(kMaxPathBucket)) return {false, "query sample lacks 2-path or 8-path entries"};
  const double c2 = by.at(2).rate(), c8 = by.at(kMaxPathBucket).rate();
  const bool ok = perfect.failures == 0 && perfect.syntax_pass_rate == 1.0 && perfect.path_coverage == 1.0 &&
                  garbled.syntax_pass_rate == 0.0 && c8 < c2;
  return {ok, "perfect: syntax " + fmt(perfect.syntax_pass_rate) + ", coverage " + fmt(perfect.path_coverage) +
                  "; garbled(1.0): syntax " + fmt(garbled.syntax_pass_rate) + "; lossy(0.5): coverage 2-path " + fmt(c2) +
                  " (" + std::to_string(by.at(2).entries) + ") vs 8-path " + fmt(c8) + " (" +
                  std::to_string(by.at(kMaxPathBucket).entries) + ")"};
}

// --- 10 -----------------------------------------------------------------------

Outcome coverage_oracle() {
  int compared = 0, agree = 0, approximate = 0;
  for (std::uint64_t s = 0; compared < 500 && s < 5000; ++s) {
    const auto f = testing::coverage_fixture(s);
    const auto want = testing::CoverageOracle::per_path(f.svas, f.block, 10);
    if (!want) continue;
    ++compared;
    const auto got = path_coverage(f.svas, f.block);
    approximate += got.approximate;
    agree += got.per_path == *want;
  }
  return {compared == 500 && agree == 500 && approximate == 0,
          std::to_string(agree) + "/" + std::to_string(compared) + " pairs agree with the truth-table oracle"};
}

// --- 11 -----------------------------------------------------------------------

constexpr double kSelfBleuTol = 1e-9;
constexpr double kSelfSimTol = 1e-6;
constexpr double kSpotTol = 1e-4;

Outcome metric_sanity() {
  HashEmbedder e;
  std::size_t bad_bleu = 0, bad_sim = 0;
  for (const auto& k : kb1500()) {
    bad_bleu += std::abs(bleu(k.sva_text, k.sva_text) - 1.0) > kSelfBleuTol;
    bad_sim += std::abs(semantic_similarity(k.sva_text, k.sva_text, e) - 1.0) > kSelfSimTol;
  }
  const std::vector<Ranking> rank2{{{"x", "rel", "y"}, {"rel"}}};
  const std::vector<Ranking> rank1{{{"rel", "x"}, {"rel"}}};
  const std::vector<Ranking> missing{{{"x", "y"}, {"rel"}}};
  const bool spots = std::abs(mrr_at_n(rank2, 10) - 0.5) <= kSpotTol && std::abs(ndcg_at_n(rank2, 10) - 0.6309) <= kSpotTol &&
                     recall_at_n(rank2, 1) == 0.0 && recall_at_n(rank2, 2) == 1.0 && mrr_at_n(rank1, 10) == 1.0 &&
                     ndcg_at_n(rank1, 10) == 1.0 && mrr_at_n(missing, 10) == 0.0 && ndcg_at_n(missing, 10) == 0.0;
  return {bad_bleu == 0 && bad_sim == 0 && spots,
          std::to_string(kb1500().size()) + " entries: bleu(x,x)!=1 in " + std::to_string(bad_bleu) +
              ", similarity(x,x)!=1 in " + std::to_string(bad_sim) + "; rank-2 MRR " + fmt(mrr_at_n(rank2, 10), 4) +
              ", nDCG " + fmt(ndcg_at_n(rank2, 10), 4)};
}

struct Criterion {
  int number;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  if (argc == 3 && std::strcmp(argv[1], "--only") == 0) only = std::atoi(argv[2]);
  else if (argc != 1) {
    std::cerr << "usage: acceptance [--only N]\n";
    return 1;
  }
  const std::vector<Criterion> all{
      {1, "rename invariance", 10, rename_invariance},
      {2, "collision rate", 30, collision},
      {3, "retrieval robustness", 120, retrieval},
      {4, "path-count oracle", 30, path_oracle},
      {5, "ANN fidelity", 60, ann_fidelity},
      {6, "runtime trend", 300, runtime_trend},
      {7, "curation fidelity", 1, curation},
      {8, "prompt fidelity", 1, prompt_fidelity},
      {9, "closed-loop pipeline", 120, closed_loop},
      {10, "path-coverage oracle", 60, coverage_oracle},
      {11, "metric sanity", 30, metric_sanity},
  };
  int failed = 0, ran = 0;
  for (const auto& c : all) {
    if (only && c.number != only) continue;
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::cout << "AC" << c.number << ' ' << (pass ? "PASS" : "FAIL") << ' ' << c.name << ": " << o.detail << " ["
              << fmt(secs, 2) << "s, budget " << fmt(c.budget_s, 0) << "s" << (in_time ? "" : ", OVER BUDGET") << "]\n"
              << std::flush;
  }
  if (ran == 0) {
    std::cerr << "no criterion " << only << '\n';
    return 1;
  }
  return failed ? 1 : 0;
}

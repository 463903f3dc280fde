#include <gtest/gtest.h>

#include <cmath>

#include "stellar/evalkit.hpp"
#include "support/coverage_oracle.hpp"

namespace stellar {
namespace {

const char* kFiveIds =
    "module m (input clk, input en, input [7:0] d, output reg [7:0] q);\n"
    "  always @(posedge clk) if (en) q <= d; else q <= 8'd0;\n"
    "endmodule\n";

TEST(Rename, FractionBounds) {
  EXPECT_EQ(rename_module_text(kFiveIds, 0.0, 3), kFiveIds);
  const std::string all = rename_module_text(kFiveIds, 1.0, 3);
  for (const char* id : {"clk", "en", "d", "q"}) {
    const auto toks = detail::identifier_tokens(all);
    EXPECT_EQ(toks.count(id), 0u) << id << "\n" << all;
  }
  const RtlBlock a = parse_single_block(kFiveIds), b = parse_single_block(all);
  EXPECT_EQ(normalized_key(a.block), normalized_key(b.block));
  EXPECT_EQ(fingerprint(a).full, fingerprint(b).full);
  EXPECT_EQ(detail::rename_count(0.3, 4), 2u);
  EXPECT_EQ(detail::rename_count(0.25, 4), 1u);
  EXPECT_THROW(detail::rename_count(1.5, 4), InvalidArgument);
  EXPECT_EQ(rename_module_text(kFiveIds, 0.5, 9), rename_module_text(kFiveIds, 0.5, 9));
}

TEST(Rename, RandomBlocksKeepStructure) {
  for (std::uint64_t s = 0; s < 60; ++s) {
    testing::RandomAst gen(s);
    RtlBlock b;
    b.module_name = "r";
    b.block = gen.always_block();
    const RtlBlock r = rename_identifiers(b, 0.3, s);
    EXPECT_EQ(normalized_key(b.block), normalized_key(r.block));
    EXPECT_EQ(fingerprint(b).full, fingerprint(r).full);
  }
}

TEST(Metrics, ClosedForm) {
  const std::vector<Ranking> first{{{"x", "y"}, {"x"}}};
  const std::vector<Ranking> second{{{"y", "x"}, {"x"}}};
  const std::vector<Ranking> absent{{{"y", "z"}, {"x"}}};
  EXPECT_DOUBLE_EQ(recall_at_n(first, 1), 1.0);
  EXPECT_DOUBLE_EQ(mrr_at_n(first, 5), 1.0);
  EXPECT_DOUBLE_EQ(ndcg_at_n(first, 5), 1.0);
  EXPECT_DOUBLE_EQ(recall_at_n(second, 1), 0.0);
  EXPECT_DOUBLE_EQ(recall_at_n(second, 2), 1.0);
  EXPECT_DOUBLE_EQ(mrr_at_n(second, 2), 0.5);
  EXPECT_NEAR(ndcg_at_n(second, 2), 1.0 / std::log2(3.0), 1e-12);
  EXPECT_DOUBLE_EQ(mrr_at_n(absent, 10), 0.0);
  EXPECT_DOUBLE_EQ(ndcg_at_n(absent, 10), 0.0);
  std::vector<Ranking> mixed{first[0], second[0], absent[0]};
  EXPECT_NEAR(recall_at_n(mixed, 2), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(mrr_at_n(mixed, 2), 0.5, 1e-12);
  EXPECT_THROW(recall_at_n(std::vector<Ranking>{}, 3), EmptyRankings);
  EXPECT_THROW(mrr_at_n(first, 0), InvalidArgument);
}

TEST(Metrics, MonotoneInN) {
  detail::Rng rng(5);
  std::vector<Ranking> rs;
  for (int q = 0; q < 50; ++q) {
    Ranking r;
    for (int i = 0; i < 12; ++i) r.ranked.push_back("e" + std::to_string(rng.below(30)));
    r.relevant = {"e" + std::to_string(rng.below(30))};
    rs.push_back(r);
  }
  for (std::size_t n = 1; n < 12; ++n) {
    EXPECT_LE(recall_at_n(rs, n), recall_at_n(rs, n + 1));
    EXPECT_LE(mrr_at_n(rs, n), mrr_at_n(rs, n + 1));
    EXPECT_LE(mrr_at_n(rs, n), recall_at_n(rs, n));
  }
}

TEST(Bleu, Tokenizer) {
  const std::vector<std::string> want{"@", "(", "posedge", "clk", ")", "a", "&&", "b", "|=>", "q", "==", "$past",
                                      "(", "8'hff", ")", ";"};
  EXPECT_EQ(bleu_tokens("@(posedge clk) a&&b |=> q == $past(8'hff);"), want);
  EXPECT_TRUE(bleu_tokens(" \n\t").empty());
}

TEST(Bleu, ClosedForm) {
  EXPECT_NEAR(bleu("a |-> b ##1 c", "a |-> b ##1 c"), 1.0, 1e-12);
  EXPECT_LE(bleu("x y z w", "a b c d"), 1e-6);
  const double expect = std::exp((std::log(2.0 / 3.0) + std::log(0.5) + std::log(1e-9)) / 3.0);
  EXPECT_NEAR(bleu("a |-> b", "a |-> c"), expect, expect * 1e-9);
  EXPECT_NEAR(bleu("a |-> b", "a |-> b ; c"), std::exp(-2.0 / 3.0), 1e-12);
  EXPECT_THROW(bleu("", "a"), EmptyText);
  for (const char* s : {"a", "p |-> q", "en |=> q == $past(d)"}) {
    const double v = bleu(s, "en |=> q == $past(d)");
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Semantic, IdentitySymmetryAndDecay) {
  HashEmbedder e;
  const std::string ref = "property p; @(posedge clk) en |=> q == $past(d); endproperty";
  EXPECT_NEAR(semantic_similarity(ref, ref, e), 1.0, 1e-9);
  EXPECT_NEAR(semantic_similarity(ref, "cover property (x);", e), semantic_similarity("cover property (x);", ref, e), 1e-12);
  double prev = 1.0;
  for (std::size_t cut : {10u, 25u, 45u}) {
    const double s = semantic_similarity(ref.substr(0, ref.size() - cut), ref, e);
    EXPECT_LT(s, prev + 1e-12);
    prev = s;
  }
}

AlwaysBlock always_of(const std::string& body) {
  return parse_single_block("module t (input clk, input a, input b, input c, input [1:0] s, output reg q);\n"
                            "  always @(posedge clk) " + body + "\nendmodule\n").block;
}

TEST(Coverage, PerfectAndPartial) {
  const auto blk = always_of("if (a) q <= 1; else q <= 0;");
  const std::vector<std::string> both{"property p0; a |=> q; endproperty", "property p1; !a |=> !q; endproperty"};
  auto r = path_coverage(both, blk);
  EXPECT_TRUE(r.covered);
  EXPECT_EQ(r.valid_assertions, 2u);
  EXPECT_FALSE(r.approximate);

  const auto chain = always_of("if (a) q <= 1; else if (b) q <= 0; else q <= c;");
  const std::vector<std::string> ends{"property p0; a |=> q; endproperty",
                                      "property p2; !a && !b |=> q == $past(c); endproperty",
                                      "property bad; (a |-> b; endproperty"};
  r = path_coverage(ends, chain);
  EXPECT_FALSE(r.covered);
  EXPECT_EQ(r.per_path, (std::vector<bool>{true, false, true}));
  EXPECT_EQ(r.valid_assertions, 2u);
}

TEST(Coverage, LogicalEquivalenceNotText) {
  const auto blk = always_of("if (a && b) q <= 1; else q <= 0;");
  const std::vector<std::string> svas{"property p0; b && a |=> q; endproperty",
                                      "property p1; !a || !b |=> !q; endproperty"};
  EXPECT_TRUE(path_coverage(svas, blk).covered);
  const std::vector<std::string> wrong{"property p0; a |=> q; endproperty"};
  EXPECT_EQ(path_coverage(wrong, blk).per_path, (std::vector<bool>{false, false}));
}

TEST(Coverage, ApproximateAboveAtomLimit) {
  std::string cond = "x0";
  std::string ports = "input x0";
  for (int i = 1; i < 18; ++i) {
    cond += " && x" + std::to_string(i);
    ports += ", input x" + std::to_string(i);
  }
  const auto blk = parse_single_block("module t (input clk, " + ports + ", output reg q);\n  always @(posedge clk) if (" +
                                      cond + ") q <= 1;\nendmodule\n").block;
  const std::vector<std::string> svas{"property p; " + cond + " |=> q; endproperty"};
  auto r = path_coverage(svas, blk);
  EXPECT_TRUE(r.approximate);
  EXPECT_EQ(r.per_path.size(), 2u);
  EXPECT_TRUE(r.per_path[0]);
  EXPECT_FALSE(r.per_path[1]);
}

TEST(Coverage, AgreesWithBruteForceOracle) {
  int compared = 0, partial = 0;
  for (std::uint64_t s = 0; s < 300; ++s) {
    const auto f = testing::coverage_fixture(s);
    const auto want = testing::CoverageOracle::per_path(f.svas, f.block);
    if (!want) continue;
    const auto got = path_coverage(f.svas, f.block);
    ASSERT_FALSE(got.approximate) << s;
    ASSERT_EQ(got.per_path, *want) << "seed " << s << "\n" << to_verilog(*f.block.body);
    ++compared;
    partial += !got.covered && std::count(want->begin(), want->end(), true) > 0;
  }
  EXPECT_GE(compared, 200);
  EXPECT_GT(partial, 20);
}

std::vector<KbEntry> test_kb(int per_stratum, std::uint64_t seed) {
  std::vector<std::pair<StratumKey, int>> spec;
  for (const auto& k : satisfiable_strata()) spec.push_back({k, per_stratum});
  return curate(generate_synthetic_corpus(spec, seed)).kb;
}

TEST(Experiments, RetrievalSmall) {
  const auto kb = test_kb(3, 11);
  HashEmbedder e;
  RetrievalEvalConfig cfg;
  cfg.sample_size = 30;
  cfg.seed = 2;
  const auto rep = run_retrieval_eval(kb, cfg, Retriever::Structural, e);
  EXPECT_EQ(rep.queries, 30u);
  EXPECT_EQ(rep.rows.size(), 60u);
  for (std::size_t n : cfg.n_values) {
    EXPECT_GE(rep.exact.recall.at(n), 0.9);
    EXPECT_LE(rep.exact.mrr.at(n), rep.exact.recall.at(n) + 1e-12);
  }
  const auto again = run_retrieval_eval(kb, cfg, Retriever::Structural, e);
  EXPECT_EQ(to_json(again).dump(), to_json(rep).dump());
  cfg.n_values = {};
  EXPECT_THROW(cfg.validate(), InvalidArgument);
}

TEST(Experiments, GenerationWithMock) {
  const auto kb = test_kb(2, 12);
  auto split = stratified_split(kb, 1);
  HashEmbedder e;
  const Index idx = build_kb_index(split.knowledge, e);
  MockProvider perfect;
  Pipeline p;
  p.knowledge = split.knowledge;
  p.index = &idx;
  p.embedder = &e;
  p.llm = &perfect;
  const auto rep = run_generation_eval(split.query, p, e, 2);
  EXPECT_EQ(rep.failures, 0u);
  EXPECT_DOUBLE_EQ(rep.syntax_pass_rate, 1.0);
  EXPECT_DOUBLE_EQ(rep.path_coverage, 1.0);
  EXPECT_GT(rep.bleu_mean, 0.0);

  MockProvider garbled(parse_mock_spec("garbled:1"));
  p.llm = &garbled;
  const auto bad = run_generation_eval(split.query, p, e, 2);
  EXPECT_DOUBLE_EQ(bad.syntax_pass_rate, 0.0);
  EXPECT_DOUBLE_EQ(bad.path_coverage, 0.0);
}

TEST(Experiments, CollisionAndRuntime) {
  const auto c = run_collision_experiment(200, 4);
  EXPECT_EQ(c.blocks, 200u);
  EXPECT_LT(c.rate, 0.05);
  EXPECT_EQ(to_json(c).dump(), to_json(run_collision_experiment(200, 4)).dump());

  const auto kb = test_kb(2, 13);
  HashEmbedder e;
  RuntimeConfig rc;
  rc.start = 20;
  rc.stop = 60;
  rc.step = 20;
  rc.queries = 5;
  rc.nlist = 4;
  const auto pts = run_runtime_sweep(kb, e, rc);
  ASSERT_EQ(pts.size(), 3u);
  EXPECT_EQ(pts[2].size, 60u);
  rc.stop = kb.size() + 1;
  EXPECT_THROW(run_runtime_sweep(kb, e, rc), InvalidArgument);
}

}  // namespace
}  // namespace stellar

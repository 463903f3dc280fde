#include <gtest/gtest.h>

#include <set>
#include <string>

#include "stellar/fingerprint.hpp"
#include "stellar/rtl_parser.hpp"
#include "stellar/rtl_transform.hpp"
#include "support/random_ast.hpp"

namespace stellar {
namespace {

TEST(Fingerprint, ReferenceBlockExact) {
  auto b = parse_always(R"(always @(posedge clk) begin
    if (a && b) begin
      out <= c + 1;
    end else begin
      out = c;
    end
  end)");
  EXPECT_EQ(fingerprint(b).full,
            "SYNC_POSEDGE::if(dpth:1,brnch:2)"
            "[then:block(nb_asgn:1,b_asgn:0,ops:{+:1,&&:1})]"
            "[else:block(nb_asgn:0,b_asgn:1,ops:{})]");
}

TEST(Fingerprint, ContainsNoIdentifiers) {
  auto b = parse_always(
      "always @(posedge clock_main) if (enable_flag) counter_reg <= counter_reg + 1;");
  const auto fp = fingerprint(b).full;
  for (const char* name : {"clock_main", "enable_flag", "counter_reg"})
    EXPECT_EQ(fp.find(name), std::string::npos) << fp;
}

TEST(Fingerprint, IfAndCaseDiffer) {
  auto i = parse_always("always @(*) if (s) y = a; else y = b;");
  auto c = parse_always("always @(*) case (s) 1'b1: y = a; default: y = b; endcase");
  EXPECT_NE(fingerprint(i).full, fingerprint(c).full);
}

TEST(Fingerprint, SensitiveToStructure) {
  const char* variants[] = {
      "always @(posedge clk) q <= d;",
      "always @(posedge clk) q = d;",
      "always @(negedge clk) q <= d;",
      "always @(posedge clk) q <= d + 1;",
      "always @(posedge clk) q <= d - 1;",
      "always @(posedge clk) if (en) q <= d;",
      "always @(posedge clk) if (en) q <= d; else q <= 0;",
      "always @(posedge clk) if (en) q <= d; else if (ld) q <= 1; else q <= 0;",
      "always @(posedge clk) if (en) begin if (ld) q <= d; end else q <= 0;",
      "always @(posedge clk) begin q <= d; if (en) r <= d; end",
      "always @(posedge clk) begin if (en) r <= d; q <= d; end",
      "always @(posedge clk or negedge rst_n) if (!rst_n) q <= 0; else q <= d;",
      "always @(*) case (s) 2'd0: y = a; 2'd1: y = b; endcase",
      "always @(*) case (s) 2'd0: y = a; 2'd1: y = b; default: y = c; endcase",
  };
  std::set<std::string> seen;
  for (const char* v : variants) EXPECT_TRUE(seen.insert(fingerprint(parse_always(v)).full).second) << v;
}

TEST(Fingerprint, ElseIfChainShape) {
  auto b = parse_always("always @(*) if (a) y = 1; else if (b) y = 2; else y = 3;");
  const auto fp = fingerprint(b).body;
  EXPECT_TRUE(fp.starts_with("if(dpth:1,brnch:3)[then:")) << fp;
  EXPECT_NE(fp.find("[elif:"), std::string::npos);
  auto nested = parse_always("always @(*) if (a) begin if (b) y = 1; end else y = 3;");
  EXPECT_TRUE(fingerprint(nested).body.starts_with("if(dpth:2,brnch:2)")) << fingerprint(nested).body;
}

TEST(Fingerprint, EmptyBodyAndSequences) {
  EXPECT_EQ(fingerprint(parse_always("always @(*) begin end")).full,
            "COMB::block(nb_asgn:0,b_asgn:0,ops:{})");
  auto seq = parse_always("always @(posedge clk) begin a <= b; if (c) d <= e; f <= g; end");
  EXPECT_TRUE(fingerprint(seq).body.starts_with("seq(n:3)[block(nb_asgn:1"));
}

TEST(ContextTag, TwoEntryEdgeTable) {
  // Hand enumeration of every two-entry sensitivity list over signals {x, y}.
  const Edge kinds[] = {Edge::Posedge, Edge::Negedge, Edge::Level};
  for (Edge e1 : kinds)
    for (Edge e2 : kinds)
      for (bool same_signal : {true, false}) {
        SensitivityList s{{{e1, "x"}, {e2, same_signal ? "x" : "y"}}};
        const bool edge1 = e1 != Edge::Level, edge2 = e2 != Edge::Level;
        ContextTag expected;
        if (!edge1 && !edge2) expected = ContextTag::Comb;
        else if (edge1 != edge2) expected = ContextTag::Async;
        else if (!same_signal) expected = ContextTag::Async;
        else if (e1 != e2) expected = ContextTag::SyncBoth;
        else expected = e1 == Edge::Posedge ? ContextTag::SyncPosedge : ContextTag::SyncNegedge;
        EXPECT_EQ(context_tag(s), expected);
      }
  EXPECT_EQ(context_tag(SensitivityList{{{Edge::Star, ""}}}), ContextTag::Comb);
  for (auto t : {ContextTag::Async, ContextTag::SyncPosedge, ContextTag::SyncNegedge,
                 ContextTag::SyncBoth, ContextTag::Comb})
    EXPECT_EQ(context_tag_from_string(to_string(t)), t);
  EXPECT_FALSE(context_tag_from_string("SYNC"));
}

TEST(Fingerprint, RenameInvarianceProperty) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    testing::RandomAst gen(seed);
    AlwaysBlock b = gen.always_block();
    std::vector<std::string> ids = block_identifiers(b);
    std::vector<std::string> fresh = ids;
    gen.rng().shuffle(fresh);
    RenameMap map;
    for (std::size_t i = 0; i < ids.size(); ++i) map[ids[i]] = "n_" + fresh[i] + "_" + std::to_string(i);
    AlwaysBlock r = rename(b, map);
    ASSERT_EQ(fingerprint(b).full, fingerprint(r).full);
  }
}

TEST(Fingerprint, DeterministicAcrossCalls) {
  testing::RandomAst gen(7);
  auto b = gen.always_block();
  EXPECT_EQ(fingerprint(b).full, fingerprint(b).full);
}

TEST(CollisionRate, CountsOnlyStructurallyDistinctSharers) {
  auto a = parse_always("always @(posedge clk) q <= d;");
  auto a2 = parse_always("always @(posedge c) r <= e;");  // same up to renaming
  auto b = parse_always("always @(posedge clk) q <= q;");  // different AST, same shape
  auto c = parse_always("always @(posedge clk) q = d;");
  std::vector<AlwaysBlock> blocks{a, a2, c};
  EXPECT_DOUBLE_EQ(collision_rate(blocks), 0.0);
  blocks.push_back(b);
  EXPECT_DOUBLE_EQ(collision_rate(blocks), 0.75);
  EXPECT_THROW(collision_rate(std::span<const AlwaysBlock>{}), InvalidArgument);
}

}  // namespace
}  // namespace stellar

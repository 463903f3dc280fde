#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <deque>
#include <memory>

#include "stellar/embed.hpp"
#include "stellar/fingerprint.hpp"
#include "support/random_ast.hpp"

namespace stellar {
namespace {

// Frozen from an independent FNV-1a implementation (Python, arbitrary
// precision integers reduced mod 2^64).
TEST(HashEmbed, FrozenTrigramBuckets) {
  auto e = hash_embed("abcd");
  ASSERT_EQ(e.dim(), 384u);
  for (std::size_t i = 0; i < e.dim(); ++i) {
    if (i == 56) EXPECT_NEAR(e.values[i], -1.0 / std::sqrt(2.0), 1e-15);
    else if (i == 113) EXPECT_NEAR(e.values[i], 1.0 / std::sqrt(2.0), 1e-15);
    else EXPECT_EQ(e.values[i], 0.0) << i;
  }
  auto f = hash_embed("SYNC_POSEDGE::block(nb_asgn:1,b_asgn:0,ops:{})");
  const double n = 7.3484692283495345;
  EXPECT_NEAR(f.values[36], -2.0 / n, 1e-12);
  EXPECT_NEAR(f.values[149], 2.0 / n, 1e-12);
  EXPECT_NEAR(f.values[383], 1.0 / n, 1e-12);
  EXPECT_EQ(f.values[0], 0.0);
}

TEST(HashEmbed, DeterministicAndUnitNorm) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    testing::RandomAst gen(seed);
    const auto fp = fingerprint(gen.always_block()).full;
    auto a = hash_embed(fp), b = hash_embed(fp);
    ASSERT_EQ(std::memcmp(a.values.data(), b.values.data(), a.dim() * sizeof(double)), 0);
    EXPECT_NEAR(norm(a.values), 1.0, 1e-6);
  }
  EXPECT_NEAR(norm(hash_embed("ab").values), 1.0, 1e-12);
}

TEST(HashEmbed, Errors) {
  EXPECT_THROW(hash_embed(""), EmptyInput);
  EXPECT_THROW(hash_embed("caf\xc3\xa9"), InvalidArgument);
}

TEST(HashEmbed, SmallEditCloserThanUnrelated) {
  // Pairwise cosine matrix over a generated corpus: a fingerprint with one
  // count field changed stays closer to its source than the mean unrelated
  // fingerprint does.
  std::vector<std::string> corpus;
  for (std::uint64_t seed = 0; corpus.size() < 100; ++seed) {
    testing::RandomAst gen(seed);
    corpus.push_back(fingerprint(gen.always_block()).full);
  }
  std::vector<Embedding> embs;
  for (const auto& c : corpus) embs.push_back(hash_embed(c));
  int checked = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    std::string edited = corpus[i];
    const auto pos = edited.find("nb_asgn:");
    if (pos == std::string::npos) continue;
    char& digit = edited[pos + 8];
    digit = digit == '9' ? '8' : static_cast<char>(digit + 1);
    const double near = cosine(embs[i], hash_embed(edited));
    double unrelated = 0.0;
    int n = 0;
    for (std::size_t j = 0; j < corpus.size(); ++j)
      if (corpus[j] != corpus[i]) {
        unrelated += cosine(embs[i], embs[j]);
        ++n;
      }
    EXPECT_LT(near, 1.0);
    EXPECT_GT(near, unrelated / n);
    ++checked;
  }
  EXPECT_GT(checked, 50);
}

TEST(Cosine, BasicIdentities) {
  auto v = hash_embed("if(dpth:1,brnch:2)");
  EXPECT_NEAR(cosine(v, v), 1.0, 1e-9);
  Embedding neg = v;
  for (double& x : neg.values) x = -x;
  EXPECT_NEAR(cosine(v, neg), -1.0, 1e-12);
  Embedding e0{std::vector<double>(4, 0.0), "t"}, e1 = e0;
  e0.values[0] = 1.0;
  e1.values[1] = 1.0;
  EXPECT_EQ(cosine(e0, e1), 0.0);
  auto w = hash_embed("case(items:3,dflt:1)");
  EXPECT_EQ(cosine(v, w), cosine(w, v));
  EXPECT_THROW(cosine(v, e0), DimensionMismatch);
}

class ScriptedTransport : public Transport {
 public:
  std::deque<HttpResponse> replies;
  std::vector<HttpRequest> seen;
  HttpResponse post(const HttpRequest& r) override {
    seen.push_back(r);
    HttpResponse out = replies.front();
    replies.pop_front();
    return out;
  }
};

TEST(RemoteEmbedder, BatchesAndNormalizes) {
  auto t = std::make_shared<ScriptedTransport>();
  t->replies.push_back({503, "busy"});
  t->replies.push_back({200, "[[3,4,0],[0,0,2]]"});
  RemoteEmbedderOptions opt;
  opt.url = "http://embed.local/v1/embed";
  opt.token = "tok";
  opt.dim = 3;
  RemoteEmbedder r(t, opt, [](auto) {});
  std::vector<std::string> texts{"a", "b"};
  auto out = r.embed_batch(texts);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_DOUBLE_EQ(out[0].values[0], 0.6);
  EXPECT_DOUBLE_EQ(out[1].values[2], 1.0);
  ASSERT_EQ(t->seen.size(), 2u);
  EXPECT_EQ(t->seen[0].body, R"(["a","b"])");
}

TEST(RemoteEmbedder, RejectsWrongShape) {
  auto t = std::make_shared<ScriptedTransport>();
  t->replies.push_back({200, "[[1,2]]"});
  RemoteEmbedderOptions opt;
  opt.url = "http://x/";
  opt.dim = 3;
  RemoteEmbedder r(t, opt, [](auto) {});
  std::vector<std::string> texts{"a"};
  EXPECT_THROW(r.embed_batch(texts), DimensionMismatch);
  t->replies.push_back({401, "no"});
  EXPECT_THROW(r.embed_batch(texts), AuthError);
}

}  // namespace
}  // namespace stellar

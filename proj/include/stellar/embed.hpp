#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "stellar/detail/hash.hpp"
#include "stellar/error.hpp"
#include "stellar/transport.hpp"

namespace stellar {

inline constexpr std::size_t kDefaultDim = 384;

struct Embedding {
  std::vector<double> values;
  std::string provider_id;

  std::size_t dim() const { return values.size(); }
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::string id() const = 0;
  virtual std::size_t dim() const = 0;
  virtual std::vector<Embedding> embed_batch(std::span<const std::string> texts) = 0;

  Embedding embed(const std::string& text) { return embed_batch(std::span(&text, 1)).front(); }
};

inline double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline void normalize(std::vector<double>& v) {
  const double n = norm(v);
  if (n == 0.0) throw InvalidArgument("cannot normalize a zero vector");
  for (double& x : v) x /= n;
}

// Dot product of unit vectors. Symmetric bit-for-bit: the products are
// commutative and are summed in index order.
inline double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionMismatch(a.size(), b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double cosine(const Embedding& a, const Embedding& b) { return cosine(a.values, b.values); }

// Character-trigram feature hashing. Texts shorter than three bytes hash as
// a single feature. Counts accumulate as integers so the result does not
// depend on summation order; normalization happens once at the end.
inline Embedding hash_embed(std::string_view text, std::size_t dim = kDefaultDim) {
  if (text.empty()) throw EmptyInput();
  if (dim == 0) throw InvalidArgument("embedding dimension must be positive");
  for (unsigned char c : text)
    if (c >= 0x80) throw InvalidArgument("hash_embed expects ASCII text");
  std::vector<std::int64_t> acc(dim, 0);
  auto add = [&](std::string_view t) {
    const std::uint64_t h = detail::fnv1a_seeded(0x00, t);
    const std::uint64_t s = detail::fnv1a_seeded(0x01, t);
    acc[h % dim] += (s & 1u) ? -1 : 1;
  };
  if (text.size() < 3) {
    add(text);
  } else {
    for (std::size_t i = 0; i + 3 <= text.size(); ++i) add(text.substr(i, 3));
  }
  Embedding e;
  e.provider_id = "hash-trigram";
  e.values.assign(acc.begin(), acc.end());
  // Every trigram cancelled out: fall back to the whole-text feature.
  if (norm(e.values) == 0.0) e.values[detail::fnv1a_seeded(0x00, text) % dim] = 1.0;
  normalize(e.values);
  return e;
}

class HashEmbedder : public EmbeddingProvider {
 public:
  explicit HashEmbedder(std::size_t dim = kDefaultDim) : dim_(dim) {}
  std::string id() const override { return "hash-trigram"; }
  std::size_t dim() const override { return dim_; }
  std::vector<Embedding> embed_batch(std::span<const std::string> texts) override {
    std::vector<Embedding> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(hash_embed(t, dim_));
    return out;
  }

 private:
  std::size_t dim_;
};

struct RemoteEmbedderOptions {
  std::string url;
  std::string token;
  std::size_t dim = kDefaultDim;
  RetryPolicy retry;
  std::chrono::milliseconds timeout{30000};
};

// Batched HTTP provider: POST a JSON array of strings, receive a JSON array
// of float arrays in the same order.
class RemoteEmbedder : public EmbeddingProvider {
 public:
  RemoteEmbedder(std::shared_ptr<Transport> transport, RemoteEmbedderOptions options,
                 Sleeper sleep = real_sleeper())
      : transport_(std::move(transport)), options_(std::move(options)), sleep_(std::move(sleep)) {}

  std::string id() const override { return "remote:" + options_.url; }
  std::size_t dim() const override { return options_.dim; }

  std::vector<Embedding> embed_batch(std::span<const std::string> texts) override {
    if (texts.empty()) return {};
    HttpRequest req;
    req.url = options_.url;
    req.timeout = options_.timeout;
    req.body = nlohmann::json(std::vector<std::string>(texts.begin(), texts.end())).dump();
    req.headers.emplace_back("Content-Type", "application/json");
    if (!options_.token.empty()) req.headers.emplace_back("Authorization", "Bearer " + options_.token);
    auto outcome = post_with_retries(*transport_, req, options_.retry, sleep_);
    nlohmann::json body;
    try {
      body = nlohmann::json::parse(outcome.response.body);
    } catch (const nlohmann::json::exception&) {
      throw ProviderError(outcome.response.status, "response is not JSON: " + excerpt(outcome.response.body));
    }
    if (!body.is_array() || body.size() != texts.size())
      throw ProviderError(outcome.response.status, "expected " + std::to_string(texts.size()) + " vectors");
    std::vector<Embedding> out;
    out.reserve(texts.size());
    for (const auto& row : body) {
      Embedding e;
      e.provider_id = id();
      try {
        e.values = row.get<std::vector<double>>();
      } catch (const nlohmann::json::exception&) {
        throw ProviderError(outcome.response.status, "vector is not an array of numbers");
      }
      if (e.values.size() != options_.dim) throw DimensionMismatch(e.values.size(), options_.dim);
      normalize(e.values);
      out.push_back(std::move(e));
    }
    return out;
  }

 private:
  std::shared_ptr<Transport> transport_;
  RemoteEmbedderOptions options_;
  Sleeper sleep_;
};

}  // namespace stellar

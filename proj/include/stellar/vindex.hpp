#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <boost/crc.hpp>

#include "stellar/detail/random.hpp"
#include "stellar/embed.hpp"
#include "stellar/error.hpp"
#include "stellar/fingerprint.hpp"

namespace stellar {

struct IndexEntry {
  std::string id;
  Embedding vector;
  ContextTag context_tag = ContextTag::Comb;
};

struct SearchHit {
  std::string id;
  double score = 0.0;  // cosine, minus the tag penalty when it applies
  std::size_t rank = 0;
};

struct SearchOptions {
  std::optional<ContextTag> context_tag;
  double tag_penalty = 2.0;
};

inline constexpr std::uint32_t kIndexFormatVersion = 1;
inline constexpr std::string_view kIndexMagic = "STLRIDX1";

using Crc32c = boost::crc_optimal<32, 0x1EDC6F41, 0xFFFFFFFF, 0xFFFFFFFF, true, true>;

inline std::uint32_t crc32c(std::span<const unsigned char> bytes) {
  Crc32c crc;
  crc.process_bytes(bytes.data(), bytes.size());
  return crc.checksum();
}

namespace detail {

inline double l2_sq(const float* a, const double* b, std::size_t dim) {
  double s = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    const double d = static_cast<double>(a[i]) - b[i];
    s += d * d;
  }
  return s;
}

inline bool hit_before(const SearchHit& a, const SearchHit& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.id < b.id;
}

inline void finish_hits(std::vector<SearchHit>& hits, std::size_t k) {
  k = std::min(k, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(k), hits.end(), hit_before);
  hits.resize(k);
  for (std::size_t i = 0; i < hits.size(); ++i) hits[i].rank = i + 1;
}

class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<unsigned char>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<unsigned char>(v >> (8 * i)));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    buf_.insert(buf_.end(), s.begin(), s.end());
  }
  void raw(std::string_view s) { buf_.insert(buf_.end(), s.begin(), s.end()); }
  std::vector<unsigned char>& bytes() { return buf_; }

 private:
  std::vector<unsigned char> buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const unsigned char> bytes) : bytes_(bytes) {}

  std::span<const unsigned char> take(std::size_t n) {
    if (n > bytes_.size() - pos_) throw CorruptIndex("truncated file");
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint8_t u8() { return take(1)[0]; }
  std::uint32_t u32() {
    auto s = take(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{s[i]} << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    auto s = take(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{s[i]} << (8 * i);
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    auto s = take(u32());
    return {s.begin(), s.end()};
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const unsigned char> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace detail

// Immutable after build. Vectors are held as float32, the on-disk precision,
// so a loaded index scores exactly like the one that was persisted.
class Index {
 public:
  static Index build_exact(std::span<const IndexEntry> entries) {
    Index idx;
    idx.fill(entries);
    return idx;
  }

  // Inverted-file index: k-means++ seeding, at most 25 Lloyd iterations.
  static Index build_approx(std::span<const IndexEntry> entries, std::size_t nlist,
                            std::uint64_t seed) {
    if (nlist == 0 || nlist > entries.size())
      throw InvalidArgument("nlist must be in [1, entry count]");
    Index idx;
    idx.fill(entries);
    idx.seed_ = seed;
    idx.kmeans(nlist);
    return idx;
  }

  std::size_t size() const { return ids_.size(); }
  std::size_t dim() const { return dim_; }
  std::size_t nlist() const { return centroids_.size() / std::max<std::size_t>(dim_, 1); }
  std::uint64_t seed() const { return seed_; }
  const std::string& provider_id() const { return provider_id_; }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::vector<std::uint32_t>& assignments() const { return assign_; }

  std::vector<SearchHit> search_exact(const Embedding& query, std::size_t k,
                                      const SearchOptions& opts = {}) const {
    check_query(query, k);
    std::vector<SearchHit> hits;
    hits.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) hits.push_back(score(i, query, opts));
    detail::finish_hits(hits, k);
    return hits;
  }

  std::vector<SearchHit> search_approx(const Embedding& query, std::size_t k, std::size_t nprobe,
                                       const SearchOptions& opts = {}) const {
    check_query(query, k);
    const std::size_t n = nlist();
    if (n == 0) throw InvalidArgument("index was built without clusters");
    if (nprobe < 1 || nprobe > n) throw InvalidArgument("nprobe must be in [1, nlist]");
    std::vector<std::pair<double, std::uint32_t>> cells(n);
    for (std::size_t c = 0; c < n; ++c) {
      double d = 0.0;
      for (std::size_t j = 0; j < dim_; ++j) {
        const double t = query.values[j] - centroids_[c * dim_ + j];
        d += t * t;
      }
      cells[c] = {d, static_cast<std::uint32_t>(c)};
    }
    std::partial_sort(cells.begin(), cells.begin() + static_cast<std::ptrdiff_t>(nprobe), cells.end());
    std::vector<SearchHit> hits;
    for (std::size_t p = 0; p < nprobe; ++p)
      for (std::uint32_t i : lists_[cells[p].second]) hits.push_back(score(i, query, opts));
    detail::finish_hits(hits, k);
    return hits;
  }

  void persist(const std::filesystem::path& path) const {
    detail::ByteWriter w;
    w.raw(kIndexMagic);
    w.u32(kIndexFormatVersion);
    w.u32(static_cast<std::uint32_t>(dim_));
    w.u64(size());
    w.u32(static_cast<std::uint32_t>(nlist()));
    w.u64(seed_);
    w.str(provider_id_);
    for (float v : vectors_) w.f32(v);
    for (const auto& id : ids_) w.str(id);
    for (auto t : tags_) w.u8(static_cast<std::uint8_t>(t));
    for (double c : centroids_) w.f64(c);
    for (auto a : assign_) w.u32(a);
    const std::uint32_t crc = crc32c(w.bytes());
    w.u32(crc);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(w.bytes().data()), static_cast<std::streamsize>(w.bytes().size()));
    if (!out) throw InvalidArgument("write to " + path.string() + " failed");
  }

  static Index load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_bytes(bytes);
  }

  static Index from_bytes(std::span<const unsigned char> bytes) {
    if (bytes.size() < kIndexMagic.size() + 4) throw CorruptIndex("truncated header");
    if (!std::equal(kIndexMagic.begin(), kIndexMagic.end(), bytes.begin())) throw CorruptIndex("bad magic");
    detail::ByteReader header(bytes.subspan(kIndexMagic.size(), 4));
    const std::uint32_t version = header.u32();
    if (version != kIndexFormatVersion) throw VersionMismatch(version, kIndexFormatVersion);
    if (bytes.size() < kIndexMagic.size() + 8) throw CorruptIndex("truncated file");
    const auto body = bytes.first(bytes.size() - 4);
    detail::ByteReader tail(bytes.last(4));
    if (crc32c(body) != tail.u32()) throw CorruptIndex("checksum mismatch");

    detail::ByteReader r(body);
    r.take(kIndexMagic.size() + 4);
    Index idx;
    idx.dim_ = r.u32();
    const std::uint64_t count = r.u64();
    const std::uint32_t nlist = r.u32();
    idx.seed_ = r.u64();
    idx.provider_id_ = r.str();
    if (idx.dim_ == 0 || count > r.remaining() / (4 * idx.dim_)) throw CorruptIndex("bad dimensions");
    idx.vectors_.resize(count * idx.dim_);
    for (float& v : idx.vectors_) v = r.f32();
    for (std::uint64_t i = 0; i < count; ++i) idx.ids_.push_back(r.str());
    for (std::uint64_t i = 0; i < count; ++i) {
      const auto t = r.u8();
      if (t > static_cast<std::uint8_t>(ContextTag::Comb)) throw CorruptIndex("bad context tag");
      idx.tags_.push_back(static_cast<ContextTag>(t));
    }
    if (nlist > count) throw CorruptIndex("bad cluster count");
    idx.centroids_.resize(std::size_t{nlist} * idx.dim_);
    for (double& c : idx.centroids_) c = r.f64();
    if (nlist > 0) {
      idx.assign_.resize(count);
      for (auto& a : idx.assign_) {
        a = r.u32();
        if (a >= nlist) throw CorruptIndex("bad cluster assignment");
      }
    }
    if (r.remaining() != 0) throw CorruptIndex("trailing bytes");
    idx.finish_load(nlist);
    return idx;
  }

 private:
  void fill(std::span<const IndexEntry> entries) {
    if (entries.empty()) throw EmptyIndex();
    dim_ = entries.front().vector.dim();
    provider_id_ = entries.front().vector.provider_id;
    std::unordered_set<std::string> seen;
    vectors_.reserve(entries.size() * dim_);
    for (const auto& e : entries) {
      if (e.vector.dim() != dim_) throw DimensionMismatch(e.vector.dim(), dim_);
      if (!seen.insert(e.id).second) throw InvalidArgument("duplicate index id '" + e.id + "'");
      ids_.push_back(e.id);
      tags_.push_back(e.context_tag);
      for (double v : e.vector.values) vectors_.push_back(static_cast<float>(v));
    }
    compute_norms();
  }

  void compute_norms() {
    norms_.resize(size());
    for (std::size_t i = 0; i < size(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < dim_; ++j) s += double(vectors_[i * dim_ + j]) * vectors_[i * dim_ + j];
      norms_[i] = std::sqrt(s);
    }
  }

  void finish_load(std::size_t nlist) {
    compute_norms();
    lists_.assign(nlist, {});
    for (std::size_t i = 0; i < assign_.size(); ++i) lists_[assign_[i]].push_back(static_cast<std::uint32_t>(i));
  }

  void check_query(const Embedding& q, std::size_t k) const {
    if (size() == 0) throw EmptyIndex();
    if (k == 0) throw InvalidArgument("k must be at least 1");
    if (q.dim() != dim_) throw DimensionMismatch(q.dim(), dim_);
  }

  SearchHit score(std::size_t i, const Embedding& q, const SearchOptions& opts) const {
    const float* v = &vectors_[i * dim_];
    double dot = 0.0, qq = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) {
      dot += q.values[j] * v[j];
      qq += q.values[j] * q.values[j];
    }
    const double denom = std::sqrt(qq) * norms_[i];
    double s = denom > 0.0 ? dot / denom : 0.0;
    if (opts.context_tag && *opts.context_tag != tags_[i]) s -= opts.tag_penalty;
    return {ids_[i], s, 0};
  }

  void kmeans(std::size_t nlist) {
    const std::size_t n = size();
    detail::Rng rng(seed_);
    centroids_.assign(nlist * dim_, 0.0);
    auto set_centroid = [&](std::size_t c, std::size_t point) {
      for (std::size_t j = 0; j < dim_; ++j) centroids_[c * dim_ + j] = vectors_[point * dim_ + j];
    };

    // k-means++ seeding
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    set_centroid(0, rng.below(n));
    for (std::size_t c = 1; c < nlist; ++c) {
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        d2[i] = std::min(d2[i], detail::l2_sq(&vectors_[i * dim_], &centroids_[(c - 1) * dim_], dim_));
        total += d2[i];
      }
      std::size_t pick = n - 1;
      if (total > 0.0) {
        double target = rng.uniform() * total;
        for (std::size_t i = 0; i < n; ++i) {
          target -= d2[i];
          if (target < 0.0) {
            pick = i;
            break;
          }
        }
      } else {
        pick = rng.below(n);
      }
      set_centroid(c, pick);
    }

    assign_.assign(n, 0);
    std::vector<double> dist(n, 0.0);
    for (int iter = 0; iter < 25; ++iter) {
      bool changed = iter == 0;
      for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < nlist; ++c) {
          const double d = detail::l2_sq(&vectors_[i * dim_], &centroids_[c * dim_], dim_);
          if (d < best_d) {
            best_d = d;
            best = static_cast<std::uint32_t>(c);
          }
        }
        if (assign_[i] != best) changed = true;
        assign_[i] = best;
        dist[i] = best_d;
      }
      repair_empty(nlist, dist);
      recompute_centroids(nlist);
      if (!changed) break;
    }
    lists_.assign(nlist, {});
    for (std::size_t i = 0; i < n; ++i) lists_[assign_[i]].push_back(static_cast<std::uint32_t>(i));
  }

  // An empty cell takes the point farthest from its centroid in the largest cell.
  void repair_empty(std::size_t nlist, std::vector<double>& dist) {
    for (;;) {
      std::vector<std::size_t> counts(nlist, 0);
      for (auto a : assign_) ++counts[a];
      const auto empty = std::find(counts.begin(), counts.end(), 0u);
      if (empty == counts.end()) return;
      const auto largest = static_cast<std::uint32_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < assign_.size(); ++i)
        if (assign_[i] == largest && dist[i] > far_d) {
          far_d = dist[i];
          far = i;
        }
      const auto target = static_cast<std::size_t>(empty - counts.begin());
      assign_[far] = static_cast<std::uint32_t>(target);
      dist[far] = 0.0;
      for (std::size_t j = 0; j < dim_; ++j) centroids_[target * dim_ + j] = vectors_[far * dim_ + j];
    }
  }

  void recompute_centroids(std::size_t nlist) {
    std::vector<double> sum(nlist * dim_, 0.0);
    std::vector<std::size_t> counts(nlist, 0);
    for (std::size_t i = 0; i < assign_.size(); ++i) {
      ++counts[assign_[i]];
      for (std::size_t j = 0; j < dim_; ++j) sum[assign_[i] * dim_ + j] += vectors_[i * dim_ + j];
    }
    for (std::size_t c = 0; c < nlist; ++c)
      if (counts[c] > 0)
        for (std::size_t j = 0; j < dim_; ++j) centroids_[c * dim_ + j] = sum[c * dim_ + j] / double(counts[c]);
  }

  std::size_t dim_ = 0;
  std::uint64_t seed_ = 0;
  std::string provider_id_;
  std::vector<float> vectors_;
  std::vector<double> norms_;
  std::vector<std::string> ids_;
  std::vector<ContextTag> tags_;
  std::vector<double> centroids_;
  std::vector<std::uint32_t> assign_;
  std::vector<std::vector<std::uint32_t>> lists_;
};

inline Index build_exact(std::span<const IndexEntry> entries) { return Index::build_exact(entries); }
inline Index build_approx(std::span<const IndexEntry> entries, std::size_t nlist, std::uint64_t seed) {
  return Index::build_approx(entries, nlist, seed);
}

struct RawHit {
  std::size_t index = 0;
  bool exact = false;
  std::size_t distance = 0;  // Levenshtein distance to the query
  std::size_t rank = 0;
};

// Character-level edit distance, two-row dynamic programme.
inline std::size_t edit_distance(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

// Linear scan over raw fingerprint strings with no embedding: verbatim
// matches first, then ascending edit distance, ties by corpus position.
inline std::vector<RawHit> search_rawstring(std::span<const std::string> corpus,
                                            std::string_view query, std::size_t k) {
  if (corpus.empty()) throw EmptyIndex();
  if (k == 0) throw InvalidArgument("k must be at least 1");
  std::vector<RawHit> hits;
  hits.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const std::size_t d = edit_distance(corpus[i], query);
    hits.push_back({i, d == 0, d, 0});
  }
  k = std::min(k, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(k), hits.end(),
                    [](const RawHit& x, const RawHit& y) {
                      if (x.distance != y.distance) return x.distance < y.distance;
                      return x.index < y.index;
                    });
  hits.resize(k);
  for (std::size_t i = 0; i < k; ++i) hits[i].rank = i + 1;
  return hits;
}

}  // namespace stellar

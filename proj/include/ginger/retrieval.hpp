#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "ginger/core.hpp"

namespace ginger {

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

/// In-memory inverted index for BM25. Immutable once built; concurrent
/// searches are safe.
class SparseIndex {
 public:
  struct Posting {
    std::uint32_t doc = 0;
    std::uint32_t tf = 0;
  };

  SparseIndex() = default;

  /// Throws DuplicatePassageId.
  static SparseIndex build(std::span<const Passage> passages);

  std::size_t doc_count() const noexcept { return doc_ids_.size(); }
  double avg_doc_length() const noexcept { return avg_doc_length_; }
  const std::vector<std::string>& doc_ids() const noexcept { return doc_ids_; }
  std::uint32_t doc_length(std::size_t doc) const { return doc_lengths_.at(doc); }
  /// Empty span for unknown terms.
  std::span<const Posting> postings(std::string_view term) const;
  std::size_t term_count() const noexcept { return postings_.size(); }

  /// Postings snapshot: {"doc_ids", "doc_lengths", "postings": {term: [[doc, tf], ...]}}.
  nlohmann::json to_json() const;
  static SparseIndex from_json(const nlohmann::json& j);

 private:
  void finish();

  std::vector<std::string> doc_ids_;
  std::vector<std::uint32_t> doc_lengths_;
  std::unordered_map<std::string, std::vector<Posting>> postings_;
  double avg_doc_length_ = 0.0;
};

SparseIndex index_corpus(std::span<const Passage> passages);

/// BM25 idf term as used by Lucene/OpenSearch: ln(1 + (N - df + 0.5) / (df + 0.5)).
double bm25_idf(std::size_t doc_count, std::size_t doc_freq);

/// Top-n by BM25. Every query token counts, so repeated terms weigh more.
RankedList sparse_search(const SparseIndex& index, std::string_view query_text, std::size_t n,
                         std::string query_id = {}, Bm25Params params = {});

/// Dense text encoder. Deterministic, fixed dimension, thread-safe.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::size_t dimension() const = 0;
  virtual std::vector<float> embed(std::string_view text) const = 0;
};

/// Signed feature hashing of the tokenizer output, L2-normalized. Stands in
/// for a neural encoder offline.
class HashingEmbedder : public EmbeddingProvider {
 public:
  explicit HashingEmbedder(std::size_t dimension = 256);
  std::size_t dimension() const override { return dimension_; }
  std::vector<float> embed(std::string_view text) const override;

 private:
  std::size_t dimension_;
};

struct CorpusVectors {
  std::vector<std::string> ids;
  std::vector<std::vector<float>> vectors;
  std::size_t dimension = 0;
};

CorpusVectors embed_corpus(const EmbeddingProvider& provider, std::span<const Passage> passages);

/// 0 when either vector is all zeros. Throws DimensionMismatch.
double cosine_similarity(std::span<const float> a, std::span<const float> b);

/// Exact top-n by cosine similarity. Throws DimensionMismatch.
RankedList dense_search(const EmbeddingProvider& provider, const CorpusVectors& corpus,
                        std::string_view query_text, std::size_t n, std::string query_id = {});

struct FusionInput {
  std::vector<RankedList> lists;
  double rrf_k = 60.0;
};

/// score(d) = sum over lists containing d of 1 / (rrf_k + rank), rank from 1.
/// Contributions are summed in ascending rank order so the result does not
/// depend on the order of the input lists. Throws QueryIdMismatch.
RankedList rrf_fuse(const FusionInput& input, std::size_t n);

}  // namespace ginger

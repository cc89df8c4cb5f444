#include "ginger/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ginger/error.hpp"
#include "ginger/text.hpp"

namespace ginger {

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

RankedList top_n(std::string query_id, std::vector<RankedEntry> entries, std::size_t n) {
  if (entries.size() > n) {
    std::partial_sort(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(n),
                      entries.end(), ranks_before);
    entries.resize(n);
  }
  return RankedList(std::move(query_id), std::move(entries));
}

}  // namespace

SparseIndex SparseIndex::build(std::span<const Passage> passages) {
  SparseIndex index;
  std::unordered_map<std::string_view, int> seen;
  index.doc_ids_.reserve(passages.size());
  index.doc_lengths_.reserve(passages.size());
  for (const auto& p : passages) {
    if (!seen.emplace(p.id, 0).second) throw Error(ErrorKind::DuplicatePassageId, p.id);
    const auto doc = static_cast<std::uint32_t>(index.doc_ids_.size());
    const auto tokens = text::tokenize(p.text);
    std::map<std::string_view, std::uint32_t> tf;
    for (const auto& t : tokens) ++tf[t];
    for (const auto& [term, count] : tf) {
      index.postings_[std::string(term)].push_back({doc, count});
    }
    index.doc_ids_.push_back(p.id);
    index.doc_lengths_.push_back(static_cast<std::uint32_t>(tokens.size()));
  }
  index.finish();
  return index;
}

void SparseIndex::finish() {
  double total = 0;
  for (auto len : doc_lengths_) total += len;
  avg_doc_length_ = doc_lengths_.empty() ? 0.0 : total / static_cast<double>(doc_lengths_.size());
}

std::span<const SparseIndex::Posting> SparseIndex::postings(std::string_view term) const {
  auto it = postings_.find(std::string(term));
  if (it == postings_.end()) return {};
  return it->second;
}

nlohmann::json SparseIndex::to_json() const {
  nlohmann::json postings = nlohmann::json::object();
  std::vector<std::string_view> terms;
  terms.reserve(postings_.size());
  for (const auto& [term, list] : postings_) terms.push_back(term);
  std::sort(terms.begin(), terms.end());
  for (auto term : terms) {
    auto& arr = postings[std::string(term)] = nlohmann::json::array();
    for (const auto& p : postings_.at(std::string(term))) arr.push_back({p.doc, p.tf});
  }
  return {{"doc_ids", doc_ids_}, {"doc_lengths", doc_lengths_}, {"postings", std::move(postings)}};
}

SparseIndex SparseIndex::from_json(const nlohmann::json& j) {
  SparseIndex index;
  try {
    index.doc_ids_ = j.at("doc_ids").get<std::vector<std::string>>();
    index.doc_lengths_ = j.at("doc_lengths").get<std::vector<std::uint32_t>>();
    if (index.doc_ids_.size() != index.doc_lengths_.size()) {
      throw Error(ErrorKind::Parse, "index snapshot: doc_ids and doc_lengths differ in size");
    }
    for (const auto& [term, arr] : j.at("postings").items()) {
      auto& list = index.postings_[term];
      for (const auto& p : arr) {
        const auto doc = p.at(0).get<std::uint32_t>();
        if (doc >= index.doc_ids_.size()) {
          throw Error(ErrorKind::Parse, "index snapshot: posting for unknown doc in '" + term + "'");
        }
        list.push_back({doc, p.at(1).get<std::uint32_t>()});
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("index snapshot: ") + e.what());
  }
  std::unordered_map<std::string_view, int> seen;
  for (const auto& id : index.doc_ids_) {
    if (!seen.emplace(id, 0).second) throw Error(ErrorKind::DuplicatePassageId, id);
  }
  index.finish();
  return index;
}

SparseIndex index_corpus(std::span<const Passage> passages) { return SparseIndex::build(passages); }

double bm25_idf(std::size_t doc_count, std::size_t doc_freq) {
  const double n = static_cast<double>(doc_count);
  const double df = static_cast<double>(doc_freq);
  return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

RankedList sparse_search(const SparseIndex& index, std::string_view query_text, std::size_t n,
                         std::string query_id, Bm25Params params) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "n must be ≥ 1");
  std::vector<double> scores(index.doc_count(), 0.0);
  std::vector<char> touched(index.doc_count(), 0);
  const double avgdl = index.avg_doc_length();
  for (const auto& term : text::tokenize(query_text)) {
    const auto postings = index.postings(term);
    if (postings.empty()) continue;
    const double idf = bm25_idf(index.doc_count(), postings.size());
    for (const auto& p : postings) {
      const double tf = p.tf;
      const double norm =
          avgdl > 0 ? 1.0 - params.b + params.b * index.doc_length(p.doc) / avgdl : 1.0;
      scores[p.doc] += idf * tf * (params.k1 + 1.0) / (tf + params.k1 * norm);
      touched[p.doc] = 1;
    }
  }
  std::vector<RankedEntry> entries;
  for (std::size_t d = 0; d < scores.size(); ++d) {
    if (touched[d]) entries.push_back({index.doc_ids()[d], scores[d]});
  }
  return top_n(std::move(query_id), std::move(entries), n);
}

HashingEmbedder::HashingEmbedder(std::size_t dimension) : dimension_(dimension) {
  if (dimension == 0) throw Error(ErrorKind::InvalidArgument, "embedding dimension must be ≥ 1");
}

std::vector<float> HashingEmbedder::embed(std::string_view text) const {
  std::vector<double> acc(dimension_, 0.0);
  for (const auto& token : text::tokenize(text)) {
    const auto h = fnv1a(token);
    acc[h % dimension_] += (h >> 63) ? -1.0 : 1.0;
  }
  double norm = 0;
  for (double v : acc) norm += v * v;
  norm = std::sqrt(norm);
  std::vector<float> out(dimension_, 0.0F);
  if (norm > 0) {
    for (std::size_t i = 0; i < dimension_; ++i) out[i] = static_cast<float>(acc[i] / norm);
  }
  return out;
}

CorpusVectors embed_corpus(const EmbeddingProvider& provider, std::span<const Passage> passages) {
  CorpusVectors out;
  out.dimension = provider.dimension();
  out.ids.reserve(passages.size());
  out.vectors.reserve(passages.size());
  for (const auto& p : passages) {
    auto v = provider.embed(p.text);
    if (v.size() != out.dimension) {
      throw Error(ErrorKind::DimensionMismatch, "embedding of '" + p.id + "'");
    }
    out.ids.push_back(p.id);
    out.vectors.push_back(std::move(v));
  }
  return out;
}

double cosine_similarity(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::DimensionMismatch,
                std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  if (na == 0 || nb == 0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

RankedList dense_search(const EmbeddingProvider& provider, const CorpusVectors& corpus,
                        std::string_view query_text, std::size_t n, std::string query_id) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "n must be ≥ 1");
  const auto q = provider.embed(query_text);
  if (q.size() != corpus.dimension) {
    throw Error(ErrorKind::DimensionMismatch, "query vector has dimension " +
                                                  std::to_string(q.size()) + ", corpus " +
                                                  std::to_string(corpus.dimension));
  }
  std::vector<RankedEntry> entries;
  entries.reserve(corpus.ids.size());
  for (std::size_t i = 0; i < corpus.ids.size(); ++i) {
    entries.push_back({corpus.ids[i], cosine_similarity(q, corpus.vectors[i])});
  }
  return top_n(std::move(query_id), std::move(entries), n);
}

RankedList rrf_fuse(const FusionInput& input, std::size_t n) {
  if (input.lists.empty()) throw Error(ErrorKind::InvalidArgument, "nothing to fuse");
  if (!(input.rrf_k > 0)) throw Error(ErrorKind::InvalidArgument, "rrf_k must be > 0");
  const std::string& qid = input.lists.front().query_id();
  std::unordered_map<std::string_view, std::vector<std::size_t>> ranks;
  for (const auto& list : input.lists) {
    if (list.query_id() != qid) {
      throw Error(ErrorKind::QueryIdMismatch, "'" + list.query_id() + "' vs '" + qid + "'");
    }
    for (std::size_t i = 0; i < list.size(); ++i) ranks[list[i].passage_id].push_back(i + 1);
  }
  std::vector<RankedEntry> entries;
  entries.reserve(ranks.size());
  for (auto& [id, rs] : ranks) {
    std::sort(rs.begin(), rs.end());
    double score = 0;
    for (auto r : rs) score += 1.0 / (input.rrf_k + static_cast<double>(r));
    entries.push_back({std::string(id), score});
  }
  return top_n(qid, std::move(entries), n);
}

}  // namespace ginger
